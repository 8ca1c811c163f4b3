//! Job configuration, orchestration and report rendering.

use std::fmt::Write as _;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::coleman::DiscCertificate;
use crate::curve::{is_prime, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::field::Poly;
use crate::jacobian::{Mumford, RationalDivisor};
use crate::padic::PadicDigits;
use crate::sieve::{
    self, Budgets, FoundPoint, SieveContext, Status, TorsionGenerator, TraceStep, HYPOTHESES,
};

pub const REPORT_SCHEMA: &str = "chabauty-run-report/1";

/// A coefficient given as a JSON integer or as a string such as `"-3/4"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

impl Coeff {
    fn to_rational(&self) -> Option<BigRational> {
        match self {
            Coeff::Int(n) => Some(BigRational::from_integer((*n).into())),
            Coeff::Text(s) => s.trim().parse().ok(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorConfig {
    pub u_coeffs: Vec<Coeff>,
    pub v_coeffs: Vec<Coeff>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsionConfig {
    pub u_coeffs: Vec<Coeff>,
    pub v_coeffs: Vec<Coeff>,
    pub order: u64,
}

fn yes() -> bool {
    true
}

/// Assumptions the user vouches for; both must hold for the method to apply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assumptions {
    #[serde(default = "yes")]
    pub rank_one: bool,
    #[serde(default = "yes")]
    pub simple_jacobian: bool,
}

impl Default for Assumptions {
    fn default() -> Self {
        Assumptions { rank_one: true, simple_jacobian: true }
    }
}

fn default_precision() -> u32 {
    20
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// `f = c0 + c1 x + ... + c5 x^5`, lowest degree first.
    pub f_coeffs: Vec<i64>,
    pub chabauty_prime: u64,
    pub aux_primes: Vec<u64>,
    pub generator: DivisorConfig,
    #[serde(default)]
    pub torsion: Vec<TorsionConfig>,
    pub search_bound: u64,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub assumptions: Assumptions,
}

fn divisor(field: &str, u: &[Coeff], v: &[Coeff]) -> Result<RationalDivisor> {
    let conv = |cs: &[Coeff], which: &str| -> Result<Poly<BigRational>> {
        cs.iter()
            .enumerate()
            .map(|(i, c)| {
                c.to_rational()
                    .ok_or_else(|| Error::config(format!("{field}.{which}[{i}]"), "not an integer or rational"))
            })
            .collect::<Result<Vec<_>>>()
            .map(Poly::new)
    };
    let u = conv(u, "u_coeffs")?;
    let v = conv(v, "v_coeffs")?;
    if u.is_zero() || !u.lead().is_some_and(|l| l.is_one()) || u.deg() > 2 {
        return Err(Error::config(format!("{field}.u_coeffs"), "u must be monic of degree at most 2"));
    }
    if v.deg() >= u.deg() {
        return Err(Error::config(format!("{field}.v_coeffs"), "deg v must be smaller than deg u"));
    }
    Ok(Mumford::new(u, v))
}

const MAX_SEARCH_BOUND: u64 = 1000;

impl JobConfig {
    pub fn curve(&self) -> Result<HyperellipticCurve> {
        let c: [i64; 6] = self
            .f_coeffs
            .clone()
            .try_into()
            .map_err(|_| Error::config("f_coeffs", "expected 6 coefficients of a quintic"))?;
        if c[5] != 1 {
            return Err(Error::config("f_coeffs", "f must be monic of degree 5"));
        }
        HyperellipticCurve::new(c).map_err(|e| Error::config("f_coeffs", e.to_string()))
    }

    /// Full validation; the returned context is what [`run_job`] executes.
    pub fn context(&self) -> Result<SieveContext> {
        let curve = self.curve()?;
        if !self.assumptions.rank_one || !self.assumptions.simple_jacobian {
            return Err(Error::config("assumptions", "the method needs rank 1 and a simple Jacobian"));
        }
        let p = self.chabauty_prime;
        if p == 2 {
            return Err(Error::config("chabauty_prime", "p = 2 is not supported; p must be at least 3"));
        }
        if !is_prime(p) {
            return Err(Error::config("chabauty_prime", format!("{p} is not prime")));
        }
        if !curve.good_reduction(p) {
            return Err(Error::config("chabauty_prime", format!("bad reduction at {p}")));
        }
        for (i, &q) in self.aux_primes.iter().enumerate() {
            let field = format!("aux_primes[{i}]");
            if !is_prime(q) || q == 2 {
                return Err(Error::config(field, format!("{q} is not an odd prime")));
            }
            if q == p {
                return Err(Error::config(field, "auxiliary primes must differ from the Chabauty prime"));
            }
            if !curve.good_reduction(q) {
                return Err(Error::config(field, format!("bad reduction at {q}")));
            }
        }
        if self.search_bound > MAX_SEARCH_BOUND {
            return Err(Error::config("search_bound", format!("at most {MAX_SEARCH_BOUND}")));
        }
        if !(4..=400).contains(&self.precision) {
            return Err(Error::config("precision", "must lie in 4..=400"));
        }
        let f = curve.f_rational();
        let gamma = divisor("generator", &self.generator.u_coeffs, &self.generator.v_coeffs)?;
        if !gamma.is_valid(&f) {
            return Err(Error::config("generator", "u does not divide v^2 - f; not a point of the Jacobian"));
        }
        let mut torsion = Vec::new();
        for (i, t) in self.torsion.iter().enumerate() {
            let field = format!("torsion[{i}]");
            let d = divisor(&field, &t.u_coeffs, &t.v_coeffs)?;
            if !d.is_valid(&f) {
                return Err(Error::config(field, "u does not divide v^2 - f; not a point of the Jacobian"));
            }
            torsion.push(TorsionGenerator { divisor: d, order: t.order });
        }
        SieveContext::new(
            curve,
            gamma,
            torsion,
            p,
            self.aux_primes.clone(),
            self.search_bound,
            self.precision,
            self.budgets,
        )
        .map_err(|e| match e {
            Error::TorsionGenerator(r) => Error::config("generator", r),
            Error::InvalidInput(r) if r.starts_with("torsion") => Error::config("torsion", r),
            Error::InvalidInput(r) => Error::config("generator", r),
            other => other,
        })
    }
}

/// Parses and validates a JSON job.
pub fn parse_config(text: &str) -> Result<JobConfig> {
    let cfg: JobConfig =
        serde_json::from_str(text).map_err(|e| Error::config("<schema>", e.to_string()))?;
    cfg.context()?;
    Ok(cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct FormRecord {
    pub c1: PadicDigits,
    pub c2: PadicDigits,
}

#[derive(Clone, Debug, Serialize)]
pub struct SieveRecord {
    pub modulus: u64,
    pub surviving: u64,
    pub level: i64,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Telemetry {
    pub elapsed_ms: u64,
    pub final_precision: u32,
    pub iterations: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub status: Status,
    pub conditional_on: Vec<&'static str>,
    pub f_coeffs: Vec<i64>,
    pub chabauty_prime: u64,
    pub points: Vec<FoundPoint>,
    pub discs: Vec<DiscCertificate>,
    pub generator_log: Option<FormRecord>,
    pub annihilating_form: Option<FormRecord>,
    pub sieve: Option<SieveRecord>,
    pub diagnostics: Vec<String>,
    pub telemetry: Telemetry,
}

impl RunReport {
    fn error(cfg: &JobConfig, e: &Error, elapsed_ms: u64) -> Self {
        RunReport {
            schema: REPORT_SCHEMA,
            status: Status::Error,
            conditional_on: HYPOTHESES.to_vec(),
            f_coeffs: cfg.f_coeffs.clone(),
            chabauty_prime: cfg.chabauty_prime,
            points: vec![],
            discs: vec![],
            generator_log: None,
            annihilating_form: None,
            sieve: None,
            diagnostics: vec![e.to_string()],
            telemetry: Telemetry { elapsed_ms, final_precision: cfg.precision, iterations: 0 },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Complete => 0,
            Status::Inconclusive => 2,
            Status::Error => 1,
        }
    }
}

/// Runs the whole pipeline. Deterministic apart from `telemetry`.
pub fn run_job(cfg: &JobConfig) -> RunReport {
    let start = Instant::now();
    let elapsed = |s: Instant| s.elapsed().as_millis() as u64;
    let ctx = match cfg.context() {
        Ok(c) => c,
        Err(e) => return RunReport::error(cfg, &e, elapsed(start)),
    };
    let out = match sieve::run(&ctx) {
        Ok(o) => o,
        Err(e) => return RunReport::error(cfg, &e, elapsed(start)),
    };
    let st = out.state;
    RunReport {
        schema: REPORT_SCHEMA,
        status: out.status,
        conditional_on: HYPOTHESES.to_vec(),
        f_coeffs: cfg.f_coeffs.clone(),
        chabauty_prime: cfg.chabauty_prime,
        points: st.found.clone(),
        discs: st.discs.clone(),
        generator_log: st.gamma_log.as_ref().map(|l| FormRecord { c1: l.l1.digits(), c2: l.l2.digits() }),
        annihilating_form: st.form.as_ref().map(|w| FormRecord { c1: w.w.c1.digits(), c2: w.w.c2.digits() }),
        sieve: Some(SieveRecord {
            modulus: st.modulus,
            surviving: st.surviving_count(),
            level: st.level,
            trace: st.trace.clone(),
        }),
        diagnostics: out.diagnostics,
        telemetry: Telemetry { elapsed_ms: elapsed(start), final_precision: st.precision, iterations: st.iteration },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

fn poly_text(c: &[i64]) -> String {
    let mut s = String::new();
    for (i, &a) in c.iter().enumerate().rev().filter(|(_, &a)| a != 0) {
        let mag = a.unsigned_abs();
        let coef = if mag == 1 && i > 0 { String::new() } else { mag.to_string() };
        let var = match i {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{i}"),
        };
        match (s.is_empty(), a < 0) {
            (true, false) => {}
            (true, true) => s.push('-'),
            (false, false) => s.push_str(" + "),
            (false, true) => s.push_str(" - "),
        }
        let _ = write!(s, "{coef}{var}");
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn point_text(fp: &FoundPoint) -> String {
    match &fp.record {
        sieve::PointRecord::Infinity => "infinity".into(),
        sieve::PointRecord::Affine { x, y } => format!("({x}, {y})"),
    }
}

fn disc_text(d: (Option<u64>, Option<u64>)) -> String {
    match d {
        (Some(x), Some(y)) => format!("({x}, {y})"),
        _ => "inf".into(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

pub fn emit_report(r: &RunReport, format: Format) -> String {
    match format {
        Format::Machine => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Human => human(r),
    }
}

fn human(r: &RunReport) -> String {
    let mut s = String::new();
    let status = match r.status {
        Status::Complete => "complete (conditional on the hypotheses below)",
        Status::Inconclusive => "inconclusive",
        Status::Error => "error",
    };
    let _ = writeln!(s, "status: {status}");
    let _ = writeln!(s, "curve: y^2 = {}", poly_text(&r.f_coeffs));
    let _ = writeln!(s, "chabauty prime: {}", r.chabauty_prime);
    if let Some(w) = &r.annihilating_form {
        let show = |d: &PadicDigits| match d.valuation {
            None => "0".to_string(),
            Some(v) => format!("{}*p^{} + O(p^{})", d.unit, v, opt(d.abs_precision)),
        };
        let _ = writeln!(s, "annihilating form: ({}) w1 + ({}) w2", show(&w.c1), show(&w.c2));
    }
    if !r.points.is_empty() {
        let _ = writeln!(s, "\npoints ({}):", r.points.len());
        let _ = writeln!(s, "  {:<14} {:>4}  {:<9} {:<8} {:>4} {:>2} {:>5}  single", "point", "s", "torsion", "disc", "v(w)", "n", "zeros");
        for fp in &r.points {
            let t: String = fp.torsion.iter().map(|e| e.to_string()).collect();
            let (disc, v, n, z, single) = match &fp.certificate {
                Some(c) => (disc_text(c.disc), opt(c.v_w), c.n.to_string(), opt(c.zero_count), if c.single_point { "yes" } else { "no" }),
                None => ("-".into(), "-".into(), "-".into(), "-".into(), "-"),
            };
            let _ = writeln!(s, "  {:<14} {:>4}  {:<9} {:<8} {:>4} {:>2} {:>5}  {}", point_text(fp), fp.s, t, disc, v, n, z, single);
        }
    }
    if !r.discs.is_empty() {
        let _ = writeln!(s, "\nresidue discs:");
        let _ = writeln!(s, "  {:<8} {:<11} {:>5} {:>5} {:>4}  status", "center", "kind", "known", "zeros", "v(w)");
        for d in &r.discs {
            let kind = format!("{:?}", d.kind).to_lowercase();
            let status = format!("{:?}", d.status).to_lowercase();
            let _ = writeln!(s, "  {:<8} {:<11} {:>5} {:>5} {:>4}  {}", disc_text(d.center), kind, d.known_points, opt(d.zero_count), opt(d.v_w), status);
        }
    }
    if let Some(sv) = &r.sieve {
        let _ = writeln!(s, "\nsieve: modulus {}, {} surviving class(es), level {}", sv.modulus, sv.surviving, sv.level);
        for t in &sv.trace {
            let step = match t.step {
                sieve::StepKind::SievePass => "pass",
                sieve::StepKind::Search => "search",
                sieve::StepKind::Deepen => "deepen",
            };
            let _ = writeln!(s, "  [{}] {:<6} {:>3} N={:<8} surviving={:<6} {}", t.iteration, step, opt(t.prime), t.modulus, t.surviving, t.note);
        }
    }
    for d in &r.diagnostics {
        let _ = writeln!(s, "note: {d}");
    }
    let _ = writeln!(s, "\nhypotheses:");
    for h in &r.conditional_on {
        let _ = writeln!(s, "  - {h}");
    }
    let _ = writeln!(
        s,
        "\nprecision {} after {} iteration(s), {} ms",
        r.telemetry.final_precision, r.telemetry.iterations, r.telemetry.elapsed_ms
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    const WORKED: &str = r#"{
        "f_coeffs": [0, 60, -112, 65, -14, 1],
        "chabauty_prime": 7,
        "aux_primes": [11, 13, 17, 23],
        "generator": {"u_coeffs": [-3, 1], "v_coeffs": [6]},
        "torsion": [
            {"u_coeffs": [0, 1], "v_coeffs": [], "order": 2},
            {"u_coeffs": [-1, 1], "v_coeffs": [], "order": 2},
            {"u_coeffs": [-2, 1], "v_coeffs": [], "order": 2},
            {"u_coeffs": [-5, 1], "v_coeffs": [], "order": 2}
        ],
        "search_bound": 20
    }"#;

    fn with(key: &str, value: serde_json::Value) -> String {
        let mut v: serde_json::Value = serde_json::from_str(WORKED).unwrap();
        v[key] = value;
        v.to_string()
    }

    fn field_of(r: Result<JobConfig>) -> String {
        match r {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn worked_config_is_accepted() {
        let cfg = parse_config(WORKED).unwrap();
        assert_eq!(cfg.precision, 20);
        assert_eq!(cfg.budgets.iterations, 10);
    }

    #[test]
    fn rejections_name_the_field() {
        assert_eq!(field_of(parse_config(&with("chabauty_prime", 2.into()))), "chabauty_prime");
        assert_eq!(field_of(parse_config(&with("f_coeffs", serde_json::json!([0, 0, 0, 0, 0, 1])))), "f_coeffs");
        assert_eq!(field_of(parse_config(&with("f_coeffs", serde_json::json!([0, 60, -112, 65, -14, 2])))), "f_coeffs");
        let off = serde_json::json!({"u_coeffs": [-3, 1], "v_coeffs": [5]});
        assert_eq!(field_of(parse_config(&with("generator", off))), "generator");
        let tors = serde_json::json!({"u_coeffs": [0, 1], "v_coeffs": []});
        assert_eq!(field_of(parse_config(&with("generator", tors))), "generator");
        assert_eq!(field_of(parse_config(&with("aux_primes", serde_json::json!([11, 3])))), "aux_primes[1]");
        assert_eq!(field_of(parse_config("{\"f_coeffs\": [1]}")), "<schema>");
    }

    #[test]
    fn zero_budget_is_inconclusive() {
        let cfg = parse_config(&with("budgets", serde_json::json!({"iterations": 0, "precision_escalations": 0}))).unwrap();
        let r = run_job(&cfg);
        assert_eq!(r.status, Status::Inconclusive);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn rational_coefficients_parse() {
        assert_eq!(Coeff::Text("-3/4".into()).to_rational(), Some(BigRational::new((-3).into(), 4.into())));
        assert!(Coeff::Text("x".into()).to_rational().is_none());
        assert!(Coeff::Int(0).to_rational().is_some_and(|q| q.is_zero()));
    }

    #[test]
    fn polynomial_text() {
        assert_eq!(poly_text(&[0, 60, -112, 65, -14, 1]), "x^5 - 14x^4 + 65x^3 - 112x^2 + 60x");
        assert_eq!(poly_text(&[-1, 0, 0, 0, 0, 1]), "x^5 - 1");
    }
}
