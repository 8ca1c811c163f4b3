//! Jacobian logarithms, tiny integrals, the annihilating form and the
//! per-disc zero counts built from them.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_rational::Ratio;
use serde::Serialize;

use crate::curve::{sqrt_ratio_series, CurvePoint, Differential, DiscKind, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::field::{Fp, Poly};
use crate::jacobian::{reduce_divisor, scalar_mul, FpJacobian, Mumford, RationalDivisor};
use crate::padic::{
    hensel_root, newton_polygon, Padic, PadicPowerSeries, SeriesDigits, TailBound, DEFAULT_PRECISION, EXACT,
};

/// Coordinates of a logarithm against `omega_1 = dx/(2y)`, `omega_2 = x dx/(2y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogVector {
    pub l1: Padic,
    pub l2: Padic,
}

impl LogVector {
    pub fn zero(p: u64) -> Self {
        LogVector { l1: Padic::exact_zero(p), l2: Padic::exact_zero(p) }
    }

    pub fn add(&self, o: &Self) -> Self {
        LogVector { l1: self.l1.add(&o.l1), l2: self.l2.add(&o.l2) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        LogVector { l1: self.l1.sub(&o.l1), l2: self.l2.sub(&o.l2) }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        LogVector { l1: self.l1.mul_int(k), l2: self.l2.mul_int(k) }
    }

    pub fn div_int(&self, k: i64) -> Result<Self> {
        Ok(LogVector { l1: self.l1.div_int(k)?, l2: self.l2.div_int(k)? })
    }

    /// Agreement on every digit both sides claim.
    pub fn agrees(&self, o: &Self) -> bool {
        self.l1.agrees(&o.l1) && self.l2.agrees(&o.l2)
    }

    /// `min(v(l1), v(l2))`, using precision as the bound for zero entries.
    pub fn valuation_lower_bound(&self) -> i64 {
        self.l1.valuation_lower_bound().min(self.l2.valuation_lower_bound())
    }

    pub fn abs_prec(&self) -> i64 {
        self.l1.abs_prec().min(self.l2.abs_prec())
    }

    pub fn is_zero(&self) -> bool {
        self.l1.is_zero() && self.l2.is_zero()
    }
}

/// `w` with `w(log gamma) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilatingForm {
    pub w: Differential,
    pub annihilates: LogVector,
}

impl AnnihilatingForm {
    pub fn pairing(&self, l: &LogVector) -> Padic {
        pairing(&self.w, l)
    }
}

pub fn pairing(w: &Differential, l: &LogVector) -> Padic {
    w.c1.mul(&l.l1).add(&w.c2.mul(&l.l2))
}

/// `(l2, -l1)` scaled to content 1.
pub fn annihilating_form(gamma_log: &LogVector) -> Result<AnnihilatingForm> {
    if gamma_log.is_zero() {
        return Err(Error::TorsionGenerator(
            "logarithm of the generator vanishes at working precision".into(),
        ));
    }
    let w = Differential::new(gamma_log.l2.clone(), gamma_log.l1.neg())?;
    Ok(AnnihilatingForm { w, annihilates: gamma_log.clone() })
}

/// Lower bound, in whole units, on the omitted part of `sum c_m z^m` when the
/// coefficients obey `tail` beyond `order` and `v(z) >= mu_half / 2`.
fn truncation_bound(tail: Option<TailBound>, order: usize, p: u64, mu_half: i64) -> Result<i64> {
    let t = tail.ok_or_else(|| Error::InconclusiveTruncation("series without a tail bound".into()))?;
    if t.offset >= EXACT {
        return Ok(EXACT);
    }
    let scaled = TailBound {
        offset: 2 * t.offset,
        slope: 2 * t.slope + mu_half.min(EXACT / 8),
        log_loss: 2 * t.log_loss,
    };
    scaled
        .min_beyond(order, p)
        .map(|b| b.div_euclid(2))
        .ok_or_else(|| Error::InconclusiveTruncation("series does not converge at the divisor points".into()))
}

/// Half-unit lower bound on the valuations of the roots of
/// `X^2 - e1 X + e2`.
fn root_valuation_half(e1: &Padic, e2: &Padic) -> i64 {
    (2 * e1.valuation_lower_bound()).min(e2.valuation_lower_bound())
}

/// `sum_m c_m p_m` with `p_m = z1^m + z2^m`, `e1 = z1 + z2`, `e2 = z1 z2`.
fn power_sum_pairing(series: &PadicPowerSeries, e1: &Padic, e2: &Padic) -> Result<Padic> {
    let p = series.prime();
    let mu = root_valuation_half(e1, e2);
    if mu <= 0 {
        return Err(Error::DecompositionFailure(
            "divisor points are not in the expected residue disc".into(),
        ));
    }
    let coeffs = series.coeffs();
    let mut prev = Padic::from_int(2, p, 2 * series_prec(series));
    let mut cur = e1.clone();
    let mut acc = coeffs[0].mul(&prev);
    for (m, c) in coeffs.iter().enumerate().skip(1) {
        if m > 1 {
            let next = e1.mul(&cur).sub(&e2.mul(&prev));
            prev = cur;
            cur = next;
        }
        acc = acc.add(&c.mul(&cur));
    }
    let err = truncation_bound(series.tail(), series.truncation_order(), p, mu)?;
    Ok(acc.truncate_abs(err))
}

fn series_prec(s: &PadicPowerSeries) -> u32 {
    s.coeffs().iter().map(|c| c.rel_prec()).max().unwrap_or(DEFAULT_PRECISION).max(1)
}

/// Element `a + b s` of `Q_p[s]/(s^2 + b1 s + b0)`.
#[derive(Clone)]
struct QuadAlg {
    a: Padic,
    b: Padic,
}

/// Disc-local data for kernel elements whose divisor points reduce to the
/// pair `{P, iota(P)}` above `x = xbar`.
enum KernelSeries {
    /// Integrals from the Weierstrass point in the parameter `y`.
    Weierstrass { g: [PadicPowerSeries; 2] },
    /// `K_j(t)` with `log = Tr(y K_j(x - x0))`.
    Ordinary { x0: Padic, k: [PadicPowerSeries; 2] },
}

/// Logarithm engine for one prime and working precision.
pub struct Coleman {
    curve: HyperellipticCurve,
    p: u64,
    prec: u32,
    order: usize,
    jac: Rc<FpJacobian>,
    inf: [PadicPowerSeries; 2],
    kernels: RefCell<HashMap<u64, Rc<KernelSeries>>>,
}

impl Coleman {
    /// Truncation order defaults to four times the precision.
    pub fn new(c: &HyperellipticCurve, p: u64, prec: u32) -> Result<Self> {
        let jac = Rc::new(crate::jacobian::enumerate_fp_jacobian(c, p)?);
        Self::with_jacobian(c, p, prec, 4 * prec as usize, jac)
    }

    pub fn with_jacobian(
        c: &HyperellipticCurve,
        p: u64,
        prec: u32,
        order: usize,
        jac: Rc<FpJacobian>,
    ) -> Result<Self> {
        let e = c.local_expansion(&CurvePoint::Infinity, p, order, prec)?;
        let inf = [e.omega[0].integral()?, e.omega[1].integral()?];
        Ok(Coleman {
            curve: c.clone(),
            p,
            prec,
            order,
            jac,
            inf,
            kernels: RefCell::new(HashMap::new()),
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn jacobian(&self) -> &FpJacobian {
        &self.jac
    }

    pub fn curve(&self) -> &HyperellipticCurve {
        &self.curve
    }

    fn kernel_series(&self, xbar: u64) -> Result<Rc<KernelSeries>> {
        if let Some(k) = self.kernels.borrow().get(&xbar) {
            return Ok(k.clone());
        }
        let p = self.p;
        let f = self.curve.f_padic(p, self.prec);
        let fbar = self.curve.f_fp(p);
        let ks = if fbar.eval(&Fp { v: xbar, p }).v == 0 {
            let r = hensel_root(&f, &Padic::from_int(xbar as i64, p, self.prec))?;
            let w = CurvePoint::affine(r, Padic::exact_zero(p));
            let e = self.curve.local_expansion(&w, p, self.order, self.prec)?;
            KernelSeries::Weierstrass { g: [e.omega[0].integral()?, e.omega[1].integral()?] }
        } else {
            let x0 = Padic::from_int(xbar as i64, p, self.prec);
            let f0 = f.eval(&x0);
            let len = self.order + 1;
            let s = sqrt_ratio_series(&f, &x0, &f0, len);
            let sinv = s.inverse()?.with_tail(Some(TailBound::INTEGRAL));
            let half = Padic::from_int(2, p, self.prec).inv()?;
            let xs = PadicPowerSeries::polynomial(p, vec![x0.clone(), Padic::one(p, self.prec)]);
            let h1 = sinv.scale(&half);
            let h2 = h1.mul(&xs);
            let f0inv = f0.inv()?;
            let k = [h1, h2].map(|h| {
                h.with_tail(Some(TailBound::INTEGRAL))
                    .integral()
                    .map(|kt| kt.mul(&sinv).scale(&f0inv))
            });
            let [k1, k2] = k;
            // Products of a log-loss tail with an integral series keep the
            // log-loss bound.
            let fix = |s: PadicPowerSeries| s.with_tail(Some(TailBound { offset: 0, slope: 0, log_loss: 1 }));
            KernelSeries::Ordinary { x0, k: [fix(k1?), fix(k2?)] }
        };
        let rc = Rc::new(ks);
        self.kernels.borrow_mut().insert(xbar, rc.clone());
        Ok(rc)
    }

    /// Logarithm of a class in the kernel of reduction.
    pub fn log_kernel(&self, d: &Mumford<Padic>) -> Result<LogVector> {
        let p = self.p;
        let coeff = |q: &Poly<Padic>, i: usize| q.coeff(i).cloned().unwrap_or_else(|| Padic::exact_zero(p));
        match d.degree() {
            0 => Ok(LogVector::zero(p)),
            1 => {
                let x = coeff(&d.u, 0).neg();
                let y = coeff(&d.v, 0);
                if x.valuation().is_none_or(|v| v >= 0) {
                    return Err(Error::DecompositionFailure(
                        "degree-one class does not reduce to the identity".into(),
                    ));
                }
                let t = x.mul(&x).div(&y)?;
                Ok(LogVector { l1: self.inf[0].eval(&t)?, l2: self.inf[1].eval(&t)? })
            }
            _ => {
                let np = newton_polygon(&d.u);
                let vals = np.root_valuations();
                let zero = Ratio::from_integer(0);
                let all_neg = np.zero_roots == 0 && vals.iter().all(|(v, _)| *v < zero);
                let all_int = vals.iter().all(|(v, _)| *v >= zero);
                let (u0, u1) = (coeff(&d.u, 0), coeff(&d.u, 1));
                let (v0, v1) = (coeff(&d.v, 0), coeff(&d.v, 1));
                if all_neg {
                    self.log_at_infinity(&u0, &u1, &v0, &v1)
                } else if all_int {
                    self.log_in_finite_disc(&u0, &u1, &v0, &v1)
                } else {
                    Err(Error::DecompositionFailure(
                        "one divisor point reduces to infinity and the other does not".into(),
                    ))
                }
            }
        }
    }

    fn log_at_infinity(&self, u0: &Padic, u1: &Padic, v0: &Padic, v1: &Padic) -> Result<LogVector> {
        // z = 1/x satisfies z^2 + e1 z + e0 = 0 and t = x^2/y = 1/(v0 z^2 + v1 z).
        let e0 = u0.inv()?;
        let e1 = u1.mul(&e0);
        let a = v0.mul(&e0).neg();
        let b = v1.sub(&v0.mul(&e1));
        let tr_w = a.mul_int(2).sub(&b.mul(&e1));
        let n_w = a.mul(&a).sub(&a.mul(&b).mul(&e1)).add(&b.mul(&b).mul(&e0));
        let n_t = n_w.inv()?;
        let tr_t = tr_w.mul(&n_t);
        Ok(LogVector {
            l1: power_sum_pairing(&self.inf[0], &tr_t, &n_t)?,
            l2: power_sum_pairing(&self.inf[1], &tr_t, &n_t)?,
        })
    }

    fn log_in_finite_disc(&self, u0: &Padic, u1: &Padic, v0: &Padic, v1: &Padic) -> Result<LogVector> {
        let p = self.p;
        let disc = u1.mul(u1).sub(&u0.mul_int(4));
        if disc.valuation().is_some_and(|v| v <= 0) {
            return Err(Error::DecompositionFailure(
                "divisor points have distinct reductions".into(),
            ));
        }
        let xbar = u1
            .div_int(-2)?
            .residue()
            .ok_or_else(|| Error::precision("double root of u known to no digits"))?;
        match &*self.kernel_series(xbar)? {
            KernelSeries::Weierstrass { g } => {
                let tr = v0.mul_int(2).sub(&v1.mul(u1));
                let nm = v0.mul(v0).sub(&v0.mul(v1).mul(u1)).add(&v1.mul(v1).mul(u0));
                Ok(LogVector {
                    l1: power_sum_pairing(&g[0], &tr, &nm)?,
                    l2: power_sum_pairing(&g[1], &tr, &nm)?,
                })
            }
            KernelSeries::Ordinary { x0, k } => {
                // s = x - x0 satisfies s^2 + b1 s + b0 = 0.
                let b1 = x0.mul_int(2).add(u1);
                let b0 = x0.mul(x0).add(&u1.mul(x0)).add(u0);
                let mu = (2 * b1.valuation_lower_bound()).min(b0.valuation_lower_bound());
                if mu <= 0 {
                    return Err(Error::DecompositionFailure("divisor points outside the disc".into()));
                }
                let ya = QuadAlg { a: v0.add(&v1.mul(x0)), b: v1.clone() };
                let tr_y = ya.a.mul_int(2).sub(&ya.b.mul(&b1));
                if tr_y.valuation_lower_bound() <= 0 {
                    return Err(Error::DecompositionFailure(
                        "divisor points do not reduce to conjugate points".into(),
                    ));
                }
                let mut out = Vec::with_capacity(2);
                for kj in k {
                    let mut acc = QuadAlg { a: Padic::exact_zero(p), b: Padic::exact_zero(p) };
                    for c in kj.coeffs().iter().rev() {
                        // (a + b s) s = -b b0 + (a - b b1) s
                        acc = QuadAlg { a: acc.b.mul(&b0).neg().add(c), b: acc.a.sub(&acc.b.mul(&b1)) };
                    }
                    let prod = QuadAlg {
                        a: ya.a.mul(&acc.a).sub(&ya.b.mul(&acc.b).mul(&b0)),
                        b: ya.a.mul(&acc.b).add(&ya.b.mul(&acc.a)).sub(&ya.b.mul(&acc.b).mul(&b1)),
                    };
                    let tr = prod.a.mul_int(2).sub(&prod.b.mul(&b1));
                    let err = truncation_bound(kj.tail(), kj.truncation_order(), p, mu)?;
                    out.push(tr.truncate_abs(err));
                }
                let l2 = out.pop().expect("two coordinates");
                let l1 = out.pop().expect("two coordinates");
                Ok(LogVector { l1, l2 })
            }
        }
    }

    /// `(1/m) log(m D)`, `m` the order of the reduction of `D` unless given.
    pub fn log(&self, d: &Mumford<Padic>, m_hint: Option<u64>) -> Result<LogVector> {
        let m = match m_hint {
            Some(m) => m,
            None => self.jac.element_order(&reduce_divisor(&self.curve, d, self.p)?),
        };
        // Cantor steps near the identity shed digits, so multiply at the
        // precision of the input rather than the engine's.
        let wp = d.u.coeffs().iter().chain(d.v.coeffs()).map(|x| x.rel_prec()).max().unwrap_or(0).max(self.prec);
        let f = self.curve.f_padic(self.p, wp);
        let delta = scalar_mul(&f, m as i64, d)?;
        self.log_kernel(&delta)?.div_int(m as i64)
    }

    /// As [`Coleman::log`], with `m D` formed exactly over `Q`.
    pub fn log_rational(&self, d: &RationalDivisor, m_hint: Option<u64>) -> Result<LogVector> {
        let m = match m_hint {
            Some(m) => m,
            None => {
                let r = crate::jacobian::reduce_rational_divisor(&self.curve, d, self.p)?;
                self.jac.element_order(&r)
            }
        };
        let delta = scalar_mul(&self.curve.f_rational(), m as i64, d)?;
        self.log_kernel(&delta.to_padic(self.p, self.prec))?.div_int(m as i64)
    }
}

/// Logarithm of a class in the kernel of reduction at default precision.
pub fn log_kernel(c: &HyperellipticCurve, d: &Mumford<Padic>, p: u64) -> Result<LogVector> {
    let prec = d.u.coeffs().iter().chain(d.v.coeffs()).map(|x| x.rel_prec()).max().unwrap_or(DEFAULT_PRECISION);
    Coleman::new(c, p, prec.max(1))?.log_kernel(d)
}

/// Logarithm of a rational class, doubling the precision on failure up to
/// `escalations` times.
pub fn log_jacobian(
    c: &HyperellipticCurve,
    d: &RationalDivisor,
    p: u64,
    m_hint: Option<u64>,
) -> Result<LogVector> {
    with_escalation(DEFAULT_PRECISION, 2, |prec| Coleman::new(c, p, prec)?.log_rational(d, m_hint))
}

/// Runs `f` at `prec`, doubling on precision-type failures.
pub fn with_escalation<T>(prec: u32, escalations: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut prec = prec;
    let mut left = escalations;
    loop {
        match f(prec) {
            Err(e) if left > 0 && e.is_precision_related() => {
                prec *= 2;
                left -= 1;
            }
            other => return other,
        }
    }
}

/// Integral of `w` between two points of one residue disc.
pub fn tiny_integral(
    c: &HyperellipticCurve,
    w: &Differential,
    from: &CurvePoint<Padic>,
    to: &CurvePoint<Padic>,
    p: u64,
    prec: u32,
) -> Result<Padic> {
    let (rf, rt) = (c.reduce_padic_point(from)?, c.reduce_padic_point(to)?);
    if rf != rt {
        return Err(Error::InvalidInput("endpoints lie in different residue discs".into()));
    }
    let at_inf = |q: &CurvePoint<Padic>| match q {
        CurvePoint::Affine { x, .. } => x.valuation().is_some_and(|v| v < 0),
        CurvePoint::Infinity => false,
    };
    if at_inf(from) {
        let a = tiny_integral(c, w, &CurvePoint::Infinity, to, p, prec)?;
        let b = tiny_integral(c, w, &CurvePoint::Infinity, from, p, prec)?;
        return Ok(a.sub(&b));
    }
    let e = c.local_expansion(from, p, 4 * prec as usize, prec)?;
    let big = w.expand(&e).integral()?;
    let t = match (to, &e.center) {
        (CurvePoint::Infinity, _) => Padic::exact_zero(p),
        (CurvePoint::Affine { x, y }, CurvePoint::Infinity) => x.mul(x).div(y)?,
        (CurvePoint::Affine { x, y }, CurvePoint::Affine { x: x0, y: y0 }) => match e.kind {
            DiscKind::Ordinary => x.sub(x0),
            _ => y.sub(y0),
        },
    };
    big.eval(&t)
}

/// Transversality of `w` at `q`: whether the leading coefficient of `w`
/// in a parameter at `q` is nonzero, and its valuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transversality {
    pub transverse: bool,
    pub v_w: Option<i64>,
}

pub fn transversality_certificate(
    c: &HyperellipticCurve,
    w: &AnnihilatingForm,
    q: &CurvePoint<Padic>,
    p: u64,
    prec: u32,
) -> Result<Transversality> {
    match crate::curve::v_of_w(c, &w.w, q, p, prec) {
        Ok(v) => Ok(Transversality { transverse: true, v_w: Some(v) }),
        Err(Error::TransversalityFailure(_)) => Ok(Transversality { transverse: false, v_w: None }),
        Err(e) => Err(e),
    }
}

/// `lambda(r) = kappa + int_0^{p^n r} w` around `center`.
pub fn lambda_series(
    c: &HyperellipticCurve,
    w: &Differential,
    center: &CurvePoint<Padic>,
    kappa: &Padic,
    p: u64,
    n: i64,
    prec: u32,
    order: usize,
) -> Result<PadicPowerSeries> {
    let e = c.local_expansion(center, p, order, prec)?;
    let s = w.expand(&e).integral()?.rescale_variable(n);
    let mut coeffs = s.coeffs().to_vec();
    coeffs[0] = coeffs[0].add(kappa);
    Ok(PadicPowerSeries::new(p, coeffs, s.tail()))
}

/// The single-point criterion: `p >= 3`, `n >= v_w + 1`, and the linear
/// coefficient `a_0 p^n` strictly dominates every later coefficient
/// `a_m p^(n(m+1)) / (m+1)`, including the certified tail.
pub fn single_point_criterion(v_w: i64, p: u64, n: i64, series: &PadicPowerSeries) -> bool {
    if p < 3 || n < v_w + 1 {
        return false;
    }
    let lead = series.coeff(1);
    let Some(v1) = lead.valuation() else { return false };
    if v1 != v_w + n {
        return false;
    }
    let later_ok = series.coeffs().iter().skip(2).all(|c| match c.valuation() {
        Some(v) => v > v1,
        None => c.abs_prec() > v1,
    });
    later_ok && series.tail_valuation_bound().is_some_and(|b| b > v1)
}

/// Outcome for one residue disc of `C(F_p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscStatus {
    /// Zero count equals the number of known rational points in the disc.
    Resolved,
    /// Zero count exceeds the known points.
    Open,
    /// The series could not be certified at this precision.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscCertificate {
    pub center: (Option<u64>, Option<u64>),
    pub kind: DiscKind,
    pub center_is_known_point: bool,
    pub known_points: usize,
    pub zero_count: Option<usize>,
    pub n: i64,
    pub v_w: Option<i64>,
    pub precision: u32,
    pub truncation_order: usize,
    pub status: DiscStatus,
    pub lambda: SeriesDigits,
}

/// Zero count of `kappa + int w` over the residue disc of `center_bar`.
///
/// `known` lists the rational points already found in the disc; when one
/// exists it serves as the centre so that `kappa = 0`.
pub fn disc_zero_count(
    engine: &Coleman,
    w: &AnnihilatingForm,
    center_bar: &CurvePoint<Fp>,
    known: &[CurvePoint<Padic>],
) -> Result<DiscCertificate> {
    let c = &engine.curve;
    let (p, prec) = (engine.p, engine.prec);
    let (center, kappa, center_is_known) = match known.first() {
        Some(q) => (q.clone(), Padic::exact_zero(p), true),
        None => {
            let q0 = c.lift_point(center_bar, prec)?;
            let kappa = match &q0 {
                CurvePoint::Affine { y, .. } if !y.is_zero() => {
                    let d = crate::jacobian::point_divisor(&q0, &Padic::exact_zero(p));
                    w.pairing(&engine.log(&d, None)?)
                }
                // Weierstrass points and infinity are torsion: log = 0.
                _ => Padic::exact_zero(p),
            };
            (q0, kappa, false)
        }
    };
    let series = lambda_series(c, &w.w, &center, &kappa, p, 1, prec, engine.order)?;
    let kind = c.local_expansion(&center, p, 1, prec)?.kind;
    let v_w = crate::curve::v_of_w(c, &w.w, &center, p, prec).ok();
    let count = series.strassmann_count();
    let (zero_count, status) = match count {
        Ok(n) if n == known.len() => (Some(n), DiscStatus::Resolved),
        Ok(n) => (Some(n), DiscStatus::Open),
        Err(Error::InconclusiveTruncation(_)) => (None, DiscStatus::Inconclusive),
        Err(e) => return Err(e),
    };
    let center_res = match center_bar {
        CurvePoint::Infinity => (None, None),
        CurvePoint::Affine { x, y } => (Some(x.v), Some(y.v)),
    };
    Ok(DiscCertificate {
        center: center_res,
        kind,
        center_is_known_point: center_is_known,
        known_points: known.len(),
        zero_count,
        n: 1,
        v_w,
        precision: prec,
        truncation_order: engine.order,
        status,
        lambda: SeriesDigits::from(&series),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{rat, RationalPoint};
    use crate::jacobian::cantor_add;

    fn flynn() -> HyperellipticCurve {
        HyperellipticCurve::new([0, 60, -112, 65, -14, 1]).unwrap()
    }

    fn gamma() -> RationalDivisor {
        RationalDivisor::from_ints(&[-3, 1], &[6])
    }

    #[test]
    fn torsion_and_identity_have_zero_log() {
        let c = flynn();
        let eng = Coleman::new(&c, 7, 20).unwrap();
        let id = Mumford::identity(&rat(0, 1));
        assert!(eng.log_rational(&id, None).unwrap().is_zero());
        for r in [0, 1, 2, 5, 6] {
            let t = RationalDivisor::from_ints(&[-r, 1], &[]);
            let l = eng.log_rational(&t, None).unwrap();
            assert!(l.is_zero(), "{r}: {l:?}");
        }
    }

    #[test]
    fn log_is_additive_on_multiples_of_gamma() {
        let c = flynn();
        let f = c.f_rational();
        let eng = Coleman::new(&c, 7, 20).unwrap();
        let g = gamma();
        let lg = eng.log_rational(&g, None).unwrap();
        assert!(!lg.is_zero());
        for k in [2i64, 3, 5, -1] {
            let kg = scalar_mul(&f, k, &g).unwrap();
            let lk = eng.log_rational(&kg, None).unwrap();
            assert!(lk.agrees(&lg.mul_int(k)), "k = {k}: {lk:?} vs {:?}", lg.mul_int(k));
        }
        let t = RationalDivisor::from_ints(&[-1, 1], &[]);
        let gt = cantor_add(&f, &g, &t).unwrap();
        assert!(eng.log_rational(&gt, None).unwrap().agrees(&lg));
    }

    #[test]
    fn annihilating_form_pairs_to_zero() {
        let l = LogVector { l1: Padic::one(7, 20), l2: Padic::exact_zero(7) };
        let w = annihilating_form(&l).unwrap();
        assert!(w.w.c1.is_zero());
        assert!(w.w.c2.agrees(&Padic::from_int(-1, 7, 20)));
        assert!(w.pairing(&l).is_zero());
        let scaled = LogVector { l1: Padic::from_int(7 * 3, 7, 20), l2: Padic::from_int(7 * 5, 7, 20) };
        let unscaled = LogVector { l1: Padic::from_int(3, 7, 20), l2: Padic::from_int(5, 7, 20) };
        let a = annihilating_form(&scaled).unwrap().w;
        let b = annihilating_form(&unscaled).unwrap().w;
        assert!(a.c1.agrees(&b.c1) && a.c2.agrees(&b.c2));
        assert!(matches!(annihilating_form(&LogVector::zero(7)), Err(Error::TorsionGenerator(_))));
    }

    #[test]
    fn tiny_integral_first_order_term() {
        let c = flynn();
        let w = Differential::new(Padic::one(7, 20), Padic::exact_zero(7)).unwrap();
        let from = RationalPoint::from_ints(3, 6).to_padic(7, 20);
        let x = Padic::from_int(10, 7, 20);
        let fx = c.f_padic(7, 20).eval(&x);
        let sq = Poly::new(vec![fx.neg(), Padic::exact_zero(7), Padic::one(7, 20)]);
        let y = hensel_root(&sq, &Padic::from_int(6, 7, 20)).unwrap();
        let to = CurvePoint::affine(x, y);
        let v = tiny_integral(&c, &w, &from, &to, 7, 20).unwrap();
        let expect = Padic::from_rational(&rat(7, 12), 7, 20);
        assert!(v.sub(&expect).valuation_lower_bound() >= 2);
        let back = tiny_integral(&c, &w, &to, &from, 7, 20).unwrap();
        assert!(back.add(&v).is_zero());
        assert!(tiny_integral(&c, &w, &from, &from, 7, 20).unwrap().is_zero());
    }

    #[test]
    fn criterion_examples() {
        let p = 7;
        let s = |c: &[i64]| PadicPowerSeries::polynomial(p, c.iter().map(|&n| Padic::from_int(n, p, 20)).collect());
        let generic = s(&[0, 7, 49, 343 * 2]);
        assert!(single_point_criterion(0, 7, 1, &generic));
        assert_eq!(generic.strassmann_count().unwrap(), 1);
        assert!(!single_point_criterion(1, 3, 1, &generic));
    }
}
