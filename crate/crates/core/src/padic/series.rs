//! Truncated p-adic power series with a certified bound on the omitted tail.
//!
//! Besides ordinary ring operations this module hosts the two analytic facts
//! the pipeline relies on: Strassmann's zero count on the closed unit ball and
//! Mahler's derivative bound for normal series with prescribed zeros.

use crate::error::{Error, Result};

use super::number::{Padic, PadicDigits, EXACT};
use super::quad::{ExtKind, QuadElem};
use crate::field::Field;

/// `floor(log_p m)` for `m >= 1`.
pub(crate) fn floor_log(m: u64, p: u64) -> i64 {
    let mut k = 0;
    let mut q = m;
    while q >= p {
        q /= p;
        k += 1;
    }
    k
}

/// Lower bound `v(c_m) >= offset + slope*m - log_loss*floor(log_p m)` for
/// every coefficient beyond the truncation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TailBound {
    pub offset: i64,
    pub slope: i64,
    pub log_loss: i64,
}

impl TailBound {
    /// Tail of a polynomial: every omitted coefficient is an exact zero.
    pub const EXACT: TailBound = TailBound { offset: EXACT, slope: 0, log_loss: 0 };

    /// Omitted coefficients are p-adic integers.
    pub const INTEGRAL: TailBound = TailBound { offset: 0, slope: 0, log_loss: 0 };

    pub fn at(&self, m: u64, p: u64) -> i64 {
        if self.offset >= EXACT {
            return EXACT;
        }
        self.offset + self.slope * m as i64 - self.log_loss * floor_log(m, p)
    }

    /// Minimum of the bound over all indices `m > t`; `None` when unbounded
    /// below.
    pub fn min_beyond(&self, t: usize, p: u64) -> Option<i64> {
        if self.offset >= EXACT {
            return Some(EXACT);
        }
        if self.slope < 0 || (self.slope == 0 && self.log_loss > 0) {
            return None;
        }
        let first = t as u64 + 1;
        let mut best = self.at(first, p);
        if self.slope >= self.log_loss {
            return Some(best);
        }
        // The bound only drops at powers of p; past those it grows linearly.
        // Stop before `slope * q` overflows; the bound is increasing there.
        let mut q = p;
        while (q as i128) * (self.slope.max(1) as i128) < (EXACT as i128) {
            if q > first {
                best = best.min(self.at(q, p));
            }
            q = match q.checked_mul(p) {
                Some(x) => x,
                None => break,
            };
        }
        Some(best)
    }

    fn merge(&self, other: &TailBound) -> TailBound {
        if self.offset >= EXACT {
            return *other;
        }
        if other.offset >= EXACT {
            return *self;
        }
        TailBound {
            offset: self.offset.min(other.offset),
            slope: self.slope.min(other.slope),
            log_loss: self.log_loss.max(other.log_loss),
        }
    }
}

/// Serializable [`PadicPowerSeries`], enough to replay any verdict drawn
/// from it.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeriesDigits {
    pub p: u64,
    pub coeffs: Vec<PadicDigits>,
    pub tail: Option<TailBound>,
}

impl SeriesDigits {
    pub fn to_series(&self) -> Option<PadicPowerSeries> {
        let coeffs = self.coeffs.iter().map(|c| c.to_padic(self.p)).collect::<Option<Vec<_>>>()?;
        Some(PadicPowerSeries::new(self.p, coeffs, self.tail))
    }
}

impl From<&PadicPowerSeries> for SeriesDigits {
    fn from(s: &PadicPowerSeries) -> Self {
        SeriesDigits { p: s.p, coeffs: s.coeffs.iter().map(Padic::digits).collect(), tail: s.tail }
    }
}

/// `c_0 + c_1 t + ... + c_T t^T + (tail)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicPowerSeries {
    p: u64,
    coeffs: Vec<Padic>,
    tail: Option<TailBound>,
}

impl PadicPowerSeries {
    /// `tail = None` means nothing is known about the omitted coefficients.
    pub fn new(p: u64, coeffs: Vec<Padic>, tail: Option<TailBound>) -> Self {
        assert!(!coeffs.is_empty(), "a series keeps at least its constant term");
        PadicPowerSeries { p, coeffs, tail }
    }

    pub fn polynomial(p: u64, coeffs: Vec<Padic>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![Padic::exact_zero(p)] } else { coeffs };
        PadicPowerSeries { p, coeffs, tail: Some(TailBound::EXACT) }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[Padic] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Padic {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Padic::zero_to(self.p, self.tail_at(i)))
    }

    fn tail_at(&self, i: usize) -> i64 {
        match self.tail {
            Some(t) => t.at(i as u64, self.p),
            None => i64::MIN / 4,
        }
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn tail(&self) -> Option<TailBound> {
        self.tail
    }

    pub fn with_tail(mut self, tail: Option<TailBound>) -> Self {
        self.tail = tail;
        self
    }

    /// Lower bound on `v(c_m)` valid for every `m > T`.
    pub fn tail_valuation_bound(&self) -> Option<i64> {
        self.tail?.min_beyond(self.truncation_order(), self.p)
    }

    /// All coefficients integral and tending to zero: `||f||_1 <= 1`.
    pub fn is_normal(&self) -> bool {
        let Some(tail) = self.tail else { return false };
        let decays = tail.offset >= EXACT || tail.slope > 0;
        decays
            && self.coeffs.iter().all(|c| c.valuation_lower_bound() >= 0)
            && self.tail_valuation_bound().is_some_and(|b| b >= 0)
    }

    /// Keeps `n` coefficients, folding the rest into the tail bound.
    pub fn truncate(&self, n: usize) -> Self {
        if n >= self.coeffs.len() {
            return self.clone();
        }
        let n = n.max(1);
        let tail = self.tail.map(|t| {
            if t.offset >= EXACT && self.coeffs[n..].iter().all(|c| c.is_exact_zero()) {
                return t;
            }
            let base = if t.offset >= EXACT { TailBound { offset: i64::MAX / 8, ..t } } else { t };
            let dropped = self.coeffs[n..]
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let m = (n + j) as u64;
                    c.valuation_lower_bound().min(EXACT / 2) - base.slope * m as i64
                        + base.log_loss * floor_log(m, self.p)
                })
                .min()
                .unwrap_or(base.offset);
            TailBound { offset: base.offset.min(dropped), ..base }
        });
        PadicPowerSeries { p: self.p, coeffs: self.coeffs[..n].to_vec(), tail }
    }

    fn is_polynomial(&self) -> bool {
        self.tail.is_some_and(|t| t.offset >= EXACT)
    }

    /// Exactly `n` coefficients: polynomials are padded with exact zeros,
    /// anything else is truncated (never padded).
    pub fn with_len(&self, n: usize) -> Self {
        let n = n.max(1);
        if n <= self.coeffs.len() {
            return self.truncate(n);
        }
        if self.is_polynomial() {
            let mut coeffs = self.coeffs.clone();
            coeffs.resize(n, Padic::exact_zero(self.p));
            return PadicPowerSeries { p: self.p, coeffs, tail: self.tail };
        }
        self.clone()
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let n = match (self.is_polynomial(), other.is_polynomial()) {
            (true, true) => self.coeffs.len().max(other.coeffs.len()),
            (true, false) => other.coeffs.len(),
            (false, true) => self.coeffs.len(),
            (false, false) => self.coeffs.len().min(other.coeffs.len()),
        };
        (self.with_len(n), other.with_len(n))
    }

    /// Multiplies by `t^k`, keeping the truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let mut coeffs = vec![Padic::exact_zero(self.p); k.min(n)];
        coeffs.extend(self.coeffs.iter().take(n.saturating_sub(k)).cloned());
        let dropped = PadicPowerSeries { p: self.p, coeffs: self.coeffs.clone(), tail: self.tail }
            .truncate(n.saturating_sub(k).max(1));
        // Shifting moves the tail bound k places to the right.
        let tail = dropped.tail.map(|t| {
            if t.offset >= EXACT {
                t
            } else {
                TailBound { offset: t.offset - t.slope * k as i64 - t.log_loss, ..t }
            }
        });
        PadicPowerSeries { p: self.p, coeffs, tail }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.add(y)).collect();
        let tail = match (a.tail, b.tail) {
            (Some(x), Some(y)) => Some(x.merge(&y)),
            _ => None,
        };
        PadicPowerSeries { p: self.p, coeffs, tail }
    }

    pub fn neg(&self) -> Self {
        PadicPowerSeries {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            tail: self.tail,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Padic) -> Self {
        let shift = c.valuation_lower_bound();
        PadicPowerSeries {
            p: self.p,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
            tail: self.tail.map(|t| {
                if t.offset >= EXACT {
                    t
                } else {
                    TailBound { offset: t.offset + shift, ..t }
                }
            }),
        }
    }

    fn min_lower_bound(&self) -> Option<i64> {
        let t = self.tail?;
        if t.slope != 0 || t.log_loss != 0 {
            return None;
        }
        let c = self.coeffs.iter().map(|c| c.valuation_lower_bound()).min().unwrap_or(EXACT);
        Some(c.min(t.offset))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_polynomial() && other.is_polynomial() {
            let n = self.coeffs.len() + other.coeffs.len() - 1;
            let mut out = self.mul_truncated(other, n);
            out.tail = Some(TailBound::EXACT);
            return out;
        }
        let (a, b) = self.aligned(other);
        let n = a.coeffs.len();
        let mut out = a.mul_truncated(&b, n);
        out.tail = match (a.min_lower_bound(), b.min_lower_bound()) {
            (Some(u), Some(v)) => Some(TailBound { offset: u + v, slope: 0, log_loss: 0 }),
            _ => None,
        };
        out
    }

    /// Substitutes `t = p^k r`.
    pub fn rescale_variable(&self, k: i64) -> Self {
        PadicPowerSeries {
            p: self.p,
            coeffs: self.coeffs.iter().enumerate().map(|(m, c)| c.shift(k * m as i64)).collect(),
            tail: self.tail.map(|t| {
                if t.offset >= EXACT {
                    t
                } else {
                    TailBound { slope: t.slope + k, ..t }
                }
            }),
        }
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<Padic> = if self.coeffs.len() == 1 {
            vec![Padic::exact_zero(self.p)]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, c)| c.mul_int(m as i64))
                .collect()
        };
        let tail = self.tail.map(|t| {
            if t.offset >= EXACT {
                t
            } else {
                TailBound { offset: t.offset + t.slope - t.log_loss, ..t }
            }
        });
        PadicPowerSeries { p: self.p, coeffs, tail }
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |s, _| s.derivative())
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Padic::exact_zero(self.p));
        for (m, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.div_int(m as i64 + 1)?);
        }
        let tail = self.tail.map(|t| {
            if t.offset >= EXACT {
                t
            } else {
                TailBound { offset: t.offset - t.slope, slope: t.slope, log_loss: t.log_loss + 1 }
            }
        });
        Ok(PadicPowerSeries { p: self.p, coeffs, tail })
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn inverse(&self) -> Result<Self> {
        let g0 = self.coeffs[0].inv()?;
        let n = self.coeffs.len();
        let mut g = vec![g0.clone()];
        for k in 1..n {
            let mut acc = self.coeffs[1].mul(&g[k - 1]);
            for i in 2..=k {
                acc = acc.add(&self.coeffs[i].mul(&g[k - i]));
            }
            g.push(acc.mul(&g0).neg());
        }
        let tail = match self.min_lower_bound() {
            Some(lb) if self.coeffs[0].valuation() == Some(0) && lb >= 0 => Some(TailBound {
                offset: -self.coeffs[0].valuation().unwrap_or(0),
                slope: 0,
                log_loss: 0,
            }),
            _ => None,
        };
        Ok(PadicPowerSeries { p: self.p, coeffs: g, tail })
    }

    /// `self(inner(t))` where `inner` has vanishing constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_exact_zero() {
            return Err(Error::InvalidInput("inner series must vanish at 0".into()));
        }
        let n = self.coeffs.len().min(inner.coeffs.len());
        let inner = inner.truncate(n);
        let mut acc = PadicPowerSeries::polynomial(self.p, vec![self.coeffs[n - 1].clone()]);
        for c in self.coeffs[..n - 1].iter().rev() {
            acc = acc.mul_truncated(&inner, n);
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        let tail = match (self.min_lower_bound(), inner.min_lower_bound()) {
            (Some(a), Some(b)) if a >= 0 && b >= 0 => Some(TailBound { offset: a, slope: 0, log_loss: 0 }),
            _ => None,
        };
        Ok(PadicPowerSeries { p: self.p, coeffs: acc.coeffs, tail })
    }

    fn mul_truncated(&self, other: &Self, n: usize) -> Self {
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = Padic::exact_zero(self.p);
            for i in 0..=k {
                if let (Some(a), Some(b)) = (self.coeffs.get(i), other.coeffs.get(k - i)) {
                    acc = acc.add(&a.mul(b));
                }
            }
            coeffs.push(acc);
        }
        PadicPowerSeries { p: self.p, coeffs, tail: None }
    }

    /// Compositional inverse `g` with `self(g(t)) = t`; requires `c_0 = 0`
    /// and `c_1` invertible.
    pub fn reversion(&self) -> Result<Self> {
        let n = self.coeffs.len();
        let c1inv = self.coeffs.get(1).ok_or_else(|| Error::InvalidInput("series too short".into()))?.inv()?;
        let mut g = vec![Padic::exact_zero(self.p); n];
        if n > 1 {
            g[1] = c1inv.clone();
        }
        // Coefficient-by-coefficient: the t^k coefficient of self(g) is
        // c1*g_k + (terms in g_1..g_{k-1}).
        for k in 2..n {
            let trial = PadicPowerSeries::polynomial(self.p, g[..=k].to_vec());
            let comp = self.truncate(k + 1).compose(&trial)?;
            g[k] = comp.coeffs[k].mul(&c1inv).neg();
        }
        Ok(PadicPowerSeries { p: self.p, coeffs: g, tail: None })
    }

    /// Value at `x`, `v(x) >= 0`, with precision capped by the tail bound.
    pub fn eval(&self, x: &Padic) -> Result<Padic> {
        let mu = x.valuation_lower_bound();
        if mu < 0 {
            return Err(Error::InvalidInput("evaluation point outside the unit ball".into()));
        }
        let mut acc = Padic::exact_zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        let err = self.evaluation_error(mu.min(EXACT / 4), 1)?;
        Ok(acc.truncate_abs(err))
    }

    /// Lower bound on the valuation of the omitted terms at a point of
    /// (scaled) valuation `mu / denom`, in units of `1 / denom`.
    fn evaluation_error(&self, mu: i64, denom: i64) -> Result<i64> {
        let tail = self.tail.ok_or_else(|| {
            Error::InconclusiveTruncation("no bound on the omitted coefficients".into())
        })?;
        if tail.offset >= EXACT {
            return Ok(EXACT);
        }
        let scaled = TailBound {
            offset: denom * tail.offset,
            slope: denom * tail.slope + mu,
            log_loss: denom * tail.log_loss,
        };
        scaled.min_beyond(self.truncation_order(), self.p).ok_or_else(|| {
            Error::InconclusiveTruncation("tail does not converge at the evaluation point".into())
        })
    }

    /// Value at an element of a quadratic extension.
    pub fn eval_quad(&self, x: &QuadElem) -> Result<QuadElem> {
        let mu = x.half_valuation_lower_bound();
        if mu < 0 {
            return Err(Error::InvalidInput("evaluation point outside the unit ball".into()));
        }
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&QuadElem::from_base(c.clone()));
        }
        let err = self.evaluation_error(mu.min(EXACT / 4), 2)?;
        if err >= EXACT {
            return Ok(acc);
        }
        let (ea, eb) = match x.ext.kind {
            ExtKind::Ramified => (err.div_euclid(2), (err - 1).div_euclid(2)),
            _ => (err.div_euclid(2), err.div_euclid(2)),
        };
        Ok(QuadElem { a: acc.a.truncate_abs(ea), b: acc.b.truncate_abs(eb), ext: acc.ext })
    }

    /// Number of zeros in the closed unit ball (with multiplicity): the
    /// largest index attaining the minimal coefficient valuation.
    pub fn strassmann_count(&self) -> Result<usize> {
        let known: Vec<(usize, i64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.valuation().map(|v| (i, v)))
            .collect();
        let Some(min_v) = known.iter().map(|&(_, v)| v).min() else {
            return Err(Error::InconclusiveTruncation(
                "every coefficient vanishes at working precision".into(),
            ));
        };
        let n = known.iter().filter(|&&(_, v)| v == min_v).map(|&(i, _)| i).max().expect("nonempty");
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                let abs = c.abs_prec();
                let ambiguous = if i < n { abs < min_v } else { abs <= min_v };
                if ambiguous {
                    return Err(Error::InconclusiveTruncation(format!(
                        "coefficient {i} known only to O(p^{abs}) against minimal valuation {min_v}"
                    )));
                }
            }
        }
        match self.tail_valuation_bound() {
            Some(b) if b > min_v => Ok(n),
            _ => Err(Error::InconclusiveTruncation(format!(
                "tail bound does not exceed the minimal valuation {min_v} beyond order {}",
                self.truncation_order()
            ))),
        }
    }
}

/// Mahler's bound `|f^(k)(x)| <= r^(d-k)` for a normal `f` with the listed
/// zeros, `r = p^(-radius)`, `d` the total multiplicity.
///
/// Returns `false` when the hypotheses fail or the bound is violated; a
/// violation on valid input indicates an arithmetic bug.
pub fn mahler_bound_holds(
    f: &PadicPowerSeries,
    zeros: &[(Padic, usize)],
    radius: i64,
    x: &Padic,
    k: usize,
) -> bool {
    if radius <= 0 || !f.is_normal() {
        return false;
    }
    if x.valuation_lower_bound() < radius || zeros.iter().any(|(z, _)| z.valuation_lower_bound() < radius) {
        return false;
    }
    let d: usize = zeros.iter().map(|(_, m)| m).sum();
    let needed = radius * (d as i64 - k as i64);
    let Ok(value) = f.nth_derivative(k).eval(x) else {
        return false;
    };
    value.valuation_lower_bound() >= needed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64], p: u64) -> PadicPowerSeries {
        PadicPowerSeries::polynomial(p, c.iter().map(|&n| Padic::from_int(n, p, 20)).collect())
    }

    #[test]
    fn tail_minimum_for_large_primes() {
        let t = TailBound { offset: 0, slope: 1, log_loss: 2 };
        for p in [7u64, 23, 97, 1009] {
            let m = t.min_beyond(81, p).unwrap();
            let brute = (82..200_000u64).map(|k| t.at(k, p)).min().unwrap();
            assert_eq!(m, brute.min(m), "p = {p}");
            assert!(m > 0);
        }
    }

    #[test]
    fn strassmann_small_cases() {
        assert_eq!(poly(&[7, 1, 7], 7).strassmann_count().unwrap(), 1);
        assert_eq!(poly(&[5], 7).strassmann_count().unwrap(), 0);
        assert_eq!(poly(&[0, -7, 1], 7).strassmann_count().unwrap(), 2);
    }

    #[test]
    fn strassmann_needs_a_tail() {
        let f = poly(&[7, 1, 7], 7).with_tail(Some(TailBound::INTEGRAL));
        assert!(matches!(f.strassmann_count(), Err(Error::InconclusiveTruncation(_))));
        let g = poly(&[7, 1, 7], 7).with_tail(Some(TailBound { offset: 1, slope: 0, log_loss: 0 }));
        assert_eq!(g.strassmann_count().unwrap(), 1);
    }

    #[test]
    fn mahler_examples() {
        let f = poly(&[0, -7, 1], 7);
        let zeros = [(Padic::exact_zero(7), 1), (Padic::from_int(7, 7, 20), 1)];
        assert!(mahler_bound_holds(&f, &zeros, 1, &Padic::exact_zero(7), 0));
        assert!(mahler_bound_holds(&f, &zeros, 1, &Padic::from_int(7, 7, 20), 1));
        let cube = poly(&[0, 0, 0, 1], 5);
        let z = [(Padic::exact_zero(5), 3)];
        for x in [0, 5, 10, 25, 125] {
            for k in 0..3 {
                assert!(mahler_bound_holds(&cube, &z, 1, &Padic::from_int(x, 5, 20), k));
            }
        }
    }

    #[test]
    fn integral_then_derivative_round_trip() {
        let f = poly(&[1, 2, 3, 4], 5);
        let g = f.integral().unwrap().derivative();
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert!(a.agrees(b));
        }
    }

    #[test]
    fn inverse_and_reversion() {
        let f = poly(&[1, 3, 0, 2, 1], 7).with_tail(Some(TailBound::INTEGRAL));
        let g = f.inverse().unwrap();
        let prod = f.mul(&g);
        assert!(prod.coeff(0).agrees(&Padic::one(7, 20)));
        for c in &prod.coeffs()[1..] {
            assert!(c.is_zero());
        }
        let h = poly(&[0, 2, 1, 5, 0, 0, 0], 7);
        let r = h.reversion().unwrap();
        let id = h.compose(&r).unwrap();
        assert!(id.coeff(1).agrees(&Padic::one(7, 20)));
        for c in &id.coeffs()[2..] {
            assert!(c.is_zero(), "{c}");
        }
    }

    #[test]
    fn tail_bounds() {
        let t = TailBound { offset: 0, slope: 1, log_loss: 1 };
        assert_eq!(t.min_beyond(5, 7), Some(6));
        assert_eq!(t.min_beyond(6, 7), Some(6));
        assert_eq!(TailBound { offset: 0, slope: 0, log_loss: 1 }.min_beyond(3, 3), None);
    }
}
