//! Quadratic extensions `Q_p(sqrt d)` and p-adic square roots.
//!
//! Only three extensions are ever needed: `d = n` (unramified, `n` the least
//! quadratic non-residue), `d = p` and `d = p*n` (ramified). Valuations of
//! extension elements are reported in units of `1/2`, so the uniformizer
//! `sqrt(p)` of a ramified extension has half-valuation 1 and `p` has 2.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Fp2, Poly};

use super::number::{least_nonresidue, legendre, Padic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtKind {
    Base,
    Unramified,
    Ramified,
}

/// The extension `Q_p(sqrt d)`; `d = 1` denotes `Q_p` itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    pub p: u64,
    pub d: i64,
    pub kind: ExtKind,
}

impl QuadExt {
    pub fn base(p: u64) -> QuadExt {
        QuadExt { p, d: 1, kind: ExtKind::Base }
    }

    pub fn unramified(p: u64) -> QuadExt {
        QuadExt { p, d: least_nonresidue(p) as i64, kind: ExtKind::Unramified }
    }

    pub fn ramified(p: u64, twisted: bool) -> QuadExt {
        let n = if twisted { least_nonresidue(p) as i64 } else { 1 };
        QuadExt { p, d: p as i64 * n, kind: ExtKind::Ramified }
    }
}

/// `a + b*sqrt(d)` with `a, b` in `Q_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub a: Padic,
    pub b: Padic,
    pub ext: QuadExt,
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ext.kind {
            ExtKind::Base => write!(f, "{}", self.a),
            _ => write!(f, "({}) + ({})*sqrt({})", self.a, self.b, self.ext.d),
        }
    }
}

impl QuadElem {
    pub fn from_base(a: Padic) -> QuadElem {
        let p = a.prime();
        QuadElem { b: Padic::exact_zero(p), ext: QuadExt::base(p), a }
    }

    pub fn new(a: Padic, b: Padic, ext: QuadExt) -> QuadElem {
        QuadElem { a, b, ext }
    }

    pub fn prime(&self) -> u64 {
        self.ext.p
    }

    /// The `Q_p` value when this element lies in the base field.
    pub fn to_base(&self) -> Option<Padic> {
        (self.ext.kind == ExtKind::Base || self.b.is_zero()).then(|| self.a.clone())
    }

    fn d_padic(&self) -> Padic {
        Padic::from_int(self.ext.d, self.ext.p, 64)
    }

    fn unify(&self, other: &QuadElem) -> (QuadElem, QuadElem) {
        match (self.ext.kind, other.ext.kind) {
            (ExtKind::Base, ExtKind::Base) => (self.clone(), other.clone()),
            (ExtKind::Base, _) => (QuadElem { ext: other.ext, ..self.clone() }, other.clone()),
            (_, ExtKind::Base) => (self.clone(), QuadElem { ext: self.ext, ..other.clone() }),
            _ => {
                assert_eq!(self.ext, other.ext, "elements of different quadratic extensions");
                (self.clone(), other.clone())
            }
        }
    }

    /// Valuation in units of `1/2`; `None` when zero at precision.
    pub fn half_valuation(&self) -> Option<i64> {
        let va = self.a.valuation().map(|v| 2 * v);
        let vb = self.b.valuation().map(|v| {
            2 * v
                + match self.ext.kind {
                    ExtKind::Ramified => 1,
                    _ => 0,
                }
        });
        match (va, vb) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    /// Lower bound on the half-valuation that also covers zero values.
    pub fn half_valuation_lower_bound(&self) -> i64 {
        let ra = match self.ext.kind {
            ExtKind::Ramified => 1,
            _ => 0,
        };
        (2 * self.a.valuation_lower_bound()).min(2 * self.b.valuation_lower_bound() + ra)
    }

    pub fn conjugate(&self) -> QuadElem {
        QuadElem { b: self.b.neg(), ..self.clone() }
    }

    pub fn norm(&self) -> Padic {
        self.a.mul(&self.a).sub(&self.b.mul(&self.b).mul(&self.d_padic()))
    }

    pub fn trace(&self) -> Padic {
        self.a.add(&self.a)
    }

    /// Reduction into `F_{p^2}`; `None` for non-integral elements or when
    /// the digits needed are not known.
    pub fn residue(&self) -> Option<Fp2> {
        let p = self.ext.p;
        if self.half_valuation_lower_bound() < 0 {
            return None;
        }
        let a = self.a.residue()?;
        let b = match self.ext.kind {
            ExtKind::Unramified => self.b.residue()?,
            // sqrt(d) has positive valuation, and b is integral here.
            _ => 0,
        };
        Some(Fp2::new(a, b, p))
    }
}

impl Field for QuadElem {
    fn zero_like(&self) -> Self {
        let p = self.ext.p;
        QuadElem { a: Padic::exact_zero(p), b: Padic::exact_zero(p), ext: self.ext }
    }
    fn one_like(&self) -> Self {
        let rel = self.a.rel_prec().max(self.b.rel_prec()).max(super::DEFAULT_PRECISION);
        QuadElem { a: Padic::one(self.ext.p, rel), b: Padic::exact_zero(self.ext.p), ext: self.ext }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        let rel = self.a.rel_prec().max(self.b.rel_prec()).max(super::DEFAULT_PRECISION);
        QuadElem {
            a: Padic::from_int(n, self.ext.p, rel),
            b: Padic::exact_zero(self.ext.p),
            ext: self.ext,
        }
    }
    fn add(&self, o: &Self) -> Self {
        let (x, y) = self.unify(o);
        QuadElem { a: x.a.add(&y.a), b: x.b.add(&y.b), ext: x.ext }
    }
    fn sub(&self, o: &Self) -> Self {
        let (x, y) = self.unify(o);
        QuadElem { a: x.a.sub(&y.a), b: x.b.sub(&y.b), ext: x.ext }
    }
    fn mul(&self, o: &Self) -> Self {
        let (x, y) = self.unify(o);
        let d = x.d_padic();
        QuadElem {
            a: x.a.mul(&y.a).add(&x.b.mul(&y.b).mul(&d)),
            b: x.a.mul(&y.b).add(&x.b.mul(&y.a)),
            ext: x.ext,
        }
    }
    fn neg(&self) -> Self {
        QuadElem { a: self.a.neg(), b: self.b.neg(), ext: self.ext }
    }
    fn inv(&self) -> Result<Self> {
        let n = self.norm();
        let ni = n.inv()?;
        let c = self.conjugate();
        Ok(QuadElem { a: c.a.mul(&ni), b: c.b.mul(&ni), ext: self.ext })
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

/// Newton iteration for a root of `f` starting from `x0`.
///
/// Requires `v(f(x0)) > 2 v(f'(x0))`; the root found is congruent to `x0`
/// modulo `p^(v(f(x0)) - v(f'(x0)))`.
pub fn hensel_root(f: &Poly<Padic>, x0: &Padic) -> Result<Padic> {
    let df = f.derivative();
    let fx = f.eval(x0);
    let dfx = df.eval(x0);
    let vd = dfx
        .valuation()
        .ok_or_else(|| Error::NotHenselLiftable("derivative vanishes at the start point".into()))?;
    if fx.valuation_lower_bound() <= 2 * vd {
        return Err(Error::NotHenselLiftable(format!(
            "v(f(x0)) = {} is not above 2 v(f'(x0)) = {}",
            fx.valuation_lower_bound(),
            2 * vd
        )));
    }
    let mut x = x0.clone();
    // Absolute digits double each step; 64 steps is far beyond any cap.
    for _ in 0..64 {
        let fx = f.eval(&x);
        if fx.is_zero() {
            break;
        }
        let step = fx.div(&df.eval(&x))?;
        let next = x.sub(&step);
        if next == x {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Square root of a p-adic unit with `p`-adic residue a square.
fn unit_sqrt(u: &Padic) -> Result<Padic> {
    let p = u.prime();
    let r = u.residue().expect("unit");
    let r0 = (0..p)
        .find(|&s| (s * s) % p == r)
        .ok_or_else(|| Error::InvalidInput("residue is not a square".into()))?;
    let rel = u.rel_prec();
    let x0 = Padic::from_int(r0 as i64, p, rel);
    let f = Poly::new(vec![u.neg(), Padic::exact_zero(p), Padic::one(p, rel)]);
    hensel_root(&f, &x0)
}

/// A square root of `a`: in `Q_p` when one exists, otherwise `c * sqrt(d)` in
/// the quadratic extension `Q_p(sqrt d)` forced by the square class of `a`.
pub fn padic_sqrt(a: &Padic) -> Result<QuadElem> {
    let p = a.prime();
    assert!(p % 2 == 1, "p-adic square roots are implemented for odd p");
    let Some(v) = a.valuation() else {
        let abs = a.abs_prec();
        let half = if abs >= super::EXACT { abs } else { abs.div_euclid(2) };
        return Ok(QuadElem::from_base(Padic::zero_to(p, half)));
    };
    let unit = a.shift(-v);
    let residue = unit.residue().expect("unit residue");
    let is_res = legendre(residue, p) == 1;
    let n = least_nonresidue(p) as i64;
    let rel = unit.rel_prec();
    let n_padic = Padic::from_int(n, p, rel + 1);
    if v % 2 == 0 {
        if is_res {
            return Ok(QuadElem::from_base(unit_sqrt(&unit)?.shift(v / 2)));
        }
        let c = unit_sqrt(&unit.div(&n_padic)?)?.shift(v / 2);
        return Ok(QuadElem::new(Padic::exact_zero(p), c, QuadExt::unramified(p)));
    }
    let k = (v - 1) / 2;
    if is_res {
        let c = unit_sqrt(&unit)?.shift(k);
        Ok(QuadElem::new(Padic::exact_zero(p), c, QuadExt::ramified(p, false)))
    } else {
        let c = unit_sqrt(&unit.div(&n_padic)?)?.shift(k);
        Ok(QuadElem::new(Padic::exact_zero(p), c, QuadExt::ramified(p, true)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_mod_seven_is_in_base() {
        let two = Padic::from_int(2, 7, 20);
        let r = padic_sqrt(&two).unwrap();
        let root = r.to_base().expect("2 is a 7-adic square");
        assert_eq!(root.residue(), Some(3));
        assert!(root.mul(&root).agrees(&two));
        assert_eq!(root.abs_prec(), 20);
    }

    #[test]
    fn sqrt_one() {
        let r = padic_sqrt(&Padic::one(7, 20)).unwrap().to_base().unwrap();
        assert!(r.agrees(&Padic::one(7, 20)));
    }

    #[test]
    fn sqrt_seven_is_ramified_uniformizer() {
        let seven = Padic::from_int(7, 7, 20);
        let r = padic_sqrt(&seven).unwrap();
        assert_eq!(r.ext.kind, ExtKind::Ramified);
        assert_eq!(r.half_valuation(), Some(1));
        let sq = r.mul(&r);
        assert!(sq.to_base().unwrap().agrees(&seven));
    }

    #[test]
    fn sqrt_nonresidue_is_unramified() {
        let three = Padic::from_int(3, 7, 20);
        let r = padic_sqrt(&three).unwrap();
        assert_eq!(r.ext.kind, ExtKind::Unramified);
        assert!(r.mul(&r).to_base().unwrap().agrees(&three));
    }

    #[test]
    fn hensel_on_linear_and_failure() {
        let c = Padic::from_int(5, 7, 20);
        let f = Poly::new(vec![c.neg(), Padic::one(7, 20)]);
        assert!(hensel_root(&f, &c).unwrap().agrees(&c));
        let g = Poly::new(vec![Padic::from_int(-7, 7, 20), Padic::exact_zero(7), Padic::one(7, 20)]);
        assert!(matches!(
            hensel_root(&g, &Padic::exact_zero(7)),
            Err(Error::NotHenselLiftable(_))
        ));
    }

    #[test]
    fn hensel_sqrt_two_iterates_to_square() {
        let f = Poly::new(vec![Padic::from_int(-2, 7, 30), Padic::exact_zero(7), Padic::one(7, 30)]);
        let r = hensel_root(&f, &Padic::from_int(3, 7, 30)).unwrap();
        assert!(f.eval(&r).is_zero());
        assert_eq!(r.residue(), Some(3));
    }
}
