//! Jacobian arithmetic in Mumford representation.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::curve::{CurvePoint, HyperellipticCurve, RationalPoint};
use crate::error::{Error, Result};
use crate::field::{Field, Fp, Fp2, Poly};
use crate::padic::{padic_sqrt, Padic, QuadElem};

/// `(u, v)` with `u` monic, `deg v < deg u <= 2` and `u | v^2 - f`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mumford<F> {
    pub u: Poly<F>,
    pub v: Poly<F>,
}

impl<F: Field> std::fmt::Debug for Mumford<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:?}, {:?})", self.u, self.v)
    }
}

pub type RationalDivisor = Mumford<BigRational>;

impl<F: Field> Mumford<F> {
    pub fn identity(like: &F) -> Self {
        Mumford { u: Poly::constant(like.one_like()), v: Poly::zero() }
    }

    pub fn new(u: Poly<F>, v: Poly<F>) -> Self {
        Mumford { u, v }
    }

    pub fn is_identity(&self) -> bool {
        self.u.deg() == 0
    }

    pub fn degree(&self) -> usize {
        self.u.degree().unwrap_or(0)
    }

    pub fn negate(&self) -> Self {
        let v = if self.v.is_zero() { Poly::zero() } else { self.v.neg() };
        Mumford { u: self.u.clone(), v }
    }

    /// Checks the Mumford conditions against `f`.
    pub fn is_valid(&self, f: &Poly<F>) -> bool {
        let monic = self
            .u
            .lead()
            .is_some_and(|l| l.sub(&l.one_like()).is_zero());
        monic
            && self.u.deg() <= 2
            && self.v.deg() < self.u.deg()
            && self.v.mul(&self.v).sub(f).rem(&self.u).is_ok_and(|r| r.is_zero())
    }
}

impl RationalDivisor {
    pub fn from_ints(u: &[i64], v: &[i64]) -> Self {
        let conv = |c: &[i64]| Poly::new(c.iter().map(|&n| BigRational::from_integer(n.into())).collect());
        Mumford { u: conv(u), v: conv(v) }
    }

    pub fn to_padic(&self, p: u64, prec: u32) -> Mumford<Padic> {
        let conv = |a: &Poly<BigRational>| {
            Poly::new(a.coeffs().iter().map(|c| Padic::from_rational(c, p, prec)).collect())
        };
        Mumford { u: conv(&self.u), v: conv(&self.v) }
    }
}

/// Group law by composition and reduction.
pub fn cantor_add<F: Field>(f: &Poly<F>, a: &Mumford<F>, b: &Mumford<F>) -> Result<Mumford<F>> {
    if a.is_identity() {
        return Ok(b.clone());
    }
    if b.is_identity() {
        return Ok(a.clone());
    }
    let (d1, e1, e2) = Poly::xgcd(&a.u, &b.u)?;
    let vsum = a.v.add(&b.v);
    let (d, s1, s2, s3) = if vsum.is_zero() {
        (d1, e1, e2, Poly::zero())
    } else {
        let (d, c1, c2) = Poly::xgcd(&d1, &vsum)?;
        (d, c1.mul(&e1), c1.mul(&e2), c2)
    };
    let (uu, r) = a.u.mul(&b.u).divrem(&d.mul(&d))?;
    debug_assert!(r.is_zero());
    let num = s1
        .mul(&a.u)
        .mul(&b.v)
        .add(&s2.mul(&b.u).mul(&a.v))
        .add(&s3.mul(&a.v.mul(&b.v).add(f)));
    let (vv, _) = num.divrem(&d)?;
    let mut u = uu;
    let mut v = vv.rem(&u)?;
    while u.deg() > 2 {
        let (un, _) = f.sub(&v.mul(&v)).divrem(&u)?;
        u = un;
        v = v.neg().rem(&u)?;
    }
    let u = u.monic()?;
    let v = v.rem(&u)?;
    Ok(Mumford { u, v })
}

/// `m * d` by double-and-add; negative `m` negates.
pub fn scalar_mul<F: Field>(f: &Poly<F>, m: i64, d: &Mumford<F>) -> Result<Mumford<F>> {
    let like = d.u.lead().expect("u is monic").clone();
    let mut acc = Mumford::identity(&like);
    let mut base = if m < 0 { d.negate() } else { d.clone() };
    let mut k = m.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = cantor_add(f, &acc, &base)?;
        }
        k >>= 1;
        if k > 0 {
            base = cantor_add(f, &base, &base)?;
        }
    }
    Ok(acc)
}

/// `[Q - inf]`.
pub fn point_divisor<F: Field>(q: &CurvePoint<F>, like: &F) -> Mumford<F> {
    match q {
        CurvePoint::Infinity => Mumford::identity(like),
        CurvePoint::Affine { x, y } => Mumford {
            u: Poly::new(vec![x.neg(), x.one_like()]),
            v: Poly::constant(y.clone()),
        },
    }
}

/// `[Q - P0]`.
pub fn embed_point(
    c: &HyperellipticCurve,
    q: &RationalPoint,
    p0: &RationalPoint,
) -> Result<RationalDivisor> {
    let z = BigRational::zero();
    let f = c.f_rational();
    cantor_add(&f, &point_divisor(q, &z), &point_divisor(p0, &z).negate())
}

/// The rational point `Q` with `[Q - P0] = D`, if there is one.
pub fn curve_preimage(
    c: &HyperellipticCurve,
    d: &RationalDivisor,
    p0: &RationalPoint,
) -> Result<Option<RationalPoint>> {
    let z = BigRational::zero();
    let e = cantor_add(&c.f_rational(), d, &point_divisor(p0, &z))?;
    Ok(match e.degree() {
        0 => Some(CurvePoint::Infinity),
        1 => {
            let x = e.u.coeffs()[0].neg();
            let y = e.v.coeff(0).cloned().unwrap_or_else(BigRational::zero);
            Some(CurvePoint::affine(x, y))
        }
        _ => None,
    })
}

/// `J(F_p)` by enumeration of Mumford pairs.
#[derive(Clone, Debug)]
pub struct FpJacobian {
    pub p: u64,
    pub elements: Vec<Mumford<Fp>>,
    pub order: u64,
    pub exponent: u64,
    index: HashMap<Mumford<Fp>, usize>,
    f: Poly<Fp>,
}

impl FpJacobian {
    pub fn f(&self) -> &Poly<Fp> {
        &self.f
    }

    pub fn contains(&self, d: &Mumford<Fp>) -> bool {
        self.index.contains_key(d)
    }

    pub fn index_of(&self, d: &Mumford<Fp>) -> Option<usize> {
        self.index.get(d).copied()
    }

    pub fn identity(&self) -> Mumford<Fp> {
        Mumford::identity(&Fp::new(0, self.p))
    }

    pub fn add(&self, a: &Mumford<Fp>, b: &Mumford<Fp>) -> Mumford<Fp> {
        cantor_add(&self.f, a, b).expect("F_p arithmetic cannot lose precision")
    }

    pub fn mul(&self, m: i64, d: &Mumford<Fp>) -> Mumford<Fp> {
        scalar_mul(&self.f, m, d).expect("F_p arithmetic cannot lose precision")
    }

    /// Order of `d`, a divisor of the group order.
    pub fn element_order(&self, d: &Mumford<Fp>) -> u64 {
        let mut ord = self.order;
        for (q, _) in factor(self.order) {
            while ord % q == 0 && self.mul((ord / q) as i64, d).is_identity() {
                ord /= q;
            }
        }
        ord
    }
}

pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `#J(F_p)` from the point counts over `F_p` and `F_{p^2}`.
pub fn zeta_order(c: &HyperellipticCurve, p: u64) -> u64 {
    let n1 = c.count_fp_points(p) as u64;
    let n2 = c.count_fp2_points(p) as u64;
    (n1 * n1 + n2) / 2 - p
}

pub fn enumerate_fp_jacobian(c: &HyperellipticCurve, p: u64) -> Result<FpJacobian> {
    if !c.good_reduction(p) {
        return Err(Error::InvalidInput(format!("bad reduction at {p}")));
    }
    let f = c.f_fp(p);
    let fp = |v: u64| Fp { v: v % p, p };
    let mut elements = vec![Mumford::identity(&fp(0))];
    for a in 0..p {
        let fa = f.eval(&fp(a));
        for b in 0..p {
            if fp(b).mul(&fp(b)) == fa {
                elements.push(Mumford {
                    u: Poly::new(vec![fp(p - a), fp(1)]),
                    v: Poly::new(vec![fp(b)]),
                });
            }
        }
    }
    let inv2 = fp(2).inv().expect("odd p");
    for c1 in 0..p {
        for c0 in 0..p {
            let u = Poly::new(vec![fp(c0), fp(c1), fp(1)]);
            let r = f.rem(&u).expect("monic");
            let r0 = r.coeff(0).copied().unwrap_or(fp(0));
            let r1 = r.coeff(1).copied().unwrap_or(fp(0));
            // (v1 x + v0)^2 mod u = (2 v0 v1 - c1 v1^2) x + (v0^2 - c0 v1^2)
            for v1 in 0..p {
                let v1 = fp(v1);
                let sq = v1.mul(&v1);
                let cands: Vec<Fp> = if v1.v == 0 {
                    if r1.v != 0 {
                        continue;
                    }
                    (0..p).map(fp).filter(|v0| v0.mul(v0) == r0).collect()
                } else {
                    let v0 = r1.add(&fp(c1).mul(&sq)).mul(&inv2).mul(&v1.inv().expect("nonzero"));
                    if v0.mul(&v0).sub(&fp(c0).mul(&sq)) == r0 {
                        vec![v0]
                    } else {
                        vec![]
                    }
                };
                for v0 in cands {
                    elements.push(Mumford { u: u.clone(), v: Poly::new(vec![v0, v1]) });
                }
            }
        }
    }
    let order = elements.len() as u64;
    let index = elements.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
    let mut jac = FpJacobian { p, elements, order, exponent: 1, index, f };
    let mut exponent = 1u64;
    for d in &jac.elements {
        exponent = exponent.lcm(&jac.element_order(d));
        if exponent == order {
            break;
        }
    }
    jac.exponent = exponent;
    Ok(jac)
}

fn quad_point_residue(x: &QuadElem, y: &QuadElem) -> Result<Option<(Fp2, Fp2)>> {
    if x.half_valuation().is_some_and(|v| v < 0) {
        return Ok(None);
    }
    match (x.residue(), y.residue()) {
        (Some(a), Some(b)) => Ok(Some((a, b))),
        _ => Err(Error::precision("divisor point known to fewer than one digit")),
    }
}

/// Reduction of a `Q_p`-rational class through its points over at most a
/// quadratic extension.
pub fn reduce_divisor(c: &HyperellipticCurve, d: &Mumford<Padic>, p: u64) -> Result<Mumford<Fp>> {
    let zero = Fp::new(0, p);
    if d.is_identity() {
        return Ok(Mumford::identity(&zero));
    }
    let coeff = |q: &Poly<Padic>, i: usize| q.coeff(i).cloned().unwrap_or_else(|| Padic::exact_zero(p));
    let (v0, v1) = (coeff(&d.v, 0), coeff(&d.v, 1));
    let pts: Vec<(QuadElem, QuadElem)> = if d.degree() == 1 {
        let x = QuadElem::from_base(coeff(&d.u, 0).neg());
        let y = QuadElem::from_base(v0.clone());
        vec![(x, y)]
    } else {
        let (u0, u1) = (coeff(&d.u, 0), coeff(&d.u, 1));
        let disc = u1.mul(&u1).sub(&u0.mul_int(4));
        let r = padic_sqrt(&disc)?;
        let half = Padic::from_int(2, p, 64).inv()?;
        let mu1 = QuadElem::from_base(u1.neg());
        let xs = [mu1.add(&r), mu1.sub(&r)].map(|s| s.mul(&QuadElem::from_base(half.clone())));
        xs.into_iter()
            .map(|x| {
                let y = QuadElem::from_base(v0.clone()).add(&QuadElem::from_base(v1.clone()).mul(&x));
                (x, y)
            })
            .collect()
    };
    let f2 = c.f_like(&Fp2::new(0, 0, p));
    let z2 = Fp2::new(0, 0, p);
    let mut acc = Mumford::identity(&z2);
    for (x, y) in &pts {
        if let Some((a, b)) = quad_point_residue(x, y)? {
            acc = cantor_add(&f2, &acc, &point_divisor(&CurvePoint::affine(a, b), &z2))?;
        }
    }
    let down = |q: &Poly<Fp2>| -> Result<Poly<Fp>> {
        q.coeffs()
            .iter()
            .map(|c| c.in_base().ok_or_else(|| Error::DecompositionFailure("reduction is not F_p-rational".into())))
            .collect::<Result<Vec<_>>>()
            .map(Poly::new)
    };
    Ok(Mumford { u: down(&acc.u)?, v: down(&acc.v)? })
}

/// Reduction of a rational class, raising the working precision when the
/// divisor points cannot be resolved.
pub fn reduce_rational_divisor(c: &HyperellipticCurve, d: &RationalDivisor, p: u64) -> Result<Mumford<Fp>> {
    let mut prec = crate::padic::DEFAULT_PRECISION;
    for _ in 0..4 {
        match reduce_divisor(c, &d.to_padic(p, prec), p) {
            Err(Error::PrecisionLoss(_)) => prec *= 2,
            other => return other,
        }
    }
    reduce_divisor(c, &d.to_padic(p, prec), p)
}

/// Gcd of `#J(F_q)`; the order of any rational torsion point divides it.
pub fn torsion_multiple_bound(c: &HyperellipticCurve, primes: &[u64]) -> Result<u64> {
    let mut g = 0u64;
    let mut used = 0;
    for &q in primes {
        if c.good_reduction(q) {
            g = g.gcd(&enumerate_fp_jacobian(c, q)?.order);
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::InvalidInput("no good odd prime for the torsion bound".into()));
    }
    Ok(g)
}

/// True when `bound * gamma` is not the identity, so `gamma` has infinite
/// order whenever `bound` is a torsion multiple bound.
pub fn certify_non_torsion(c: &HyperellipticCurve, gamma: &RationalDivisor, bound: u64) -> Result<bool> {
    Ok(!scalar_mul(&c.f_rational(), bound as i64, gamma)?.is_identity())
}

/// Largest `n` with both log coordinates of `d` of valuation `>= n`, capped at
/// the precision of the log when it vanishes.
pub fn filtration_level(c: &HyperellipticCurve, d: &Mumford<Padic>, p: u64) -> Result<i64> {
    if !reduce_divisor(c, d, p)?.is_identity() {
        return Err(Error::InvalidInput("divisor does not lie in the kernel of reduction".into()));
    }
    let l = crate::coleman::log_kernel(c, d, p)?;
    Ok(l.l1.valuation_lower_bound().min(l.l2.valuation_lower_bound()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::rat;

    fn flynn() -> HyperellipticCurve {
        HyperellipticCurve::new([0, 60, -112, 65, -14, 1]).unwrap()
    }

    #[test]
    fn identity_and_two_torsion() {
        let c = flynn();
        let f = c.f_rational();
        let d = RationalDivisor::from_ints(&[0, 1], &[]);
        let id = Mumford::identity(&rat(0, 1));
        assert_eq!(cantor_add(&f, &d, &id).unwrap(), d);
        assert!(cantor_add(&f, &d, &d).unwrap().is_identity());
        let a = RationalDivisor::from_ints(&[-3, 1], &[6]);
        let b = RationalDivisor::from_ints(&[-3, 1], &[-6]);
        assert!(cantor_add(&f, &a, &b).unwrap().is_identity());
        assert_eq!(scalar_mul(&f, -1, &a).unwrap(), b);
        assert_eq!(scalar_mul(&f, 1, &a).unwrap(), a);
        assert!(scalar_mul(&f, 0, &a).unwrap().is_identity());
    }

    #[test]
    fn embedding_and_preimage() {
        let c = flynn();
        let q = RationalPoint::from_ints(3, 6);
        let inf = RationalPoint::Infinity;
        let d = embed_point(&c, &q, &inf).unwrap();
        assert_eq!(d, RationalDivisor::from_ints(&[-3, 1], &[6]));
        assert!(embed_point(&c, &inf, &inf).unwrap().is_identity());
        assert_eq!(curve_preimage(&c, &d, &inf).unwrap(), Some(q.clone()));
        let p0 = RationalPoint::from_ints(10, 120);
        let d2 = embed_point(&c, &q, &p0).unwrap();
        assert_eq!(curve_preimage(&c, &d2, &p0).unwrap(), Some(q.clone()));
        let back = embed_point(&c, &p0, &q).unwrap();
        assert!(cantor_add(&c.f_rational(), &d2, &back).unwrap().is_identity());
        // A degree-2 class is not of the form [Q - inf].
        let two = cantor_add(&c.f_rational(), &d, &embed_point(&c, &p0, &inf).unwrap()).unwrap();
        assert_eq!(curve_preimage(&c, &two, &inf).unwrap(), None);
    }

    #[test]
    fn enumeration_matches_zeta_count() {
        let c = flynn();
        for p in [7, 11, 13, 17] {
            let j = enumerate_fp_jacobian(&c, p).unwrap();
            assert_eq!(j.order, zeta_order(&c, p), "p = {p}");
            assert_eq!(j.elements.iter().filter(|d| d.is_identity()).count(), 1);
            for d in &j.elements {
                assert!(d.is_valid(j.f()));
                assert!(j.mul(j.order as i64, d).is_identity());
            }
        }
    }

    #[test]
    fn group_axioms_over_f3_sized_curve() {
        let c = HyperellipticCurve::new([1, 2, 0, 1, 0, 1]).unwrap();
        let p = [3u64, 7].into_iter().find(|&p| c.good_reduction(p)).unwrap();
        let j = enumerate_fp_jacobian(&c, p).unwrap();
        let els = &j.elements;
        for a in els {
            for b in els {
                let ab = j.add(a, b);
                assert!(j.contains(&ab));
                assert_eq!(ab, j.add(b, a));
            }
            assert!(j.add(a, &a.negate()).is_identity());
        }
        for a in els.iter().take(12) {
            for b in els.iter().take(12) {
                for d in els.iter().take(12) {
                    assert_eq!(j.add(&j.add(a, b), d), j.add(a, &j.add(b, d)));
                }
            }
        }
    }

    #[test]
    fn reduction_paths_agree() {
        let c = flynn();
        let p = 7;
        let jac = enumerate_fp_jacobian(&c, p).unwrap();
        let a = RationalDivisor::from_ints(&[-3, 1], &[6]);
        let b = RationalDivisor::from_ints(&[-10, 1], &[120]);
        let f = c.f_rational();
        let ab = cantor_add(&f, &a, &b).unwrap();
        let ra = reduce_rational_divisor(&c, &a, p).unwrap();
        let rb = reduce_rational_divisor(&c, &b, p).unwrap();
        assert_eq!(reduce_rational_divisor(&c, &ab, p).unwrap(), jac.add(&ra, &rb));
        let direct = Mumford {
            u: Poly::new(vec![Fp::new(-3, p), Fp::new(1, p)]),
            v: Poly::new(vec![Fp::new(6, p)]),
        };
        assert_eq!(ra, direct);
    }

    #[test]
    fn torsion_bound_divisibility() {
        let c = flynn();
        let g = torsion_multiple_bound(&c, &[7, 11, 13]).unwrap();
        assert_eq!(g % 16, 0, "the rational 2-torsion has order 16");
        assert_eq!(
            torsion_multiple_bound(&c, &[7]).unwrap(),
            enumerate_fp_jacobian(&c, 7).unwrap().order
        );
        let gamma = RationalDivisor::from_ints(&[-3, 1], &[6]);
        assert!(certify_non_torsion(&c, &gamma, g).unwrap());
    }
}
