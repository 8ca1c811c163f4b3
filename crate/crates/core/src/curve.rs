//! Genus-2 curves `y^2 = f(x)` with `f` a monic quintic over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Fp, Fp2, Poly};
use crate::padic::{hensel_root, legendre, Padic, PadicPowerSeries, TailBound};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint<F> {
    Infinity,
    Affine { x: F, y: F },
}

pub type RationalPoint = CurvePoint<BigRational>;

impl<F: Field> CurvePoint<F> {
    pub fn affine(x: F, y: F) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn involution(&self) -> Self {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.clone(), y: y.neg() },
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

impl RationalPoint {
    pub fn from_ints(x: i64, y: i64) -> Self {
        CurvePoint::affine(BigRational::from_integer(x.into()), BigRational::from_integer(y.into()))
    }

    pub fn to_padic(&self, p: u64, prec: u32) -> CurvePoint<Padic> {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(
                Padic::from_rational(x, p, prec),
                Padic::from_rational(y, p, prec),
            ),
        }
    }
}

fn ratio_mod(q: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = q.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let d = den.to_u64().expect("small");
    let inv = crate::field::pow_mod(d, p - 2, p);
    let n = q.numer().mod_floor(&pb).to_u64().expect("small");
    Some(((n as u128 * inv as u128) % p as u128) as u64)
}

/// Determinant of an integer matrix by fraction-free elimination.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two integer polynomials (low degree first) via Sylvester.
fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in a.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in b.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    bareiss_det(rows)
}

/// Parameter used in a residue disc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscKind {
    /// `t = x - x0`, centre with `y0` a unit.
    Ordinary,
    /// `t = y - y0`, centre reducing to a Weierstrass point.
    Weierstrass,
    /// `t = x^2 / y` at the point at infinity.
    Infinity,
}

/// `t^shift * series`.
#[derive(Clone, Debug)]
pub struct Laurent {
    pub shift: i64,
    pub series: PadicPowerSeries,
}

/// Coordinates and the basis differentials `x^(j-1) dx/(2y)`, `j = 1, 2`,
/// expanded in the disc parameter around a centre.
#[derive(Clone, Debug)]
pub struct LocalExpansion {
    pub kind: DiscKind,
    pub center: CurvePoint<Padic>,
    pub x: Laurent,
    pub y: Laurent,
    pub omega: [PadicPowerSeries; 2],
    /// The involution-free auxiliary series used for the alternative
    /// parameter: `X(t) = x - x0` at Weierstrass centres, `h(t^2)` with
    /// `1/x = t^2 h(t^2)` at infinity, `S(t)` with `y = y0 S(t)` otherwise.
    aux: PadicPowerSeries,
}

/// `w = (c1 + c2 x) dx / (2y)`, normalized so that `min(v(c1), v(c2)) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Differential {
    pub c1: Padic,
    pub c2: Padic,
}

impl Differential {
    pub fn new(c1: Padic, c2: Padic) -> Result<Self> {
        let k = match (c1.valuation(), c2.valuation()) {
            (None, None) => {
                return Err(Error::InvalidInput("differential with both coefficients zero".into()))
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        Ok(Differential { c1: c1.shift(-k), c2: c2.shift(-k) })
    }

    /// Coefficient series `a(t)` with `w = a(t) dt`.
    pub fn expand(&self, e: &LocalExpansion) -> PadicPowerSeries {
        e.omega[0].scale(&self.c1).add(&e.omega[1].scale(&self.c2))
    }
}

fn padic_poly(coeffs: &[BigInt], p: u64, prec: u32) -> Poly<Padic> {
    Poly::new(coeffs.iter().map(|c| Padic::from_bigint(c, p, prec)).collect())
}


/// `f(x(t))` truncated to `len` coefficients.
fn poly_at_series(f: &Poly<Padic>, x: &PadicPowerSeries, len: usize) -> PadicPowerSeries {
    let p = x.prime();
    let mut acc = PadicPowerSeries::polynomial(p, vec![Padic::exact_zero(p)]).with_len(len);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(x).with_len(len);
        acc = acc.add(&PadicPowerSeries::polynomial(p, vec![c.clone()]));
    }
    acc.with_len(len)
}

/// `f(x0 + t)` as a polynomial in `t`.
fn taylor_shift(f: &Poly<Padic>, x0: &Padic) -> Poly<Padic> {
    let p = x0.prime();
    let prec = f.coeffs().iter().chain([x0]).map(|c| c.rel_prec()).max().unwrap_or(1).max(1);
    let lin = Poly::new(vec![x0.clone(), Padic::one(p, prec)]);
    let mut acc: Poly<Padic> = Poly::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
    }
    acc
}

/// Extends with exact zeros; used while a Newton iteration is still filling
/// in the higher coefficients.
fn padded(s: &PadicPowerSeries, n: usize) -> PadicPowerSeries {
    let p = s.prime();
    let mut c = s.coeffs().to_vec();
    c.truncate(n);
    c.resize(n, Padic::exact_zero(p));
    PadicPowerSeries::new(p, c, None)
}

/// Spreads a series in `tau` to one in `t` with `tau = t^2`.
fn spread_even(s: &PadicPowerSeries, len: usize) -> PadicPowerSeries {
    let p = s.prime();
    let coeffs = (0..len)
        .map(|m| if m % 2 == 0 { s.coeff(m / 2) } else { Padic::exact_zero(p) })
        .collect();
    PadicPowerSeries::new(p, coeffs, s.tail())
}

/// Sets every coefficient to integral tail; used where integrality of the
/// omitted coefficients follows from the construction (good reduction and
/// a unit leading term).
fn integral(s: PadicPowerSeries) -> PadicPowerSeries {
    s.with_tail(Some(TailBound::INTEGRAL))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    coeffs: [i64; 6],
    disc: BigInt,
}

impl HyperellipticCurve {
    /// `coeffs[i]` multiplies `x^i`; `coeffs[5]` must be 1.
    pub fn new(coeffs: [i64; 6]) -> Result<Self> {
        if coeffs[5] != 1 {
            return Err(Error::InvalidInput("f must be monic of degree 5".into()));
        }
        let f: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        let df: Vec<BigInt> = (1..6).map(|i| BigInt::from(coeffs[i] * i as i64)).collect();
        // For monic f of degree 5 the sign (-1)^(5*4/2) is +1.
        let disc = resultant(&f, &df);
        if disc.is_zero() {
            return Err(Error::InvalidInput("f has a repeated root".into()));
        }
        Ok(HyperellipticCurve { coeffs, disc })
    }

    pub fn coeffs(&self) -> &[i64; 6] {
        &self.coeffs
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    fn big_coeffs(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    pub fn f_like<F: Field>(&self, like: &F) -> Poly<F> {
        Poly::new(self.coeffs.iter().map(|&c| like.from_i64_like(c)).collect())
    }

    pub fn f_rational(&self) -> Poly<BigRational> {
        self.f_like(&BigRational::zero())
    }

    pub fn f_padic(&self, p: u64, prec: u32) -> Poly<Padic> {
        padic_poly(&self.big_coeffs(), p, prec)
    }

    pub fn f_fp(&self, p: u64) -> Poly<Fp> {
        self.f_like(&Fp::new(0, p))
    }

    pub fn good_reduction(&self, p: u64) -> bool {
        p >= 3 && is_prime(p) && !(&self.disc % BigInt::from(p)).is_zero()
    }

    /// Exact over `Q` and `F_p`; "zero at precision" over `Q_p`.
    pub fn is_on_curve<F: Field>(&self, pt: &CurvePoint<F>) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => y.mul(y).sub(&self.f_like(x).eval(x)).is_zero(),
        }
    }

    pub fn reduce_point(&self, pt: &RationalPoint, p: u64) -> CurvePoint<Fp> {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => match ratio_mod(x, p) {
                None => CurvePoint::Infinity,
                Some(xb) => {
                    let yb = ratio_mod(y, p).expect("y is integral when x is");
                    CurvePoint::affine(Fp { v: xb, p }, Fp { v: yb, p })
                }
            },
        }
    }

    pub fn reduce_padic_point(&self, pt: &CurvePoint<Padic>) -> Result<CurvePoint<Fp>> {
        match pt {
            CurvePoint::Infinity => Ok(CurvePoint::Infinity),
            CurvePoint::Affine { x, y } => {
                let p = x.prime();
                if x.valuation().is_some_and(|v| v < 0) {
                    return Ok(CurvePoint::Infinity);
                }
                match (x.residue(), y.residue()) {
                    (Some(a), Some(b)) => Ok(CurvePoint::affine(Fp { v: a, p }, Fp { v: b, p })),
                    _ => Err(Error::precision("point known to fewer than one digit")),
                }
            }
        }
    }

    pub fn fp_points(&self, p: u64) -> Vec<CurvePoint<Fp>> {
        let f = self.f_fp(p);
        let mut pts = vec![CurvePoint::Infinity];
        for a in 0..p {
            let x = Fp { v: a, p };
            let fx = f.eval(&x);
            for b in 0..p {
                let y = Fp { v: b, p };
                if y.mul(&y) == fx {
                    pts.push(CurvePoint::affine(x, y));
                }
            }
        }
        pts
    }

    pub fn count_fp_points(&self, p: u64) -> usize {
        let f = self.f_fp(p);
        let affine: i64 = (0..p)
            .map(|a| 1 + legendre(f.eval(&Fp { v: a, p }).v, p) as i64)
            .sum();
        affine as usize + 1
    }

    pub fn count_fp2_points(&self, p: u64) -> usize {
        let f = self.f_like(&Fp2::new(0, 0, p));
        let affine: usize = Fp2::all(p)
            .map(|x| {
                let fx = f.eval(&x);
                if fx.is_zero() {
                    1
                } else if fx.is_square() {
                    2
                } else {
                    0
                }
            })
            .sum();
        affine + 1
    }

    /// Lift of an `F_p`-point: `x` the least non-negative representative
    /// (Hensel-corrected onto a root of `f` at Weierstrass points), `y` the
    /// Hensel square root.
    pub fn lift_point(&self, pt: &CurvePoint<Fp>, prec: u32) -> Result<CurvePoint<Padic>> {
        let CurvePoint::Affine { x, y } = pt else { return Ok(CurvePoint::Infinity) };
        let p = x.p;
        let f = self.f_padic(p, prec);
        if y.v == 0 {
            let r = hensel_root(&f, &Padic::from_int(x.v as i64, p, prec))?;
            return Ok(CurvePoint::affine(r, Padic::exact_zero(p)));
        }
        let x0 = Padic::from_int(x.v as i64, p, prec);
        let fx = f.eval(&x0);
        let sq = Poly::new(vec![fx.neg(), Padic::exact_zero(p), Padic::one(p, prec)]);
        let y0 = hensel_root(&sq, &Padic::from_int(y.v as i64, p, prec))?;
        Ok(CurvePoint::affine(x0, y0))
    }

    /// Expansion of `x`, `y`, `omega_1`, `omega_2` in the parameter of the disc
    /// around `center`, with `order + 1` coefficients.
    pub fn local_expansion(
        &self,
        center: &CurvePoint<Padic>,
        p: u64,
        order: usize,
        prec: u32,
    ) -> Result<LocalExpansion> {
        if !self.good_reduction(p) {
            return Err(Error::InvalidInput(format!("bad reduction at {p}")));
        }
        let len = order + 1;
        let f = self.f_padic(p, prec);
        match center {
            CurvePoint::Infinity => self.expand_at_infinity(p, len, prec),
            CurvePoint::Affine { x, y } => {
                if x.valuation_lower_bound() < 0 {
                    return Err(Error::InvalidInput("centre must have integral x".into()));
                }
                if y.valuation() == Some(0) {
                    Ok(ordinary_expansion(&f, center.clone(), x, y, len))
                } else {
                    weierstrass_expansion(&f, center.clone(), x, y, len, prec)
                }
            }
        }
    }

    fn expand_at_infinity(&self, p: u64, len: usize, prec: u32) -> Result<LocalExpansion> {
        // With Z = 1/x and tau = t^2: Z = tau * g(Z), g(z) = z^5 f(1/z).
        let g_coeffs: Vec<Padic> =
            self.coeffs.iter().rev().map(|&c| Padic::from_int(c, p, prec)).collect();
        let g = Poly::new(g_coeffs);
        let tl = len / 2 + 4;
        let mut z = PadicPowerSeries::polynomial(p, vec![Padic::exact_zero(p)]).with_len(tl);
        for _ in 0..tl {
            z = poly_at_series(&g, &z, tl).shift_up(1);
        }
        let z = integral(z);
        // h = Z / tau, a unit series.
        let h = integral(PadicPowerSeries::new(p, (1..tl).map(|i| z.coeff(i)).collect(), None));
        let hinv = integral(h.inverse()?);
        let tau_dz = z.derivative().with_len(tl).shift_up(1);
        let omega1 = integral(tau_dz.neg());
        // -(tau Z')/Z = -(h + tau h')/h
        let omega2 = integral(h.add(&h.derivative().shift_up(1)).mul(&hinv).neg());
        let x = Laurent { shift: -2, series: integral(spread_even(&hinv, len)) };
        let y = Laurent { shift: -5, series: integral(spread_even(&hinv.mul(&hinv), len)) };
        Ok(LocalExpansion {
            kind: DiscKind::Infinity,
            center: CurvePoint::Infinity,
            x,
            y,
            omega: [spread_even(&omega1, len), spread_even(&omega2, len)],
            aux: spread_even(&h, len),
        })
    }

    /// Parameter-change series `s = phi(t)` for a second admissible
    /// parameter of the same disc: `y/x^3` at infinity, `y - y0` at an
    /// ordinary centre where that is a uniformizer, and otherwise
    /// `(x - x0) + (y - y0)`.
    pub fn alternate_parameter(&self, e: &LocalExpansion) -> Result<PadicPowerSeries> {
        let p = e.aux.prime();
        let len = e.aux.coeffs().len();
        let t = PadicPowerSeries::polynomial(p, vec![Padic::exact_zero(p), Padic::one(p, 40)]);
        let phi = match e.kind {
            DiscKind::Infinity => e.aux.mul(&t),
            DiscKind::Ordinary => {
                let CurvePoint::Affine { y, .. } = &e.center else { unreachable!() };
                let mut dy = e.aux.scale(y);
                dy = dy.sub(&PadicPowerSeries::polynomial(p, vec![y.clone()]));
                if dy.coeff(1).valuation() == Some(0) {
                    dy
                } else {
                    dy.add(&t)
                }
            }
            DiscKind::Weierstrass => e.aux.add(&t),
        };
        Ok(integral(phi.with_len(len)))
    }
}

/// `a(t) dt` rewritten in the parameter `s = phi(t)`.
pub fn reparametrize(a: &PadicPowerSeries, phi: &PadicPowerSeries) -> Result<PadicPowerSeries> {
    let psi = phi.reversion()?;
    let len = a.coeffs().len().min(psi.coeffs().len());
    let a_psi = a.with_len(len).compose(&psi.with_len(len))?;
    Ok(a_psi.mul(&psi.derivative().with_len(len)))
}

/// `S(t)` with `S(0) = 1` and `S^2 = f(x0 + t) / norm`, where `norm` is a
/// unit agreeing with `f(x0)`.
pub(crate) fn sqrt_ratio_series(f: &Poly<Padic>, x0: &Padic, norm: &Padic, len: usize) -> PadicPowerSeries {
    let p = x0.prime();
    let ft = taylor_shift(f, x0);
    let q: Vec<Padic> = (0..len)
        .map(|k| ft.coeff(k).cloned().unwrap_or_else(|| Padic::exact_zero(p)))
        .map(|c| c.div(norm).expect("norm is a unit"))
        .collect();
    let mut s = vec![Padic::one(p, norm.rel_prec())];
    for k in 1..len {
        let mut acc = q[k].clone();
        for i in 1..k {
            acc = acc.sub(&s[i].mul(&s[k - i]));
        }
        s.push(acc.div_int(2).expect("p is odd"));
    }
    integral(PadicPowerSeries::new(p, s, None))
}

fn ordinary_expansion(
    f: &Poly<Padic>,
    center: CurvePoint<Padic>,
    x0: &Padic,
    y0: &Padic,
    len: usize,
) -> LocalExpansion {
    let p = x0.prime();
    let s = sqrt_ratio_series(f, x0, &y0.mul(y0), len);
    let two_y0 = y0.mul_int(2);
    let omega1 = integral(s.inverse().expect("unit constant term").scale(&two_y0.inv().expect("unit")));
    let xs = PadicPowerSeries::polynomial(p, vec![x0.clone(), Padic::one(p, y0.rel_prec())]);
    let omega2 = integral(omega1.mul(&xs));
    LocalExpansion {
        kind: DiscKind::Ordinary,
        center,
        x: Laurent { shift: 0, series: xs.with_len(len) },
        y: Laurent { shift: 0, series: integral(s.scale(y0)) },
        omega: [omega1, omega2],
        aux: s,
    }
}

fn weierstrass_expansion(
    f: &Poly<Padic>,
    center: CurvePoint<Padic>,
    x0: &Padic,
    y0: &Padic,
    len: usize,
    prec: u32,
) -> Result<LocalExpansion> {
    let p = x0.prime();
    let df = f.derivative();
    let d0 = df.eval(x0);
    if d0.valuation() != Some(0) {
        return Err(Error::InvalidInput("f' must be a unit at a Weierstrass centre".into()));
    }
    // Solve f(x0 + X) - f(x0) = 2 y0 t + t^2 for X(t), X(0) = 0.
    let ft = taylor_shift(f, x0);
    let mut qc = ft.coeffs().to_vec();
    qc[0] = Padic::exact_zero(p);
    let q = Poly::new(qc);
    let dq = q.derivative();
    let one = Padic::one(p, prec);
    let rhs = PadicPowerSeries::polynomial(p, vec![Padic::exact_zero(p), y0.mul_int(2), one.clone()]);
    let mut x = PadicPowerSeries::polynomial(
        p,
        vec![Padic::exact_zero(p), rhs.coeff(1).div(&d0)?],
    );
    let mut cur = 2;
    loop {
        cur = (2 * cur).min(len);
        let xs = padded(&x, cur);
        let err = poly_at_series(&q, &xs, cur).sub(&rhs.with_len(cur));
        let der = poly_at_series(&dq, &xs, cur);
        x = xs.sub(&err.mul(&der.inverse()?).with_len(cur));
        // Newton may leave a rounding-level constant term; it is exactly 0.
        let mut c = x.coeffs().to_vec();
        c[0] = Padic::exact_zero(p);
        x = PadicPowerSeries::new(p, c, None);
        if cur == len {
            break;
        }
    }
    let x = integral(x.with_len(len));
    let xfull = x.add(&PadicPowerSeries::polynomial(p, vec![x0.clone()]));
    let omega1 = integral(poly_at_series(&df, &xfull, len).inverse()?);
    let omega2 = integral(omega1.mul(&xfull));
    let y = PadicPowerSeries::polynomial(p, vec![y0.clone(), one]).with_len(len);
    Ok(LocalExpansion {
        kind: DiscKind::Weierstrass,
        center,
        x: Laurent { shift: 0, series: integral(xfull) },
        y: Laurent { shift: 0, series: y },
        omega: [omega1, omega2],
        aux: x,
    })
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `v(a_0)` for `w` expanded around `q` itself.
pub fn v_of_w(
    c: &HyperellipticCurve,
    w: &Differential,
    q: &CurvePoint<Padic>,
    p: u64,
    prec: u32,
) -> Result<i64> {
    let e = c.local_expansion(q, p, 2, prec)?;
    w.expand(&e).coeff(0).valuation().ok_or_else(|| {
        Error::TransversalityFailure("leading coefficient vanishes at working precision".into())
    })
}

/// Exact rational `x` with `num/den`, as a helper for tests and fixtures.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub(crate) fn abs_height(q: &BigRational) -> BigInt {
    q.numer().abs().max(q.denom().abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flynn() -> HyperellipticCurve {
        // x(x-1)(x-2)(x-5)(x-6)
        HyperellipticCurve::new([0, 60, -112, 65, -14, 1]).unwrap()
    }

    #[test]
    fn flynn_coefficients_expand_the_product() {
        let c = flynn();
        for r in [0, 1, 2, 5, 6] {
            assert!(Zero::is_zero(&c.f_rational().eval(&rat(r, 1))));
        }
        assert_eq!(c.f_rational().eval(&rat(3, 1)), rat(36, 1));
    }

    #[test]
    fn on_curve_checks() {
        let c = flynn();
        assert!(c.is_on_curve(&RationalPoint::from_ints(3, 6)));
        assert!(c.is_on_curve(&RationalPoint::Infinity));
        assert!(!c.is_on_curve(&RationalPoint::from_ints(3, 5)));
        assert!(c.is_on_curve(&RationalPoint::from_ints(10, 120)));
    }

    #[test]
    fn reduction_primes() {
        let c = flynn();
        assert!(c.good_reduction(7));
        assert!(!c.good_reduction(2));
        assert!(!c.good_reduction(5));
        assert!(!c.good_reduction(3));
    }

    #[test]
    fn reduce_points() {
        let c = flynn();
        let r = c.reduce_point(&RationalPoint::from_ints(10, 120), 7);
        assert_eq!(r, CurvePoint::affine(Fp { v: 3, p: 7 }, Fp { v: 1, p: 7 }));
        assert_eq!(c.reduce_point(&RationalPoint::Infinity, 7), CurvePoint::Infinity);
        let x = rat(1, 7);
        let y2 = c.f_rational().eval(&x);
        // f(1/7) need not be a square; reduce_point only looks at x here.
        let pt = CurvePoint::affine(x, y2);
        assert_eq!(c.reduce_point(&pt, 7), CurvePoint::Infinity);
    }

    #[test]
    fn point_counts() {
        let c = flynn();
        assert_eq!(c.count_fp_points(7), 8);
        assert_eq!(c.fp_points(7).len(), 8);
        assert_eq!(c.count_fp_points(11), c.fp_points(11).len());
    }

    fn check_curve_equation(c: &HyperellipticCurve, e: &LocalExpansion, len: usize) {
        let p = e.omega[0].prime();
        let f = c.f_padic(p, 20);
        let (x, y) = (&e.x.series, &e.y.series);
        match e.kind {
            DiscKind::Infinity => {
                // t^10 y^2 = sum a_i t^(10-2i) (t^2 x)^i
                let lhs = y.mul(y).with_len(len);
                let mut rhs = PadicPowerSeries::polynomial(p, vec![Padic::exact_zero(p)]).with_len(len);
                let mut xp = PadicPowerSeries::polynomial(p, vec![Padic::one(p, 20)]).with_len(len);
                for i in 0..6 {
                    let term = xp.scale(f.coeff(i).unwrap_or(&Padic::exact_zero(p))).shift_up(10 - 2 * i);
                    rhs = rhs.add(&term);
                    xp = xp.mul(x).with_len(len);
                }
                let d = lhs.sub(&rhs);
                for k in 0..len {
                    assert!(d.coeff(k).is_zero(), "coefficient {k}: {}", d.coeff(k));
                }
            }
            _ => {
                let d = y.mul(y).with_len(len).sub(&poly_at_series(&f, x, len));
                for k in 0..len {
                    assert!(d.coeff(k).is_zero(), "coefficient {k}: {}", d.coeff(k));
                }
            }
        }
    }

    #[test]
    fn expansions_satisfy_the_curve_equation() {
        let c = flynn();
        for pt in c.fp_points(7) {
            let center = c.lift_point(&pt, 20).unwrap();
            let e = c.local_expansion(&center, 7, 12, 20).unwrap();
            check_curve_equation(&c, &e, 13);
        }
    }

    #[test]
    fn ordinary_expansion_at_three_six() {
        let c = flynn();
        let center = RationalPoint::from_ints(3, 6).to_padic(7, 20);
        let e = c.local_expansion(&center, 7, 6, 20).unwrap();
        assert_eq!(e.kind, DiscKind::Ordinary);
        // y'(0) = f'(3) / 12
        let fp3 = c.f_rational().derivative().eval(&rat(3, 1));
        let expect = Padic::from_rational(&(fp3 / rat(12, 1)), 7, 20);
        assert!(e.y.series.coeff(1).agrees(&expect));
        let a0 = Padic::from_rational(&rat(1, 12), 7, 20);
        assert!(e.omega[0].coeff(0).agrees(&a0));
    }

    #[test]
    fn weierstrass_expansion_leading_terms() {
        let c = flynn();
        for r in [0i64, 1, 2, 5, 6] {
            let center = RationalPoint::from_ints(r, 0).to_padic(7, 20);
            let e = c.local_expansion(&center, 7, 8, 20).unwrap();
            let fpr = c.f_rational().derivative().eval(&rat(r, 1));
            let lead = Padic::from_rational(&(rat(1, 1) / fpr), 7, 20);
            assert!(e.x.series.coeff(1).is_zero());
            assert!(e.x.series.coeff(2).agrees(&lead));
            assert!(e.x.series.coeff(2).abs_prec() >= 19);
            assert!(e.x.series.coeff(3).is_zero());
        }
        let w = Differential::new(Padic::exact_zero(7), Padic::one(7, 20)).unwrap();
        let e = c.local_expansion(&RationalPoint::from_ints(0, 0).to_padic(7, 20), 7, 4, 20).unwrap();
        assert!(w.expand(&e).coeff(0).is_zero());
    }

    #[test]
    fn infinity_expansion_leading_terms() {
        let c = flynn();
        let e = c.local_expansion(&CurvePoint::Infinity, 7, 10, 20).unwrap();
        assert_eq!(e.x.shift, -2);
        assert!(e.x.series.coeff(0).agrees(&Padic::one(7, 20)));
        assert!(e.omega[0].coeff(0).is_zero());
        assert!(e.omega[1].coeff(0).agrees(&Padic::from_int(-1, 7, 20)));
    }

    #[test]
    fn v_of_w_examples() {
        let c = flynn();
        let q = RationalPoint::from_ints(3, 6).to_padic(7, 20);
        let w = Differential::new(Padic::one(7, 20), Padic::exact_zero(7)).unwrap();
        assert_eq!(v_of_w(&c, &w, &q, 7, 20).unwrap(), 0);
        let scaled = Differential::new(Padic::from_int(7, 7, 20), Padic::exact_zero(7)).unwrap();
        assert_eq!(scaled, w);
    }

    #[test]
    fn alternate_parameter_keeps_v_of_w() {
        let c = flynn();
        let w = Differential::new(Padic::from_int(3, 7, 20), Padic::from_int(-1, 7, 20)).unwrap();
        for pt in c.fp_points(7) {
            let center = c.lift_point(&pt, 20).unwrap();
            let e = c.local_expansion(&center, 7, 6, 20).unwrap();
            let a = w.expand(&e);
            let phi = c.alternate_parameter(&e).unwrap();
            let b = reparametrize(&a, &phi).unwrap();
            assert_eq!(a.coeff(0).valuation(), b.coeff(0).valuation(), "{pt:?}");
        }
    }
}
