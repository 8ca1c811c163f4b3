//! Field abstraction shared by the rational, finite-field and p-adic code paths,
//! plus dense univariate polynomials over any such field.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::Padic;

/// Arithmetic needed by Cantor's algorithm and polynomial routines.
///
/// Constants are produced from an existing element so that context such as
/// the prime or the working precision travels with the values.
pub trait Field: Clone + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    /// For p-adic values: indistinguishable from zero at stated precision.
    fn is_zero(&self) -> bool;

    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Element of the prime field `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(v: i64, p: u64) -> Fp {
        Fp {
            v: v.rem_euclid(p as i64) as u64,
            p,
        }
    }

    pub fn is_square(&self) -> bool {
        self.v == 0 || pow_mod(self.v, (self.p - 1) / 2, self.p) == 1
    }

    /// A square root by exhaustive search; `p` is small throughout.
    pub fn sqrt(&self) -> Option<Fp> {
        (0..self.p)
            .find(|&r| (r * r) % self.p == self.v)
            .map(|r| Fp { v: r, p: self.p })
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Field for Fp {
    fn zero_like(&self) -> Self {
        Fp { v: 0, p: self.p }
    }
    fn one_like(&self) -> Self {
        Fp { v: 1, p: self.p }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Fp::new(n, self.p)
    }
    fn add(&self, o: &Self) -> Self {
        Fp { v: (self.v + o.v) % self.p, p: self.p }
    }
    fn sub(&self, o: &Self) -> Self {
        Fp { v: (self.v + self.p - o.v) % self.p, p: self.p }
    }
    fn mul(&self, o: &Self) -> Self {
        Fp { v: (self.v * o.v) % self.p, p: self.p }
    }
    fn neg(&self) -> Self {
        Fp { v: (self.p - self.v) % self.p, p: self.p }
    }
    fn inv(&self) -> Result<Self> {
        if self.v == 0 {
            return Err(Error::InvalidInput("inverse of 0 in F_p".into()));
        }
        Ok(Fp { v: pow_mod(self.v, self.p - 2, self.p), p: self.p })
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
}

/// Element `a + b*sqrt(n)` of `F_{p^2}`, `n` the least non-residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp2 {
    pub a: u64,
    pub b: u64,
    pub p: u64,
    pub n: u64,
}

impl Fp2 {
    pub fn from_fp(x: Fp) -> Fp2 {
        Fp2 { a: x.v, b: 0, p: x.p, n: crate::padic::least_nonresidue(x.p) }
    }

    pub fn new(a: u64, b: u64, p: u64) -> Fp2 {
        Fp2 { a: a % p, b: b % p, p, n: crate::padic::least_nonresidue(p) }
    }

    pub fn in_base(&self) -> Option<Fp> {
        (self.b == 0).then_some(Fp { v: self.a, p: self.p })
    }

    /// All elements of `F_{p^2}`.
    pub fn all(p: u64) -> impl Iterator<Item = Fp2> {
        let n = crate::padic::least_nonresidue(p);
        (0..p).flat_map(move |a| (0..p).map(move |b| Fp2 { a, b, p, n }))
    }

    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        // Euler's criterion in the cyclic group F_{p^2}^*.
        let e = (self.p * self.p - 1) / 2;
        let mut acc = self.one_like();
        let mut b = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc == self.one_like()
    }
}

impl fmt::Debug for Fp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}s", self.a, self.b)
        }
    }
}

impl Field for Fp2 {
    fn zero_like(&self) -> Self {
        Fp2 { a: 0, b: 0, ..*self }
    }
    fn one_like(&self) -> Self {
        Fp2 { a: 1, b: 0, ..*self }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Fp2 { a: n.rem_euclid(self.p as i64) as u64, b: 0, ..*self }
    }
    fn add(&self, o: &Self) -> Self {
        Fp2 { a: (self.a + o.a) % self.p, b: (self.b + o.b) % self.p, ..*self }
    }
    fn sub(&self, o: &Self) -> Self {
        Fp2 {
            a: (self.a + self.p - o.a) % self.p,
            b: (self.b + self.p - o.b) % self.p,
            ..*self
        }
    }
    fn mul(&self, o: &Self) -> Self {
        let p = self.p;
        let a = (self.a * o.a + (self.b * o.b) % p * self.n) % p;
        let b = (self.a * o.b + self.b * o.a) % p;
        Fp2 { a, b, ..*self }
    }
    fn neg(&self) -> Self {
        Fp2 { a: (self.p - self.a) % self.p, b: (self.p - self.b) % self.p, ..*self }
    }
    fn inv(&self) -> Result<Self> {
        let p = self.p;
        let norm = (self.a * self.a % p + p - (self.b * self.b % p) * self.n % p) % p;
        if norm == 0 {
            return Err(Error::InvalidInput("inverse of 0 in F_p^2".into()));
        }
        let ni = pow_mod(norm, p - 2, p);
        Ok(Fp2 { a: self.a * ni % p, b: (p - self.b) % p * ni % p, ..*self })
    }
    fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl Field for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            return Err(Error::InvalidInput("inverse of 0 in Q".into()));
        }
        Ok(self.recip())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Field for Padic {
    fn zero_like(&self) -> Self {
        Padic::exact_zero(self.prime())
    }
    fn one_like(&self) -> Self {
        Padic::one(self.prime(), self.rel_prec().max(crate::padic::DEFAULT_PRECISION))
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Padic::from_int(n, self.prime(), self.rel_prec().max(crate::padic::DEFAULT_PRECISION))
    }
    fn add(&self, o: &Self) -> Self {
        Padic::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Padic::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Padic::mul(self, o)
    }
    fn neg(&self) -> Self {
        Padic::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        Padic::inv(self)
    }
    fn is_zero(&self) -> bool {
        Padic::is_zero(self)
    }
}

/// Dense polynomial, coefficient `i` multiplies `x^i`. The zero polynomial has
/// no coefficients; otherwise the leading coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: fmt::Debug> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Poly::new(vec![c])
    }

    /// `x - c`.
    pub fn x_minus(c: &F) -> Self {
        Poly::new(vec![c.neg(), c.one_like()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, `None` beyond the degree.
    pub fn coeff(&self, i: usize) -> Option<&F> {
        self.coeffs.get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `-1` for the zero polynomial; handy in comparisons.
    pub fn deg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn lead(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out: Vec<Option<F>> = vec![None; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                let t = a.mul(b);
                out[i + j] = Some(match out[i + j].take() {
                    Some(acc) => acc.add(&t),
                    None => t,
                });
            }
        }
        Poly::new(out.into_iter().map(|c| c.expect("filled")).collect())
    }

    pub fn scale(&self, c: &F) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&c.from_i64_like(i as i64)))
                .collect(),
        )
    }

    /// Euclidean division; fails if the divisor's leading coefficient cannot
    /// be inverted.
    pub fn divrem(&self, d: &Self) -> Result<(Self, Self)> {
        let dl = d
            .lead()
            .ok_or_else(|| Error::InvalidInput("polynomial division by zero".into()))?;
        let dinv = dl.inv()?;
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let zero = dl.zero_like();
        let mut q = vec![zero; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].mul(&dinv);
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].sub(&c.mul(dc));
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.divrem(d)?.1)
    }

    pub fn monic(&self) -> Result<Self> {
        match self.lead() {
            None => Ok(Poly::zero()),
            Some(l) => Ok(self.scale(&l.inv()?)),
        }
    }

    /// Monic `g = gcd(a, b)` with `s*a + t*b = g`.
    pub fn xgcd(a: &Self, b: &Self) -> Result<(Self, Self, Self)> {
        let one = a
            .lead()
            .or(b.lead())
            .ok_or_else(|| Error::InvalidInput("gcd of two zero polynomials".into()))?
            .one_like();
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::constant(one.clone()), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::constant(one));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        let l = r0.lead().expect("nonzero gcd").inv()?;
        Ok((r0.scale(&l), s0.scale(&l), t0.scale(&l)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp_poly(c: &[i64], p: u64) -> Poly<Fp> {
        Poly::new(c.iter().map(|&v| Fp::new(v, p)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let a = fp_poly(&[1, 2, 3, 4, 5, 1], 7);
        let b = fp_poly(&[3, 0, 1], 7);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.deg() < 2);
    }

    #[test]
    fn xgcd_bezout() {
        let a = fp_poly(&[6, 1], 11).mul(&fp_poly(&[2, 1], 11));
        let b = fp_poly(&[6, 1], 11).mul(&fp_poly(&[5, 0, 1], 11));
        let (g, s, t) = Poly::xgcd(&a, &b).unwrap();
        assert_eq!(g, fp_poly(&[6, 1], 11));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn fp2_inverse() {
        for x in Fp2::all(7).filter(|x| !x.is_zero()) {
            assert_eq!(x.mul(&x.inv().unwrap()), x.one_like());
        }
        let squares = Fp2::all(7).filter(|x| x.is_square()).count();
        assert_eq!(squares, (49 - 1) / 2 + 1);
    }
}
