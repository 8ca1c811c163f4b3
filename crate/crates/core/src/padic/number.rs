//! Capped relative-precision elements of `Q_p`.
//!
//! A nonzero value is stored as `p^val * unit` with `unit` a p-adic unit known
//! modulo `p^rel`. Zero is stored together with the absolute precision to which
//! it is known, so `O(p^k)` and an exact zero are different values.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Absolute precision of an exact zero.
pub const EXACT: i64 = i64::MAX / 4;

/// Default relative precision in p-adic digits.
pub const DEFAULT_PRECISION: u32 = 20;

thread_local! {
    static POW_CACHE: RefCell<HashMap<(u64, u32), BigInt>> = RefCell::new(HashMap::new());
}

/// `p^k` as a big integer, memoised per thread.
pub(crate) fn ppow(p: u64, k: u32) -> BigInt {
    POW_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry((p, k))
            .or_insert_with(|| num_traits::pow(BigInt::from(p), k as usize))
            .clone()
    })
}

/// Valuation of a nonzero integer, with the cofactor.
pub(crate) fn strip_p(n: &BigInt, p: u64) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (k, m);
        }
        m = q;
        k += 1;
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Zero { abs: i64 },
    Unit { val: i64, unit: BigInt, rel: u32 },
}

/// An element of `Q_p` with pessimistically tracked precision.
///
/// Derived equality is representational: two values compare equal only when
/// valuation, digits and precision all match. Use [`Padic::agrees`] for
/// numerical agreement.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Padic {
    p: u64,
    repr: Repr,
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        (a + b).min(EXACT)
    }
}

impl Padic {
    /// Builds `n * p^val` known modulo `p^abs`.
    pub fn from_parts(p: u64, val: i64, n: BigInt, abs: i64) -> Padic {
        if n.is_zero() || abs <= val {
            return Padic::zero_to(p, abs);
        }
        let (k, m) = strip_p(&n, p);
        let val = val + k;
        if val >= abs {
            return Padic::zero_to(p, abs);
        }
        assert!(abs < EXACT, "nonzero p-adic values must carry finite precision");
        let rel = (abs - val) as u32;
        let unit = m.mod_floor(&ppow(p, rel));
        Padic {
            p,
            repr: Repr::Unit { val, unit, rel },
        }
    }

    /// Zero known to absolute precision `abs` (i.e. `O(p^abs)`).
    pub fn zero_to(p: u64, abs: i64) -> Padic {
        Padic {
            p,
            repr: Repr::Zero { abs: abs.min(EXACT) },
        }
    }

    pub fn exact_zero(p: u64) -> Padic {
        Padic::zero_to(p, EXACT)
    }

    pub fn from_bigint(n: &BigInt, p: u64, prec: u32) -> Padic {
        if n.is_zero() {
            return Padic::exact_zero(p);
        }
        let (k, m) = strip_p(n, p);
        Padic::from_parts(p, k, m, k + prec as i64)
    }

    pub fn from_int(n: i64, p: u64, prec: u32) -> Padic {
        Padic::from_bigint(&BigInt::from(n), p, prec)
    }

    pub fn one(p: u64, prec: u32) -> Padic {
        Padic::from_int(1, p, prec)
    }

    /// The rational `q` with `prec` digits of relative precision.
    pub fn from_rational(q: &BigRational, p: u64, prec: u32) -> Padic {
        if q.is_zero() {
            return Padic::exact_zero(p);
        }
        let (vn, n) = strip_p(q.numer(), p);
        let (vd, d) = strip_p(q.denom(), p);
        let modulus = ppow(p, prec);
        let dinv = d
            .mod_floor(&modulus)
            .modinv(&modulus)
            .expect("denominator coprime to p after stripping");
        let val = vn - vd;
        Padic::from_parts(p, val, (n * dinv).mod_floor(&modulus), val + prec as i64)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs } if abs >= EXACT)
    }

    /// `None` for a value indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { val, .. } => Some(*val),
        }
    }

    /// Valuation, or the absolute precision for zero (a lower bound on the
    /// true valuation).
    pub fn valuation_lower_bound(&self) -> i64 {
        match &self.repr {
            Repr::Zero { abs } => *abs,
            Repr::Unit { val, .. } => *val,
        }
    }

    pub fn abs_prec(&self) -> i64 {
        match &self.repr {
            Repr::Zero { abs } => *abs,
            Repr::Unit { val, rel, .. } => val + *rel as i64,
        }
    }

    pub fn rel_prec(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Unit { rel, .. } => *rel,
        }
    }

    /// Unit part, `0 <= unit < p^rel`; zero for a zero value.
    pub fn unit(&self) -> BigInt {
        match &self.repr {
            Repr::Zero { .. } => BigInt::zero(),
            Repr::Unit { unit, .. } => unit.clone(),
        }
    }

    /// Drops digits beyond absolute precision `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Padic {
        if abs >= self.abs_prec() {
            return self.clone();
        }
        match &self.repr {
            Repr::Zero { .. } => Padic::zero_to(self.p, abs),
            Repr::Unit { val, unit, .. } => Padic::from_parts(self.p, *val, unit.clone(), abs),
        }
    }

    pub fn neg(&self) -> Padic {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit { val, unit, rel } => {
                let m = ppow(self.p, *rel);
                Padic {
                    p: self.p,
                    repr: Repr::Unit {
                        val: *val,
                        unit: (&m - unit).mod_floor(&m),
                        rel: *rel,
                    },
                }
            }
        }
    }

    pub fn add(&self, other: &Padic) -> Padic {
        assert_eq!(self.p, other.p, "mixed primes");
        let abs = self.abs_prec().min(other.abs_prec());
        match (&self.repr, &other.repr) {
            (Repr::Zero { .. }, Repr::Zero { .. }) => Padic::zero_to(self.p, abs),
            (Repr::Zero { .. }, Repr::Unit { val, unit, .. })
            | (Repr::Unit { val, unit, .. }, Repr::Zero { .. }) => {
                Padic::from_parts(self.p, *val, unit.clone(), abs)
            }
            (
                Repr::Unit { val: va, unit: ua, .. },
                Repr::Unit { val: vb, unit: ub, .. },
            ) => {
                if *vb >= abs {
                    return Padic::from_parts(self.p, *va, ua.clone(), abs);
                }
                if *va >= abs {
                    return Padic::from_parts(self.p, *vb, ub.clone(), abs);
                }
                let v = (*va).min(*vb);
                let n = ua * ppow(self.p, (va - v) as u32) + ub * ppow(self.p, (vb - v) as u32);
                Padic::from_parts(self.p, v, n, abs)
            }
        }
    }

    pub fn sub(&self, other: &Padic) -> Padic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Padic) -> Padic {
        assert_eq!(self.p, other.p, "mixed primes");
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => Padic::zero_to(self.p, sat_add(*a, *b)),
            (Repr::Zero { abs }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::Zero { abs }) => {
                Padic::zero_to(self.p, sat_add(*abs, *val))
            }
            (
                Repr::Unit { val: va, unit: ua, rel: ra },
                Repr::Unit { val: vb, unit: ub, rel: rb },
            ) => {
                let rel = (*ra).min(*rb);
                let unit = (ua * ub).mod_floor(&ppow(self.p, rel));
                Padic {
                    p: self.p,
                    repr: Repr::Unit { val: va + vb, unit, rel },
                }
            }
        }
    }

    pub fn inv(&self) -> Result<Padic> {
        match &self.repr {
            Repr::Zero { abs } => Err(Error::precision(format!(
                "inverting a value known only as O({}^{})",
                self.p, abs
            ))),
            Repr::Unit { val, unit, rel } => {
                let m = ppow(self.p, *rel);
                let inv = unit.modinv(&m).expect("unit is coprime to p");
                Ok(Padic {
                    p: self.p,
                    repr: Repr::Unit { val: -val, unit: inv, rel: *rel },
                })
            }
        }
    }

    pub fn div(&self, other: &Padic) -> Result<Padic> {
        Ok(self.mul(&other.inv()?))
    }

    /// Multiplication by `p^k`, exact.
    pub fn shift(&self, k: i64) -> Padic {
        match &self.repr {
            Repr::Zero { abs } => Padic::zero_to(self.p, sat_add(*abs, k)),
            Repr::Unit { val, unit, rel } => Padic {
                p: self.p,
                repr: Repr::Unit { val: val + k, unit: unit.clone(), rel: *rel },
            },
        }
    }

    pub fn mul_int(&self, n: i64) -> Padic {
        let rel = self.rel_prec().max(1);
        self.mul(&Padic::from_int(n, self.p, rel + 64))
    }

    pub fn div_int(&self, n: i64) -> Result<Padic> {
        let rel = self.rel_prec().max(1);
        self.div(&Padic::from_int(n, self.p, rel + 64))
    }

    pub fn pow(&self, e: u32) -> Padic {
        let mut acc = Padic::from_int(1, self.p, self.rel_prec().max(1));
        if e == 0 {
            return acc;
        }
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Numerical agreement on every digit both values claim.
    pub fn agrees(&self, other: &Padic) -> bool {
        self.sub(other).is_zero()
    }

    /// True when `other` is at least as precise and matches every digit
    /// `self` claims.
    pub fn refined_by(&self, other: &Padic) -> bool {
        other.abs_prec() >= self.abs_prec() && self.agrees(other)
    }

    /// Residue in `F_p`; `None` when the valuation is negative.
    pub fn residue(&self) -> Option<u64> {
        match &self.repr {
            Repr::Zero { abs } => {
                if *abs >= 1 {
                    Some(0)
                } else {
                    None
                }
            }
            Repr::Unit { val, unit, .. } => match val.cmp(&0) {
                std::cmp::Ordering::Less => None,
                std::cmp::Ordering::Greater => Some(0),
                std::cmp::Ordering::Equal => (unit % BigInt::from(self.p)).to_u64(),
            },
        }
    }

    /// The integer `0 <= n < p^abs` representing this value, for values of
    /// non-negative valuation.
    pub fn to_integer(&self) -> Option<BigInt> {
        match &self.repr {
            Repr::Zero { .. } => Some(BigInt::zero()),
            Repr::Unit { val, unit, .. } => {
                if *val < 0 {
                    None
                } else {
                    Some(unit * ppow(self.p, *val as u32))
                }
            }
        }
    }

    /// The rational `unit * p^val` with the stored digits.
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            Repr::Zero { .. } => BigRational::zero(),
            Repr::Unit { val, unit, .. } => {
                if *val >= 0 {
                    BigRational::from_integer(unit * ppow(self.p, *val as u32))
                } else {
                    BigRational::new(unit.clone(), ppow(self.p, (-val) as u32))
                }
            }
        }
    }

    /// Serializable form: `(valuation, unit digits, absolute precision)`.
    pub fn to_parts(&self) -> (Option<i64>, String, i64) {
        (self.valuation(), self.unit().to_string(), self.abs_prec())
    }

    pub fn digits(&self) -> PadicDigits {
        PadicDigits {
            valuation: self.valuation(),
            unit: self.unit().to_string(),
            abs_precision: (self.abs_prec() < EXACT).then_some(self.abs_prec()),
        }
    }
}

/// Lossless text form of a [`Padic`]; `abs_precision` is absent for exact zero.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PadicDigits {
    pub valuation: Option<i64>,
    pub unit: String,
    pub abs_precision: Option<i64>,
}

impl PadicDigits {
    pub fn to_padic(&self, p: u64) -> Option<Padic> {
        let abs = self.abs_precision.unwrap_or(EXACT);
        match self.valuation {
            None => Some(Padic::zero_to(p, abs)),
            Some(v) => Some(Padic::from_parts(p, v, self.unit.parse().ok()?, abs)),
        }
    }
}

impl fmt::Debug for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero { abs } if *abs >= EXACT => write!(f, "0"),
            Repr::Zero { abs } => write!(f, "O({}^{})", self.p, abs),
            Repr::Unit { val, unit, rel } => {
                let abs = val + *rel as i64;
                if *val == 0 {
                    write!(f, "{} + O({}^{})", unit, self.p, abs)
                } else {
                    write!(f, "{}*{}^{} + O({}^{})", unit, self.p, val, self.p, abs)
                }
            }
        }
    }
}

macro_rules! ref_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&Padic> for &Padic {
            type Output = Padic;
            fn $method(self, rhs: &Padic) -> Padic {
                Padic::$inner(self, rhs)
            }
        }
    };
}
ref_binop!(Add, add, add);
ref_binop!(Sub, sub, sub);
ref_binop!(Mul, mul, mul);

impl std::ops::Neg for &Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        Padic::neg(self)
    }
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| legendre(a, p) == -1)
        .expect("odd primes have non-residues")
}

/// Legendre symbol `(a / p)` for odd `p`.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if crate::field::pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn seven_plus_seven() {
        let a = Padic::from_int(7, 7, 20);
        let s = &a + &a;
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.unit(), BigInt::from(2));
    }

    #[test]
    fn division_by_self_is_one() {
        for n in [1i64, 3, 14, -49, 123456] {
            let x = Padic::from_int(n, 7, 20);
            let r = x.div(&x).unwrap();
            assert!(r.agrees(&Padic::one(7, 20)));
            assert_eq!(r.valuation(), Some(0));
        }
    }

    #[test]
    fn cancellation_loses_all_digits() {
        // (1 + 7^20) - 1 with 20 digits: the 7^20 term lies beyond the cap.
        let big = BigInt::from(1) + num_traits::pow(BigInt::from(7), 20);
        let a = Padic::from_bigint(&big, 7, 20);
        let d = &a - &Padic::one(7, 20);
        assert!(d.is_zero());
        assert_eq!(d.abs_prec(), 20);
        assert!(matches!(d.inv(), Err(Error::PrecisionLoss(_))));
    }

    #[test]
    fn rational_round_trip_digits() {
        let x = Padic::from_rational(&q(1, 12), 7, 20);
        let twelve = Padic::from_int(12, 7, 20);
        assert!((&x * &twelve).agrees(&Padic::one(7, 20)));
        let y = Padic::from_rational(&q(5, 49), 7, 10);
        assert_eq!(y.valuation(), Some(-2));
        assert_eq!(y.abs_prec(), 8);
    }

    #[test]
    fn zero_times_unit_shifts_precision() {
        let z = Padic::zero_to(5, 3);
        let x = Padic::from_int(25, 5, 10);
        assert_eq!((&z * &x).abs_prec(), 5);
    }

    #[test]
    fn nonresidues() {
        assert_eq!(least_nonresidue(7), 3);
        assert_eq!(least_nonresidue(11), 2);
        assert_eq!(legendre(2, 7), 1);
    }
}
