//! Brute-force reference computations. Slow on purpose and written against
//! plain integers so they can be trusted to check the main path.

use std::collections::BTreeMap;
use std::hash::{DefaultHasher, Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::curve::{CurvePoint, HyperellipticCurve, RationalPoint};
use crate::field::{Field, Fp, Poly};
use crate::jacobian::{cantor_add, Mumford};
use crate::padic::PadicPowerSeries;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub oracle: String,
    pub input_digest: String,
    pub output: serde_json::Value,
    pub ranges: BTreeMap<String, i64>,
}

impl OracleReport {
    pub fn new(oracle: &str, input: &str, output: serde_json::Value, ranges: &[(&str, i64)]) -> Self {
        let mut h = DefaultHasher::new();
        input.hash(&mut h);
        OracleReport {
            oracle: oracle.into(),
            input_digest: format!("{:016x}", h.finish()),
            output,
            ranges: ranges.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// `sum c_i a^i b^(5-i)`, i.e. `b^5 f(a/b)`.
fn homogeneous(coeffs: &[i64; 6], a: i64, b: i64) -> Option<i128> {
    let (a, b) = (a as i128, b as i128);
    let mut acc: i128 = 0;
    for (i, &c) in coeffs.iter().enumerate() {
        let mut term = c as i128;
        for _ in 0..i {
            term = term.checked_mul(a)?;
        }
        for _ in i..5 {
            term = term.checked_mul(b)?;
        }
        acc = acc.checked_add(term)?;
    }
    Some(acc)
}

fn homogeneous_big(coeffs: &[i64; 6], a: i64, b: i64) -> BigInt {
    let (a, b) = (BigInt::from(a), BigInt::from(b));
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| BigInt::from(c) * a.pow(i as u32) * b.pow(5 - i as u32))
        .sum()
}

/// Every point with `x = a/b`, `|a|, |b| <= h`, plus infinity, sorted.
pub fn naive_rational_points(c: &HyperellipticCurve, h: u64) -> Vec<RationalPoint> {
    let coeffs = c.coeffs();
    let h = h as i64;
    let mut out = vec![CurvePoint::Infinity];
    for b in 1..=h.max(1) {
        for a in -h..=h {
            if a.gcd(&b) != 1 && !(a == 0 && b == 1) {
                continue;
            }
            if h == 0 && a != 0 {
                continue;
            }
            // y = Y / b^3 with Y^2 = b * F(a, b).
            let rhs = match homogeneous(coeffs, a, b).and_then(|v| v.checked_mul(b as i128)) {
                Some(v) => BigInt::from(v),
                None => homogeneous_big(coeffs, a, b) * b,
            };
            if rhs.is_negative() {
                continue;
            }
            let r = rhs.sqrt();
            if &r * &r != rhs {
                continue;
            }
            let x = BigRational::new(a.into(), b.into());
            let den = BigInt::from(b).pow(3);
            let y = BigRational::new(r.clone(), den.clone());
            out.push(CurvePoint::affine(x.clone(), y.clone()));
            if !r.is_zero() {
                out.push(CurvePoint::affine(x, -y));
            }
        }
        if h == 0 {
            break;
        }
    }
    out.sort_by(point_order);
    out
}

fn point_order(a: &RationalPoint, b: &RationalPoint) -> std::cmp::Ordering {
    match (a, b) {
        (CurvePoint::Infinity, CurvePoint::Infinity) => std::cmp::Ordering::Equal,
        (CurvePoint::Infinity, _) => std::cmp::Ordering::Less,
        (_, CurvePoint::Infinity) => std::cmp::Ordering::Greater,
        (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1).cmp(&(x2, y2)),
    }
}

fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Integer polynomial modulo `p^k` with its roots in `Z_p` counted by
/// scanning residues.
struct ModPoly {
    c: Vec<BigInt>,
    p: BigInt,
    k: u32,
}

impl ModPoly {
    fn modulus(&self) -> BigInt {
        self.p.pow(self.k)
    }

    fn val(&self, x: &BigInt) -> u32 {
        if x.is_zero() {
            return self.k;
        }
        let mut v = 0;
        let mut x = x.clone();
        while (&x % &self.p).is_zero() && v < self.k {
            x /= &self.p;
            v += 1;
        }
        v
    }

    fn content(&self) -> u32 {
        self.c.iter().map(|x| self.val(x)).min().unwrap_or(self.k)
    }

    fn eval_mod_p(&self, r: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.c.iter().rev() {
            acc = (acc * r + c).mod_floor(&self.p);
        }
        acc
    }

    /// Coefficients of `g(r + p z)` with the common power of `p` removed
    /// and the precision lowered to match.
    fn shifted(&self, r: &BigInt) -> ModPoly {
        let n = self.c.len();
        let m = self.modulus();
        let mut out = vec![BigInt::zero(); n];
        for (i, ci) in self.c.iter().enumerate() {
            // c_i (r + p z)^i = sum_j binom(i, j) r^(i-j) p^j z^j
            let mut binom = BigInt::one();
            for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
                let term = ci * &binom * r.pow((i - j) as u32) * self.p.pow(j as u32);
                *slot = (&*slot + term).mod_floor(&m);
                binom = binom * (i - j) / (j + 1);
            }
        }
        let mut g = ModPoly { c: out, p: self.p.clone(), k: self.k };
        g.normalize();
        g
    }

    fn normalize(&mut self) {
        let v = self.content();
        if v > 0 && v < self.k {
            let d = self.p.pow(v);
            for x in &mut self.c {
                *x = &*x / &d;
            }
            self.k -= v;
        }
    }

    /// Multiplicity of `r` as a root modulo `p`.
    fn residue_multiplicity(&self, r: &BigInt) -> usize {
        let mut c: Vec<BigInt> = self.c.iter().map(|x| x.mod_floor(&self.p)).collect();
        let mut m = 0;
        loop {
            while c.last().is_some_and(|x| x.is_zero()) {
                c.pop();
            }
            if c.is_empty() {
                return self.c.len();
            }
            let g = ModPoly { c: c.clone(), p: self.p.clone(), k: 1 };
            if !g.eval_mod_p(r).is_zero() {
                return m;
            }
            // Synthetic division by (z - r) modulo p.
            let mut q = vec![BigInt::zero(); c.len() - 1];
            let mut carry = BigInt::zero();
            for i in (1..c.len()).rev() {
                carry = (&c[i] + &carry * r).mod_floor(&self.p);
                q[i - 1] = carry.clone();
            }
            c = q;
            m += 1;
        }
    }

    fn count(&self, depth: u32) -> Option<usize> {
        if self.c.iter().all(|x| x.mod_floor(&self.modulus()).is_zero()) {
            return None;
        }
        let p = self.p.to_u64()?;
        let mut total = 0;
        for r in 0..p {
            let r = BigInt::from(r);
            let m = self.residue_multiplicity(&r);
            match m {
                0 => {}
                1 => total += 1,
                // Out of digits: the disc keeps the m roots seen modulo p.
                _ if depth == 0 || self.k <= 1 => total += m,
                _ => total += self.shifted(&r).count(depth - 1).unwrap_or(m),
            }
        }
        Some(total)
    }
}

/// Roots in `Z_p`, with multiplicity, of the polynomial part of `f`, found
/// by descending through residues modulo `p, p^2, ..., p^k`. `None` if the
/// coefficients do not determine the answer.
pub fn exhaustive_series_zeros(f: &PadicPowerSeries, p: u64, k: u32) -> Option<usize> {
    let coeffs = f.coeffs();
    let vmin = coeffs.iter().filter_map(|c| c.valuation()).min()?;
    let prec = coeffs.iter().map(|c| c.abs_prec()).min()? - vmin;
    if prec <= 0 {
        return None;
    }
    let pb = BigInt::from(p);
    let m = pb.pow(prec as u32);
    let scale = BigRational::from_integer(pb.clone()).pow(-vmin as i32);
    let mut c = Vec::with_capacity(coeffs.len());
    for x in coeffs {
        let q = x.to_rational() * &scale;
        let d = inv_mod(q.denom(), &m)?;
        c.push((q.numer() * d).mod_floor(&m));
    }
    let g = ModPoly { c, p: pb, k: prec as u32 };
    g.count(k)
}

/// `F_{p^2} = F_p[i]/(i^2 - n)`, kept separate from the main path.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct F2 {
    a: u64,
    b: u64,
}

fn f2_mul(x: F2, y: F2, n: u64, p: u64) -> F2 {
    F2 { a: (x.a * y.a + n * (x.b * y.b % p)) % p, b: (x.a * y.b + x.b * y.a) % p }
}

fn f2_add(x: F2, y: F2, p: u64) -> F2 {
    F2 { a: (x.a + y.a) % p, b: (x.b + y.b) % p }
}

fn f2_eval(coeffs: &[i64; 6], x: F2, n: u64, p: u64) -> F2 {
    coeffs.iter().rev().fold(F2 { a: 0, b: 0 }, |acc, &c| {
        f2_add(f2_mul(acc, x, n, p), F2 { a: c.rem_euclid(p as i64) as u64, b: 0 }, p)
    })
}

fn nonresidue(p: u64) -> u64 {
    (2..p).find(|&n| (1..p).all(|y| y * y % p != n)).expect("odd prime")
}

/// Order and exponent of `J(F_p)` from reduced divisors `P1 + P2 - 2 inf`
/// listed as point pairs. Only the exponent uses the group law.
pub fn exhaustive_jacobian(c: &HyperellipticCurve, p: u64) -> (u64, u64) {
    let coeffs = c.coeffs();
    let n = nonresidue(p);
    let all: Vec<F2> = (0..p).flat_map(|a| (0..p).map(move |b| F2 { a, b })).collect();
    let mut roots: BTreeMap<(u64, u64), Vec<F2>> = BTreeMap::new();
    for &y in &all {
        let sq = f2_mul(y, y, n, p);
        roots.entry((sq.a, sq.b)).or_default().push(y);
    }
    let mut points: Vec<(F2, F2)> = Vec::new();
    for &x in &all {
        let fx = f2_eval(coeffs, x, n, p);
        for &y in roots.get(&(fx.a, fx.b)).map(|v| v.as_slice()).unwrap_or(&[]) {
            points.push((x, y));
        }
    }
    let neg = |y: F2| F2 { a: (p - y.a) % p, b: (p - y.b) % p };
    let frob = |z: F2| F2 { a: z.a, b: (p - z.b) % p };
    let rational: Vec<(F2, F2)> = points.iter().copied().filter(|(x, y)| x.b == 0 && y.b == 0).collect();

    let mut divisors: Vec<Vec<(F2, F2)>> = vec![vec![]];
    for &pt in &rational {
        divisors.push(vec![pt]);
    }
    for (i, &p1) in rational.iter().enumerate() {
        for &p2 in &rational[i..] {
            if p2 != (p1.0, neg(p1.1)) {
                divisors.push(vec![p1, p2]);
            }
        }
    }
    for &pt in &points {
        let conj = (frob(pt.0), frob(pt.1));
        if conj == pt || conj == (pt.0, neg(pt.1)) {
            continue;
        }
        if (pt.0.a, pt.0.b, pt.1.a, pt.1.b) < (conj.0.a, conj.0.b, conj.1.a, conj.1.b) {
            divisors.push(vec![pt, conj]);
        }
    }
    let order = divisors.len() as u64;

    let fp = |v: u64| Fp::new(v as i64, p);
    let f = c.f_fp(p);
    let mumford = |d: &[(F2, F2)]| -> Mumford<Fp> {
        match d {
            [] => Mumford::identity(&fp(0)),
            [(x, y)] => Mumford::new(Poly::new(vec![fp((p - x.a) % p), fp(1)]), Poly::new(vec![fp(y.a)])),
            [(x1, y1), (x2, y2)] => {
                // u = (X - x1)(X - x2) is F_p-rational; so is the line through the points.
                let s = f2_add(*x1, *x2, p);
                let pr = f2_mul(*x1, *x2, n, p);
                let u = Poly::new(vec![fp(pr.a), fp((p - s.a) % p), fp(1)]);
                let v = if x1 == x2 {
                    // Tangent line: v = y1 + f'(x1)/(2 y1) (X - x1).
                    let fd = f.derivative().eval(&fp(x1.a));
                    let slope = fd.mul(&fp(2).mul(&fp(y1.a)).inv().expect("non-Weierstrass"));
                    Poly::new(vec![fp(y1.a).sub(&slope.mul(&fp(x1.a))), slope])
                } else {
                    let dx = f2_add(*x2, F2 { a: (p - x1.a) % p, b: (p - x1.b) % p }, p);
                    let dy = f2_add(*y2, neg(*y1), p);
                    let slope = f2_mul(dy, f2_inv(dx, n, p), n, p);
                    let c0 = f2_add(*y1, neg(f2_mul(slope, *x1, n, p)), p);
                    debug_assert!(slope.b == 0 && c0.b == 0);
                    Poly::new(vec![fp(c0.a), fp(slope.a)])
                };
                Mumford::new(u, v)
            }
            _ => unreachable!(),
        }
    };
    let mut exponent = 1u64;
    for d in &divisors {
        let e = mumford(d);
        let mut acc = e.clone();
        let mut k = 1u64;
        while !acc.is_identity() {
            acc = cantor_add(&f, &acc, &e).expect("finite field");
            k += 1;
        }
        exponent = exponent.lcm(&k);
    }
    (order, exponent)
}

fn f2_inv(x: F2, n: u64, p: u64) -> F2 {
    // x^(p^2 - 2)
    let mut e = p * p - 2;
    let mut base = x;
    let mut acc = F2 { a: 1, b: 0 };
    while e > 0 {
        if e & 1 == 1 {
            acc = f2_mul(acc, base, n, p);
        }
        base = f2_mul(base, base, n, p);
        e >>= 1;
    }
    acc
}
