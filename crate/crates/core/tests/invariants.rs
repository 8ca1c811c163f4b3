use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use chabauty_core::coleman::Coleman;
use chabauty_core::curve::HyperellipticCurve;
use chabauty_core::jacobian::{enumerate_fp_jacobian, scalar_mul, FpJacobian, RationalDivisor};
use chabauty_core::oracle::exhaustive_series_zeros;
use chabauty_core::padic::{Padic, PadicPowerSeries};

fn flynn() -> HyperellipticCurve {
    HyperellipticCurve::new([0, 60, -112, 65, -14, 1]).unwrap()
}

fn jac11() -> &'static FpJacobian {
    static J: OnceLock<FpJacobian> = OnceLock::new();
    J.get_or_init(|| enumerate_fp_jacobian(&flynn(), 11).unwrap())
}

fn padic(n: i64, d: i64, p: u64) -> Padic {
    Padic::from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)), p, 20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn padic_field_axioms(a in -10_000i64..10_000, b in 1i64..10_000, c in -10_000i64..10_000, p in prop::sample::select(vec![3u64, 7, 11])) {
        let (x, y, z) = (padic(a, b, p), padic(c, b + 1, p), padic(b, a.abs() + 1, p));
        prop_assert!(x.add(&y).sub(&y).agrees(&x));
        prop_assert!(x.mul(&y.add(&z)).agrees(&x.mul(&y).add(&x.mul(&z))));
        if !y.is_zero() {
            prop_assert!(x.mul(&y).div(&y).unwrap().agrees(&x));
        }
        let q = BigRational::new(BigInt::from(a), BigInt::from(b));
        prop_assert!(Padic::from_rational(&q, p, 20).agrees(&x));
    }

    #[test]
    fn fp_jacobian_is_a_group(i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let jac = jac11();
        let pick = |ix: &prop::sample::Index| &jac.elements[ix.index(jac.elements.len())];
        let (a, b, c) = (pick(&i), pick(&j), pick(&k));
        prop_assert_eq!(jac.add(a, b), jac.add(b, a));
        prop_assert_eq!(jac.add(&jac.add(a, b), c), jac.add(a, &jac.add(b, c)));
        prop_assert!(jac.add(a, &a.negate()).is_identity());
        prop_assert!(jac.mul(jac.exponent as i64, a).is_identity());
        prop_assert!(jac.contains(&jac.add(a, b)));
    }

    #[test]
    fn strassmann_matches_exhaustive_count(roots in prop::collection::vec(0i64..343, 0..4), unit in 1i64..7) {
        let p = 7;
        let mut coeffs = vec![padic(unit, 1, p)];
        for r in &roots {
            let mut next = vec![Padic::exact_zero(p); coeffs.len() + 1];
            for (d, c) in coeffs.iter().enumerate() {
                next[d + 1] = next[d + 1].add(c);
                next[d] = next[d].sub(&c.mul_int(*r));
            }
            coeffs = next;
        }
        let f = PadicPowerSeries::polynomial(p, coeffs);
        prop_assert_eq!(exhaustive_series_zeros(&f, p, 20), Some(f.strassmann_count().unwrap()));
        prop_assert_eq!(f.strassmann_count().unwrap(), roots.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn log_is_additive_on_multiples(s1 in -3i64..=3, s2 in -3i64..=3) {
        let c = flynn();
        let f = c.f_rational();
        let g = RationalDivisor::from_ints(&[-3, 1], &[6]);
        let eng = Coleman::new(&c, 7, 20).unwrap();
        let log = |s: i64| eng.log_rational(&scalar_mul(&f, s, &g).unwrap(), None).unwrap();
        let lg = log(1);
        prop_assert!(log(s1).agrees(&lg.mul_int(s1)));
        prop_assert!(log(s1 + s2).agrees(&log(s1).add(&log(s2))));
    }
}
