use demjanenko_core::chebyshev::{cheb, cheb_eval, cheb_eval_nested, growth_floor, parity_sign, special_values};
use demjanenko_core::exact::{int, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=40).prop_filter_map("nonzero", |(n, d)| {
        (n != 0).then(|| Rational::new(BigInt::from(n), BigInt::from(d)))
    })
}

// Oracle: z^d + z^-d by repeated multiplication.
fn power_sum(z: &Rational, d: u32) -> Rational {
    let mut p = Rational::one();
    for _ in 0..d {
        p *= z;
    }
    &p + p.recip()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characterization(z in rational(), d in 1u32..=50) {
        let x = &z + z.recip();
        prop_assert_eq!(cheb_eval(d as u64, &x).unwrap(), power_sum(&z, d));
    }

    #[test]
    fn nesting(n in 1u32..=12, m in 1u32..=12, x in rational()) {
        let inner = cheb(m).unwrap().eval(&x);
        let outer = cheb(n).unwrap().eval(&inner);
        prop_assert_eq!(cheb(n * m).unwrap().eval(&x), outer);
    }

    #[test]
    fn large_degrees(d in 65u64..=200, z in rational()) {
        let y = &z + z.recip();
        prop_assert_eq!(cheb_eval_nested(d, &y).unwrap(), power_sum(&z, d as u32));
    }

    #[test]
    fn parity(d in 1u32..=40, x in rational()) {
        let t = cheb(d).unwrap();
        let s = int(parity_sign(d as u64) as i64);
        prop_assert_eq!(t.eval(&-x.clone()), s * t.eval(&x));
    }

    #[test]
    fn growth(d in 2u64..=30, n in 3i64..=1000) {
        prop_assert!(growth_floor(d, &int(n)).unwrap());
        prop_assert!(growth_floor(d, &int(-n)).unwrap());
    }
}

#[test]
fn special_value_table() {
    for d in 1..=100u64 {
        if d % 3 == 0 {
            assert!(special_values(d).is_err());
            continue;
        }
        let t = special_values(d).unwrap();
        assert_eq!(t[&0], if d % 2 == 1 { Rational::zero() } else if d % 4 == 0 { int(2) } else { int(-2) });
        assert_eq!(t[&1], if d % 2 == 1 { int(1) } else { int(-1) });
        assert_eq!(t[&2], int(2));
        assert_eq!(t[&-2], if d % 2 == 0 { int(2) } else { int(-2) });
    }
}
