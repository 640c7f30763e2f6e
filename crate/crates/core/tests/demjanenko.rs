use std::collections::BTreeSet;

use demjanenko_core::demjanenko::{certify, equal_index_points, index_bound, n_window, DemjanenkoInput};
use demjanenko_core::elliptic::{torsion_subgroup, ECPoint};
use demjanenko_core::quartic::{companion_curve, phi, QuarticPoint, SymQuartic};
use demjanenko_core::Rational;
use num_bigint::BigInt;
use proptest::prelude::*;

fn x4_input() -> DemjanenkoInput {
    let f = SymQuartic::from_ints(-4, -3, 1).unwrap();
    DemjanenkoInput::derive(f, Some(ECPoint::from_ints(4, -16)), 1, 1e-10)
        .unwrap()
        .with_min_window(40)
}

/// Every rational point with `|num| ≤ n_cap`, `den ≤ d_cap` in `x`.
fn brute_points(f: &SymQuartic, n_cap: i64, d_cap: i64) -> BTreeSet<QuarticPoint> {
    let mut out = BTreeSet::new();
    for den in 1..=d_cap {
        for num in -n_cap..=n_cap {
            let x = Rational::new(BigInt::from(num), BigInt::from(den));
            if x.denom() != &BigInt::from(den) {
                continue;
            }
            for y in f.ys_at(&x) {
                out.insert(QuarticPoint::new(x.clone(), y));
            }
        }
    }
    out
}

#[test]
fn x4_certificate_is_sound() {
    let inp = x4_input();
    let cert = certify(&inp).unwrap();
    let e = &inp.companion;
    let g = inp.generator.clone().unwrap();
    assert_eq!(cert.index_bound, index_bound(&inp).unwrap());
    assert!(cert.n_window >= n_window(cert.index_bound));
    for c in &cert.contributions {
        let q = e.add(&e.scalar_mul(c.n, &g).unwrap(), &c.torsion).unwrap();
        for p in &c.points {
            assert!(inp.curve.contains(p));
            assert_eq!(phi(1, p, &inp.curve).unwrap(), q, "{p}");
        }
    }
    for p in &cert.points {
        assert!(cert.points.contains(&p.swap()));
        let neg = QuarticPoint::new(-p.x.clone(), p.y.clone());
        assert!(cert.points.contains(&neg));
    }
}

#[test]
fn x4_search_finds_nothing_new() {
    let inp = x4_input();
    let cert = certify(&inp).unwrap();
    let found = brute_points(&inp.curve, 60, 12);
    assert!(found.is_subset(&cert.points), "{:?}", found.difference(&cert.points).collect::<Vec<_>>());
    assert_eq!(found.len(), 12);
}

fn is_torsion(t: &[ECPoint], q: &ECPoint) -> bool {
    t.contains(q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equal_index_points_qualify(alpha in 1i64..60, a in -8i64..8, b in -12i64..12) {
        let Ok(f) = SymQuartic::from_ints(a, b, alpha) else { return Ok(()) };
        let Ok(e) = companion_curve(&f) else { return Ok(()) };
        let tors = torsion_subgroup(&e).unwrap();
        for p in equal_index_points(&f).unwrap() {
            prop_assert!(f.contains(&p));
            let q1 = phi(1, &p, &f).unwrap();
            let q2 = phi(2, &p, &f).unwrap();
            let qualifies = is_torsion(&tors, &e.sub(&q1, &q2).unwrap())
                || is_torsion(&tors, &e.add(&q1, &q2).unwrap())
                || is_torsion(&tors, &q1)
                || is_torsion(&tors, &q2);
            prop_assert!(qualifies, "{} on {}", p, f);
        }
    }

    #[test]
    fn diagonal_points_are_equal_index(x in 1i64..6, a in -6i64..6) {
        // The curve through (x, x): φ1 − φ2 vanishes there.
        let xr = Rational::from_integer(BigInt::from(x));
        let Ok((f, p)) = SymQuartic::through_point(Rational::from_integer(BigInt::from(a)), &xr, &xr) else {
            return Ok(());
        };
        if companion_curve(&f).is_err() {
            return Ok(());
        }
        prop_assert!(equal_index_points(&f).unwrap().contains(&p));
    }
}
