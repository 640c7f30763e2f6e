use std::collections::BTreeSet;

use demjanenko_core::chebyshev::cheb_eval;
use demjanenko_core::dynamics::{
    chebyshev_curve_points, conjecture_scan, nonsingular, orbit_tail, predicted_count, preperiodic_points,
    shifted_intersection, CaseTag, ChebCurve, PolyMap,
};
use demjanenko_core::exact::IntPoly;
use demjanenko_core::quartic::QuarticPoint;
use demjanenko_core::Rational;
use num_bigint::BigInt;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn proven_degrees() {
    let cases: &[(u32, usize)] = &[
        (9, 0), (12, 0), (15, 0), (8, 12), (16, 12), (20, 12), (5, 4), (25, 4), (35, 4), (10, 8), (50, 8),
    ];
    for &(d, n) in cases {
        let cert = chebyshev_curve_points(d).unwrap();
        assert_ne!(cert.case, CaseTag::Conjectural, "d = {d}");
        assert_eq!(cert.points.len(), n, "d = {d}");
        assert_eq!(predicted_count(d), n, "d = {d}");
        let curve = ChebCurve::new(d, q(1, 1)).unwrap();
        for p in &cert.points {
            assert!(curve.contains(p).unwrap(), "d = {d}: {p}");
        }
    }
}

#[test]
fn covering_is_compatible() {
    // T_d = T_e ∘ T_{d/e}, so points of X_d land on X_e.
    for (d, e) in [(8u32, 4u32), (16, 4), (16, 8), (20, 4), (10, 5), (25, 5), (50, 10)] {
        let small = chebyshev_curve_points(e).unwrap().points;
        let m = (d / e) as u64;
        for p in chebyshev_curve_points(d).unwrap().points {
            let image = QuarticPoint::new(cheb_eval(m, &p.x).unwrap(), cheb_eval(m, &p.y).unwrap());
            assert!(small.contains(&image), "{p} on X_{d} maps to {image}");
        }
    }
}

#[test]
fn counts_follow_residue_class() {
    for d in 3..=40 {
        assert!([0, 4, 8, 12].contains(&predicted_count(d)));
        let cert = chebyshev_curve_points(d).unwrap();
        if cert.case != CaseTag::Conjectural {
            assert_eq!(cert.points.len(), predicted_count(d), "d = {d}");
        }
    }
}

#[test]
fn scans_stay_inside() {
    for d in [7u32, 11, 13] {
        let ev = conjecture_scan(d, 300).unwrap();
        assert!(ev.exceptional.is_empty(), "d = {d}: {:?}", ev.exceptional);
        assert_eq!(ev.inside.len(), predicted_count(d), "d = {d}");
    }
}

#[test]
fn chebyshev_square_preperiodic() {
    let f = IntPoly::from_i64(&[-2, 0, 1]);
    let got = preperiodic_points(&f, 50).unwrap();
    let want: BTreeSet<Rational> = [-2, -1, 0, 1, 2].iter().map(|&v| q(v, 1)).collect();
    assert_eq!(got, want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn singular_only_at_critical_sums(d in 2u32..9, kn in -6i64..7) {
        let c = ChebCurve::new(d, q(kn, 1)).unwrap();
        let expect = if d == 2 { kn != -4 } else { ![-4, 0, 4].contains(&kn) };
        prop_assert_eq!(nonsingular(&c).unwrap(), expect);
    }

    #[test]
    fn orbit_of_special_values_is_finite(start in -2i64..=2, n in 1u32..6) {
        let map = PolyMap::chebyshev_square();
        let tail = orbit_tail(&map, n, &q(start, 1), 12).unwrap();
        prop_assert!(tail.periodic);
    }

    #[test]
    fn escaping_orbits_never_close(start in 3i64..40, n in 0u32..3) {
        let map = PolyMap::chebyshev_square();
        let tail = orbit_tail(&map, n, &q(start, 1), 4).unwrap();
        prop_assert!(!tail.periodic);
        prop_assert!(tail.values.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn intersections_are_exact(a in -2i64..=2, b in -2i64..=2) {
        let map = PolyMap::chebyshev_square();
        let r = shifted_intersection(&map, 1, &q(a, 1), &q(b, 1), 12).unwrap();
        prop_assert!(r.exact);
    }
}
