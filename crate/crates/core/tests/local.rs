use demjanenko_core::exact::padic::{plane_point_zl, PlaneSearch};
use demjanenko_core::exact::primes_up_to;
use demjanenko_core::localglobal::{
    count_smooth_points_quartic_fq, everywhere_locally_solvable, family_member, is_good_place, real_solvable,
    special_place_checks, ternary_form, within_weil_bound, LocalStatus, Place, Witness,
};
use demjanenko_core::quartic::SymQuartic;
use num_bigint::BigInt;
use proptest::prelude::*;

fn small_primes() -> Vec<u64> {
    primes_up_to(36).into_iter().filter(|&q| q >= 5).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // A Q_q point on a smooth model reduces to an F_q point, and a smooth
    // F_q point lifts, so the residue tree and the scan must agree.
    #[test]
    fn tree_agrees_with_reduction(a in -30i64..=30, b in -30i64..=30, alpha in prop::sample::select(vec![1i64, 2, 3, 5, 6, 7, -1, -2])) {
        let Ok(f) = SymQuartic::from_ints(a, b, alpha) else { return Ok(()) };
        for q in small_primes() {
            if !is_good_place(&f, q) {
                continue;
            }
            let (count, witness) = count_smooth_points_quartic_fq(&f, q).unwrap();
            prop_assert!(within_weil_bound(count, q), "q = {}, count = {}", q, count);
            prop_assert_eq!(witness.is_some(), count > 0);
            let tree = plane_point_zl(&ternary_form(&f), &BigInt::from(q), 24);
            prop_assert_eq!(matches!(tree, PlaneSearch::Found { .. }), count > 0);
        }
    }

    #[test]
    fn real_test_matches_sampling(a in -20i64..=20, b in -60i64..=60) {
        let Ok(f) = SymQuartic::from_ints(a, b, 1) else { return Ok(()) };
        // Oracle: minimum of the left side over a fine grid.
        let mut min = f64::INFINITY;
        for i in 0..=400 {
            let t = i as f64 * 0.05;
            min = min.min(t * t * t * t + a as f64 * t * t);
        }
        let sampled = b as f64 >= 2.0 * min - 1e-9;
        prop_assert_eq!(real_solvable(&f), sampled);
    }
}

#[test]
fn witnesses_are_smooth() {
    let f = family_member(73).unwrap();
    for q in small_primes() {
        let (_, w) = count_smooth_points_quartic_fq(&f, q).unwrap();
        let (x, y, z) = w.unwrap();
        let qi = q as i64;
        let a = (-4 * 73i64).rem_euclid(qi) as u64;
        let b = (-6 * 73i64 * 73).rem_euclid(qi) as u64;
        let m = |u: u64, v: u64| u * v % q;
        let dx = m(x, (4 * m(x, x) + 2 * m(a, m(z, z))) % q);
        let dy = m(y, (4 * m(y, y) + 2 * m(a, m(z, z))) % q);
        let dz = (m(m(2 * a, z), m(x, x) + m(y, y)) + q * q - m(4 * b, m(m(z, z), z))) % q;
        assert!(dx != 0 || dy != 0 || dz != 0, "q = {q}");
    }
}

#[test]
fn congruence_witnesses_hold() {
    for p in [73u64, 97, 193, 241] {
        for r in special_place_checks(p).unwrap() {
            let Some(Witness::Congruence { modulus, x, y, z }) = r.witness.clone() else { panic!() };
            let f = family_member(p).unwrap();
            let a = BigInt::from(-4 * p as i64);
            let b = BigInt::from(-6 * (p * p) as i64);
            let v = x.pow(4) + &a * &x * &x * &z * &z + &a * &y * &y * &z * &z + y.pow(4) - &b * z.pow(4);
            assert_eq!(v % &modulus, BigInt::from(0), "{r:?} on {f}");
        }
    }
}

#[test]
fn one_mod_24_is_everywhere_solvable() {
    let primes: Vec<u64> = primes_up_to(2000).into_iter().filter(|p| p % 24 == 1).collect();
    assert!(primes.len() >= 20);
    for p in primes {
        let (ok, reports) = everywhere_locally_solvable(p).unwrap();
        assert!(ok, "p = {p}");
        assert!(reports.iter().any(|r| r.place == Place::Real));
        assert!(reports.iter().all(|r| r.status == LocalStatus::Solvable));
    }
}
