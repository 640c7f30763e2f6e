use std::collections::BTreeSet;

use demjanenko_core::descent::{
    homspace_locally_solvable, quartic_residue_criterion, root_number, selmer_rank_bound, selmer_set,
    selmer_sets, HomSpace, Place,
};
use demjanenko_core::exact::primes_up_to;
use num_bigint::BigInt;

fn odd_primes(limit: u64) -> Vec<u64> {
    primes_up_to(limit).into_iter().filter(|&p| p > 2).collect()
}

fn squarefree_part(mut n: BigInt, p: u64) -> BigInt {
    for q in [BigInt::from(2), BigInt::from(p)] {
        let q2 = &q * &q;
        while (&n % &q2) == BigInt::from(0) {
            n /= &q2;
        }
    }
    n
}

#[test]
fn root_number_is_minus_one() {
    let primes = odd_primes(4000);
    assert!(primes.len() >= 500);
    for p in primes.into_iter().take(500) {
        let r = root_number(p).unwrap();
        assert_eq!(r.w, -1, "p = {p}");
        assert_eq!(r.w, r.w2 * r.wp);
    }
}

#[test]
fn quartic_residue_law() {
    for p in odd_primes(5000) {
        // Oracle: exhaustive residues.
        let brute = (0..p).any(|x| {
            let x2 = x * x % p;
            (x2 * x2 + 4 * p * p - 4 * x2 + 2) % p == 0
        });
        assert_eq!(quartic_residue_criterion(p).unwrap(), brute, "p = {p}");
        assert_eq!(brute, p % 16 == 1 || p % 16 == 15, "p = {p}");
    }
}

#[test]
fn selmer_structure() {
    for p in odd_primes(600) {
        let (s, t) = selmer_sets(p).unwrap();
        for set in [&s, &t] {
            assert!(set.contains(&BigInt::from(1)));
            for x in set.iter() {
                for y in set.iter() {
                    assert!(set.contains(&squarefree_part(x * y, p)), "p = {p}: {set:?}");
                }
            }
        }
        assert!(s.iter().all(|d| d > &BigInt::from(0)), "p = {p}: {s:?}");
    }
}

#[test]
fn family_matches_unscaled_model() {
    for p in [5u64, 7, 11] {
        let pb = BigInt::from(p);
        let family: BTreeSet<BigInt> = [-1i64, 1, -2, 2]
            .iter()
            .flat_map(|&u| [BigInt::from(u), BigInt::from(u) * &pb])
            .filter(|d| {
                let c = HomSpace::family(d.try_into().unwrap(), p).unwrap();
                [Place::Real, Place::Prime(2), Place::Prime(p)]
                    .iter()
                    .all(|&pl| homspace_locally_solvable(&c, pl).unwrap())
            })
            .collect();
        let generic = selmer_set(&(BigInt::from(-32) * &pb), &(BigInt::from(128) * &pb * &pb)).unwrap();
        assert_eq!(family, generic, "p = {p}");
    }
}

#[test]
fn rank_bound_off_sixteen() {
    for p in odd_primes(2000) {
        if p % 16 == 1 || p % 16 == 15 {
            continue;
        }
        assert!(selmer_rank_bound(p).unwrap() <= 2, "p = {p}");
    }
}
