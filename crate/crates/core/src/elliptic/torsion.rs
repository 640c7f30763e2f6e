use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{ECPoint, EllipticCurve};
use crate::error::Result;
use crate::exact::{integer_sqrt_exact, primes::divisors, IntPoly, Rational};

/// Number of good primes whose point counts bound the torsion order.
const BOUND_PRIMES: usize = 10;

/// `gcd` of `#E(F_p)` over the first ten odd primes of good reduction.
/// The rational torsion subgroup injects into each `E(F_p)`.
pub fn torsion_bound(e: &EllipticCurve) -> Result<u64> {
    let mut g = 0u64;
    let mut found = 0;
    let mut p = 3u64;
    while found < BOUND_PRIMES {
        if e.is_good_prime(p) {
            g = g.gcd(&e.count_points_mod_p(p)?);
            found += 1;
        }
        p += 2;
    }
    Ok(g)
}

/// All rational torsion points, sorted.
///
/// Candidates come from the integral model: torsion points there have
/// integer coordinates and either `y = 0` or `y²` dividing the cubic's
/// discriminant. Each candidate is kept when its order is at most 12 and
/// divides the reduction bound.
pub fn torsion_subgroup(e: &EllipticCurve) -> Result<Vec<ECPoint>> {
    let bound = torsion_bound(e)?;
    let (model, u) = e.integral_model();
    let c = |q: &Rational| q.numer().clone();
    let (a2, a4, a6) = (c(model.a2()), c(model.a4()), c(model.a6()));
    let disc = -BigInt::from(4) * &a2 * &a2 * &a2 * &a6 + &a2 * &a2 * &a4 * &a4
        + BigInt::from(18) * &a2 * &a4 * &a6
        - BigInt::from(4) * &a4 * &a4 * &a4
        - BigInt::from(27) * &a6 * &a6;

    let mut ys = vec![BigInt::zero()];
    for d in divisors(&disc) {
        if let Some(r) = integer_sqrt_exact(&d) {
            ys.push(r);
        }
    }

    let u2 = Rational::from_integer(&u * &u);
    let u3 = &u2 * Rational::from_integer(u.clone());
    let mut points = BTreeSet::new();
    points.insert(ECPoint::Infinity);
    for y in ys {
        let cubic = IntPoly::new(vec![&a6 - &y * &y, a4.clone(), a2.clone(), BigInt::one()]);
        for x in cubic.rational_roots() {
            if !x.is_integer() {
                continue;
            }
            for sy in [y.clone(), -y.clone()] {
                let cand = ECPoint::new(&x / &u2, Rational::from_integer(sy) / &u3);
                debug_assert!(e.contains(&cand));
                if let Some(ord) = e.order_up_to(&cand, 12) {
                    if bound % ord as u64 == 0 {
                        points.insert(cand);
                    }
                }
            }
        }
    }
    Ok(points.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_torsion_is_order_two() {
        for (a2, a4) in [(16, -16), (16, 32)] {
            let e = EllipticCurve::from_ints(a2, a4, 0).unwrap();
            let t = torsion_subgroup(&e).unwrap();
            assert_eq!(t, vec![ECPoint::Infinity, ECPoint::from_ints(0, 0)]);
        }
    }

    #[test]
    fn cyclic_six() {
        // y² = x³ + 1 has torsion Z/6.
        let e = EllipticCurve::from_ints(0, 0, 1).unwrap();
        let t = torsion_subgroup(&e).unwrap();
        assert_eq!(t.len(), 6);
        for p in &t {
            for q in &t {
                assert!(t.contains(&e.add(p, q).unwrap()));
            }
        }
    }

    #[test]
    fn full_two_torsion() {
        let e = EllipticCurve::from_ints(0, -1, 0).unwrap();
        assert_eq!(torsion_subgroup(&e).unwrap().len(), 4);
    }
}
