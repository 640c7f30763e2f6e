//! Monic Chebyshev polynomials `T_d`, normalized so that
//! `T_d(z + 1/z) = z^d + z^-d`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{precondition, Error, Result};
use crate::exact::{factorize, int, IntPoly, Rational};

/// Degrees up to this bound are evaluated from cached coefficients.
pub const HORNER_MAX_DEGREE: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebPoly {
    degree: u32,
    poly: IntPoly,
}

fn table() -> &'static [IntPoly] {
    static TABLE: OnceLock<Vec<IntPoly>> = OnceLock::new();
    TABLE.get_or_init(|| build_upto(HORNER_MAX_DEGREE))
}

// Index 0 holds the constant 2 so the recurrence starts cleanly.
fn build_upto(n: u32) -> Vec<IntPoly> {
    let x = IntPoly::x();
    let mut v = vec![IntPoly::from_i64(&[2]), x.clone()];
    for d in 2..=n as usize {
        let next = &(&x * &v[d - 1]) - &v[d - 2];
        v.push(next);
    }
    v
}

/// `T_d` for `d ≥ 1`.
pub fn cheb(d: u32) -> Result<ChebPoly> {
    if d == 0 {
        return precondition("T_0 is not defined here; degree must be at least 1");
    }
    let poly = if d <= HORNER_MAX_DEGREE {
        table()[d as usize].clone()
    } else {
        build_upto(d).swap_remove(d as usize)
    };
    Ok(ChebPoly { degree: d, poly })
}

impl ChebPoly {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.poly.eval(x)
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.poly.eval_int(x)
    }
}

impl fmt::Display for ChebPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T_{} = {}", self.degree, self.poly)
    }
}

/// Evaluates `T_d(x)` with the doubling ladder
/// `T_2n = T_n² − 2`, `T_2n+1 = T_n·T_n+1 − x`.
fn ladder(d: u64, x: &Rational) -> Rational {
    let two = int(2);
    // (T_n, T_{n+1}) starting from n = 0.
    let (mut a, mut b) = (two.clone(), x.clone());
    for bit in (0..64 - d.leading_zeros()).rev() {
        if (d >> bit) & 1 == 1 {
            let na = &a * &b - x;
            let nb = &b * &b - &two;
            a = na;
            b = nb;
        } else {
            let nb = &a * &b - x;
            let na = &a * &a - &two;
            a = na;
            b = nb;
        }
    }
    a
}

/// `T_d(x)` through the factorization of `d`: one nested evaluation per
/// prime factor, each by Horner (small primes) or the ladder.
pub fn cheb_eval_nested(d: u64, x: &Rational) -> Result<Rational> {
    if d == 0 {
        return precondition("degree must be at least 1");
    }
    let mut value = x.clone();
    for (p, e) in factorize(&BigInt::from(d)) {
        let p: u64 = p.try_into().expect("factor of a u64");
        for _ in 0..e {
            value = if p <= HORNER_MAX_DEGREE as u64 {
                table()[p as usize].eval(&value)
            } else {
                ladder(p, &value)
            };
        }
    }
    Ok(value)
}

/// `T_d(x)`.
pub fn cheb_eval(d: u64, x: &Rational) -> Result<Rational> {
    if d == 0 {
        return precondition("degree must be at least 1");
    }
    if d <= HORNER_MAX_DEGREE as u64 {
        let v = table()[d as usize].eval(x);
        debug_assert_eq!(v, ladder(d, x), "Horner and ladder disagree at d = {d}");
        Ok(v)
    } else {
        cheb_eval_nested(d, x)
    }
}

/// The values of `T_d` on `{0, ±1, ±2}` for `3 ∤ d`, from the closed form
/// and re-checked by evaluation.
pub fn special_values(d: u64) -> Result<BTreeMap<i64, Rational>> {
    if d == 0 {
        return precondition("degree must be at least 1");
    }
    if d.is_multiple_of(3) {
        return precondition(format!("{d} is divisible by 3"));
    }
    let table: [(i64, i64); 5] = if d % 2 == 1 {
        [(-2, -2), (-1, -1), (0, 0), (1, 1), (2, 2)]
    } else if d % 4 == 2 {
        [(-2, 2), (-1, -1), (0, -2), (1, -1), (2, 2)]
    } else {
        [(-2, 2), (-1, -1), (0, 2), (1, -1), (2, 2)]
    };
    let mut out = BTreeMap::new();
    for (x, v) in table {
        let actual = cheb_eval(d, &int(x))?;
        if actual != int(v) {
            return Err(Error::Inconsistent(format!(
                "T_{d}({x}) = {actual}, closed form says {v}"
            )));
        }
        out.insert(x, int(v));
    }
    Ok(out)
}

/// Checks `|T_d(x)| ≥ 7 = |T_2(3)|` by direct evaluation.
pub fn growth_floor(d: u64, x: &Rational) -> Result<bool> {
    if d < 2 {
        return precondition("growth floor needs d ≥ 2");
    }
    if x.abs() < int(3) {
        return precondition(format!("growth floor needs |x| ≥ 3, got {x}"));
    }
    Ok(cheb_eval(d, x)?.abs() >= int(7))
}

/// `T_d(-x) = (-1)^d T_d(x)`.
pub fn parity_sign(d: u64) -> i8 {
    if d.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub(crate) fn is_special(x: &Rational) -> bool {
    x.is_integer() && x.numer().abs() <= BigInt::from(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn small_degrees() {
        assert_eq!(cheb(2).unwrap().poly(), &IntPoly::from_i64(&[-2, 0, 1]));
        assert_eq!(cheb(4).unwrap().poly(), &IntPoly::from_i64(&[2, 0, -4, 0, 1]));
        assert_eq!(cheb(5).unwrap().poly(), &IntPoly::from_i64(&[0, 5, 0, -5, 0, 1]));
        assert!(cheb(0).is_err());
    }

    #[test]
    fn characterization_at_two() {
        // z = 2: z + 1/z = 5/2
        assert_eq!(cheb_eval(5, &rat(5, 2)).unwrap(), rat(1025, 32));
    }

    #[test]
    fn ladder_matches_horner() {
        for d in 1..=64u64 {
            for x in [rat(3, 7), int(-2), rat(-11, 5)] {
                assert_eq!(ladder(d, &x), table()[d as usize].eval(&x), "d = {d}");
            }
        }
        let big = cheb(97).unwrap();
        assert_eq!(big.eval(&rat(1, 3)), cheb_eval(97, &rat(1, 3)).unwrap());
    }

    #[test]
    fn special_value_rules() {
        assert_eq!(special_values(5).unwrap()[&-2], int(-2));
        assert_eq!(special_values(4).unwrap()[&0], int(2));
        assert_eq!(special_values(10).unwrap()[&0], int(-2));
        assert!(special_values(9).is_err());
    }

    #[test]
    fn growth() {
        assert!(growth_floor(2, &int(3)).unwrap());
        assert_eq!(cheb_eval(5, &int(3)).unwrap(), int(123));
        assert!(growth_floor(2, &int(-3)).unwrap());
        assert!(growth_floor(2, &int(2)).is_err());
    }
}
