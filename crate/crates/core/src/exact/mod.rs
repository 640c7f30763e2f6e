//! Number-theoretic substrate: exact rationals, valuations, primality,
//! residues modulo primes and polynomials over ℤ and ℚ.

pub mod modp;
pub mod padic;
pub mod poly;
pub mod primes;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{precondition, Result};

pub use modp::{legendre_symbol, roots_mod_p};
pub use poly::{IntPoly, RatPoly};
pub use primes::{factorize, is_prime, primes_up_to};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Nonnegative square root in ℚ, if `q` is a rational square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let num = integer_sqrt_exact(q.numer())?;
    let den = integer_sqrt_exact(q.denom())?;
    Some(Rational::new(num, den))
}

/// Square root of a perfect square integer.
pub fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// `v_p(n)` for a nonzero integer, `None` for zero.
pub fn int_valuation(n: &BigInt, p: &BigInt) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// `v_p(q)`, with `None` standing for +∞ at `q = 0`.
pub fn p_valuation(q: &Rational, p: &BigInt) -> Result<Option<i64>> {
    if !is_prime(p) {
        return precondition(format!("{p} is not prime"));
    }
    if q.is_zero() {
        return Ok(None);
    }
    let vn = int_valuation(q.numer(), p).unwrap_or(0) as i64;
    let vd = int_valuation(q.denom(), p).unwrap_or(0) as i64;
    Ok(Some(vn - vd))
}

/// True iff no prime square divides `n`.
pub fn is_squarefree(n: &BigInt) -> Result<bool> {
    if n.is_zero() {
        return precondition("is_squarefree is undefined at 0");
    }
    Ok(factorize(n).iter().all(|(_, e)| *e == 1))
}

/// `|q|_p = p^{-v_p(q)}` as an exact rational.
pub fn p_adic_abs(q: &Rational, p: &BigInt) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    let vn = int_valuation(q.numer(), p).unwrap_or(0) as i64;
    let vd = int_valuation(q.denom(), p).unwrap_or(0) as i64;
    let v = vn - vd;
    let pw = Rational::from_integer(num_traits::pow(p.clone(), v.unsigned_abs() as usize));
    if v >= 0 {
        pw.recip()
    } else {
        pw
    }
}

/// Natural log of `|n|` for a nonzero integer of any size.
pub fn log_abs(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Logarithmic Weil height `log max(|num|, den)` of a rational number.
pub fn rational_height(q: &Rational) -> f64 {
    let n = q.numer().abs();
    let d = q.denom();
    if n > *d {
        log_abs(&n)
    } else {
        log_abs(d)
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(qs: &[&Rational]) -> BigInt {
    qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn is_integer_valued(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn sign_of(n: &BigInt) -> i8 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Serde adapters writing rationals as `{"num": "...", "den": "..."}` with
/// decimal strings.
pub mod serde_rational {
    use super::Rational;
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num: String,
        den: String,
    }

    fn to_repr(q: &Rational) -> Repr {
        Repr {
            num: q.numer().to_str_radix(10),
            den: q.denom().to_str_radix(10),
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<Rational, E> {
        let num: BigInt = r.num.parse().map_err(E::custom)?;
        let den: BigInt = r.den.parse().map_err(E::custom)?;
        if den <= BigInt::from(0) {
            return Err(E::custom("denominator must be positive"));
        }
        let q = Rational::new(num.clone(), den.clone());
        if q.numer() != &num || q.denom() != &den {
            return Err(E::custom("rational is not in lowest terms"));
        }
        Ok(q)
    }

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        to_repr(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(qs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            qs.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<Repr>::deserialize(d)?
                .into_iter()
                .map(from_repr::<D::Error>)
                .collect()
        }
    }

    pub mod set {
        use super::*;
        use std::collections::BTreeSet;

        pub fn serialize<S: Serializer>(qs: &BTreeSet<Rational>, s: S) -> Result<S::Ok, S::Error> {
            qs.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<BTreeSet<Rational>, D::Error> {
            let v = Vec::<Repr>::deserialize(d)?;
            let n = v.len();
            let set: BTreeSet<Rational> = v
                .into_iter()
                .map(from_repr::<D::Error>)
                .collect::<Result<_, _>>()?;
            if set.len() != n {
                return Err(D::Error::custom("duplicate rationals in set"));
            }
            Ok(set)
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            q.as_ref().map(to_repr).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Rational>, D::Error> {
            Option::<Repr>::deserialize(d)?
                .map(from_repr::<D::Error>)
                .transpose()
        }
    }
}

/// Serde adapter for big integers as decimal strings.
pub mod serde_bigint {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}
