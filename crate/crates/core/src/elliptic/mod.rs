//! Elliptic curves `y² = x³ + a2·x² + a4·x + a6` over ℚ with exact
//! group law, reduction mod p, torsion and heights.

mod height;
mod torsion;

pub use height::{canonical_height, naive_height, HeightContext, HeightGap};
pub use torsion::{torsion_bound, torsion_subgroup};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::exact::{factorize, is_prime, modp::legendre_u64, serde_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EllipticCurve {
    #[serde(with = "serde_rational")]
    a2: Rational,
    #[serde(with = "serde_rational")]
    a4: Rational,
    #[serde(with = "serde_rational")]
    a6: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ECPoint {
    Infinity,
    Affine {
        #[serde(with = "serde_rational")]
        x: Rational,
        #[serde(with = "serde_rational")]
        y: Rational,
    },
}

impl ECPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        ECPoint::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        ECPoint::new(crate::exact::int(x), crate::exact::int(y))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ECPoint::Infinity)
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            ECPoint::Infinity => None,
            ECPoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&Rational> {
        match self {
            ECPoint::Infinity => None,
            ECPoint::Affine { y, .. } => Some(y),
        }
    }
}

impl fmt::Display for ECPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ECPoint::Infinity => write!(f, "O"),
            ECPoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})x^2 + ({})x + ({})", self.a2, self.a4, self.a6)
    }
}

impl EllipticCurve {
    pub fn new(a2: Rational, a4: Rational, a6: Rational) -> Result<Self> {
        let e = EllipticCurve { a2, a4, a6 };
        if e.discriminant().is_zero() {
            return Err(Error::Singular(format!("{e} is singular")));
        }
        Ok(e)
    }

    pub fn from_ints(a2: i64, a4: i64, a6: i64) -> Result<Self> {
        use crate::exact::int;
        Self::new(int(a2), int(a4), int(a6))
    }

    pub fn a2(&self) -> &Rational {
        &self.a2
    }

    pub fn a4(&self) -> &Rational {
        &self.a4
    }

    pub fn a6(&self) -> &Rational {
        &self.a6
    }

    /// `(b2, b4, b6, b8)`.
    pub fn b_invariants(&self) -> [Rational; 4] {
        let four = Rational::from_integer(4.into());
        let two = Rational::from_integer(2.into());
        [
            &four * &self.a2,
            &two * &self.a4,
            &four * &self.a6,
            &four * &self.a2 * &self.a6 - &self.a4 * &self.a4,
        ]
    }

    pub fn discriminant(&self) -> Rational {
        let [b2, b4, b6, b8] = self.b_invariants();
        let r = |n: i64| Rational::from_integer(n.into());
        -(&b2 * &b2 * &b8) - r(8) * &b4 * &b4 * &b4 - r(27) * &b6 * &b6 + r(9) * &b2 * &b4 * &b6
    }

    pub fn c4(&self) -> Rational {
        let [b2, b4, _, _] = self.b_invariants();
        &b2 * &b2 - Rational::from_integer(24.into()) * b4
    }

    pub fn c6(&self) -> Rational {
        let [b2, b4, b6, _] = self.b_invariants();
        let r = |n: i64| Rational::from_integer(n.into());
        -(&b2 * &b2 * &b2) + r(36) * &b2 * &b4 - r(216) * b6
    }

    pub fn j_invariant(&self) -> Rational {
        let c4 = self.c4();
        &c4 * &c4 * &c4 / self.discriminant()
    }

    /// The cubic `x³ + a2 x² + a4 x + a6` at `x`.
    pub fn rhs(&self, x: &Rational) -> Rational {
        ((x + &self.a2) * x + &self.a4) * x + &self.a6
    }

    pub fn contains(&self, p: &ECPoint) -> bool {
        match p {
            ECPoint::Infinity => true,
            ECPoint::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    fn check(&self, p: &ECPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::NotOnCurve(format!("{p} is not on {self}")))
        }
    }

    /// Isomorphic model with integer coefficients, `x' = u²x`, `y' = u³y`,
    /// with `u > 0` minimal among such scalings.
    pub fn integral_model(&self) -> (EllipticCurve, BigInt) {
        let mut u = BigInt::one();
        let dens = [(self.a2.denom(), 2u64), (self.a4.denom(), 4), (self.a6.denom(), 6)];
        let lcm = dens.iter().fold(BigInt::one(), |acc, (d, _)| acc.lcm(d));
        if !lcm.is_one() {
            for (p, _) in factorize(&lcm) {
                let mut e = 0u64;
                for (d, w) in dens {
                    let v = crate::exact::int_valuation(d, &p).unwrap_or(0);
                    e = e.max(v.div_ceil(w));
                }
                u *= num_traits::pow(p, e as usize);
            }
        }
        (self.scaled(&u), u)
    }

    /// The model with coefficients `u²a2, u⁴a4, u⁶a6`.
    pub fn scaled(&self, u: &BigInt) -> EllipticCurve {
        let u2 = Rational::from_integer(u * u);
        let u4 = &u2 * &u2;
        let u6 = &u4 * &u2;
        EllipticCurve {
            a2: &self.a2 * u2,
            a4: &self.a4 * u4,
            a6: &self.a6 * u6,
        }
    }

    pub fn neg(&self, p: &ECPoint) -> ECPoint {
        match p {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine { x, y } => ECPoint::new(x.clone(), -y),
        }
    }

    fn double_unchecked(&self, p: &ECPoint) -> ECPoint {
        let ECPoint::Affine { x, y } = p else {
            return ECPoint::Infinity;
        };
        if y.is_zero() {
            return ECPoint::Infinity;
        }
        let three = Rational::from_integer(3.into());
        let two = Rational::from_integer(2.into());
        let lambda = (three * x * x + &two * &self.a2 * x + &self.a4) / (two * y);
        let x3 = &lambda * &lambda - &self.a2 - x - x;
        let y3 = lambda * (x - &x3) - y;
        ECPoint::new(x3, y3)
    }

    pub(crate) fn add_unchecked(&self, p: &ECPoint, q: &ECPoint) -> ECPoint {
        match (p, q) {
            (ECPoint::Infinity, _) => q.clone(),
            (_, ECPoint::Infinity) => p.clone(),
            (ECPoint::Affine { x: x1, y: y1 }, ECPoint::Affine { x: x2, y: y2 }) => {
                if x1 == x2 {
                    if (y1 + y2).is_zero() {
                        return ECPoint::Infinity;
                    }
                    return self.double_unchecked(p);
                }
                let lambda = (y2 - y1) / (x2 - x1);
                let x3 = &lambda * &lambda - &self.a2 - x1 - x2;
                let y3 = lambda * (x1 - &x3) - y1;
                ECPoint::new(x3, y3)
            }
        }
    }

    pub fn add(&self, p: &ECPoint, q: &ECPoint) -> Result<ECPoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub fn sub(&self, p: &ECPoint, q: &ECPoint) -> Result<ECPoint> {
        self.add(p, &self.neg(q))
    }

    pub fn double(&self, p: &ECPoint) -> Result<ECPoint> {
        self.check(p)?;
        Ok(self.double_unchecked(p))
    }

    /// `n·P` by double-and-add.
    pub fn scalar_mul(&self, n: i64, p: &ECPoint) -> Result<ECPoint> {
        self.check(p)?;
        let base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = ECPoint::Infinity;
        let mut pow = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &pow);
            }
            k >>= 1;
            if k > 0 {
                pow = self.double_unchecked(&pow);
            }
        }
        Ok(acc)
    }

    /// `[0·P, 1·P, ..., n·P]`, each from its predecessor.
    pub fn multiples(&self, p: &ECPoint, n: usize) -> Result<Vec<ECPoint>> {
        self.check(p)?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(ECPoint::Infinity);
        for i in 1..=n {
            let next = self.add_unchecked(&out[i - 1], p);
            out.push(next);
        }
        Ok(out)
    }

    /// Smallest `k ≤ limit` with `k·P = O`.
    pub fn order_up_to(&self, p: &ECPoint, limit: u32) -> Option<u32> {
        let mut acc = p.clone();
        for k in 1..=limit {
            if acc.is_infinity() {
                return Some(k);
            }
            acc = self.add_unchecked(&acc, p);
        }
        None
    }

    /// `#E(F_p)` including the point at infinity, for an odd prime of good
    /// reduction of the integral model.
    pub fn count_points_mod_p(&self, p: u64) -> Result<u64> {
        if p < 3 || !is_prime(&BigInt::from(p)) {
            return precondition(format!("{p} is not an odd prime"));
        }
        let (model, _) = self.integral_model();
        let disc = model.discriminant();
        if (disc.numer() % BigInt::from(p)).is_zero() {
            return precondition(format!("{self} has bad reduction at {p}"));
        }
        let pb = BigInt::from(p);
        let red = |q: &Rational| q.numer().mod_floor(&pb).to_u64().unwrap();
        let (a2, a4, a6) = (red(&model.a2), red(&model.a4), red(&model.a6));
        let m = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
        let mut count = 1u64;
        for x in 0..p {
            let f = (m((x + a2) % p, x) + a4) % p;
            let f = (m(f, x) + a6) % p;
            count += (1 + legendre_u64(f, p) as i64) as u64;
        }
        Ok(count)
    }

    /// True if `p` is an odd prime of good reduction for the integral model.
    pub fn is_good_prime(&self, p: u64) -> bool {
        if p < 3 || !is_prime(&BigInt::from(p)) {
            return false;
        }
        let disc = self.integral_model().0.discriminant();
        !(disc.numer() % BigInt::from(p)).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn x4() -> EllipticCurve {
        EllipticCurve::from_ints(16, -16, 0).unwrap()
    }

    #[test]
    fn invariants_of_companion() {
        let e = x4();
        assert_eq!(e.discriminant(), int(1_310_720));
        assert_eq!(e.c4(), int(4864));
        assert_eq!(e.j_invariant(), rat(438_976, 5));
        assert!(EllipticCurve::from_ints(0, 0, 0).is_err());
    }

    #[test]
    fn group_law_examples() {
        let e = x4();
        let g = ECPoint::from_ints(4, -16);
        let t = ECPoint::from_ints(0, 0);
        assert_eq!(e.add(&g, &t).unwrap(), ECPoint::from_ints(-4, -16));
        assert_eq!(e.scalar_mul(2, &g).unwrap(), ECPoint::from_ints(1, 1));
        assert_eq!(
            e.scalar_mul(3, &g).unwrap(),
            ECPoint::new(rat(100, 9), rat(1520, 27))
        );
        assert_eq!(e.add(&t, &t).unwrap(), ECPoint::Infinity);
        let two_g_t = e.add(&e.scalar_mul(2, &g).unwrap(), &t).unwrap();
        assert_eq!(two_g_t, ECPoint::from_ints(-16, 16));
        assert_eq!(e.scalar_mul(-2, &g).unwrap(), ECPoint::from_ints(1, -1));
        assert!(e.add(&ECPoint::from_ints(1, 2), &g).is_err());
    }

    #[test]
    fn multiples_match_scalar_mul() {
        let e = x4();
        let g = ECPoint::from_ints(4, -16);
        let ms = e.multiples(&g, 12).unwrap();
        for (n, m) in ms.iter().enumerate() {
            assert_eq!(m, &e.scalar_mul(n as i64, &g).unwrap());
        }
    }

    #[test]
    fn point_counts() {
        // affine points over F_5: (0,0), (1,±2), (2,±1)
        let e = EllipticCurve::from_ints(16, 32, 0).unwrap();
        assert_eq!(e.count_points_mod_p(5).unwrap(), 6);
        let f = EllipticCurve::from_ints(0, 0, 1).unwrap();
        assert_eq!(f.count_points_mod_p(5).unwrap(), 6);
        assert!(f.count_points_mod_p(3).is_err());
        assert!(x4().count_points_mod_p(5).is_err());
    }

    #[test]
    fn integral_model_scaling() {
        let e = EllipticCurve::new(rat(1, 2), rat(1, 3), int(0)).unwrap();
        let (m, u) = e.integral_model();
        assert_eq!(u, BigInt::from(6));
        assert_eq!(m.a2(), &int(18));
        assert_eq!(m.a4(), &int(432));
    }
}
