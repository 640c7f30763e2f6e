//! Dense univariate polynomials over ℤ and ℚ, with the few pieces of
//! linear algebra (determinants, characteristic polynomials, resultants)
//! the curve modules need.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::primes::divisors;
use super::Rational;

/// Polynomial with integer coefficients; `coeffs[i]` multiplies `x^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        // Horner on numerator with a running power of the denominator keeps
        // the intermediate values integral.
        let (n, d) = (x.numer(), x.denom());
        let Some(deg) = self.degree() else {
            return Rational::zero();
        };
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
        Rational::new(acc, num_traits::pow(d.clone(), deg))
    }

    /// Value modulo a word-sized modulus, residue in `[0, m)`.
    pub fn eval_mod(&self, x: u64, m: u64) -> u64 {
        let mm = BigInt::from(m);
        let mut acc: u128 = 0;
        for c in self.coeffs.iter().rev() {
            let cr = ((c % &mm) + &mm) % &mm;
            acc = (acc * x as u128 + cr.to_u64().unwrap() as u128) % m as u128;
        }
        acc as u64
    }

    pub fn reduce_mod(&self, m: u64) -> Vec<u64> {
        let mm = BigInt::from(m);
        let mut v: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| (((c % &mm) + &mm) % &mm).to_u64().unwrap())
            .collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &IntPoly) -> Self {
        self.coeffs.iter().rev().fold(IntPoly::zero(), |acc, c| {
            &(&acc * inner) + &IntPoly::constant(c.clone())
        })
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .map(|c| Rational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Every rational root, by the rational root theorem.
    pub fn rational_roots(&self) -> BTreeSet<Rational> {
        let mut roots = BTreeSet::new();
        if self.is_zero() {
            return roots;
        }
        let zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if zeros > 0 {
            roots.insert(Rational::zero());
        }
        let reduced = IntPoly::new(self.coeffs[zeros..].to_vec());
        if reduced.degree() == Some(0) {
            return roots;
        }
        let a0 = reduced.coeffs[0].clone();
        let an = reduced.leading().unwrap().clone();
        let nums = divisors(&a0);
        let dens = divisors(&an);
        for r in &nums {
            for s in &dens {
                for sign in [1, -1] {
                    let cand = Rational::new(r * sign, s.clone());
                    if !roots.contains(&cand) && reduced.eval(&cand).is_zero() {
                        roots.insert(cand);
                    }
                }
            }
        }
        roots
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (RatPoly::zero(), RatPoly::zero());
        };
        if nd < dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn rem(&self, divisor: &RatPoly) -> RatPoly {
        self.div_rem(divisor).1
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &RatPoly) -> Self {
        self.coeffs.iter().rev().fold(RatPoly::zero(), |acc, c| {
            &(&acc * inner) + &RatPoly::constant(c.clone())
        })
    }

    /// Resultant via the Sylvester determinant.
    pub fn resultant(&self, other: &RatPoly) -> Rational {
        let (Some(m), Some(n)) = (self.degree(), other.degree()) else {
            return Rational::zero();
        };
        if m == 0 && n == 0 {
            return Rational::one();
        }
        let size = m + n;
        let mut mat = vec![vec![Rational::zero(); size]; size];
        for row in 0..n {
            for (j, c) in self.coeffs.iter().rev().enumerate() {
                mat[row][row + j] = c.clone();
            }
        }
        for row in 0..m {
            for (j, c) in other.coeffs.iter().rev().enumerate() {
                mat[n + row][row + j] = c.clone();
            }
        }
        determinant(mat)
    }
}

impl<'a> Add<&'a RatPoly> for &'a RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a RatPoly> for &'a RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a RatPoly> for &'a RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn determinant(mut mat: Vec<Vec<Rational>>) -> Rational {
    let n = mat.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !mat[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            mat.swap(pivot, col);
            det = -det;
        }
        let p = mat[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if mat[r][col].is_zero() {
                continue;
            }
            let factor = &mat[r][col] / &p;
            for c in col..n {
                let delta = &factor * &mat[col][c];
                mat[r][c] -= delta;
            }
        }
    }
    det
}

/// Solves `mat · x = rhs` for a nonsingular square system.
pub fn solve_linear(mut mat: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = mat.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(pivot, col);
        rhs.swap(pivot, col);
        let p = mat[col][col].clone();
        for r in 0..n {
            if r == col || mat[r][col].is_zero() {
                continue;
            }
            let factor = &mat[r][col] / &p;
            for c in col..n {
                let delta = &factor * &mat[col][c];
                mat[r][c] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Some((0..n).map(|i| &rhs[i] / &mat[i][i]).collect())
}

/// Characteristic polynomial `det(t·I − M)` by Faddeev–LeVerrier.
pub fn charpoly(mat: &[Vec<Rational>]) -> RatPoly {
    let n = mat.len();
    let matmul = |a: &[Vec<Rational>], b: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                    .collect()
            })
            .collect()
    };
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m_k: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1} I
        let mut next = matmul(mat, &m_k);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m_k = next;
        let am = matmul(mat, &m_k);
        let trace = (0..n).fold(Rational::zero(), |acc, i| acc + &am[i][i]);
        coeffs[n - k] = -trace / Rational::from_integer(BigInt::from(k));
    }
    RatPoly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn eval_at_fraction_is_exact() {
        let p = IntPoly::from_i64(&[2, 0, -4, 0, 1]);
        assert_eq!(p.eval(&rat(1, 2)), rat(2 * 16 - 4 * 4 + 1, 16));
        assert_eq!(p.eval(&int(0)), int(2));
        assert_eq!(p.eval_int(&BigInt::from(3)), BigInt::from(81 - 36 + 2));
    }

    #[test]
    fn display() {
        assert_eq!(IntPoly::from_i64(&[2, 0, -4, 0, 1]).to_string(), "x^4 - 4x^2 + 2");
        assert_eq!(IntPoly::from_i64(&[0, -1]).to_string(), "-x");
    }

    #[test]
    fn rational_roots_found() {
        // (2x - 1)(x + 3) x
        let p = IntPoly::from_i64(&[0, -3, 5, 2]);
        let roots: Vec<Rational> = p.rational_roots().into_iter().collect();
        assert_eq!(roots, vec![int(-3), int(0), rat(1, 2)]);
        assert!(IntPoly::from_i64(&[1, 0, 1]).rational_roots().is_empty());
    }

    #[test]
    fn resultant_detects_common_root() {
        let f = IntPoly::from_i64(&[-1, 0, 1]).to_rat();
        let g = IntPoly::from_i64(&[-1, 1]).to_rat();
        assert!(f.resultant(&g).is_zero());
        let h = IntPoly::from_i64(&[-2, 1]).to_rat();
        // Res(x^2 - 1, x - 2) = (2)^2 - 1 up to sign.
        assert_eq!(f.resultant(&h).abs(), int(3));
    }

    #[test]
    fn charpoly_of_companion() {
        // companion matrix of t^2 - 3t + 2
        let m = vec![vec![int(0), int(-2)], vec![int(1), int(3)]];
        assert_eq!(charpoly(&m), IntPoly::from_i64(&[2, -3, 1]).to_rat());
    }

    #[test]
    fn division_and_composition() {
        let f = IntPoly::from_i64(&[-1, 0, 0, 1]).to_rat();
        let g = IntPoly::from_i64(&[-1, 1]).to_rat();
        let (q, r) = f.div_rem(&g);
        assert!(r.is_zero());
        assert_eq!(q, IntPoly::from_i64(&[1, 1, 1]).to_rat());
        let t2 = IntPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(t2.compose(&t2), IntPoly::from_i64(&[2, 0, -4, 0, 1]));
    }
}
