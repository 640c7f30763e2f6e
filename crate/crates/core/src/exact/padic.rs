//! Residue-tree searches over `ℤ_ℓ` for integer polynomials.
//!
//! A node is a class `r + ℓ^k ℤ_ℓ`. Expanding `f(r + ℓ^k t)` in `t` gives
//! Taylor coefficients whose valuations decide most classes outright; the
//! rest are split into `ℓ` children.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{int_valuation, IntPoly};

/// Coefficients of `f(r + t)` in `t`.
pub fn taylor(f: &IntPoly, r: &BigInt) -> Vec<BigInt> {
    let mut c: Vec<BigInt> = f.coeffs().to_vec();
    let n = c.len();
    // Repeated synthetic division by (t − r).
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let add = &c[j + 1] * r;
            c[j] += add;
        }
    }
    c
}

fn val(n: &BigInt, l: &BigInt) -> Option<u64> {
    int_valuation(n, l)
}

/// Upper limit on the number of residue classes visited in one search.
const NODE_LIMIT: usize = 200_000;

/// Finds `r` such that `f` has a root in `ℤ_ℓ` congruent to `r`, certified
/// by an exact root or by `v(f(r)) > 2 v(f'(r))`. `None` means no root was
/// found above depth `max_depth`, which is a proof of absence only when
/// every class was pruned before the cap.
pub fn zl_root(f: &IntPoly, l: &BigInt, max_depth: u32) -> Option<BigInt> {
    if f.is_zero() {
        return Some(BigInt::zero());
    }
    let df = f.derivative();
    let mut stack = vec![(BigInt::zero(), 0u32, BigInt::one())];
    let mut visited = 0;
    while let Some((r, k, lk)) = stack.pop() {
        visited += 1;
        if visited > NODE_LIMIT {
            return None;
        }
        let fv = f.eval_int(&r);
        if fv.is_zero() {
            return Some(r);
        }
        let e = val(&fv, l).unwrap();
        if e < k as u64 {
            continue;
        }
        let dv = df.eval_int(&r);
        if !dv.is_zero() && e > 2 * val(&dv, l).unwrap() {
            return Some(r);
        }
        if k >= max_depth {
            continue;
        }
        let next = &lk * l;
        let mut j = BigInt::zero();
        while &j < l {
            stack.push((&r + &j * &lk, k + 1, next.clone()));
            j += 1;
        }
    }
    None
}

/// Outcome of a square-value search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SquareSearch {
    /// `f(x)` is a square in `ℚ_ℓ` for some `x ≡ witness`.
    Found(BigInt),
    /// No `x ∈ ℤ_ℓ` gives a square.
    Absent,
    /// The depth or node cap was reached.
    Undecided,
}

/// Decides whether `f(x)` is a square in `ℚ_ℓ` (zero included) for some
/// `x ∈ ℤ_ℓ`.
pub fn square_value_zl(f: &IntPoly, l: &BigInt, max_depth: u32) -> SquareSearch {
    if f.is_zero() {
        return SquareSearch::Found(BigInt::zero());
    }
    let two = BigInt::from(2);
    let slack: u64 = if *l == two { 3 } else { 1 };
    let mut stack = vec![(BigInt::zero(), 0u32, BigInt::one())];
    let mut visited = 0;
    let mut capped = false;
    while let Some((r, k, lk)) = stack.pop() {
        visited += 1;
        if visited > NODE_LIMIT {
            return SquareSearch::Undecided;
        }
        let c = taylor(f, &r);
        if c[0].is_zero() {
            return SquareSearch::Found(r);
        }
        let e = val(&c[0], l).unwrap();
        let rest = c
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, cj)| !cj.is_zero())
            .map(|(j, cj)| val(cj, l).unwrap() + j as u64 * k as u64)
            .min();
        let decided = match rest {
            None => true,
            Some(m) => m >= e + slack,
        };
        if decided {
            if e.is_multiple_of(2) && unit_is_square(&c[0], e, l) {
                return SquareSearch::Found(r);
            }
            continue;
        }
        // A simple root in the class gives the square 0.
        if !c[1].is_zero() && e > 2 * val(&c[1], l).unwrap() {
            return SquareSearch::Found(r);
        }
        if k >= max_depth {
            capped = true;
            continue;
        }
        let next = &lk * l;
        let mut j = BigInt::zero();
        while &j < l {
            stack.push((&r + &j * &lk, k + 1, next.clone()));
            j += 1;
        }
    }
    if capped {
        SquareSearch::Undecided
    } else {
        SquareSearch::Absent
    }
}

/// Whether `n / ℓ^e` is a square unit, looking at it mod `ℓ` (mod 8 for 2).
fn unit_is_square(n: &BigInt, e: u64, l: &BigInt) -> bool {
    let u = n / num_traits::pow(l.clone(), e as usize);
    if *l == BigInt::from(2) {
        return u.mod_floor(&BigInt::from(8)) == BigInt::one();
    }
    let m = u.mod_floor(l);
    let exp = (l - 1u32) / 2u32;
    m.modpow(&exp, l).is_one()
}

/// Smallest `k`-digit approximation `r` with `r² ≡ n (mod ℓ^k)`, found
/// digit by digit.
pub fn sqrt_mod_prime_power(n: &BigInt, l: &BigInt, k: u32) -> Option<BigInt> {
    let modulus = num_traits::pow(l.clone(), k as usize);
    let target = n.mod_floor(&modulus);
    let mut cands = vec![BigInt::zero()];
    let mut lk = BigInt::one();
    for _ in 0..k {
        let next = &lk * l;
        let mut out = Vec::new();
        for r in &cands {
            let mut j = BigInt::zero();
            while &j < l {
                let s = r + &j * &lk;
                if (&s * &s - &target).mod_floor(&next).is_zero() {
                    out.push(s);
                }
                j += 1;
            }
        }
        if out.is_empty() {
            return None;
        }
        out.sort();
        out.dedup();
        cands = out;
        lk = next;
    }
    cands.into_iter().min_by(|a, b| a.abs().cmp(&b.abs()))
}

/// Ternary form given by `(i, j, k, c)` terms `c·X^i Y^j Z^k`.
pub type TernaryForm = Vec<(u32, u32, u32, BigInt)>;

/// Bivariate integer polynomial, `c[i][j]` the coefficient of `x^i y^j`.
#[derive(Clone, Debug)]
struct Poly2 {
    c: Vec<Vec<BigInt>>,
}

impl Poly2 {
    fn from_terms(deg: usize, terms: impl IntoIterator<Item = (usize, usize, BigInt)>) -> Self {
        let mut c = vec![vec![BigInt::zero(); deg + 1]; deg + 1];
        for (i, j, v) in terms {
            c[i][j] += v;
        }
        Poly2 { c }
    }

    fn shifted(&self, x0: &BigInt, y0: &BigInt) -> Vec<Vec<BigInt>> {
        let n = self.c.len();
        let mut c = self.c.clone();
        let shift = |v: &mut Vec<BigInt>, r: &BigInt| {
            let m = v.len();
            for i in 0..m {
                for j in (i..m - 1).rev() {
                    let add = &v[j + 1] * r;
                    v[j] += add;
                }
            }
        };
        for j in 0..n {
            let mut col: Vec<BigInt> = (0..n).map(|i| c[i][j].clone()).collect();
            shift(&mut col, x0);
            for i in 0..n {
                c[i][j] = col[i].clone();
            }
        }
        for row in c.iter_mut() {
            shift(row, y0);
        }
        c
    }
}

/// Outcome of a search for a `ℚ_ℓ` point on a plane curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaneSearch {
    /// `[x : y : z]` is within `ℓ^precision` of a point.
    Found { x: BigInt, y: BigInt, z: BigInt, precision: u32 },
    Absent,
    Undecided,
}

/// Decides whether a ternary form has a nontrivial zero over `ℚ_ℓ`.
///
/// `P²(ℚ_ℓ)` is covered by the patches `Z = 1`, `X = 1, ℓ | Z` and
/// `Y = 1, ℓ | X, ℓ | Z`, each searched by a residue tree. On a smooth
/// curve every branch ends in a pruned class or a Hensel point, so the
/// depth cap only matters for singular input.
pub fn plane_point_zl(form: &TernaryForm, l: &BigInt, max_depth: u32) -> PlaneSearch {
    let deg = form.iter().map(|t| (t.0 + t.1 + t.2) as usize).max().unwrap_or(0);
    let lp = |e: u32| num_traits::pow(l.clone(), e as usize);
    let patches: [(Poly2, u8); 3] = [
        (
            Poly2::from_terms(deg, form.iter().map(|(i, j, _, c)| (*i as usize, *j as usize, c.clone()))),
            0,
        ),
        (
            Poly2::from_terms(deg, form.iter().map(|(_, j, k, c)| (*j as usize, *k as usize, c * lp(*k)))),
            1,
        ),
        (
            Poly2::from_terms(deg, form.iter().map(|(i, _, k, c)| (*i as usize, *k as usize, c * lp(*i + *k)))),
            2,
        ),
    ];
    let mut undecided = false;
    for (poly, which) in &patches {
        match tree2(poly, l, max_depth) {
            PlaneSearch::Found { x: a, y: b, precision, .. } => {
                let (x, y, z) = match which {
                    0 => (a, b, BigInt::one()),
                    1 => (BigInt::one(), a, b * l),
                    _ => (a * l, BigInt::one(), b * l),
                };
                return PlaneSearch::Found { x, y, z, precision };
            }
            PlaneSearch::Undecided => undecided = true,
            PlaneSearch::Absent => {}
        }
    }
    if undecided {
        PlaneSearch::Undecided
    } else {
        PlaneSearch::Absent
    }
}

fn tree2(f: &Poly2, l: &BigInt, max_depth: u32) -> PlaneSearch {
    let n = f.c.len();
    let mut stack = vec![(BigInt::zero(), BigInt::zero(), 0u32)];
    let mut visited = 0;
    let mut capped = false;
    while let Some((x0, y0, k)) = stack.pop() {
        visited += 1;
        if visited > NODE_LIMIT {
            return PlaneSearch::Undecided;
        }
        let c = f.shifted(&x0, &y0);
        if c[0][0].is_zero() {
            return PlaneSearch::Found { x: x0, y: y0, z: BigInt::zero(), precision: u32::MAX };
        }
        let e = val(&c[0][0], l).unwrap();
        let mut m = u64::MAX;
        for (i, row) in c.iter().enumerate() {
            for (j, cij) in row.iter().enumerate() {
                if (i, j) != (0, 0) && !cij.is_zero() {
                    m = m.min(val(cij, l).unwrap() + k as u64 * (i + j) as u64);
                }
            }
        }
        if m > e {
            continue;
        }
        let g = [&c[1][0], &c[0][1]]
            .into_iter()
            .filter(|d| !d.is_zero())
            .map(|d| val(d, l).unwrap())
            .min();
        if g.is_some_and(|g| e > 2 * g) {
            return PlaneSearch::Found { x: x0, y: y0, z: BigInt::zero(), precision: k };
        }
        if k >= max_depth {
            capped = true;
            continue;
        }
        for (s, t) in children(&c, n, l, k) {
            let lk = num_traits::pow(l.clone(), k as usize);
            stack.push((&x0 + &lk * s, &y0 + &lk * t, k + 1));
        }
    }
    if capped {
        PlaneSearch::Undecided
    } else {
        PlaneSearch::Absent
    }
}

/// Digits `(s, t)` with `f(x0 + ℓ^k s, y0 + ℓ^k t) ≡ 0 (mod ℓ^(k+1))`,
/// given the Taylor coefficients `c` at `(x0, y0)`.
fn children(c: &[Vec<BigInt>], n: usize, l: &BigInt, k: u32) -> Vec<(BigInt, BigInt)> {
    let modulus = num_traits::pow(l.clone(), k as usize + 1);
    let lk = num_traits::pow(l.clone(), k as usize);
    let mut scaled = vec![vec![BigInt::zero(); n]; n];
    let mut lpow = vec![BigInt::one(); 2 * n];
    for e in 1..2 * n {
        lpow[e] = (&lpow[e - 1] * &lk).mod_floor(&modulus);
    }
    for i in 0..n {
        for j in 0..n {
            scaled[i][j] = (&c[i][j] * &lpow[i + j]).mod_floor(&modulus);
        }
    }
    let mut out = Vec::new();
    if let (Some(m), Some(lu)) = (modulus.to_u64(), l.to_u64()) {
        if m < 1 << 62 {
            let m = m as u128;
            let d: Vec<Vec<u128>> = scaled
                .iter()
                .map(|r| r.iter().map(|v| v.to_u64().unwrap() as u128).collect())
                .collect();
            let mut coef = vec![0u128; n];
            for t in 0..lu as u128 {
                // Coefficients in s for this t.
                for i in 0..n {
                    let mut acc = 0u128;
                    for j in (0..n).rev() {
                        acc = (acc * t + d[i][j]) % m;
                    }
                    coef[i] = acc;
                }
                for s in 0..lu as u128 {
                    let mut acc = 0u128;
                    for i in (0..n).rev() {
                        acc = (acc * s + coef[i]) % m;
                    }
                    if acc == 0 {
                        out.push((BigInt::from(s as u64), BigInt::from(t as u64)));
                    }
                }
            }
            return out;
        }
    }
    let mut t = BigInt::zero();
    while &t < l {
        let mut s = BigInt::zero();
        while &s < l {
            let mut acc = BigInt::zero();
            for i in (0..n).rev() {
                let mut row = BigInt::zero();
                for j in (0..n).rev() {
                    row = row * &t + &scaled[i][j];
                }
                acc = acc * &s + row;
            }
            if acc.mod_floor(&modulus).is_zero() {
                out.push((s.clone(), t.clone()));
            }
            s += 1;
        }
        t += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn taylor_shift() {
        // (1 + t)^2 = 1 + 2t + t^2
        let c = taylor(&p(&[0, 0, 1]), &BigInt::one());
        assert_eq!(c, vec![BigInt::from(1), BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn roots_in_zl() {
        let l = BigInt::from(7);
        // x^2 - 2 has a root in Z_7 (3^2 = 9 ≡ 2), x^2 - 3 does not.
        assert!(zl_root(&p(&[-2, 0, 1]), &l, 10).is_some());
        assert!(zl_root(&p(&[-3, 0, 1]), &l, 10).is_none());
        // x^2 - 17 has a root in Z_2.
        assert!(zl_root(&p(&[-17, 0, 1]), &BigInt::from(2), 12).is_some());
    }

    #[test]
    fn square_values() {
        let l = BigInt::from(3);
        // Constant 2 is never a square in Q_3; constant 7 always is.
        assert_eq!(square_value_zl(&p(&[2]), &l, 8), SquareSearch::Absent);
        assert!(matches!(square_value_zl(&p(&[7]), &l, 8), SquareSearch::Found(_)));
        // 3x^2 + 2: values ≡ 2 mod 3, never squares.
        assert_eq!(square_value_zl(&p(&[2, 0, 3]), &l, 8), SquareSearch::Absent);
        assert!(matches!(square_value_zl(&p(&[4, 0, 1]), &BigInt::from(2), 8), SquareSearch::Found(_)));
        assert_eq!(square_value_zl(&p(&[-1]), &BigInt::from(2), 8), SquareSearch::Absent);
    }

    fn form(terms: &[(u32, u32, u32, i64)]) -> TernaryForm {
        terms.iter().map(|&(i, j, k, c)| (i, j, k, BigInt::from(c))).collect()
    }

    #[test]
    fn conics() {
        // x² + y² = 3z² has no 3-adic point; x² + y² = 5z² has one.
        let three = form(&[(2, 0, 0, 1), (0, 2, 0, 1), (0, 0, 2, -3)]);
        assert_eq!(plane_point_zl(&three, &BigInt::from(3), 20), PlaneSearch::Absent);
        let five = form(&[(2, 0, 0, 1), (0, 2, 0, 1), (0, 0, 2, -5)]);
        assert!(matches!(plane_point_zl(&five, &BigInt::from(5), 20), PlaneSearch::Found { .. }));
        // x² + y² + z² = 0 has no 2-adic point.
        let sum = form(&[(2, 0, 0, 1), (0, 2, 0, 1), (0, 0, 2, 1)]);
        assert_eq!(plane_point_zl(&sum, &BigInt::from(2), 20), PlaneSearch::Absent);
    }

    #[test]
    fn two_adic_sqrt() {
        let r = sqrt_mod_prime_power(&BigInt::from(73), &BigInt::from(2), 8).unwrap();
        assert_eq!((&r * &r - BigInt::from(73)).mod_floor(&BigInt::from(256)), BigInt::zero());
        assert!(sqrt_mod_prime_power(&BigInt::from(5), &BigInt::from(2), 8).is_none());
    }
}
