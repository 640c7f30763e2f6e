//! Weil and canonical heights.
//!
//! The canonical height is normalized as `ĥ(P) = lim 4^-n h(x(2^n P))`.
//! Writing `x(2^k P) = X_k/Z_k` in lowest terms on an integral model, each
//! doubling step changes `h` by
//!
//! ```text
//! h(x_{k+1}) − 4 h(x_k) = log max(|F|, |G|)(ξ_k) − Σ_p e_p(k) log p
//! ```
//!
//! where `ξ_k` is the pair scaled to sup-norm one, `F`, `G` are the binary
//! quartic doubling forms and `e_p(k)` is the power of `p` shared by
//! `F(X_k, Z_k)` and `G(X_k, Z_k)`. Only primes dividing the resultant of
//! `F` and `G` can contribute, so the real term is iterated in floating
//! point and each finite term on a truncated `p`-adic copy of the pair.
//! The per-step change lies in `[−log N, log M]` for explicit constants
//! `M`, `N` of the model, which bounds both `|ĥ − h|` and the series tail.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{ECPoint, EllipticCurve};
use crate::error::{precondition, Error, Result};
use crate::exact::{factorize, log_abs, poly::determinant, poly::solve_linear, rational_height, Rational};

/// Weil height of the x-coordinate; zero at infinity.
pub fn naive_height(p: &ECPoint) -> f64 {
    match p {
        ECPoint::Infinity => 0.0,
        ECPoint::Affine { x, .. } => rational_height(x),
    }
}

/// Bounds `−lower ≤ ĥ(P) − h(P) ≤ upper` valid for every rational point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightGap {
    pub lower: f64,
    pub upper: f64,
}

/// Per-curve data for height computations.
#[derive(Clone, Debug)]
pub struct HeightContext {
    u: BigInt,
    // Coefficients of X^4, X^3 Z, ..., Z^4.
    f: [BigInt; 5],
    g: [BigInt; 5],
    log_m: f64,
    log_n: f64,
    bad: Vec<(BigInt, u64)>,
}

fn l1(v: &[BigInt]) -> BigInt {
    v.iter().map(|c| c.abs()).sum()
}

impl HeightContext {
    pub fn new(e: &EllipticCurve) -> Result<Self> {
        let (model, u) = e.integral_model();
        let [b2, b4, b6, b8] = model.b_invariants().map(|b| b.numer().clone());
        let f = [
            BigInt::one(),
            BigInt::zero(),
            -b4.clone(),
            -BigInt::from(2) * &b6,
            -b8,
        ];
        let g = [BigInt::zero(), BigInt::from(4), b2, BigInt::from(2) * b4, b6];

        // Sylvester system for A·F + B·G with A, B binary cubics.
        let mut m = vec![vec![Rational::zero(); 8]; 8];
        for i in 0..4 {
            for j in 0..5 {
                m[i + j][i] = Rational::from_integer(f[j].clone());
                m[i + j][4 + i] = Rational::from_integer(g[j].clone());
            }
        }
        let det = determinant(m.clone());
        if det.is_zero() {
            return Err(Error::Singular("doubling forms share a root".into()));
        }
        let r = det.numer().clone();
        let cofactor_norm = |target: usize| -> Result<BigInt> {
            let mut rhs = vec![Rational::zero(); 8];
            rhs[target] = det.clone();
            let sol = solve_linear(m.clone(), rhs)
                .ok_or_else(|| Error::Singular("Sylvester matrix is singular".into()))?;
            let ints: Vec<BigInt> = sol
                .iter()
                .map(|q| {
                    debug_assert!(q.is_integer());
                    q.to_integer()
                })
                .collect();
            Ok(l1(&ints))
        };
        let n = cofactor_norm(7)?.max(cofactor_norm(0)?);
        let log_m = log_abs(&l1(&f).max(l1(&g)));
        let log_n = log_abs(&n);
        let bad = factorize(&r)
            .into_iter()
            .map(|(p, e)| (p, e as u64))
            .collect();
        Ok(HeightContext {
            u,
            f,
            g,
            log_m,
            log_n,
            bad,
        })
    }

    /// `|ĥ − h|` bounds on the curve's own model.
    pub fn gap(&self) -> HeightGap {
        let shift = 2.0 * log_abs(&self.u);
        HeightGap {
            lower: self.log_n / 3.0 + shift,
            upper: self.log_m / 3.0 + shift,
        }
    }

    fn steps_for(&self, tol: f64) -> usize {
        let width = self.log_m + self.log_n;
        let mut n = 1;
        while width / 6.0 * 0.25f64.powi(n as i32) > tol / 4.0 {
            n += 1;
        }
        n
    }

    fn real_terms(&self, x: &BigInt, z: &BigInt, steps: usize) -> Vec<f64> {
        let f: Vec<f64> = self.f.iter().map(|c| c.to_f64().unwrap()).collect();
        let g: Vec<f64> = self.g.iter().map(|c| c.to_f64().unwrap()).collect();
        let (mut a, mut b) = if x.abs() >= z.abs() {
            let q = Rational::new(z.clone(), x.abs());
            (x.signum().to_f64().unwrap(), crate::exact::to_f64(&q))
        } else {
            (crate::exact::to_f64(&Rational::new(x.clone(), z.clone())), 1.0)
        };
        let form = |c: &[f64], a: f64, b: f64| {
            let mut acc = 0.0;
            let mut apow = 1.0;
            for i in (0..5).rev() {
                acc += c[i] * apow * b.powi(i as i32);
                apow *= a;
            }
            acc
        };
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            let fv = form(&f, a, b);
            let gv = form(&g, a, b);
            let s = fv.abs().max(gv.abs());
            out.push(s.ln());
            a = fv / s;
            b = gv / s;
        }
        out
    }

    fn padic_terms(&self, p: &BigInt, r: u64, x: &BigInt, z: &BigInt, steps: usize) -> Result<Vec<f64>> {
        let mut prec = steps as u64 * r + 8;
        let mut modulus = num_traits::pow(p.clone(), prec as usize);
        let mut a = x.mod_floor(&modulus);
        let mut b = z.mod_floor(&modulus);
        let lp = log_abs(p);
        let val = |n: &BigInt, cap: u64| -> u64 {
            if n.is_zero() {
                return cap;
            }
            crate::exact::int_valuation(n, p).unwrap().min(cap)
        };
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            let eval = |c: &[BigInt; 5]| -> BigInt {
                let mut sum = BigInt::zero();
                let mut apow = BigInt::one();
                let mut apows = Vec::with_capacity(5);
                for _ in 0..5 {
                    apows.push(apow.clone());
                    apow = (apow * &a).mod_floor(&modulus);
                }
                let mut bpow = BigInt::one();
                for (i, ci) in c.iter().enumerate() {
                    sum += ci * &apows[4 - i] * &bpow;
                    bpow = (bpow * &b).mod_floor(&modulus);
                }
                sum.mod_floor(&modulus)
            };
            let fv = eval(&self.f);
            let gv = eval(&self.g);
            let e = val(&fv, prec).min(val(&gv, prec));
            if e >= prec {
                return Err(Error::Precision(format!(
                    "{p}-adic precision exhausted in height computation"
                )));
            }
            out.push(-(e as f64) * lp);
            let pe = num_traits::pow(p.clone(), e as usize);
            prec -= e;
            modulus /= &pe;
            a = (fv / &pe).mod_floor(&modulus);
            b = (gv / &pe).mod_floor(&modulus);
        }
        Ok(out)
    }

    /// `ĥ(P)` for a point on the curve this context was built from.
    pub fn canonical_height(&self, e: &EllipticCurve, p: &ECPoint, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return precondition("height tolerance must be positive");
        }
        if !e.contains(p) {
            return Err(Error::NotOnCurve(format!("{p} is not on {e}")));
        }
        let ECPoint::Affine { x, .. } = p else {
            return Ok(0.0);
        };
        let xm = x * Rational::from_integer(&self.u * &self.u);
        let (num, den) = (xm.numer().clone(), xm.denom().clone());
        let steps = self.steps_for(tol);

        let mut deltas = self.real_terms(&num, &den, steps);
        for (q, r) in &self.bad {
            let terms = self.padic_terms(q, *r, &num, &den, steps)?;
            for (d, t) in deltas.iter_mut().zip(terms) {
                *d += t;
            }
        }
        let mut h = rational_height(&xm);
        let mut w = 0.25;
        for d in deltas {
            h += w * d;
            w *= 0.25;
        }
        // w is now 4^-(steps+1); the tail is 4^-steps times a value in
        // [−log N / 3, log M / 3].
        h += 4.0 * w * (self.log_m - self.log_n) / 6.0;
        Ok(h)
    }
}

/// `ĥ(P)` to within `tol`.
pub fn canonical_height(e: &EllipticCurve, p: &ECPoint, tol: f64) -> Result<f64> {
    HeightContext::new(e)?.canonical_height(e, p, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn x4() -> (EllipticCurve, ECPoint) {
        (EllipticCurve::from_ints(16, -16, 0).unwrap(), ECPoint::from_ints(4, -16))
    }

    #[test]
    fn naive_heights() {
        assert!((naive_height(&ECPoint::from_ints(4, -16)) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(naive_height(&ECPoint::from_ints(0, 0)), 0.0);
        assert_eq!(naive_height(&ECPoint::Infinity), 0.0);
        let half = ECPoint::new(rat(1, 2), rat(3, 7));
        assert!((naive_height(&half) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn generator_height() {
        let (e, g) = x4();
        let h = canonical_height(&e, &g, 1e-10).unwrap();
        assert!((h - 0.35868).abs() < 1e-4, "got {h}");
        let t = ECPoint::from_ints(0, 0);
        assert!(canonical_height(&e, &t, 1e-10).unwrap().abs() < 1e-10);
        assert!(canonical_height(&e, &g, 0.0).is_err());
    }

    #[test]
    fn doubling_quadruples() {
        let (e, g) = x4();
        let ctx = HeightContext::new(&e).unwrap();
        let h1 = ctx.canonical_height(&e, &g, 1e-10).unwrap();
        let h2 = ctx
            .canonical_height(&e, &e.scalar_mul(2, &g).unwrap(), 1e-10)
            .unwrap();
        assert!((h2 - 4.0 * h1).abs() < 1e-8);
    }
}
