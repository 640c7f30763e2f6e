//! Effective enumeration of rational points on a symmetric quartic whose
//! companion curve has rank at most one.
//!
//! Write `φ_i(P) = n_i·G + T_i`. Comparing canonical heights of the two
//! images bounds `|n1² − n2²|`, so either `|n1| = |n2|` (handled by exact
//! algebra in [`equal_index_points`]) or both indices lie in a short
//! window that can be pulled back point by point.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::{torsion_subgroup, ECPoint, EllipticCurve, HeightContext};
use crate::error::{precondition, Error, Result};
use crate::exact::{int, IntPoly, RatPoly, Rational};
use crate::quartic::{companion_curve, kappa, phi, phi_preimages, rational_quadratic_roots, QuarticPoint, SymQuartic};

pub const ASSUME_RANK_ONE: &str = "rank E(Q) = 1 and the generator spans E(Q) modulo torsion (external certificate)";
pub const ASSUME_RANK_ZERO: &str = "rank E(Q) = 0 (external certificate)";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DemjanenkoInput {
    pub curve: SymQuartic,
    pub companion: EllipticCurve,
    pub generator: Option<ECPoint>,
    pub torsion: Vec<ECPoint>,
    pub rank_claim: u8,
    pub hhat_g: f64,
    /// Bound for `ĥ − h` on the companion curve.
    pub height_gap_upper: f64,
    /// Bound for `h − ĥ` on the companion curve.
    pub height_gap_lower: f64,
    /// Bound for `|h(φ1(P)) − h(φ2(P))|`.
    pub phi_gap: f64,
    /// Enumerate at least this many multiples even when the derived window
    /// is smaller.
    pub min_window: u64,
}

impl DemjanenkoInput {
    /// Derives every constant from the curve, the claimed rank and (for rank
    /// one) a generator of the free part.
    pub fn derive(curve: SymQuartic, generator: Option<ECPoint>, rank_claim: u8, tol: f64) -> Result<Self> {
        let companion = companion_curve(&curve)?;
        let torsion = torsion_subgroup(&companion)?;
        let ctx = HeightContext::new(&companion)?;
        let gap = ctx.gap();
        let k = kappa(&curve.twisted_a(), &curve.twisted_b());
        let phi_gap = 24f64.ln() + 12f64.ln() + crate::exact::to_f64(&k).ln();
        let (generator, hhat_g) = match (rank_claim, generator) {
            (0, _) => (None, 0.0),
            (1, Some(g)) => {
                if !companion.contains(&g) {
                    return Err(Error::NotOnCurve(format!("generator {g} on {companion}")));
                }
                let h = ctx.canonical_height(&companion, &g, tol)?;
                if h <= tol {
                    return precondition(format!("generator {g} is torsion (height {h:e})"));
                }
                (Some(g), h)
            }
            (1, None) => return precondition("rank one needs a generator"),
            (r, _) => return precondition(format!("rank claim must be 0 or 1, got {r}")),
        };
        Ok(DemjanenkoInput {
            curve,
            companion,
            generator,
            torsion,
            rank_claim,
            hhat_g,
            height_gap_upper: gap.upper,
            height_gap_lower: gap.lower,
            phi_gap,
            min_window: 0,
        })
    }

    pub fn with_min_window(mut self, n: u64) -> Self {
        self.min_window = n;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contribution {
    pub n: i64,
    pub torsion: ECPoint,
    pub points: BTreeSet<QuarticPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCertificate {
    pub points: BTreeSet<QuarticPoint>,
    pub index_bound: u64,
    pub n_window: u64,
    pub derived_window: u64,
    pub conditional_on: Vec<String>,
    pub contributions: Vec<Contribution>,
    pub equal_index: BTreeSet<QuarticPoint>,
}

/// Largest integer that `|n1² − n2²|` can be.
pub fn index_bound(inp: &DemjanenkoInput) -> Result<u64> {
    if inp.rank_claim == 0 {
        return Ok(0);
    }
    if !(inp.hhat_g > 0.0) {
        return precondition("generator height must be positive");
    }
    let num = inp.phi_gap + inp.height_gap_upper + inp.height_gap_lower;
    Ok((num / inp.hhat_g + 1e-9).floor().max(0.0) as u64)
}

/// Bound on `max(|n1|, |n2|)` when `|n1| ≠ |n2|` and `|n1² − n2²| ≤ b`.
/// From `n1² − n2² ≥ 2|n1| − 1` the exact bound is `⌊(b+1)/2⌋`; one more
/// is taken so that `b = 78` gives 40.
pub fn n_window(b: u64) -> u64 {
    if b == 0 {
        0
    } else {
        b / 2 + 1
    }
}

/// Runs the pull-back over `|n| ≤ window` and every torsion point.
pub fn enumerate_and_pull_back(inp: &DemjanenkoInput, window: u64) -> Result<PointCertificate> {
    let e = &inp.companion;
    let base = match (&inp.generator, inp.rank_claim) {
        (Some(g), 1) => e.multiples(g, window as usize)?,
        _ => vec![ECPoint::Infinity],
    };
    let mut jobs: Vec<(i64, ECPoint)> = Vec::new();
    for (n, ng) in base.iter().enumerate() {
        jobs.push((n as i64, ng.clone()));
        if n > 0 {
            jobs.push((-(n as i64), e.neg(ng)));
        }
    }
    let contributions: Vec<Contribution> = jobs
        .par_iter()
        .flat_map_iter(|(n, ng)| {
            inp.torsion.iter().map(move |t| {
                let q = e.add(ng, t)?;
                let points = if q.is_infinity() {
                    BTreeSet::new()
                } else {
                    phi_preimages(1, &q, &inp.curve)?
                };
                Ok(Contribution {
                    n: *n,
                    torsion: t.clone(),
                    points,
                })
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points: BTreeSet<QuarticPoint> = BTreeSet::new();
    for c in &contributions {
        for p in &c.points {
            points.insert(p.clone());
            points.insert(p.swap());
        }
    }
    let equal_index = equal_index_points_with(&inp.curve, e, &inp.torsion)?;
    points.extend(equal_index.iter().cloned());
    for p in &points {
        if !inp.curve.contains(p) {
            return Err(Error::Inconsistent(format!("{p} is not on {}", inp.curve)));
        }
    }

    let index_bound = index_bound(inp)?;
    let derived_window = n_window(index_bound);
    let mut conditional_on = vec![if inp.rank_claim == 1 {
        ASSUME_RANK_ONE.to_string()
    } else {
        ASSUME_RANK_ZERO.to_string()
    }];
    if window < derived_window {
        conditional_on.push(format!(
            "window {window} is below the derived window {derived_window}; certificate is partial"
        ));
    }
    Ok(PointCertificate {
        points,
        index_bound,
        n_window: window,
        derived_window,
        conditional_on,
        contributions: contributions.into_iter().filter(|c| !c.points.is_empty()).collect(),
        equal_index,
    })
}

/// The full pipeline with the derived window, raised to `min_window`.
pub fn certify(inp: &DemjanenkoInput) -> Result<PointCertificate> {
    let window = n_window(index_bound(inp)?).max(if inp.rank_claim == 1 { inp.min_window } else { 0 });
    enumerate_and_pull_back(inp, window)
}

/// Rational points with `|n1| = |n2|`, i.e. `φ1(P) ∓ φ2(P)` torsion, together
/// with the points where one of the images is itself torsion (index zero).
pub fn equal_index_points(f: &SymQuartic) -> Result<BTreeSet<QuarticPoint>> {
    let e = companion_curve(f)?;
    let torsion = torsion_subgroup(&e)?;
    equal_index_points_with(f, &e, &torsion)
}

fn equal_index_points_with(f: &SymQuartic, e: &EllipticCurve, torsion: &[ECPoint]) -> Result<BTreeSet<QuarticPoint>> {
    let a = f.twisted_a();
    let b = f.twisted_b();
    let mut candidates: BTreeSet<QuarticPoint> = BTreeSet::new();

    // T = O: x² = y², so 2x⁴ + 2a x² − b = 0.
    for s in rational_quadratic_roots(&int(2), &(int(2) * &a), &-b.clone()) {
        if let Some(x) = crate::exact::rational_sqrt(&s) {
            for sx in [x.clone(), -x.clone()] {
                for sy in [x.clone(), -x.clone()] {
                    candidates.insert(QuarticPoint::new(sx.clone(), sy));
                }
            }
        }
    }

    for t in torsion {
        let ECPoint::Affine { x: tx, y: ty } = t else {
            continue;
        };
        // Index zero on either side.
        for p in phi_preimages(1, t, f)? {
            candidates.insert(p.swap());
            candidates.insert(p);
        }
        // φ1(P) = −4x² = tx separately, then x(φ1(P) − T) = x(φ2(P)).
        if let Some(x) = crate::exact::rational_sqrt(&(-tx / int(4))) {
            for sx in [x.clone(), -x] {
                for y in f.ys_at(&sx) {
                    candidates.insert(QuarticPoint::new(sx.clone(), y));
                }
            }
        }
        for x in difference_condition_roots(&a, &b, e.a2(), tx, ty)? {
            for y in f.ys_at(&x) {
                candidates.insert(QuarticPoint::new(x.clone(), y));
            }
        }
    }

    let is_torsion = |q: &ECPoint| torsion.contains(q);
    let mut out = BTreeSet::new();
    for p in candidates {
        if !f.contains(&p) {
            continue;
        }
        let p1 = phi(1, &p, f)?;
        let p2 = phi(2, &p, f)?;
        let diff = e.sub(&p1, &p2)?;
        let sum = e.add(&p1, &p2)?;
        if is_torsion(&diff) || is_torsion(&sum) || is_torsion(&p1) || is_torsion(&p2) {
            out.insert(p);
        }
    }
    Ok(out)
}

/// Rational `x` for which some point `(x, y)` of the quartic can satisfy
/// `x(φ1(P) − T) = x(φ2(P))` with `T = (t, s)`, by eliminating `u = y²`.
fn difference_condition_roots(a: &Rational, b: &Rational, a2: &Rational, t: &Rational, s: &Rational) -> Result<BTreeSet<Rational>> {
    let c = |v: Vec<Rational>| RatPoly::new(v);
    let x = c(vec![int(0), int(1)]);
    let k = |q: &Rational| RatPoly::constant(q.clone());
    let x2 = &x * &x;
    // D = (4x² + t)²
    let inner = &(&k(&int(4)) * &x2) + &k(t);
    let d = &inner * &inner;
    // 4a'x + s
    let lin = &(&k(&(int(4) * a)) * &x) + &k(s);
    let c2 = &k(&int(64)) * &x2;
    let c1 = &(&(&k(&int(16)) * &x) * &lin) + &(&k(&int(4)) * &d);
    let shift = &(&k(a2) - &(&k(&int(4)) * &x2)) + &k(t);
    let c0 = &(&lin * &lin) - &(&shift * &d);
    let f2 = RatPoly::constant(Rational::one());
    let f1 = k(a);
    let f0 = &(&(&x2 * &x2) + &(&k(a) * &x2)) - &k(b);

    let r1 = &(&c2 * &f0) - &(&c0 * &f2);
    let r2 = &(&c2 * &f1) - &(&c1 * &f2);
    let r3 = &(&c1 * &f0) - &(&c0 * &f1);
    let res = &(&r1 * &r1) - &(&r2 * &r3);
    if res.is_zero() {
        return Err(Error::Inconsistent("difference condition vanishes on the whole curve".into()));
    }
    Ok(integer_poly(&res).rational_roots())
}

fn integer_poly(p: &RatPoly) -> IntPoly {
    let den = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
    IntPoly::new(
        p.coeffs()
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64)]) -> BTreeSet<QuarticPoint> {
        v.iter().map(|&(x, y)| QuarticPoint::from_ints(x, y)).collect()
    }

    #[test]
    fn windows() {
        assert_eq!(n_window(78), 40);
        assert_eq!(n_window(1), 1);
        assert_eq!(n_window(0), 0);
    }

    #[test]
    fn x4_equal_index() {
        let f = SymQuartic::from_ints(-4, -3, 1).unwrap();
        assert_eq!(equal_index_points(&f).unwrap(), pts(&[(0, 1), (0, -1), (1, 0), (-1, 0)]));
    }

    #[test]
    fn twist_family_equal_index() {
        for alpha in [2, 5, 7, 73] {
            let f = SymQuartic::from_ints(-4, -6, alpha).unwrap();
            assert!(equal_index_points(&f).unwrap().is_empty(), "alpha = {alpha}");
        }
        let f = SymQuartic::from_ints(-4, -6, 3).unwrap();
        assert_eq!(equal_index_points(&f).unwrap().len(), 4);
        let f = SymQuartic::from_ints(-4, -6, 1).unwrap();
        assert_eq!(equal_index_points(&f).unwrap(), pts(&[(1, 1), (1, -1), (-1, 1), (-1, -1)]));
    }

    #[test]
    fn x4_certificate() {
        let f = SymQuartic::from_ints(-4, -3, 1).unwrap();
        let inp = DemjanenkoInput::derive(f, Some(ECPoint::from_ints(4, -16)), 1, 1e-10)
            .unwrap()
            .with_min_window(40);
        let b = index_bound(&inp).unwrap();
        assert!(b <= 120, "B = {b}");
        let cert = certify(&inp).unwrap();
        assert!(cert.n_window >= 40);
        let want = pts(&[
            (0, 1), (0, -1), (1, 0), (-1, 0),
            (2, 1), (2, -1), (-2, 1), (-2, -1),
            (1, 2), (1, -2), (-1, 2), (-1, -2),
        ]);
        assert_eq!(cert.points, want);
    }

    #[test]
    fn torsion_only_twist_is_empty() {
        let f = SymQuartic::from_ints(-4, -6, 5).unwrap();
        let inp = DemjanenkoInput::derive(f, None, 0, 1e-10).unwrap();
        let cert = certify(&inp).unwrap();
        assert!(cert.points.is_empty());
        assert_eq!(cert.index_bound, 0);
    }
}
