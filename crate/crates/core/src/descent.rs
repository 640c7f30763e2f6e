//! Root numbers, 2-isogeny Selmer bounds and the Hasse-principle verdict
//! for the curves `E^(p): y² = x(x² + 16p x + 32p²)`.
//!
//! For `y² = x(x² + A x + B)` the image of the isogeny map lands in the
//! classes `d | B` whose homogeneous spaces `d w² = d² + A d z² + B z⁴` have
//! points everywhere. With `2^s` and `2^s'` classes on the two sides,
//! `rank ≤ s + s' − 2`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::elliptic::EllipticCurve;
use crate::error::{precondition, Error, Result};
use crate::exact::padic::{square_value_zl, SquareSearch};
use crate::exact::primes::is_prime_u64;
use crate::exact::{factorize, int_valuation, roots_mod_p, serde_bigint, IntPoly};
use crate::localglobal::{everywhere_locally_solvable, LocalReport};

const SEARCH_DEPTH: u32 = 40;

/// Below this the two-map height bound does not rule out points, so the
/// conditional-emptiness conclusion is withheld.
pub const EMPTINESS_THRESHOLD: &str = "700000000000000000000000000000000000000000000000000000000000000000000000000";

/// `d w² = d² + A d z² + B z⁴`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomSpace {
    #[serde(with = "serde_bigint")]
    pub d: BigInt,
    #[serde(with = "serde_bigint")]
    pub a: BigInt,
    #[serde(with = "serde_bigint")]
    pub b: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Place {
    Real,
    Prime(u64),
}

impl HomSpace {
    pub fn new(d: BigInt, a: BigInt, b: BigInt) -> Result<Self> {
        if d.is_zero() || !(&b % &d).is_zero() {
            return precondition(format!("{d} does not divide {b}"));
        }
        if !crate::exact::is_squarefree(&d)? {
            return precondition(format!("{d} is not squarefree"));
        }
        if b.is_zero() || (&a * &a - BigInt::from(4) * &b).is_zero() {
            return Err(Error::Singular(format!("x(x² + {a}x + {b}) has a repeated root")));
        }
        Ok(HomSpace { d, a, b })
    }

    /// The space `C_d: d w² = d² − 8p d z² + 8p² z⁴`.
    pub fn family(d: i64, p: u64) -> Result<Self> {
        let p = BigInt::from(p);
        HomSpace::new(BigInt::from(d), BigInt::from(-8) * &p, BigInt::from(8) * &p * &p)
    }

    /// `N² = d M⁴ + A M² e² + (B/d) e⁴` as a polynomial in `M` at `e = 1`.
    fn quartic(&self) -> IntPoly {
        IntPoly::new(vec![
            &self.b / &self.d,
            BigInt::zero(),
            self.a.clone(),
            BigInt::zero(),
            self.d.clone(),
        ])
    }

    /// The same at `M = 1`, `e = ℓ u`.
    fn quartic_at_infinity(&self, l: &BigInt) -> IntPoly {
        let l2 = l * l;
        IntPoly::new(vec![
            self.d.clone(),
            BigInt::zero(),
            &self.a * &l2,
            BigInt::zero(),
            &self.b / &self.d * &l2 * &l2,
        ])
    }
}

/// Local solvability of a homogeneous space at one place.
pub fn homspace_locally_solvable(c: &HomSpace, place: Place) -> Result<bool> {
    match place {
        Place::Real => {
            // max over t = z² ≥ 0 of d + A t + (B/d) t², with t = ∞ allowed.
            let d = &c.d;
            let e = &c.b / d;
            if d.is_positive() || e.is_positive() {
                return Ok(true);
            }
            if !c.a.is_positive() {
                return Ok(false);
            }
            // Both ends negative; vertex value d − A²/(4e) with e < 0.
            Ok(BigInt::from(4) * d * &e - &c.a * &c.a <= BigInt::zero())
        }
        Place::Prime(l) => {
            let lb = BigInt::from(l);
            for poly in [c.quartic(), c.quartic_at_infinity(&lb)] {
                match square_value_zl(&poly, &lb, SEARCH_DEPTH) {
                    SquareSearch::Found(_) => return Ok(true),
                    SquareSearch::Absent => {}
                    SquareSearch::Undecided => {
                        return Err(Error::Precision(format!("{l}-adic search for {c:?} did not terminate")))
                    }
                }
            }
            Ok(false)
        }
    }
}

impl std::fmt::Display for HomSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}w^2 = {}^2 + {}z^2 + {}z^4", self.d, self.d, &self.a * &self.d, self.b)
    }
}

/// Squarefree `d` (both signs) dividing `b`, up to squares.
fn square_classes(b: &BigInt) -> Vec<BigInt> {
    let primes: Vec<BigInt> = factorize(b).into_iter().map(|(p, _)| p).collect();
    let mut out = Vec::new();
    for mask in 0..(1u32 << primes.len()) {
        let mut d = BigInt::one();
        for (i, p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                d *= p;
            }
        }
        out.push(d.clone());
        out.push(-d);
    }
    out.sort();
    out
}

/// Places where a homogeneous space for `(A, B)` can fail to have points.
fn relevant_places(a: &BigInt, b: &BigInt) -> Vec<Place> {
    let disc = BigInt::from(2) * b * (a * a - BigInt::from(4) * b);
    let mut out = vec![Place::Real];
    for (p, _) in factorize(&disc) {
        out.push(Place::Prime(p.try_into().expect("small prime")));
    }
    out
}

/// The everywhere-locally-solvable classes for `y² = x(x² + A x + B)`.
pub fn selmer_set(a: &BigInt, b: &BigInt) -> Result<BTreeSet<BigInt>> {
    let places = relevant_places(a, b);
    let mut out = BTreeSet::new();
    for d in square_classes(b) {
        let c = HomSpace::new(d.clone(), a.clone(), b.clone())?;
        let mut ok = true;
        for &pl in &places {
            if !homspace_locally_solvable(&c, pl)? {
                ok = false;
                break;
            }
        }
        if ok {
            out.insert(d);
        }
    }
    Ok(out)
}

fn two_rank(set: &BTreeSet<BigInt>) -> Result<u32> {
    let n = set.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Inconsistent(format!("Selmer set of size {n} is not a group")));
    }
    Ok(n.trailing_zeros())
}

/// Both Selmer sets for `E^(p)`, in the order (`C_d` side, dual side).
pub fn selmer_sets(p: u64) -> Result<(BTreeSet<BigInt>, BTreeSet<BigInt>)> {
    odd_prime(p)?;
    let pb = BigInt::from(p);
    let s = selmer_set(&(BigInt::from(-8) * &pb), &(BigInt::from(8) * &pb * &pb))?;
    let t = selmer_set(&(BigInt::from(4) * &pb), &(BigInt::from(2) * &pb * &pb))?;
    Ok((s, t))
}

/// `s + s' − 2`, an upper bound for the rank of `E^(p)(ℚ)`.
pub fn selmer_rank_bound(p: u64) -> Result<u32> {
    let (s, t) = selmer_sets(p)?;
    let total = two_rank(&s)? + two_rank(&t)?;
    total
        .checked_sub(2)
        .ok_or_else(|| Error::Inconsistent(format!("Selmer ranks for {p} sum to {total}")))
}

fn odd_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime_u64(p) {
        return precondition(format!("{p} is not an odd prime"));
    }
    Ok(())
}

/// Whether `x⁴ − 4x² + 2` has a root modulo `p`.
pub fn quartic_residue_criterion(p: u64) -> Result<bool> {
    odd_prime(p)?;
    Ok(!roots_mod_p(&IntPoly::from_i64(&[2, 0, -4, 0, 1]), &BigInt::from(p))?.is_empty())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootNumberReport {
    pub p: u64,
    pub w2: i8,
    pub wp: i8,
    pub w: i8,
    pub kodaira_at_p: String,
    pub kodaira_at_2: String,
    #[serde(with = "serde_bigint")]
    pub c4: BigInt,
    #[serde(with = "serde_bigint")]
    pub c6: BigInt,
    #[serde(with = "serde_bigint")]
    pub discriminant: BigInt,
}

/// The model `y² = x(x² + 4p x + 2p²)` of `E^(p)`.
pub fn reduced_model(p: u64) -> Result<EllipticCurve> {
    let p = p as i64;
    EllipticCurve::from_ints(4 * p, 2 * p * p, 0)
}

/// Global root number as the product of the local signs at 2 and `p`.
///
/// At `p` the reduction is `I0*` and the sign is `(−1/p)`. At 2 the sign is
/// `+1` exactly when `6p + 5 ≡ ±1 (mod 8)`.
pub fn root_number(p: u64) -> Result<RootNumberReport> {
    odd_prime(p)?;
    let e = reduced_model(p)?;
    let c4 = e.c4().to_integer();
    let c6 = e.c6().to_integer();
    let disc = e.discriminant().to_integer();
    let pb = BigInt::from(p);
    let vp = |n: &BigInt| int_valuation(n, &pb).unwrap_or(u64::MAX);
    let kodaira_at_p = if p >= 5 && vp(&disc) == 6 && vp(&c4) >= 2 {
        "I0*".to_string()
    } else {
        "additive".to_string()
    };
    let v2 = int_valuation(&disc, &BigInt::from(2)).unwrap_or(0);
    let wp: i8 = if p % 4 == 1 { 1 } else { -1 };
    let r = (6 * p + 5) % 8;
    let w2: i8 = if r == 1 || r == 7 { 1 } else { -1 };
    Ok(RootNumberReport {
        p,
        w2,
        wp,
        w: w2 * wp,
        kodaira_at_p,
        kodaira_at_2: format!("additive, v2(disc) = {v2}"),
        c4,
        c6,
        discriminant: disc,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    FailsCongruence,
    NotLocallySolvable,
    UnconditionalConclusionUnavailable,
    /// All gates pass but `p` is below the explicit height threshold.
    CandidateBelowThreshold,
    /// All gates pass and `p` exceeds the threshold.
    ConditionallyEmpty,
    RankNotDetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HasseVerdict {
    pub p: u64,
    pub congruence_ok: bool,
    pub locally_solvable: bool,
    pub local_reports: Vec<LocalReport>,
    pub root_number: Option<RootNumberReport>,
    pub selmer_bound: Option<u32>,
    pub conditional_rank: Option<u32>,
    pub verdict: Verdict,
    pub assumptions: Vec<String>,
}

pub const ASSUME_PARITY: &str = "parity conjecture: (−1)^rank = W";

/// Runs every gate for `F^(p)`.
pub fn hasse_candidate_verdict(p: u64, assume_parity: bool) -> Result<HasseVerdict> {
    odd_prime(p)?;
    let congruence_ok = p % 48 == 25;
    let mut out = HasseVerdict {
        p,
        congruence_ok,
        locally_solvable: false,
        local_reports: Vec::new(),
        root_number: None,
        selmer_bound: None,
        conditional_rank: None,
        verdict: Verdict::FailsCongruence,
        assumptions: Vec::new(),
    };
    if !congruence_ok {
        return Ok(out);
    }
    let (ok, reports) = everywhere_locally_solvable(p)?;
    out.locally_solvable = ok;
    out.local_reports = reports;
    let rn = root_number(p)?;
    let bound = selmer_rank_bound(p)?;
    let w = rn.w;
    out.root_number = Some(rn);
    out.selmer_bound = Some(bound);
    out.verdict = gate_verdict(&BigInt::from(p), ok, w, bound, assume_parity);
    if assume_parity {
        out.assumptions.push(ASSUME_PARITY.to_string());
        if matches!(out.verdict, Verdict::CandidateBelowThreshold | Verdict::ConditionallyEmpty) {
            out.conditional_rank = Some(1);
        }
    }
    Ok(out)
}

/// Combines the gates. Exposed separately so the threshold branch can be
/// exercised with primes beyond machine range.
pub fn gate_verdict(p: &BigInt, locally_solvable: bool, w: i8, selmer_bound: u32, assume_parity: bool) -> Verdict {
    if p.mod_floor(&BigInt::from(48)) != BigInt::from(25) {
        return Verdict::FailsCongruence;
    }
    if !locally_solvable {
        return Verdict::NotLocallySolvable;
    }
    if !assume_parity {
        return Verdict::UnconditionalConclusionUnavailable;
    }
    // Odd rank at most 2 is 1.
    if w != -1 || selmer_bound > 2 {
        return Verdict::RankNotDetermined;
    }
    let threshold: BigInt = EMPTINESS_THRESHOLD.parse().expect("constant");
    if *p > threshold {
        Verdict::ConditionallyEmpty
    } else {
        Verdict::CandidateBelowThreshold
    }
}
