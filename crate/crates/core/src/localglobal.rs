//! Local solvability of the twisted quartics `F^(p) = F_(−4p, −6p²)`.
//!
//! Places split into four kinds. The real place is decided exactly. Good
//! primes `q < 37` are scanned over `F_q`; a smooth point lifts by Hensel
//! and an empty reduction rules the place out. Good primes `q ≥ 37` are
//! covered by the genus-3 Weil bound `q + 1 − 6√q > 0`. The bad places
//! 2, 3 and `p` get explicit `p`-adic points when `p ≡ 1 (mod 24)` and an
//! exact residue-tree search otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::exact::modp::inv_mod_u64;
use crate::exact::padic::{plane_point_zl, sqrt_mod_prime_power, PlaneSearch, TernaryForm};
use crate::exact::primes::is_prime_u64;
use crate::exact::{serde_bigint, IntPoly, Rational};
use crate::quartic::SymQuartic;

/// Good primes at or above this are settled by the Weil bound.
pub const WEIL_CUTOFF: u64 = 37;

const SEARCH_DEPTH: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Place {
    Real,
    Prime(u64),
    /// Every good prime at least this large.
    GoodPrimesFrom(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalStatus {
    Solvable,
    Unsolvable,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Real,
    HenselFromFq,
    WeilBound,
    ConstructiveSquare,
    ConstructiveRootOfUnity,
    HenselSearch,
    EmptyReduction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Witness {
    RealPoint { x: f64, y: f64 },
    /// Projective point over `F_q` with a nonzero partial derivative.
    ResiduePoint { q: u64, x: u64, y: u64, z: u64 },
    /// Projective point `[x : y : z]` correct modulo `modulus`, with the
    /// Hensel condition checked at that precision.
    Congruence {
        #[serde(with = "serde_bigint")]
        modulus: BigInt,
        #[serde(with = "serde_bigint")]
        x: BigInt,
        #[serde(with = "serde_bigint")]
        y: BigInt,
        #[serde(with = "serde_bigint")]
        z: BigInt,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalReport {
    pub place: Place,
    pub status: LocalStatus,
    pub witness: Option<Witness>,
    pub method: Method,
}

impl LocalReport {
    pub fn solvable(&self) -> bool {
        self.status == LocalStatus::Solvable
    }
}

/// The twist of `F_(−4,−6)` by `p`.
pub fn family_member(p: u64) -> Result<SymQuartic> {
    SymQuartic::from_ints(-4, -6, p as i64)
}

fn reduce_mod(q: &Rational, m: u64) -> Option<u64> {
    let mb = BigInt::from(m);
    let den = q.denom().mod_floor(&mb).to_u64()?;
    let inv = inv_mod_u64(den, m)?;
    let num = q.numer().mod_floor(&mb).to_u64()?;
    Some(((num as u128 * inv as u128) % m as u128) as u64)
}

/// Whether `q` is a prime of good reduction for the plane model.
pub fn is_good_place(f: &SymQuartic, q: u64) -> bool {
    if q < 5 || !is_prime_u64(q) {
        return false;
    }
    let disc = f.discriminant();
    reduce_mod(&f.twisted_a(), q).is_some()
        && reduce_mod(&f.twisted_b(), q).is_some()
        && reduce_mod(&disc, q).is_some_and(|d| d != 0)
}

/// Projective point count over `F_q` of `X⁴ + a X²Z² + a Y²Z² + Y⁴ = b Z⁴`
/// and a smooth point, if any.
pub fn count_smooth_points_quartic_fq(f: &SymQuartic, q: u64) -> Result<(u64, Option<(u64, u64, u64)>)> {
    if !is_good_place(f, q) {
        return precondition(format!("{q} is not a prime of good reduction for {f}"));
    }
    if q > 1 << 20 {
        return precondition(format!("point count over F_{q} is too large to scan"));
    }
    let a = reduce_mod(&f.twisted_a(), q).unwrap();
    let b = reduce_mod(&f.twisted_b(), q).unwrap();
    let m = |x: u64, y: u64| x * y % q;
    let eval = |x: u64, y: u64, z: u64| {
        let (x2, y2, z2) = (m(x, x), m(y, y), m(z, z));
        (m(x2, x2) + m(m(a, x2), z2) + m(m(a, y2), z2) + m(y2, y2) + (q - m(b, m(z2, z2)))) % q
    };
    let smooth = |x: u64, y: u64, z: u64| {
        let (x2, y2, z2) = (m(x, x), m(y, y), m(z, z));
        let dx = m(x, (4 * x2 + 2 * m(a, z2)) % q);
        let dy = m(y, (4 * y2 + 2 * m(a, z2)) % q);
        let dz = (m(m(2 * a % q, z), (x2 + y2) % q) + q - m(4 * b % q, m(z2, z))) % q;
        dx != 0 || dy != 0 || dz != 0
    };
    let mut count = 0;
    let mut witness = None;
    let mut note = |x, y, z, count: &mut u64| {
        *count += 1;
        if witness.is_none() && smooth(x, y, z) {
            witness = Some((x, y, z));
        }
    };
    for x in 0..q {
        for y in 0..q {
            if eval(x, y, 1) == 0 {
                note(x, y, 1, &mut count);
            }
        }
    }
    for y in 0..q {
        if eval(1, y, 0) == 0 {
            note(1, y, 0, &mut count);
        }
    }
    if eval(0, 1, 0) == 0 {
        note(0, 1, 0, &mut count);
    }
    Ok((count, witness))
}

fn min_on_half_line(a: &Rational) -> Rational {
    // min of t² + a t over t ≥ 0
    if a.is_negative() {
        -(a * a) / Rational::from_integer(BigInt::from(4))
    } else {
        Rational::zero()
    }
}

/// Exact test for a real point. The left side is `g(x²) + g(y²)` with
/// `g(t) = t² + a t`, which takes every value from `2·min g` upward.
pub fn real_solvable(f: &SymQuartic) -> bool {
    f.twisted_b() >= Rational::from_integer(BigInt::from(2)) * min_on_half_line(&f.twisted_a())
}

fn real_witness(f: &SymQuartic) -> Option<(f64, f64)> {
    if !real_solvable(f) {
        return None;
    }
    let a = crate::exact::to_f64(&f.twisted_a());
    let b = crate::exact::to_f64(&f.twisted_b());
    let t0 = if a < 0.0 { -a / 2.0 } else { 0.0 };
    let rest = b - (t0 * t0 + a * t0);
    let s = ((-a + (a * a + 4.0 * rest).max(0.0).sqrt()) / 2.0).max(0.0);
    Some((s.sqrt(), t0.sqrt()))
}

fn real_report(f: &SymQuartic) -> LocalReport {
    let witness = real_witness(f).map(|(x, y)| Witness::RealPoint { x, y });
    LocalReport {
        place: Place::Real,
        status: if witness.is_some() {
            LocalStatus::Solvable
        } else {
            LocalStatus::Unsolvable
        },
        witness,
        method: Method::Real,
    }
}

/// Explicit `ℚ_ℓ` points at 2, 3 and `p` for `p ≡ 1 (mod 24)`: the diagonal
/// point `(θ, θ)` with `θ² = p` at 2 and 3, and `[ζ : 1 : 0]` with `ζ⁴ = −1`
/// at `p`.
pub fn special_place_checks(p: u64) -> Result<Vec<LocalReport>> {
    if !is_prime_u64(p) || p % 24 != 1 {
        return precondition(format!("{p} is not a prime congruent to 1 mod 24"));
    }
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    for (l, k) in [(2u64, 8u32), (3, 5)] {
        let lb = BigInt::from(l);
        let theta = sqrt_mod_prime_power(&pb, &lb, k)
            .ok_or_else(|| crate::Error::Inconsistent(format!("{p} has no square root mod {l}^{k}")))?;
        out.push(LocalReport {
            place: Place::Prime(l),
            status: LocalStatus::Solvable,
            witness: Some(Witness::Congruence {
                modulus: num_traits::pow(lb, k as usize),
                x: theta.clone(),
                y: theta,
                z: BigInt::one(),
            }),
            method: Method::ConstructiveSquare,
        });
    }
    let zeta = eighth_root_of_unity(p)?;
    out.push(LocalReport {
        place: Place::Prime(p),
        status: LocalStatus::Solvable,
        witness: Some(Witness::Congruence {
            modulus: &pb * &pb,
            x: zeta,
            y: BigInt::one(),
            z: BigInt::zero(),
        }),
        method: Method::ConstructiveRootOfUnity,
    });
    Ok(out)
}

/// A root of `ζ⁴ + 1` modulo `p²`, for `p ≡ 1 (mod 8)`.
pub fn eighth_root_of_unity(p: u64) -> Result<BigInt> {
    if p % 8 != 1 || !is_prime_u64(p) {
        return precondition(format!("{p} is not a prime congruent to 1 mod 8"));
    }
    let pb = BigInt::from(p);
    let e = BigInt::from((p - 1) / 8);
    let half = BigInt::from((p - 1) / 2);
    let mut c = BigInt::from(2);
    while c.modpow(&half, &pb) == BigInt::one() {
        c += 1;
    }
    let mut z = c.modpow(&e, &pb);
    let p2 = &pb * &pb;
    // Newton step z − (z⁴ + 1)/(4z³); the derivative is a unit.
    for _ in 0..3 {
        let f = (z.pow(4) + 1u32).mod_floor(&p2);
        let d = (BigInt::from(4) * z.pow(3)).mod_floor(&p2);
        let dinv = d
            .modinv(&p2)
            .ok_or_else(|| crate::Error::Inconsistent("derivative is not a unit".into()))?;
        z = (&z - f * dinv).mod_floor(&p2);
    }
    debug_assert!((z.pow(4) + 1u32).mod_floor(&p2).is_zero());
    Ok(z)
}

/// Whether the approximation can be refined one digit further, i.e. some
/// lift of `r` mod `ℓ^(k−1)` is a root of `f` mod `ℓ^(k+1)`.
pub fn lifts_one_more_digit(f: &IntPoly, r: &BigInt, l: u64, k: u32) -> bool {
    let lb = BigInt::from(l);
    let base = num_traits::pow(lb.clone(), (k - 1) as usize);
    let target = &base * &lb * &lb;
    let r0 = r.mod_floor(&base);
    let mut j = BigInt::zero();
    while j < &lb * &lb {
        let s = &r0 + &j * &base;
        if f.eval_int(&s).mod_floor(&target).is_zero() {
            return true;
        }
        j += 1;
    }
    false
}

/// The plane model as an integral ternary quartic form.
pub fn ternary_form(f: &SymQuartic) -> TernaryForm {
    let a = f.twisted_a();
    let b = f.twisted_b();
    let l = num_integer::Integer::lcm(a.denom(), b.denom());
    let lr = Rational::from_integer(l.clone());
    let ai = (&a * &lr).to_integer();
    let bi = (&b * &lr).to_integer();
    vec![
        (4, 0, 0, l.clone()),
        (2, 0, 2, ai.clone()),
        (0, 2, 2, ai),
        (0, 4, 0, l),
        (0, 0, 4, -bi),
    ]
}

/// Exact residue-tree decision at a bad prime.
fn bad_place_report(f: &SymQuartic, l: u64) -> LocalReport {
    let lb = BigInt::from(l);
    let (status, witness) = match plane_point_zl(&ternary_form(f), &lb, SEARCH_DEPTH) {
        PlaneSearch::Found { x, y, z, precision } => (
            LocalStatus::Solvable,
            Some(Witness::Congruence {
                modulus: num_traits::pow(lb.clone(), precision.min(SEARCH_DEPTH) as usize),
                x,
                y,
                z,
            }),
        ),
        PlaneSearch::Absent => (LocalStatus::Unsolvable, None),
        PlaneSearch::Undecided => (LocalStatus::Undetermined, None),
    };
    LocalReport {
        place: Place::Prime(l),
        status,
        witness,
        method: Method::HenselSearch,
    }
}

fn good_place_report(f: &SymQuartic, q: u64) -> Result<LocalReport> {
    let (count, witness) = count_smooth_points_quartic_fq(f, q)?;
    Ok(match witness {
        Some((x, y, z)) => LocalReport {
            place: Place::Prime(q),
            status: LocalStatus::Solvable,
            witness: Some(Witness::ResiduePoint { q, x, y, z }),
            method: Method::HenselFromFq,
        },
        None => LocalReport {
            place: Place::Prime(q),
            status: if count == 0 {
                LocalStatus::Unsolvable
            } else {
                LocalStatus::Undetermined
            },
            witness: None,
            method: Method::EmptyReduction,
        },
    })
}

/// Checks `F^(p)` at every place. The boolean is true only when every
/// report is solvable.
pub fn everywhere_locally_solvable(p: u64) -> Result<(bool, Vec<LocalReport>)> {
    if p < 3 || !is_prime_u64(p) {
        return precondition(format!("{p} is not an odd prime"));
    }
    let f = family_member(p)?;
    let special = if p % 24 == 1 { Some(special_place_checks(p)?) } else { None };

    let mut places: Vec<u64> = vec![2, 3];
    if p > 3 {
        places.push(p);
    }
    for q in 5..WEIL_CUTOFF {
        if is_prime_u64(q) && q != p {
            places.push(q);
        }
    }
    let mut reports: Vec<LocalReport> = places
        .par_iter()
        .map(|&q| -> Result<LocalReport> {
            if let Some(s) = &special {
                if let Some(r) = s.iter().find(|r| r.place == Place::Prime(q)) {
                    return Ok(r.clone());
                }
            }
            if is_good_place(&f, q) {
                good_place_report(&f, q)
            } else {
                Ok(bad_place_report(&f, q))
            }
        })
        .collect::<Result<_>>()?;
    reports.push(real_report(&f));
    reports.push(LocalReport {
        place: Place::GoodPrimesFrom(WEIL_CUTOFF),
        status: LocalStatus::Solvable,
        witness: None,
        method: Method::WeilBound,
    });
    reports.sort_by_key(|r| r.place);
    let ok = reports.iter().all(LocalReport::solvable);
    Ok((ok, reports))
}

/// `|count − (q + 1)| ≤ 6√q`, checked without floating point.
pub fn within_weil_bound(count: u64, q: u64) -> bool {
    let diff = (count as i128 - (q as i128 + 1)).unsigned_abs();
    diff * diff <= 36 * q as u128
}
