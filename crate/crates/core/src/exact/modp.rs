//! Arithmetic modulo word-sized primes: Legendre symbols, square roots and
//! roots of integer polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::poly::IntPoly;
use super::primes::{is_prime, is_prime_u64, pow_mod_u64};
use crate::error::{precondition, Result};

fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    (g.gcd == 1).then(|| g.x.rem_euclid(m as i128) as u64)
}

/// Legendre symbol for an odd prime `p` that fits in a word.
pub fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod_u64(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// `(a/p)` for an odd prime `p`.
pub fn legendre_symbol(a: &BigInt, p: &BigInt) -> Result<i8> {
    if p.is_even() || !is_prime(p) || p <= &BigInt::from(2) {
        return precondition(format!("{p} is not an odd prime"));
    }
    let r = a.mod_floor(p);
    if r.is_zero() {
        return Ok(0);
    }
    let e = (p - 1u32) / 2u32;
    Ok(if r.modpow(&e, p) == BigInt::from(1) { 1 } else { -1 })
}

/// A square root of `a` modulo the prime `p` (Tonelli–Shanks).
pub fn sqrt_mod_u64(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if legendre_u64(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod_u64(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p).find(|&z| legendre_u64(z, p) == -1)?;
    let mut m = s;
    let mut c = pow_mod_u64(z, q, p);
    let mut t = pow_mod_u64(a, q, p);
    let mut r = pow_mod_u64(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul(tt, tt, p);
            i += 1;
        }
        let b = pow_mod_u64(c, 1 << (m - i - 1), p);
        m = i;
        c = mul(b, b, p);
        t = mul(t, c, p);
        r = mul(r, b, p);
    }
    Some(r)
}

// Polynomials over F_p as little-endian coefficient vectors with no
// trailing zeros.

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul(x, y, p)) % p;
        }
    }
    trim(out)
}

fn prem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let inv = inv_mod_u64(m[dm], p).unwrap();
    while r.len() > dm {
        let top = *r.last().unwrap();
        let k = r.len() - 1 - dm;
        if top != 0 {
            let c = mul(top, inv, p);
            for (j, &mc) in m.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mul(c, mc, p)) % p;
            }
        }
        r.pop();
    }
    trim(r)
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = prem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = inv_mod_u64(lead, p).unwrap();
        for c in a.iter_mut() {
            *c = mul(*c, inv, p);
        }
    }
    a
}

fn ppow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = prem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = prem(&pmul(&result, &b, p), m, p);
        }
        b = prem(&pmul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

fn psub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn pdiv_exact(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let inv = inv_mod_u64(m[dm], p).unwrap();
    let mut r = a.to_vec();
    let mut q = vec![0u64; a.len() - dm];
    while r.len() > dm {
        let top = *r.last().unwrap();
        let k = r.len() - 1 - dm;
        let c = mul(top, inv, p);
        q[k] = c;
        for (j, &mc) in m.iter().enumerate() {
            r[k + j] = (r[k + j] + p - mul(c, mc, p)) % p;
        }
        r.pop();
    }
    trim(q)
}

/// Splits a monic squarefree product of distinct linear factors.
fn split_linear(g: &[u64], p: u64, seed: &mut u64, out: &mut Vec<u64>) {
    match g.len() {
        0 | 1 => {}
        2 => out.push((p - g[0]) % p),
        _ => loop {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (*seed >> 11) % p;
            let h = ppow_mod(&[a, 1], (p - 1) / 2, g, p);
            let d = pgcd(g, &psub(&h, &[1], p), p);
            if d.len() > 1 && d.len() < g.len() {
                split_linear(&d, p, seed, out);
                split_linear(&pdiv_exact(g, &d, p), p, seed, out);
                return;
            }
        },
    }
}

/// Distinct roots of `f` in `F_p`, ascending. Fails if `p` is not prime, is
/// too large for word arithmetic, or `f` vanishes identically mod `p`.
pub fn roots_mod_p(f: &IntPoly, p: &BigInt) -> Result<Vec<BigInt>> {
    let Some(pu) = p.to_u64().filter(|&q| q < 1 << 62 && is_prime_u64(q)) else {
        return precondition(format!("{p} is not a word-sized prime"));
    };
    let red = f.reduce_mod(pu);
    if red.is_empty() {
        return precondition(format!("polynomial vanishes identically mod {p}"));
    }
    let mut roots: Vec<u64> = if pu < 10_000 {
        (0..pu).filter(|&x| f.eval_mod(x, pu) == 0).collect()
    } else if red.len() == 1 {
        Vec::new()
    } else {
        let xp = ppow_mod(&[0, 1], pu, &red, pu);
        let g = pgcd(&red, &psub(&xp, &[0, 1], pu), pu);
        let mut out = Vec::new();
        let mut seed = 0x9e37_79b9_7f4a_7c15u64 ^ pu;
        split_linear(&g, pu, &mut seed, &mut out);
        out
    };
    roots.sort_unstable();
    Ok(roots.into_iter().map(BigInt::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_matches_euler_table() {
        for p in [3u64, 5, 7, 11, 13, 97] {
            let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 0..p {
                let expect = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre_symbol(&BigInt::from(a), &BigInt::from(p)).unwrap(), expect);
            }
        }
        assert!(legendre_symbol(&BigInt::from(1), &BigInt::from(9)).is_err());
        assert!(legendre_symbol(&BigInt::from(1), &BigInt::from(2)).is_err());
    }

    #[test]
    fn tonelli_shanks() {
        for p in [17u64, 73, 97, 193, 1_000_000_007] {
            for a in 1..200 {
                if let Some(r) = sqrt_mod_u64(a, p) {
                    assert_eq!(mul(r, r, p), a % p);
                } else {
                    assert_eq!(legendre_u64(a, p), -1);
                }
            }
        }
    }

    #[test]
    fn roots_small_and_large() {
        let f = IntPoly::from_i64(&[-1, 0, 1]);
        assert_eq!(roots_mod_p(&f, &BigInt::from(7)).unwrap(), vec![BigInt::from(1), BigInt::from(6)]);
        let p = 1_000_000_007u64;
        // (x - 3)(x - 10)(x^2 + 1); -1 is not a square since p ≡ 3 mod 4
        let g = IntPoly::from_i64(&[30, -13, 31, -13, 1]);
        assert_eq!(
            roots_mod_p(&g, &BigInt::from(p)).unwrap(),
            vec![BigInt::from(3), BigInt::from(10)]
        );
        assert!(roots_mod_p(&IntPoly::from_i64(&[7, 14]), &BigInt::from(7)).is_err());
    }
}
