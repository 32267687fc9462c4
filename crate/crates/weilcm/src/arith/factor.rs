use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::primality::{is_prime, is_prime_u64, sieve};
use crate::{Error, Result};

const TRIAL_LIMIT: u64 = 1_000_000;
const RHO_MAX_ITERS: u64 = 1 << 24;

/// Factor a u64 completely by trial division (sufficient for the small
/// embedding degrees and exponents this crate factors on hot paths).
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Pollard-Brent rho. Returns a nontrivial factor of composite odd n, or
/// None when the iteration budget runs out.
fn pollard_brent(n: &BigUint, seed: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let c = BigUint::from(seed);
    let mut x = BigUint::from(2u32);
    let mut y = x.clone();
    let mut d = one.clone();
    let mut count: u64 = 0;
    let step = |v: &BigUint| (v * v + &c) % n;
    while d.is_one() {
        if count >= RHO_MAX_ITERS {
            return None;
        }
        // batch gcd over 128 steps
        let mut q = one.clone();
        let saved_x = x.clone();
        let saved_y = y.clone();
        for _ in 0..128 {
            x = step(&x);
            y = step(&step(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                // cycle; retry stepwise from the saved state
                x = saved_x;
                y = saved_y;
                for _ in 0..128 {
                    x = step(&x);
                    y = step(&step(&y));
                    let diff = if x > y { &x - &y } else { &y - &x };
                    let g = diff.gcd(n);
                    if !g.is_one() {
                        if g == *n {
                            return None;
                        }
                        return Some(g);
                    }
                }
                return None;
            }
            q = (q * diff) % n;
        }
        d = q.gcd(n);
        count += 128;
    }
    if d == *n {
        return None;
    }
    Some(d)
}

/// Complete factorization of n >= 1: trial division to 10^6 followed by
/// Pollard rho on remaining composite cofactors. Errors when a cofactor
/// resists the rho iteration budget.
pub fn factor(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut n = n.clone();
    if n.is_zero() {
        return Err(Error::Precondition("cannot factor 0".into()));
    }
    for p in sieve(1_000) {
        let pb = BigUint::from(p);
        let mut e = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((pb, e));
        }
    }
    if let Some(small) = n.to_u64() {
        for (p, e) in factor_u64(small) {
            if p > 1 {
                merge(&mut out, BigUint::from(p), e);
            }
        }
        out.sort();
        return Ok(out);
    }
    // continue trial division up to the full limit
    let mut p = 1_001u64;
    while p <= TRIAL_LIMIT {
        let pb = BigUint::from(p);
        let mut e = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            e += 1;
        }
        if e > 0 {
            merge(&mut out, pb, e);
            if let Some(small) = n.to_u64() {
                if small > 1 {
                    if is_prime_u64(small) {
                        merge(&mut out, BigUint::from(small), 1);
                    } else {
                        for (q, f) in factor_u64(small) {
                            merge(&mut out, BigUint::from(q), f);
                        }
                    }
                }
                out.sort();
                return Ok(out);
            }
        }
        p += 2;
    }
    // rho on what remains
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            merge(&mut out, m, 1);
            continue;
        }
        let mut found = None;
        for seed in 1..8u64 {
            if let Some(d) = pollard_brent(&m, seed) {
                found = Some(d);
                break;
            }
        }
        match found {
            Some(d) => {
                stack.push(&m / &d);
                stack.push(d);
            }
            None => return Err(Error::FactorizationIncomplete(m)),
        }
    }
    out.sort();
    Ok(out)
}

fn merge(out: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32) {
    for entry in out.iter_mut() {
        if entry.0 == p {
            entry.1 += e;
            return;
        }
    }
    out.push((p, e));
}
