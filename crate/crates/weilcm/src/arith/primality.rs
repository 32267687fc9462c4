use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

/// Primes below 2048, used for trial division.
fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(2048))
}

pub(crate) fn sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit];
    let mut primes = Vec::new();
    for n in 2..limit {
        if !composite[n] {
            primes.push(n as u64);
            let mut m = n * n;
            while m < limit {
                composite[m] = true;
                m += n;
            }
        }
    }
    primes
}

/// Packed products of consecutive small primes, each fitting in a u64.
/// One big-integer remainder per product replaces several.
fn prime_products() -> &'static Vec<(u64, Vec<u64>)> {
    static PRODUCTS: OnceLock<Vec<(u64, Vec<u64>)>> = OnceLock::new();
    PRODUCTS.get_or_init(|| {
        let mut out = Vec::new();
        let mut acc: u64 = 1;
        let mut group = Vec::new();
        for &p in small_primes() {
            if let Some(next) = acc.checked_mul(p) {
                acc = next;
                group.push(p);
            } else {
                out.push((acc, std::mem::take(&mut group)));
                acc = p;
                group.push(p);
            }
        }
        if !group.is_empty() {
            out.push((acc, group));
        }
        out
    })
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

fn mr_round_u64(n: u64, base: u64) -> bool {
    let a = base % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic for n < 2^64.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // this base set is known to be exact below 2^64
    [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .all(|&a| mr_round_u64(n, a))
}

fn mr_round_big(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let a = base % n;
    if a.is_zero() {
        return true;
    }
    let s = nm1.trailing_zeros().unwrap();
    let d = &nm1 >> s;
    let mut x = a.modpow(&d, n);
    if x.is_one() || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == nm1 {
            return true;
        }
    }
    false
}

/// Primality test: deterministic below 2^64, otherwise Miller-Rabin with
/// 64 rounds (a fixed base-2 round plus 63 rounds whose bases are derived
/// deterministically from n), giving error probability below 2^-128 and a
/// deterministic verdict for a given input.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    // trial division via packed prime products
    for (product, group) in prime_products() {
        let rem = (n % BigUint::from(*product)).to_u64().unwrap();
        for &p in group {
            if rem % p == 0 {
                return false;
            }
        }
    }
    if !mr_round_big(n, &BigUint::from(2u32)) {
        return false;
    }
    // remaining bases from a PRNG keyed by n itself, so the result is a
    // deterministic function of n
    let bytes = n.to_bytes_le();
    let mut seed = [0u8; 32];
    for (i, b) in bytes.iter().enumerate() {
        seed[i % 32] ^= *b;
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    let nm2 = n - BigUint::from(2u32);
    for _ in 0..63 {
        let mut buf = vec![0u8; (n.bits() as usize + 7) / 8 + 8];
        rng.fill_bytes(&mut buf);
        let base = BigUint::from(2u32) + BigUint::from_bytes_le(&buf) % &nm2;
        if !mr_round_big(n, &base) {
            return false;
        }
    }
    true
}
