//! Arbitrary-precision integer and prime-field arithmetic primitives.

mod factor;
mod fp;
mod intpoly;
mod primality;

pub use factor::{factor, factor_u64};
pub use fp::{FpPoly, PrimeField};
pub use intpoly::IntPoly;
pub use primality::is_prime;
pub(crate) use primality::is_prime_u64;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::{Error, Result};

/// A residue class modulo a fixed positive integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residue {
    value: BigUint,
    modulus: BigUint,
}

impl Residue {
    pub fn new(value: BigUint, modulus: BigUint) -> Self {
        assert!(modulus >= BigUint::from(2u32), "modulus must be at least 2");
        Residue {
            value: value % &modulus,
            modulus,
        }
    }

    pub fn from_u64(value: u64, modulus: &BigUint) -> Self {
        Residue::new(BigUint::from(value), modulus.clone())
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    fn check(&self, rhs: &Residue) -> Result<()> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Residue) -> Result<Residue> {
        self.check(rhs)?;
        Ok(Residue::new(&self.value + &rhs.value, self.modulus.clone()))
    }

    pub fn sub(&self, rhs: &Residue) -> Result<Residue> {
        self.check(rhs)?;
        let v = (&self.modulus + &self.value) - &rhs.value;
        Ok(Residue::new(v, self.modulus.clone()))
    }

    pub fn mul(&self, rhs: &Residue) -> Result<Residue> {
        self.check(rhs)?;
        Ok(Residue::new(&self.value * &rhs.value, self.modulus.clone()))
    }

    pub fn neg(&self) -> Residue {
        Residue::new(&self.modulus - &self.value, self.modulus.clone())
    }

    pub fn pow(&self, e: &BigUint) -> Residue {
        Residue {
            value: self.value.modpow(e, &self.modulus),
            modulus: self.modulus.clone(),
        }
    }

    /// Inverse modulo the modulus, which must be coprime to the value.
    pub fn inv(&self) -> Result<Residue> {
        let v = mod_inverse(&self.value, &self.modulus)
            .ok_or_else(|| Error::NotInvertible(self.value.clone(), self.modulus.clone()))?;
        Ok(Residue {
            value: v,
            modulus: self.modulus.clone(),
        })
    }
}

/// Modular inverse via extended Euclid; `None` when gcd(a, m) != 1.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let a = BigInt::from(a.clone());
    let m = BigInt::from(m.clone());
    let e = a.extended_gcd(&m);
    if !e.gcd.is_one() {
        return None;
    }
    let mut x = e.x % &m;
    if x.sign() == num_bigint::Sign::Minus {
        x += &m;
    }
    Some(x.to_biguint().unwrap())
}

/// Smallest k >= 1 with a^k = 1 mod r, for r prime and gcd(a, r) = 1.
///
/// Requires the factorization of r - 1; when `r_minus_one_factors` is not
/// supplied it is computed by trial division and Pollard rho, which may fail
/// for r of cryptographic size (pass a hint in that case).
pub fn multiplicative_order(
    a: &BigUint,
    r: &BigUint,
    r_minus_one_factors: Option<&[(BigUint, u32)]>,
) -> Result<BigUint> {
    let a = a % r;
    if a.is_zero() {
        return Err(Error::Precondition(format!("{a} is divisible by {r}")));
    }
    let n = r - BigUint::one();
    let owned;
    let factors = match r_minus_one_factors {
        Some(f) => f,
        None => {
            owned = factor(&n)?;
            &owned
        }
    };
    let mut order = n.clone();
    for (p, _) in factors {
        while (&order % p).is_zero() {
            let cand = &order / p;
            if a.modpow(&cand, r).is_one() {
                order = cand;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// The k-th cyclotomic polynomial, of degree phi(k).
pub fn cyclotomic_polynomial(k: u64) -> IntPoly {
    assert!(k >= 1);
    fn build(k: u64, memo: &mut std::collections::HashMap<u64, IntPoly>) -> IntPoly {
        if let Some(p) = memo.get(&k) {
            return p.clone();
        }
        // x^k - 1 divided by the product of Phi_d over proper divisors d of k
        let mut num = IntPoly::monomial(k as usize);
        num = num.sub(&IntPoly::one());
        for d in 1..k {
            if k % d == 0 {
                let phi_d = build(d, memo);
                num = num.div_exact(&phi_d).expect("cyclotomic division is exact");
            }
        }
        memo.insert(k, num.clone());
        num
    }
    build(k, &mut std::collections::HashMap::new())
}

/// Euler's totient of a small integer.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// A primitive k-th root of unity modulo the prime r, requiring k | r - 1.
pub fn primitive_kth_root<R: Rng + ?Sized>(r: &BigUint, k: u64, rng: &mut R) -> Result<Residue> {
    let rm1 = r - BigUint::one();
    let kb = BigUint::from(k);
    if !(&rm1 % &kb).is_zero() {
        return Err(Error::Precondition(format!("{k} does not divide r - 1")));
    }
    if k == 1 {
        return Ok(Residue::new(BigUint::one(), r.clone()));
    }
    let exp = &rm1 / &kb;
    let k_primes: Vec<u64> = factor_u64(k).into_iter().map(|(p, _)| p).collect();
    loop {
        let g = rng.gen_biguint_range(&BigUint::one(), r);
        let zeta = g.modpow(&exp, r);
        if zeta.is_one() {
            continue;
        }
        // order divides k; primitive iff zeta^(k/p) != 1 for every prime p | k
        let primitive = k_primes
            .iter()
            .all(|p| !zeta.modpow(&BigUint::from(k / p), r).is_one());
        if primitive {
            return Ok(Residue::new(zeta, r.clone()));
        }
    }
}

/// All primitive k-th roots of unity modulo r, sorted ascending.
pub fn all_primitive_kth_roots(r: &BigUint, k: u64) -> Result<Vec<Residue>> {
    let rm1 = r - BigUint::one();
    let kb = BigUint::from(k);
    if !(&rm1 % &kb).is_zero() {
        return Err(Error::Precondition(format!("{k} does not divide r - 1")));
    }
    // find one primitive root by scanning g = 2, 3, ...
    let exp = &rm1 / &kb;
    let k_primes: Vec<u64> = factor_u64(k).into_iter().map(|(p, _)| p).collect();
    let mut base = None;
    let mut g = BigUint::from(2u32);
    while g < *r {
        let zeta = g.modpow(&exp, r);
        if !zeta.is_one()
            && k_primes
                .iter()
                .all(|p| !zeta.modpow(&BigUint::from(k / p), r).is_one())
        {
            base = Some(zeta);
            break;
        }
        g += BigUint::one();
    }
    let base = base.ok_or_else(|| Error::Precondition("no primitive root found".into()))?;
    let mut out = Vec::new();
    for e in 1..=k {
        if num_integer::gcd(e, k) == 1 {
            out.push(Residue::new(base.modpow(&BigUint::from(e), r), r.clone()));
        }
    }
    out.sort_by(|a, b| a.value.cmp(&b.value));
    Ok(out)
}

#[cfg(test)]
mod tests;
