//! Jacobians of odd-degree hyperelliptic curves over prime fields, via
//! Mumford representation and Cantor's composition/reduction, for
//! probabilistic verification that generated parameters are realized by
//! explicit curves.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::{is_prime, FpPoly, PrimeField};
use crate::{Error, Result};

/// y^2 = f(x) with f monic, squarefree, of odd degree 2g + 1, over F_q.
#[derive(Clone, Debug)]
pub struct HyperellipticCurve {
    fq: PrimeField,
    f: FpPoly,
    g: usize,
}

/// A divisor class in Mumford form (u, v): u monic, deg v < deg u, and
/// u | v^2 - f. The identity is (1, 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MumfordDivisor {
    pub u: FpPoly,
    pub v: FpPoly,
}

impl MumfordDivisor {
    pub fn identity() -> Self {
        MumfordDivisor {
            u: vec![BigUint::one()],
            v: vec![],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.u.len() == 1 && self.u[0].is_one() && self.v.is_empty()
    }
}

impl HyperellipticCurve {
    pub fn new(q: BigUint, f_coeffs: Vec<BigUint>) -> Result<Self> {
        if q.bit(0) == false || !is_prime(&q) {
            return Err(Error::Precondition(format!(
                "the base field size {q} must be an odd prime"
            )));
        }
        let fq = PrimeField::new(q);
        let f = PrimeField::ptrim(f_coeffs.into_iter().map(|c| fq.reduce(c)).collect());
        let deg = match PrimeField::pdeg(&f) {
            Some(d) if d >= 3 && d % 2 == 1 => d,
            _ => {
                return Err(Error::Precondition(
                    "f must have odd degree at least 3".into(),
                ))
            }
        };
        if !f[deg].is_one() {
            return Err(Error::Precondition("f must be monic".into()));
        }
        // squarefree over F_q: gcd(f, f') constant
        let mut deriv: FpPoly = Vec::with_capacity(deg);
        for (i, c) in f.iter().enumerate().skip(1) {
            deriv.push(fq.mul(&BigUint::from(i), c));
        }
        let deriv = PrimeField::ptrim(deriv);
        let gcd = fq.pgcd(&f, &deriv);
        if PrimeField::pdeg(&gcd) != Some(0) {
            return Err(Error::Precondition(
                "f must be squarefree over the base field".into(),
            ));
        }
        Ok(HyperellipticCurve {
            fq,
            f,
            g: (deg - 1) / 2,
        })
    }

    /// `hyperelliptic:<q>:<comma-separated f coefficients low-to-high>`
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, ':');
        let tag = parts.next().unwrap_or("");
        let (q, coeffs) = match (tag, parts.next(), parts.next()) {
            ("hyperelliptic", Some(q), Some(coeffs)) => (q, coeffs),
            _ => {
                return Err(Error::Parse(format!(
                    "expected hyperelliptic:<q>:<c0,c1,...>, got {s}"
                )))
            }
        };
        let q: BigUint = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad field size {q}")))?;
        let mut f = Vec::new();
        let q_int = BigInt::from(q.clone());
        for c in coeffs.split(',') {
            let c: BigInt = c
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {c}")))?;
            f.push(c.mod_floor(&q_int).to_biguint().expect("reduced"));
        }
        HyperellipticCurve::new(q, f)
    }

    pub fn q(&self) -> &BigUint {
        self.fq.modulus()
    }

    pub fn f(&self) -> &FpPoly {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn field(&self) -> &PrimeField {
        &self.fq
    }

    pub fn is_valid(&self, d: &MumfordDivisor) -> bool {
        let deg_u = match PrimeField::pdeg(&d.u) {
            Some(deg) if d.u[deg].is_one() => deg,
            _ => return false,
        };
        if deg_u > self.g {
            return false;
        }
        if let Some(dv) = PrimeField::pdeg(&d.v) {
            if dv >= deg_u {
                return false;
            }
        }
        let v2 = self.fq.pmul(&d.v, &d.v);
        let diff = self.fq.psub(&v2, &self.f);
        self.fq.prem(&diff, &d.u).is_empty()
    }

    pub fn negate(&self, d: &MumfordDivisor) -> MumfordDivisor {
        let mut neg: FpPoly = d.v.iter().map(|c| self.fq.neg(c)).collect();
        neg = PrimeField::ptrim(neg);
        MumfordDivisor {
            u: d.u.clone(),
            v: self.fq.prem(&neg, &d.u),
        }
    }
}

/// Cantor composition followed by reduction to deg u <= g.
pub fn divisor_add(
    d1: &MumfordDivisor,
    d2: &MumfordDivisor,
    curve: &HyperellipticCurve,
) -> Result<MumfordDivisor> {
    if !curve.is_valid(d1) || !curve.is_valid(d2) {
        return Err(Error::Precondition("invalid divisor".into()));
    }
    let fq = &curve.fq;
    // d = gcd(u1, u2) = h1 u1 + h2 u2; dd = gcd(d, v1 + v2) = c1 d + c2 (v1+v2)
    let (d, h1, h2) = fq.pxgcd(&d1.u, &d2.u);
    let vsum = fq.padd(&d1.v, &d2.v);
    let (dd, c1, c2) = fq.pxgcd(&d, &vsum);
    let s1 = fq.pmul(&c1, &h1);
    let s2 = fq.pmul(&c1, &h2);
    let s3 = c2;
    // u = u1 u2 / dd^2
    let u1u2 = fq.pmul(&d1.u, &d2.u);
    let dd2 = fq.pmul(&dd, &dd);
    let (mut u, rem) = fq.pdivrem(&u1u2, &dd2);
    debug_assert!(rem.is_empty());
    // v = (s1 u1 v2 + s2 u2 v1 + s3 (v1 v2 + f)) / dd mod u
    let mut num = fq.pmul(&fq.pmul(&s1, &d1.u), &d2.v);
    num = fq.padd(&num, &fq.pmul(&fq.pmul(&s2, &d2.u), &d1.v));
    let v1v2f = fq.padd(&fq.pmul(&d1.v, &d2.v), &curve.f);
    num = fq.padd(&num, &fq.pmul(&s3, &v1v2f));
    let (vq, vrem) = fq.pdivrem(&num, &dd);
    debug_assert!(vrem.is_empty());
    let mut v = fq.prem(&vq, &u);
    // reduction
    while PrimeField::pdeg(&u).unwrap_or(0) > curve.g {
        let v2 = fq.pmul(&v, &v);
        let num = fq.psub(&curve.f, &v2);
        let (unext, urem) = fq.pdivrem(&num, &u);
        debug_assert!(urem.is_empty());
        let unext = fq.pmonic(&unext);
        let negv = PrimeField::ptrim(v.iter().map(|c| fq.neg(c)).collect());
        v = fq.prem(&negv, &unext);
        u = unext;
    }
    let u = fq.pmonic(&u);
    let v = fq.prem(&v, &u);
    Ok(MumfordDivisor { u, v })
}

/// [n]D by double-and-add.
pub fn scalar_mul(
    n: &BigUint,
    d: &MumfordDivisor,
    curve: &HyperellipticCurve,
) -> Result<MumfordDivisor> {
    let mut acc = MumfordDivisor::identity();
    if n.is_zero() {
        return Ok(acc);
    }
    for i in (0..n.bits()).rev() {
        acc = divisor_add(&acc, &acc, curve)?;
        if n.bit(i) {
            acc = divisor_add(&acc, d, curve)?;
        }
    }
    Ok(acc)
}

/// A pseudo-random Jacobian element: compose g random affine points.
pub fn random_divisor<R: Rng + ?Sized>(
    curve: &HyperellipticCurve,
    rng: &mut R,
) -> Result<MumfordDivisor> {
    let fq = &curve.fq;
    let q = fq.modulus().clone();
    let mut acc = MumfordDivisor::identity();
    let mut placed = 0;
    while placed < curve.g {
        let x = rng.gen_biguint_below(&q);
        let fx = fq.peval(&curve.f, &x);
        let y = if fx.is_zero() {
            BigUint::zero()
        } else {
            match fq.sqrt(&fx) {
                Some(root) => {
                    if rng.gen::<bool>() {
                        fq.neg(&root)
                    } else {
                        root
                    }
                }
                None => continue,
            }
        };
        // the point (x, y) as the divisor (X - x, y)
        let point = MumfordDivisor {
            u: vec![fq.neg(&x), BigUint::one()],
            v: PrimeField::ptrim(vec![y]),
        };
        acc = divisor_add(&acc, &point, curve)?;
        placed += 1;
    }
    Ok(acc)
}

/// Distinct prime factors of n up to the bound, by trial division.
fn small_prime_factors(n: &BigUint, bound: u64) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut rest = n.clone();
    let mut p = 2u64;
    while p <= bound {
        let pb = BigUint::from(p);
        if (&rest % &pb).is_zero() {
            out.push(pb.clone());
            while (&rest % &pb).is_zero() {
                rest /= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
        if BigUint::from(p) * BigUint::from(p) > rest && rest > BigUint::one() {
            // remaining cofactor is prime; record it if within the bound
            if let Some(r) = rest.to_u64() {
                if r <= bound {
                    out.push(rest.clone());
                }
            }
            break;
        }
    }
    out
}

/// Probabilistic exponent test. Every trial divisor must be killed by N,
/// and for each known prime ell | N the ell-part of N must be explained by
/// the sampled element orders: writing v = v_ell(N) and j for the largest
/// ell-valuation of an observed element order, we require v <= 2g * j,
/// since the ell-Sylow subgroup of the Jacobian has rank at most 2g. When
/// ell divides N exactly once this is the classical cofactor probe
/// ([N/ell]D != identity for some trial). The test checks exponent
/// compatibility, not exact group order: a multiple of the true exponent
/// by a prime outside the factor list can pass.
pub fn probable_order_check<R: Rng + ?Sized>(
    curve: &HyperellipticCurve,
    n: &BigUint,
    trials: u32,
    rng: &mut R,
) -> Result<bool> {
    let factors = small_prime_factors(n, 1_000_000);
    probable_order_check_with_factors(curve, n, &factors, trials, rng)
}

/// As `probable_order_check`, with a caller-supplied list of primes
/// dividing N to use for the cofactor probes.
pub fn probable_order_check_with_factors<R: Rng + ?Sized>(
    curve: &HyperellipticCurve,
    n: &BigUint,
    factors: &[BigUint],
    trials: u32,
    rng: &mut R,
) -> Result<bool> {
    if n.is_zero() || trials == 0 {
        return Err(Error::Precondition("need N >= 1 and trials >= 1".into()));
    }
    // Weil interval sanity: (sqrt(q)-1)^2g <= N <= (sqrt(q)+1)^2g, checked
    // with integer square roots and a unit of slack each way.
    let s = curve.q().sqrt();
    let two_g = 2 * curve.g as u32;
    let lo = if s > BigUint::one() {
        (&s - BigUint::one()).pow(two_g)
    } else {
        BigUint::zero()
    };
    let hi = (&s + BigUint::from(2u32)).pow(two_g);
    if *n < lo || *n > hi {
        return Ok(false);
    }
    // v_ell(N) and N / ell^v for each supplied prime
    let mut probes: Vec<(BigUint, u32, BigUint)> = Vec::with_capacity(factors.len());
    for ell in factors {
        let mut v = 0u32;
        let mut cof = n.clone();
        while (&cof % ell).is_zero() {
            cof /= ell;
            v += 1;
        }
        if v == 0 {
            return Err(Error::Precondition(format!(
                "{ell} does not divide N = {n}"
            )));
        }
        probes.push((ell.clone(), v, cof));
    }
    let mut max_val = vec![0u32; probes.len()];
    for _ in 0..trials {
        let d = random_divisor(curve, rng)?;
        if !scalar_mul(n, &d, curve)?.is_identity() {
            return Ok(false);
        }
        for (i, (ell, v, cof)) in probes.iter().enumerate() {
            if max_val[i] == *v {
                continue;
            }
            // e = [N / ell^v] D has order ell^j; find j
            let mut e = scalar_mul(cof, &d, curve)?;
            let mut j = 0u32;
            while !e.is_identity() {
                e = scalar_mul(ell, &e, curve)?;
                j += 1;
                debug_assert!(j <= *v);
            }
            max_val[i] = max_val[i].max(j);
        }
    }
    Ok(probes
        .iter()
        .zip(&max_val)
        .all(|((_, v, _), &j)| *v <= 2 * curve.g as u32 * j))
}

/// Scan y^2 = x^p + a for a in [1, a_bound] and return the first curve
/// whose Jacobian passes the probabilistic order check for target_order.
pub fn twist_search<R: Rng + ?Sized>(
    p: u64,
    target_order: &BigUint,
    q: &BigUint,
    a_bound: u64,
    rng: &mut R,
) -> Result<Option<(u64, HyperellipticCurve)>> {
    if p < 3 || p % 2 == 0 {
        return Err(Error::Precondition("p must be an odd prime degree".into()));
    }
    if !(q % BigUint::from(p)).is_one() {
        return Err(Error::Precondition(format!(
            "q must be 1 mod {p} for CM twists of y^2 = x^{p} + a"
        )));
    }
    let factors = small_prime_factors(target_order, 1_000_000);
    for a in 1..=a_bound {
        let mut f = vec![BigUint::zero(); p as usize + 1];
        f[0] = BigUint::from(a) % q;
        f[p as usize] = BigUint::one();
        let curve = HyperellipticCurve::new(q.clone(), f)?;
        if probable_order_check_with_factors(&curve, target_order, &factors, 4, rng)? {
            return Ok(Some((a, curve)));
        }
    }
    Ok(None)
}
