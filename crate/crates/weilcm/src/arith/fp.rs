use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::mod_inverse;

/// The prime field F_p, acting as an arithmetic context for scalars and
/// dense polynomials (`FpPoly`, lowest degree first, no trailing zeros).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: BigUint,
}

pub type FpPoly = Vec<BigUint>;

impl PrimeField {
    pub fn new(p: BigUint) -> Self {
        assert!(p >= BigUint::from(2u32));
        PrimeField { p }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn reduce(&self, a: BigUint) -> BigUint {
        a % &self.p
    }

    pub fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.p {
            s - &self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.p - (b - a)
        }
    }

    pub fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.p - a
        }
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.p
    }

    pub fn inv(&self, a: &BigUint) -> Option<BigUint> {
        mod_inverse(a, &self.p)
    }

    pub fn pow(&self, a: &BigUint, e: &BigUint) -> BigUint {
        a.modpow(e, &self.p)
    }

    // ---- polynomial helpers ----

    pub fn ptrim(mut f: FpPoly) -> FpPoly {
        while f.last().is_some_and(|c| c.is_zero()) {
            f.pop();
        }
        f
    }

    pub fn pdeg(f: &FpPoly) -> Option<usize> {
        if f.is_empty() {
            None
        } else {
            Some(f.len() - 1)
        }
    }

    pub fn padd(&self, f: &FpPoly, g: &FpPoly) -> FpPoly {
        let n = f.len().max(g.len());
        let mut out = vec![BigUint::zero(); n];
        for (i, c) in f.iter().enumerate() {
            out[i] = c.clone();
        }
        for (i, c) in g.iter().enumerate() {
            out[i] = self.add(&out[i], c);
        }
        Self::ptrim(out)
    }

    pub fn psub(&self, f: &FpPoly, g: &FpPoly) -> FpPoly {
        let n = f.len().max(g.len());
        let mut out = vec![BigUint::zero(); n];
        for (i, c) in f.iter().enumerate() {
            out[i] = c.clone();
        }
        for (i, c) in g.iter().enumerate() {
            out[i] = self.sub(&out[i], c);
        }
        Self::ptrim(out)
    }

    pub fn pmul(&self, f: &FpPoly, g: &FpPoly) -> FpPoly {
        if f.is_empty() || g.is_empty() {
            return vec![];
        }
        let mut out = vec![BigUint::zero(); f.len() + g.len() - 1];
        for (i, a) in f.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in g.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(a, b));
            }
        }
        Self::ptrim(out)
    }

    pub fn pscale(&self, f: &FpPoly, s: &BigUint) -> FpPoly {
        Self::ptrim(f.iter().map(|c| self.mul(c, s)).collect())
    }

    /// Quotient and remainder; divisor must be nonzero.
    pub fn pdivrem(&self, f: &FpPoly, g: &FpPoly) -> (FpPoly, FpPoly) {
        let dg = Self::pdeg(g).expect("nonzero divisor");
        let mut rem = f.clone();
        if rem.len() < g.len() {
            return (vec![], Self::ptrim(rem));
        }
        let inv_lc = self.inv(&g[dg]).expect("leading coefficient invertible");
        let mut quot = vec![BigUint::zero(); rem.len() - dg];
        for i in (dg..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = self.mul(&rem[i], &inv_lc);
            quot[i - dg] = q.clone();
            for (j, c) in g.iter().enumerate() {
                rem[i - dg + j] = self.sub(&rem[i - dg + j], &self.mul(&q, c));
            }
        }
        (Self::ptrim(quot), Self::ptrim(rem))
    }

    pub fn prem(&self, f: &FpPoly, g: &FpPoly) -> FpPoly {
        self.pdivrem(f, g).1
    }

    pub fn pmonic(&self, f: &FpPoly) -> FpPoly {
        match Self::pdeg(f) {
            None => vec![],
            Some(d) => {
                if f[d].is_one() {
                    f.clone()
                } else {
                    let inv = self.inv(&f[d]).expect("leading coefficient invertible");
                    self.pscale(f, &inv)
                }
            }
        }
    }

    pub fn pgcd(&self, f: &FpPoly, g: &FpPoly) -> FpPoly {
        let mut a = Self::ptrim(f.clone());
        let mut b = Self::ptrim(g.clone());
        while !b.is_empty() {
            let r = self.prem(&a, &b);
            a = b;
            b = r;
        }
        self.pmonic(&a)
    }

    /// Extended gcd: returns (d, s, t) with s*f + t*g = d, d monic.
    pub fn pxgcd(&self, f: &FpPoly, g: &FpPoly) -> (FpPoly, FpPoly, FpPoly) {
        let mut r0 = Self::ptrim(f.clone());
        let mut r1 = Self::ptrim(g.clone());
        let mut s0: FpPoly = vec![BigUint::one()];
        let mut s1: FpPoly = vec![];
        let mut t0: FpPoly = vec![];
        let mut t1: FpPoly = vec![BigUint::one()];
        while !r1.is_empty() {
            let (q, r) = self.pdivrem(&r0, &r1);
            let s = self.psub(&s0, &self.pmul(&q, &s1));
            let t = self.psub(&t0, &self.pmul(&q, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if let Some(d) = Self::pdeg(&r0) {
            if !r0[d].is_one() {
                let inv = self.inv(&r0[d]).expect("invertible");
                r0 = self.pscale(&r0, &inv);
                s0 = self.pscale(&s0, &inv);
                t0 = self.pscale(&t0, &inv);
            }
        }
        (r0, s0, t0)
    }

    pub fn peval(&self, f: &FpPoly, x: &BigUint) -> BigUint {
        let mut acc = BigUint::zero();
        for c in f.iter().rev() {
            acc = self.add(&self.mul(&acc, x), c);
        }
        acc
    }

    /// base^e modulo the monic polynomial f.
    pub fn ppowmod(&self, base: &FpPoly, e: &BigUint, f: &FpPoly) -> FpPoly {
        let mut acc: FpPoly = vec![BigUint::one()];
        let mut sq = self.prem(base, f);
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = self.prem(&self.pmul(&acc, &sq), f);
            }
            if i + 1 < e.bits() {
                sq = self.prem(&self.pmul(&sq, &sq), f);
            }
        }
        acc
    }

    /// Roots in F_p of a squarefree polynomial f. Deterministic: the
    /// equal-degree splitting uses shifts x+1, x+2, ... in sequence.
    pub fn roots(&self, f: &FpPoly) -> Vec<BigUint> {
        let f = self.pmonic(f);
        if f.is_empty() {
            return vec![];
        }
        // linear part: gcd(x^p - x, f)
        let x: FpPoly = vec![BigUint::zero(), BigUint::one()];
        let xp = self.ppowmod(&x, &self.p, &f);
        let lin = self.pgcd(&self.psub(&xp, &x), &f);
        let mut out = Vec::new();
        self.split_linear(&lin, &mut out, &mut 1u64);
        out.sort();
        out
    }

    fn split_linear(&self, g: &FpPoly, out: &mut Vec<BigUint>, shift: &mut u64) {
        match Self::pdeg(g) {
            None | Some(0) => {}
            Some(1) => {
                // root of x + c is -c
                out.push(self.neg(&g[0]));
            }
            Some(_) => {
                if self.p == BigUint::from(2u32) {
                    // check both elements directly
                    for cand in [BigUint::zero(), BigUint::one()] {
                        if self.peval(g, &cand).is_zero() {
                            out.push(cand);
                        }
                    }
                    return;
                }
                let e = (&self.p - BigUint::one()) >> 1;
                loop {
                    let c = BigUint::from(*shift);
                    *shift += 1;
                    let base: FpPoly = vec![c, BigUint::one()];
                    let mut w = self.ppowmod(&base, &e, g);
                    // w = (x+c)^((p-1)/2) - 1 mod g
                    if w.is_empty() {
                        w = vec![self.neg(&BigUint::one())];
                    } else {
                        w[0] = self.sub(&w[0], &BigUint::one());
                        w = Self::ptrim(w);
                    }
                    let d = self.pgcd(&w, g);
                    let dd = Self::pdeg(&d);
                    if dd.is_some() && dd != Some(0) && dd != Self::pdeg(g) {
                        let (q, r) = self.pdivrem(g, &d);
                        debug_assert!(r.is_empty());
                        self.split_linear(&d, out, shift);
                        self.split_linear(&q, out, shift);
                        return;
                    }
                }
            }
        }
    }

    /// Tonelli-Shanks square root modulo the odd prime p, or None when a is
    /// a non-residue.
    pub fn sqrt(&self, a: &BigUint) -> Option<BigUint> {
        let p = &self.p;
        if a.is_zero() {
            return Some(BigUint::zero());
        }
        let one = BigUint::one();
        let pm1 = p - &one;
        let legendre = a.modpow(&(&pm1 >> 1), p);
        if legendre != one {
            return None;
        }
        // p = q * 2^s + 1
        let s = pm1.trailing_zeros().unwrap();
        let q = &pm1 >> s;
        if s == 1 {
            // p = 3 mod 4
            return Some(a.modpow(&((p + &one) >> 2), p));
        }
        // find a non-residue z
        let mut z = BigUint::from(2u32);
        while z.modpow(&(&pm1 >> 1), p) == one {
            z += &one;
        }
        let mut m = s;
        let mut c = z.modpow(&q, p);
        let mut t = a.modpow(&q, p);
        let mut r = a.modpow(&((&q + &one) >> 1), p);
        while !t.is_one() {
            // least i with t^(2^i) = 1
            let mut i = 0u64;
            let mut t2 = t.clone();
            while !t2.is_one() {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let b = c.modpow(&(BigUint::one() << (m - i - 1)), p);
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        Some(r)
    }
}
