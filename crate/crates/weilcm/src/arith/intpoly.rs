use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense univariate polynomial over the integers, lowest degree first.
/// The zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// x^n
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn mul_scalar(&self, s: &BigInt) -> Self {
        IntPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Exact division over Z; None when the division is not exact.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let dd = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() - 1 < dd {
            return None;
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        let lc = divisor.leading();
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let (q, r) = rem[i].div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            quot[i - dd] = q.clone();
            for (j, c) in divisor.coeffs.iter().enumerate() {
                let delta = &q * c;
                rem[i - dd + j] -= delta;
            }
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPoly::new(quot))
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Resultant of self and rhs over Z, via the subresultant
    /// pseudo-remainder sequence.
    pub fn resultant(&self, rhs: &Self) -> BigInt {
        resultant(self, rhs)
    }

    /// Discriminant of the polynomial: (-1)^(n(n-1)/2) res(f, f') / lc(f).
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree().expect("nonzero polynomial");
        if n == 0 {
            return BigInt::one();
        }
        let res = self.resultant(&self.derivative());
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        let lc = self.leading();
        BigInt::from(sign) * res / lc
    }
}

/// Pseudo-remainder with the standard normalization
/// lc(b)^(da-db+1) * a = q*b + r.
fn prem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let da = a.degree().expect("nonzero dividend") as isize;
    let db = b.degree().expect("nonzero divisor") as isize;
    assert!(da >= db);
    let lc = b.leading();
    let mut r = a.coeffs.clone();
    let mut scale_remaining = (da - db + 1) as u32;
    let mut i = da;
    while i >= db {
        let idx = i as usize;
        if r.len() as isize <= i || r[idx].is_zero() {
            // still need to apply the pending scaling at the end
            i -= 1;
            continue;
        }
        for c in r.iter_mut() {
            *c *= &lc;
        }
        scale_remaining -= 1;
        let top = r[idx].clone();
        let q = &top / &lc; // exact: top acquired a factor of lc just above
        debug_assert!((&top % &lc).is_zero());
        for (j, bc) in b.coeffs.iter().enumerate() {
            r[idx - (db as usize) + j] -= &q * bc;
        }
        debug_assert!(r[idx].is_zero());
        i -= 1;
    }
    // apply any scaling skipped over zero leading terms
    if scale_remaining > 0 {
        let f = lc.pow(scale_remaining);
        for c in r.iter_mut() {
            *c *= &f;
        }
    }
    IntPoly::new(r)
}

fn resultant(a: &IntPoly, b: &IntPoly) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut sign = BigInt::one();
    if a.degree().unwrap() < b.degree().unwrap() {
        let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if b.degree().unwrap() == 0 {
        return sign * b.leading().pow(a.degree().unwrap() as u32);
    }
    // strip contents; res(c*A, B) = c^degB * res(A, B)
    let ca = a.content();
    let cb = b.content();
    let a0 = a.div_exact(&IntPoly::constant(ca.clone())).unwrap();
    let b0 = b.div_exact(&IntPoly::constant(cb.clone())).unwrap();
    let mut t = sign
        * ca.pow(b0.degree().unwrap() as u32)
        * cb.pow(a0.degree().unwrap() as u32);
    let mut a = a0;
    let mut b = b0;
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.degree().unwrap();
        let db = b.degree().unwrap();
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            t = -t;
        }
        let r = prem(&a, &b);
        if r.is_zero() {
            if db == 0 {
                // constant remainder sequence ended exactly at b
                break;
            }
            return BigInt::zero();
        }
        a = b;
        let div = &g * h.pow(delta);
        b = r
            .div_exact(&IntPoly::constant(div))
            .expect("subresultant division is exact");
        g = a.leading();
        // h = g^delta / h^(delta-1), exact
        h = if delta == 0 {
            h
        } else {
            let num = g.pow(delta);
            let den = h.pow(delta - 1);
            debug_assert!((&num % &den).is_zero());
            num / den
        };
        if b.degree().unwrap() == 0 {
            break;
        }
    }
    let da = a.degree().unwrap() as u32;
    // final correction: res = t * lc(b)^(deg a) / h^(deg a - 1)
    let num = b.leading().pow(da);
    let den = h.pow(da.saturating_sub(1));
    debug_assert!((&num % &den).is_zero());
    t * num / den
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let abs = c.abs();
            match i {
                0 => write!(f, "{abs}")?,
                1 => {
                    if abs.is_one() {
                        write!(f, "x")?
                    } else {
                        write!(f, "{abs}*x")?
                    }
                }
                _ => {
                    if abs.is_one() {
                        write!(f, "x^{i}")?
                    } else {
                        write!(f, "{abs}*x^{i}")?
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}
