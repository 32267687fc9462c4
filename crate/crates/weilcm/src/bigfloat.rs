//! Fixed-point real and complex arithmetic over big integers.
//!
//! A value is a `BigInt` mantissa at a fixed binary scale: `Fx { m, prec }`
//! represents m / 2^prec. All binary operations require matching scales.
//! Rounding is toward negative infinity on shifts, which is accounted for
//! by the generous slack used in the certification bounds of the callers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fx {
    m: BigInt,
    prec: u32,
}

impl Fx {
    pub fn zero(prec: u32) -> Self {
        Fx {
            m: BigInt::zero(),
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Fx {
            m: BigInt::one() << prec,
            prec,
        }
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Fx {
            m: v << prec,
            prec,
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Fx::from_bigint(&BigInt::from(v), prec)
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        Fx {
            m: (r.numer() << prec) / r.denom(),
            prec,
        }
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        let r = BigRational::from_float(v).expect("finite float");
        Fx::from_ratio(&r, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    fn check(&self, rhs: &Fx) {
        assert_eq!(self.prec, rhs.prec, "mixed fixed-point scales");
    }

    pub fn add(&self, rhs: &Fx) -> Fx {
        self.check(rhs);
        Fx {
            m: &self.m + &rhs.m,
            prec: self.prec,
        }
    }

    pub fn sub(&self, rhs: &Fx) -> Fx {
        self.check(rhs);
        Fx {
            m: &self.m - &rhs.m,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Fx {
        Fx {
            m: -&self.m,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Fx {
        Fx {
            m: self.m.abs(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, rhs: &Fx) -> Fx {
        self.check(rhs);
        Fx {
            m: (&self.m * &rhs.m) >> self.prec,
            prec: self.prec,
        }
    }

    pub fn div(&self, rhs: &Fx) -> Fx {
        self.check(rhs);
        assert!(!rhs.m.is_zero(), "division by zero");
        Fx {
            m: (&self.m << self.prec) / &rhs.m,
            prec: self.prec,
        }
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(&self) -> Fx {
        assert!(!self.m.is_negative(), "sqrt of negative value");
        Fx {
            m: (&self.m << self.prec).sqrt(),
            prec: self.prec,
        }
    }

    pub fn cmp_abs(&self, rhs: &Fx) -> std::cmp::Ordering {
        self.check(rhs);
        self.m.abs().cmp(&rhs.m.abs())
    }

    /// Nearest integer.
    pub fn round(&self) -> BigInt {
        let half = BigInt::one() << (self.prec - 1);
        (&self.m + half) >> self.prec
    }

    /// Nearest rational with the given denominator.
    pub fn round_with_denominator(&self, den: &BigInt) -> BigRational {
        let scaled = Fx {
            m: &self.m * den,
            prec: self.prec,
        };
        BigRational::new(scaled.round(), den.clone())
    }

    /// Distance from the nearest integer multiple of 1/den, as a fraction of
    /// that spacing in [0, 1/2]. Small values mean a confident rounding.
    pub fn rounding_slack(&self, den: &BigInt) -> f64 {
        let scaled = &self.m * den;
        let unit = BigInt::one() << self.prec;
        let rem = ((scaled % &unit) + &unit) % &unit;
        let frac = Fx {
            m: rem,
            prec: self.prec,
        }
        .to_f64();
        (frac - frac.round()).abs()
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.m.bits();
        if bits <= 1023 {
            return self.m.to_f64().unwrap_or(0.0) / 2f64.powi(self.prec as i32);
        }
        // keep the top 64 bits and track the exponent separately
        let shift = bits - 64;
        let top = (&self.m >> shift).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - self.prec as i32)
    }

    pub fn with_prec(&self, prec: u32) -> Fx {
        if prec >= self.prec {
            Fx {
                m: &self.m << (prec - self.prec),
                prec,
            }
        } else {
            Fx {
                m: &self.m >> (self.prec - prec),
                prec,
            }
        }
    }
}

/// Complex number in fixed-point coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cx {
    pub re: Fx,
    pub im: Fx,
}

impl Cx {
    pub fn new(re: Fx, im: Fx) -> Self {
        Cx { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Cx {
            re: Fx::zero(prec),
            im: Fx::zero(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Cx {
            re: Fx::one(prec),
            im: Fx::zero(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Cx {
            re: Fx::from_f64(re, prec),
            im: Fx::from_f64(im, prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn add(&self, rhs: &Cx) -> Cx {
        Cx {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }

    pub fn sub(&self, rhs: &Cx) -> Cx {
        Cx {
            re: self.re.sub(&rhs.re),
            im: self.im.sub(&rhs.im),
        }
    }

    pub fn neg(&self) -> Cx {
        Cx {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> Cx {
        Cx {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, rhs: &Cx) -> Cx {
        Cx {
            re: self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
            im: self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
        }
    }

    pub fn scale(&self, s: &Fx) -> Cx {
        Cx {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    pub fn abs2(&self) -> Fx {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> Fx {
        self.abs2().sqrt()
    }

    pub fn div(&self, rhs: &Cx) -> Cx {
        let d = rhs.abs2();
        let num = self.mul(&rhs.conj());
        Cx {
            re: num.re.div(&d),
            im: num.im.div(&d),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn with_prec(&self, prec: u32) -> Cx {
        Cx {
            re: self.re.with_prec(prec),
            im: self.im.with_prec(prec),
        }
    }
}

/// Horner evaluation of a polynomial with fixed-point complex coefficients.
pub fn eval_poly(coeffs: &[Cx], z: &Cx) -> Cx {
    let prec = z.prec();
    let mut acc = Cx::zero(prec);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_real_ops() {
        let prec = 128;
        let a = Fx::from_f64(1.5, prec);
        let b = Fx::from_f64(-2.25, prec);
        assert!((a.mul(&b).to_f64() + 3.375).abs() < 1e-30);
        assert!((a.div(&b).to_f64() + 2.0 / 3.0).abs() < 1e-30);
        let two = Fx::from_i64(2, prec);
        let s = two.sqrt();
        assert!((s.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((s.mul(&s).to_f64() - 2.0).abs() < 1e-30);
    }

    #[test]
    fn rounding() {
        let prec = 96;
        let x = Fx::from_f64(7.4999, prec);
        assert_eq!(x.round(), BigInt::from(7));
        let y = Fx::from_f64(-7.6, prec);
        assert_eq!(y.round(), BigInt::from(-8));
        let r = Fx::from_f64(2.3333333333, prec).round_with_denominator(&BigInt::from(3));
        assert_eq!(r, BigRational::new(BigInt::from(7), BigInt::from(3)));
    }

    #[test]
    fn complex_ops() {
        let prec = 128;
        let i = Cx::from_f64(0.0, 1.0, prec);
        let sq = i.mul(&i);
        assert!((sq.re.to_f64() + 1.0).abs() < 1e-30);
        assert!(sq.im.to_f64().abs() < 1e-30);
        let z = Cx::from_f64(3.0, 4.0, prec);
        assert!((z.abs().to_f64() - 5.0).abs() < 1e-25);
        let w = z.div(&i); // (3+4i)/i = 4 - 3i
        assert!((w.re.to_f64() - 4.0).abs() < 1e-25);
        assert!((w.im.to_f64() + 3.0).abs() < 1e-25);
    }

    #[test]
    fn poly_eval() {
        let prec = 128;
        // p(z) = z^2 + 1 at z = i is 0
        let coeffs = vec![Cx::one(prec), Cx::zero(prec), Cx::one(prec)];
        let z = Cx::from_f64(0.0, 1.0, prec);
        let v = eval_poly(&coeffs, &z);
        assert!(v.abs().to_f64() < 1e-30);
    }
}
