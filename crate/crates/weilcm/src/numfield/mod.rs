//! Exact arithmetic in number fields Q[x]/(f) for a monic integral
//! defining polynomial f, plus certified complex embeddings.
//!
//! Elements are coordinate vectors with respect to the power basis
//! 1, theta, ..., theta^(n-1) of the class of x. The implementation works
//! in the order Z[theta]; callers are responsible for staying away from
//! primes dividing the index, which the ramification checks enforce.

mod embeddings;

pub use embeddings::{ComplexRoot, EmbeddingSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{FpPoly, IntPoly, PrimeField, Residue};
use crate::{Error, Result};

/// A number field presented by a monic integral defining polynomial.
/// The polynomial is assumed irreducible over Q; squarefreeness is checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    poly: IntPoly,
    degree: usize,
    disc: BigInt,
}

/// Element coordinates with respect to the power basis. Plain data; all
/// operations go through the owning [`NumberField`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn from_int_coords(coords: Vec<BigInt>) -> Self {
        FieldElement {
            coords: coords.into_iter().map(BigRational::from_integer).collect(),
        }
    }

    pub fn from_i64_coords(coords: &[i64]) -> Self {
        FieldElement::from_int_coords(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.denom().is_one())
    }

    /// Integer coordinates; errors when any denominator is nontrivial.
    pub fn int_coords(&self) -> Result<Vec<BigInt>> {
        self.coords
            .iter()
            .map(|c| {
                if c.denom().is_one() {
                    Ok(c.numer().clone())
                } else {
                    Err(Error::NonIntegral)
                }
            })
            .collect()
    }
}

impl NumberField {
    pub fn new(poly: IntPoly) -> Result<Self> {
        if !poly.is_monic() {
            return Err(Error::Precondition(
                "defining polynomial must be monic".into(),
            ));
        }
        let degree = poly.degree().unwrap();
        if degree < 1 {
            return Err(Error::Precondition(
                "defining polynomial must be nonconstant".into(),
            ));
        }
        let disc = poly.discriminant();
        if disc.is_zero() {
            return Err(Error::Precondition(
                "defining polynomial must be squarefree".into(),
            ));
        }
        Ok(NumberField { poly, degree, disc })
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coords: vec![BigRational::zero(); self.degree],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut e = self.zero();
        e.coords[0] = BigRational::one();
        e
    }

    pub fn integer(&self, c: BigInt) -> FieldElement {
        let mut e = self.zero();
        e.coords[0] = BigRational::from_integer(c);
        e
    }

    /// The power-basis generator theta.
    pub fn generator(&self) -> FieldElement {
        let mut e = self.zero();
        if self.degree == 1 {
            // theta is rational: reduce x mod f
            e.coords[0] = BigRational::from_integer(-self.poly.coeff(0));
        } else {
            e.coords[1] = BigRational::one();
        }
        e
    }

    fn check(&self, a: &FieldElement) -> Result<()> {
        if a.coords.len() != self.degree {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| x + y)
                .collect(),
        })
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| x - y)
                .collect(),
        })
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        let mut prod = vec![BigRational::zero(); 2 * self.degree - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Ok(FieldElement {
            coords: self.reduce_coords(prod),
        })
    }

    /// Reduce a coordinate vector of length >= degree modulo the defining
    /// polynomial (monic, so this is integral long division).
    fn reduce_coords(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        let n = self.degree;
        for i in (n..v.len()).rev() {
            if v[i].is_zero() {
                continue;
            }
            let top = std::mem::replace(&mut v[i], BigRational::zero());
            for j in 0..n {
                let c = self.poly.coeff(j);
                if !c.is_zero() {
                    let delta = &top * BigRational::from_integer(c);
                    v[i - n + j] -= delta;
                }
            }
        }
        v.truncate(n);
        v
    }

    /// Multiplication on integer coordinate vectors, avoiding rational
    /// bookkeeping on hot paths.
    pub fn mul_int(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n = self.degree;
        let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        for i in (n..prod.len()).rev() {
            if prod[i].is_zero() {
                continue;
            }
            let top = std::mem::replace(&mut prod[i], BigInt::zero());
            for j in 0..n {
                let c = self.poly.coeff(j);
                if !c.is_zero() {
                    prod[i - n + j] -= &top * c;
                }
            }
        }
        prod.truncate(n);
        prod
    }

    /// Exact field norm N(a) as a rational number, via the resultant of the
    /// defining polynomial with the coordinate polynomial.
    pub fn norm(&self, a: &FieldElement) -> Result<BigRational> {
        self.check(a)?;
        let mut den = BigInt::one();
        for c in &a.coords {
            den = num_integer::lcm(den, c.denom().clone());
        }
        let int_coords: Vec<BigInt> = a
            .coords
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let num = self.norm_int(&int_coords);
        Ok(BigRational::new(num, den.pow(self.degree as u32)))
    }

    /// Norm of an element given by integer coordinates.
    pub fn norm_int(&self, coords: &[BigInt]) -> BigInt {
        let g = IntPoly::new(coords.to_vec());
        if g.is_zero() {
            return BigInt::zero();
        }
        self.poly.resultant(&g)
    }

    /// The monic minimal polynomial of a over Q, as rational coefficients
    /// (lowest degree first). Its degree divides the field degree, and a
    /// generates the field exactly when they are equal.
    pub fn minimal_polynomial(&self, a: &FieldElement) -> Result<Vec<BigRational>> {
        self.check(a)?;
        let n = self.degree;
        // rows of reduced powers a^0, a^1, ... with elimination bookkeeping
        let mut pivots: Vec<(usize, Vec<BigRational>, Vec<BigRational>)> = Vec::new();
        let mut power = self.one();
        for d in 0..=n {
            // express the current power in terms of earlier ones if possible
            let mut row = power.coords.clone();
            let mut combo = vec![BigRational::zero(); n + 1];
            combo[d] = BigRational::one();
            for (piv, prow, pcombo) in &pivots {
                if !row[*piv].is_zero() {
                    let c = row[*piv].clone();
                    for i in 0..n {
                        let delta = &c * &prow[i];
                        row[i] -= delta;
                    }
                    for i in 0..=n {
                        let delta = &c * &pcombo[i];
                        combo[i] -= delta;
                    }
                }
            }
            match row.iter().position(|c| !c.is_zero()) {
                Some(piv) => {
                    let inv = row[piv].clone();
                    for c in row.iter_mut() {
                        *c /= &inv;
                    }
                    for c in combo.iter_mut() {
                        *c /= &inv;
                    }
                    pivots.push((piv, row, combo));
                }
                None => {
                    // combo gives the relation sum combo[i] * a^i = 0 with
                    // combo[d] the leading coefficient
                    let lead = combo[d].clone();
                    let mut min: Vec<BigRational> =
                        combo[..=d].iter().map(|c| c / &lead).collect();
                    // normalize to monic (lead division already did)
                    min[d] = BigRational::one();
                    return Ok(min);
                }
            }
            power = self.mul(&power, a)?;
        }
        unreachable!("a relation of degree <= n always exists");
    }

    /// Degree of the minimal polynomial of a.
    pub fn element_degree(&self, a: &FieldElement) -> Result<usize> {
        Ok(self.minimal_polynomial(a)?.len() - 1)
    }

    /// Evaluate a rational-coefficient polynomial at a field element.
    pub fn eval_ratpoly(&self, coeffs: &[BigRational], x: &FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x)?;
            acc.coords[0] += c;
        }
        Ok(acc)
    }

    /// All roots of the defining polynomial modulo the prime r, sorted.
    /// Errors when r divides the discriminant of the defining polynomial.
    pub fn roots_mod_r(&self, r: &BigUint) -> Result<Vec<Residue>> {
        let rb = BigInt::from(r.clone());
        if (&self.disc % &rb).is_zero() {
            return Err(Error::RamifiedPrime(r.clone()));
        }
        let fp = PrimeField::new(r.clone());
        let fpoly: FpPoly = self
            .poly
            .coeffs()
            .iter()
            .map(|c| {
                let m = ((c % &rb) + &rb) % &rb;
                m.to_biguint().unwrap()
            })
            .collect();
        let fpoly = PrimeField::ptrim(fpoly);
        Ok(fp
            .roots(&fpoly)
            .into_iter()
            .map(|t| Residue::new(t, r.clone()))
            .collect())
    }

    /// Image of an integral element under the reduction map attached to a
    /// root t of the defining polynomial mod r.
    pub fn reduce_mod_root(&self, a: &FieldElement, t: &Residue) -> Result<Residue> {
        self.check(a)?;
        let coords = a.int_coords()?;
        Ok(self.reduce_int_mod_root(&coords, t))
    }

    pub fn reduce_int_mod_root(&self, coords: &[BigInt], t: &Residue) -> Residue {
        let r = t.modulus();
        let rb = BigInt::from(r.clone());
        let fp = PrimeField::new(r.clone());
        let mut acc = BigUint::zero();
        for c in coords.iter().rev() {
            let m = ((c % &rb) + &rb) % &rb;
            acc = fp.add(&fp.mul(&acc, t.value()), &m.to_biguint().unwrap());
        }
        Residue::new(acc, r.clone())
    }

    /// Reduction of an element with rational coordinates; errors when a
    /// coordinate denominator is not invertible mod r.
    pub fn reduce_rat_mod_root(&self, a: &FieldElement, t: &Residue) -> Result<Residue> {
        self.check(a)?;
        let r = t.modulus();
        let rb = BigInt::from(r.clone());
        let fp = PrimeField::new(r.clone());
        let mut acc = BigUint::zero();
        for c in a.coords.iter().rev() {
            let num = (((c.numer() % &rb) + &rb) % &rb).to_biguint().unwrap();
            let den = (c.denom() % &rb).to_biguint().unwrap();
            let den_inv = crate::arith::mod_inverse(&den, r)
                .ok_or_else(|| Error::NotInvertible(den, r.clone()))?;
            let m = fp.mul(&num, &den_inv);
            acc = fp.add(&fp.mul(&acc, t.value()), &m);
        }
        Ok(Residue::new(acc, r.clone()))
    }

    /// Certified complex embeddings at the requested precision.
    pub fn complex_embeddings(&self, precision_bits: u32) -> Result<EmbeddingSet> {
        EmbeddingSet::isolate(self, precision_bits)
    }

    /// Convenience: the rational norm of an element known to be integral,
    /// as a big integer.
    pub fn norm_integral(&self, a: &FieldElement) -> Result<BigInt> {
        let coords = a.int_coords()?;
        Ok(self.norm_int(&coords))
    }
}

/// Convert rational polynomial coefficients to an integer polynomial,
/// erroring when any coefficient has a nontrivial denominator.
pub fn ratpoly_to_intpoly(coeffs: &[BigRational]) -> Result<IntPoly> {
    let mut out = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        if !c.denom().is_one() {
            return Err(Error::NonIntegral);
        }
        out.push(c.numer().clone());
    }
    Ok(IntPoly::new(out))
}

/// Largest coordinate magnitude, used for precision budgeting.
pub fn coord_bits(coords: &[BigInt]) -> u64 {
    coords.iter().map(|c| c.abs().to_biguint().unwrap().bits()).max().unwrap_or(0)
}

#[allow(unused)]
fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests;
