use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{FieldElement, NumberField};
use crate::bigfloat::{eval_poly, Cx, Fx};
use crate::{Error, Result};

/// A certified enclosure of one root of the defining polynomial: the true
/// root lies within `radius` of `z`.
#[derive(Clone, Debug)]
pub struct ComplexRoot {
    pub z: Cx,
    pub radius: Fx,
}

impl ComplexRoot {
    /// Whether the enclosure certainly contains no real number.
    pub fn is_strictly_complex(&self) -> bool {
        self.z.im.abs().cmp_abs(&self.radius) == std::cmp::Ordering::Greater
    }
}

/// Certified, canonically ordered complex roots of a defining polynomial.
///
/// Order: conjugate pairs are adjacent with the positive-imaginary member
/// first; units (real roots and pairs) are sorted by real part, then by
/// absolute imaginary part.
#[derive(Clone, Debug)]
pub struct EmbeddingSet {
    precision_bits: u32,
    roots: Vec<ComplexRoot>,
}

impl EmbeddingSet {
    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn roots(&self) -> &[ComplexRoot] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn is_totally_complex(&self) -> bool {
        self.roots.iter().all(|r| r.is_strictly_complex())
    }

    /// Index of the conjugate partner of root i.
    pub fn conjugate_index(&self, i: usize) -> usize {
        if self.roots[i].is_strictly_complex() {
            if i % 2 == 0 {
                i + 1
            } else {
                i - 1
            }
        } else {
            i
        }
    }

    /// Index of the root whose enclosure is nearest to the given point.
    pub fn nearest_root(&self, z: &Cx) -> usize {
        let mut best = 0;
        let mut best_d: Option<Fx> = None;
        for (i, root) in self.roots.iter().enumerate() {
            let d = root.z.sub(&z.with_prec(root.z.prec())).abs2();
            if best_d.as_ref().is_none_or(|b| d.cmp_abs(b) == std::cmp::Ordering::Less) {
                best_d = Some(d);
                best = i;
            }
        }
        best
    }

    /// Evaluate an element at the i-th embedding, together with a bound on
    /// the total error (enclosure radius propagated through the polynomial
    /// plus fixed-point rounding slack).
    pub fn eval_element(&self, a: &FieldElement, i: usize) -> (Cx, Fx) {
        let prec = self.precision_bits;
        let root = &self.roots[i];
        let coeffs: Vec<Cx> = a
            .coords
            .iter()
            .map(|c| Cx::new(Fx::from_ratio(c, prec), Fx::zero(prec)))
            .collect();
        let value = eval_poly(&coeffs, &root.z);
        // |p(w) - p(z)| <= radius * P'(|z| + radius) with P the polynomial of
        // absolute coefficient values, plus a rounding fudge
        let zabs = root.z.abs().add(&root.radius);
        let mut deriv = Fx::zero(prec);
        for (k, c) in a.coords.iter().enumerate().skip(1) {
            let mag = Fx::from_ratio(&c.abs(), prec).mul(&Fx::from_i64(k as i64, prec));
            let mut pw = Fx::one(prec);
            for _ in 0..k - 1 {
                pw = pw.mul(&zabs);
            }
            deriv = deriv.add(&mag.mul(&pw));
        }
        let mut bound = root.radius.mul(&deriv);
        // rounding slack: a few ulps per operation, scaled to the magnitude
        let scale = value.abs().add(&Fx::one(prec));
        let ulps = Fx::from_i64(1 << 16, prec).mul(&scale);
        let ulps = Fx::from_ratio(
            &BigRational::new(ulps.mantissa().clone(), BigInt::from(1) << (2 * prec as usize)),
            prec,
        );
        bound = bound.add(&ulps);
        (value, bound)
    }

    pub(super) fn isolate(field: &NumberField, precision_bits: u32) -> Result<EmbeddingSet> {
        let precision_bits = precision_bits.max(64);
        let mut prec = precision_bits + 64;
        for _ in 0..4 {
            match try_isolate(field, prec, precision_bits) {
                Ok(set) => return Ok(set),
                Err(_) => prec *= 2,
            }
        }
        Err(Error::RootIsolation(prec))
    }
}

fn try_isolate(field: &NumberField, prec: u32, report_prec: u32) -> Result<EmbeddingSet> {
    let n = field.degree();
    let fcoeffs: Vec<f64> = field
        .poly()
        .coeffs()
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::MAX))
        .collect();
    let seeds = durand_kerner(&fcoeffs);
    if seeds.len() != n {
        return Err(Error::RootIsolation(prec));
    }

    let coeffs: Vec<Cx> = field
        .poly()
        .coeffs()
        .iter()
        .map(|c| Cx::new(Fx::from_bigint(c, prec), Fx::zero(prec)))
        .collect();
    let dcoeffs: Vec<Cx> = field
        .poly()
        .derivative()
        .coeffs()
        .iter()
        .map(|c| Cx::new(Fx::from_bigint(c, prec), Fx::zero(prec)))
        .collect();

    // Newton refinement roughly doubles correct bits per step
    let newton_steps = 33 - (prec.leading_zeros().min(26)) + 6;
    let mut roots = Vec::with_capacity(n);
    for seed in seeds {
        let mut z = Cx::from_f64(seed.re, seed.im, prec);
        for _ in 0..newton_steps {
            let fv = eval_poly(&coeffs, &z);
            let dv = eval_poly(&dcoeffs, &z);
            if dv.is_zero() {
                return Err(Error::RootIsolation(prec));
            }
            z = z.sub(&fv.div(&dv));
        }
        // certified radius: a disk of radius n*|f(z)/f'(z)| around z
        // contains a root of f
        let fv = eval_poly(&coeffs, &z);
        let dv = eval_poly(&dcoeffs, &z);
        if dv.is_zero() {
            return Err(Error::RootIsolation(prec));
        }
        let mut radius = fv.div(&dv).abs().mul(&Fx::from_i64(n as i64, prec));
        // inflate slightly to absorb fixed-point rounding
        radius = radius.add(&Fx::from_ratio(
            &BigRational::new(BigInt::from(1), BigInt::from(1) << (prec as usize / 2)),
            prec,
        ));
        roots.push(ComplexRoot { z, radius });
    }

    // pairwise disjointness certifies one root per disk
    for i in 0..n {
        for j in i + 1..n {
            let d = roots[i].z.sub(&roots[j].z).abs();
            let rr = roots[i].radius.add(&roots[j].radius);
            if d.cmp_abs(&rr) != std::cmp::Ordering::Greater {
                return Err(Error::RootIsolation(prec));
            }
        }
    }

    // canonical order: group conjugate pairs, positive-imaginary first
    let mut used = vec![false; n];
    let mut units: Vec<Vec<ComplexRoot>> = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        if !roots[i].is_strictly_complex() {
            units.push(vec![roots[i].clone()]);
            continue;
        }
        // find the conjugate partner
        let conj = roots[i].z.conj();
        let mut partner = None;
        for (j, other) in roots.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = other.z.sub(&conj).abs();
            if d.cmp_abs(&roots[i].radius.add(&other.radius)) != std::cmp::Ordering::Greater {
                partner = Some(j);
                break;
            }
        }
        let j = partner.ok_or(Error::RootIsolation(prec))?;
        used[j] = true;
        let (pos, neg) = if roots[i].z.im.is_negative() {
            (roots[j].clone(), roots[i].clone())
        } else {
            (roots[i].clone(), roots[j].clone())
        };
        units.push(vec![pos, neg]);
    }
    units.sort_by(|a, b| {
        let ka = (&a[0].z.re, a[0].z.im.abs());
        let kb = (&b[0].z.re, b[0].z.im.abs());
        ka.0.mantissa()
            .cmp(kb.0.mantissa())
            .then(ka.1.mantissa().cmp(kb.1.mantissa()))
    });
    let mut ordered = Vec::with_capacity(n);
    for unit in units {
        for r in unit {
            ordered.push(ComplexRoot {
                z: r.z.with_prec(report_prec),
                radius: enlarge_for_downshift(&r.radius, report_prec),
            });
        }
    }
    Ok(EmbeddingSet {
        precision_bits: report_prec,
        roots: ordered,
    })
}

fn enlarge_for_downshift(r: &Fx, prec: u32) -> Fx {
    // rescaling can lose up to one ulp at the new scale
    let shifted = r.with_prec(prec);
    shifted.add(&Fx::from_ratio(
        &BigRational::new(BigInt::from(4), BigInt::from(1) << (prec as usize)),
        prec,
    ))
}

/// Simultaneous f64 root iteration used only to seed Newton refinement.
fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return vec![];
    }
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    // radius bound: 1 + max |c_i| (monic)
    let radius = 1.0 + coeffs[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut zs: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.3;
            Complex64::from_polar(radius.powf(0.5 + 0.4 * (k as f64) / (n as f64).max(1.0)), angle)
        })
        .collect();
    for _ in 0..600 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= zs[i] - zs[j];
                }
            }
            if denom.norm() == 0.0 {
                zs[i] += Complex64::new(1e-6, 1e-6);
                continue;
            }
            let step = eval(zs[i]) / denom;
            zs[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 {
            break;
        }
    }
    zs
}
