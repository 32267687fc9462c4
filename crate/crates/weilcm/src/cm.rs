//! CM-fields from supported families, their CM-types, reflex fields and
//! reflex types, and type norms.
//!
//! Supported families: cyclotomic fields with cyclic Galois group, cyclic
//! quartic fields, and non-Galois quartic fields Q(sqrt(-a+b*sqrt(d))).
//! These cover every input the rest of the crate needs; general CM-fields
//! would require Galois-closure arithmetic in much higher degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::{factor_u64, Residue};
use crate::bigfloat::Cx;
use crate::numfield::{coord_bits, ratpoly_to_intpoly, EmbeddingSet, FieldElement, NumberField};
use crate::arith::IntPoly;
use crate::{Error, Result};

/// Precision at which canonical embeddings are cached on construction.
pub const DEFAULT_EMBED_PREC: u32 = 192;

/// The supported CM-field families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Q(zeta_m) with cyclic Galois group, generated by zeta -> zeta^a.
    CyclotomicGalois { m: u64, generator: u64 },
    /// Q(sqrt(-a+b*sqrt(d))), cyclic quartic ((a^2-b^2 d)/d a square).
    QuarticCyclic { a: i64, b: i64, d: i64 },
    /// Q(sqrt(-a+b*sqrt(d))), non-Galois quartic.
    QuarticNonGalois { a: i64, b: i64, d: i64 },
}

/// A CM-field K of degree 2g with its complex conjugation, real subfield
/// generator, family data, and cached canonical embeddings.
#[derive(Clone, Debug)]
pub struct CMFieldSpec {
    field: NumberField,
    g: usize,
    family: Family,
    conj_image: FieldElement,
    real_gen: FieldElement,
    /// Images of theta under sigma^j for the Galois families (sigma a fixed
    /// generator of the Galois group); None for the non-Galois family.
    automorphisms: Option<Vec<FieldElement>>,
    embeddings: EmbeddingSet,
    /// exponent j -> canonical embedding index of phi_0 . sigma^j
    exp_to_idx: Option<Vec<usize>>,
    idx_to_exp: Option<Vec<usize>>,
}

/// A CM-type: one embedding chosen from each complex-conjugate pair.
#[derive(Clone, Debug)]
pub struct CMTypeData {
    pub spec: CMFieldSpec,
    /// Canonical embedding indices, sorted, exactly one per conjugate pair.
    pub selected: Vec<usize>,
}

/// A CM-type together with its primitivity flag and equivalence class
/// (under composition with field automorphisms).
#[derive(Clone, Debug)]
pub struct CMTypeInfo {
    pub data: CMTypeData,
    pub primitive: bool,
    pub class: usize,
}

#[derive(Clone, Debug)]
enum ReflexKind {
    /// psi_i = sigma^{e_i} on the same field; exponents sorted.
    Galois { psi_exponents: Vec<usize> },
    /// Quartic non-Galois path: the type norm is reconstructed numerically.
    /// `swap_other_pair` pins which member of the second conjugate pair of
    /// K's embeddings receives the cross product psi_1(x)*conj(psi_2)(x).
    NonGalois { swap_other_pair: bool },
}

/// The reflex (K-hat, Psi) of a primitive CM-type, with enough data to
/// evaluate the type norm exactly and to label roots mod r.
#[derive(Clone, Debug)]
pub struct ReflexData {
    pub base: CMTypeData,
    pub reflex_field: CMFieldSpec,
    /// Canonical embedding indices of Psi in the reflex field.
    pub reflex_selected: Vec<usize>,
    kind: ReflexKind,
}

impl CMFieldSpec {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn degree(&self) -> usize {
        2 * self.g
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn embeddings(&self) -> &EmbeddingSet {
        &self.embeddings
    }

    /// Image of theta under complex conjugation, as an element.
    pub fn conjugation_image(&self) -> &FieldElement {
        &self.conj_image
    }

    pub fn real_subfield_gen(&self) -> &FieldElement {
        &self.real_gen
    }

    pub fn is_galois(&self) -> bool {
        self.automorphisms.is_some()
    }

    /// Apply complex conjugation to an element.
    pub fn conjugate(&self, x: &FieldElement) -> Result<FieldElement> {
        self.field.eval_ratpoly(&x.coords, &self.conj_image)
    }

    /// Apply sigma^j (Galois families only).
    pub fn apply_automorphism(&self, j: usize, x: &FieldElement) -> Result<FieldElement> {
        let autos = self
            .automorphisms
            .as_ref()
            .ok_or_else(|| Error::Precondition("field is not Galois".into()))?;
        let n = autos.len();
        self.field.eval_ratpoly(&x.coords, &autos[j % n])
    }

    /// Canonical embedding index of phi_0 composed with sigma^j.
    pub fn index_of_exponent(&self, j: usize) -> usize {
        let map = self.exp_to_idx.as_ref().expect("Galois family");
        map[j % map.len()]
    }

    /// Automorphism exponent of the embedding with canonical index i.
    pub fn exponent_of_index(&self, i: usize) -> usize {
        self.idx_to_exp.as_ref().expect("Galois family")[i]
    }

    /// A CM-field Q(zeta_m) for m with cyclic unit group (m = 4, p^e, 2p^e).
    pub fn make_cyclotomic_cm(m: u64) -> Result<CMFieldSpec> {
        if m < 3 {
            return Err(Error::Precondition(
                "cyclotomic modulus must be at least 3".into(),
            ));
        }
        if m > 1000 {
            return Err(Error::Precondition(
                "cyclotomic modulus too large".into(),
            ));
        }
        let n = crate::arith::euler_phi(m) as usize;
        let generator = (2..m)
            .filter(|&a| gcd_u64(a, m) == 1)
            .find(|&a| order_mod(a, m) == n as u64)
            .ok_or_else(|| {
                Error::Precondition(format!("(Z/{m}Z)* is not cyclic"))
            })?;
        let field = NumberField::new(crate::arith::cyclotomic_polynomial(m))?;
        debug_assert_eq!(field.degree(), n);
        let g = n / 2;
        // sigma: theta -> theta^generator; its powers enumerate the group
        let theta = field.generator();
        let sigma_image = int_power(&field, &theta, generator);
        let mut automorphisms = Vec::with_capacity(n);
        automorphisms.push(theta.clone());
        for j in 1..n {
            let prev = &automorphisms[j - 1];
            automorphisms.push(field.eval_ratpoly(&sigma_image.coords, prev)?);
        }
        let conj_image = int_power(&field, &theta, m - 1);
        let real_gen = field.add(&theta, &conj_image)?;
        Self::finish_galois(
            field,
            g,
            Family::CyclotomicGalois { m, generator },
            conj_image,
            real_gen,
            automorphisms,
        )
    }

    /// A quartic CM-field Q(sqrt(-a+b*sqrt(d))) with defining polynomial
    /// x^4 + 2a x^2 + (a^2 - b^2 d). Requires d >= 2 squarefree, b nonzero,
    /// and both -a+b*sqrt(d), -a-b*sqrt(d) negative. Biquadratic fields
    /// (a^2 - b^2 d a perfect square) are rejected as imprimitive.
    pub fn make_quartic_cm(a: i64, b: i64, d: i64) -> Result<CMFieldSpec> {
        if d < 2 {
            return Err(Error::Precondition(
                "d must be a squarefree integer >= 2".into(),
            ));
        }
        if factor_u64(d as u64).iter().any(|&(_, e)| e > 1) {
            return Err(Error::Precondition("d must be squarefree".into()));
        }
        if b == 0 {
            return Err(Error::Precondition(
                "b must be nonzero (field would be biquadratic or degenerate)".into(),
            ));
        }
        let q = (a as i128) * (a as i128) - (b as i128) * (b as i128) * (d as i128);
        // -a +- b sqrt(d) both negative <=> a > 0 and a^2 > b^2 d
        if a <= 0 || q <= 0 {
            return Err(Error::Precondition(
                "field is not totally imaginary".into(),
            ));
        }
        let qd = q * d as i128;
        let cyclic = is_square_i128(qd);
        if is_square_i128(q) {
            return Err(Error::Precondition(
                "biquadratic field rejected (a^2 - b^2 d is a square)".into(),
            ));
        }
        let q64 = i64::try_from(q).map_err(|_| {
            Error::Precondition("quartic parameters too large".into())
        })?;
        let field = NumberField::new(IntPoly::from_i64(&[q64, 0, 2 * a, 0, 1]))?;
        let theta = field.generator();
        let conj_image = field.neg(&theta);
        let real_gen = field.mul(&theta, &theta)?;
        if cyclic {
            // sigma(theta) = s (theta^2 + a) / (b theta) with s^2 = q/d;
            // 1/theta = -(theta^3 + 2a theta)/q
            let s = BigRational::new(BigInt::from(isqrt_i128(qd)), BigInt::from(d));
            let theta2 = field.mul(&theta, &theta)?;
            let theta3 = field.mul(&theta2, &theta)?;
            let mut inv_theta = field.add(
                &theta3,
                &scale(&theta, &BigRational::from_integer(BigInt::from(2 * a))),
            )?;
            inv_theta = scale(
                &inv_theta,
                &BigRational::new(BigInt::from(-1), BigInt::from(q64)),
            );
            let mut shifted = theta2.clone();
            shifted.coords[0] += BigRational::from_integer(BigInt::from(a));
            let mut sigma_image = field.mul(&shifted, &inv_theta)?;
            sigma_image = scale(
                &sigma_image,
                &(&s / BigRational::from_integer(BigInt::from(b))),
            );
            // sigma must have order 4 with sigma^2 = conjugation
            let sq = field.eval_ratpoly(&sigma_image.coords, &sigma_image)?;
            let sigma_image = if sq == conj_image {
                sigma_image
            } else {
                let flipped = field.neg(&sigma_image);
                let sq = field.eval_ratpoly(&flipped.coords, &flipped)?;
                if sq != conj_image {
                    return Err(Error::Precondition(
                        "failed to realize the cyclic quartic automorphism".into(),
                    ));
                }
                flipped
            };
            let mut automorphisms = vec![theta.clone()];
            for j in 1..4 {
                let prev = automorphisms[j - 1].clone();
                automorphisms.push(field.eval_ratpoly(&sigma_image.coords, &prev)?);
            }
            Self::finish_galois(
                field,
                2,
                Family::QuarticCyclic { a, b, d },
                conj_image,
                real_gen,
                automorphisms,
            )
        } else {
            let embeddings = field.complex_embeddings(DEFAULT_EMBED_PREC)?;
            let spec = CMFieldSpec {
                field,
                g: 2,
                family: Family::QuarticNonGalois { a, b, d },
                conj_image,
                real_gen,
                automorphisms: None,
                embeddings,
                exp_to_idx: None,
                idx_to_exp: None,
            };
            spec.check_invariants()?;
            Ok(spec)
        }
    }

    fn finish_galois(
        field: NumberField,
        g: usize,
        family: Family,
        conj_image: FieldElement,
        real_gen: FieldElement,
        automorphisms: Vec<FieldElement>,
    ) -> Result<CMFieldSpec> {
        let n = 2 * g;
        // closure check: sigma^n = identity
        let back = field.eval_ratpoly(
            &automorphisms[1].coords,
            &automorphisms[n - 1],
        )?;
        if back != field.generator() {
            return Err(Error::Precondition(
                "automorphism does not generate a cyclic group of the right order".into(),
            ));
        }
        if n > 2 && automorphisms[g] != conj_image {
            return Err(Error::Precondition(
                "sigma^g is not complex conjugation".into(),
            ));
        }
        let embeddings = field.complex_embeddings(DEFAULT_EMBED_PREC)?;
        // map exponents to canonical embedding indices via phi_0
        let mut exp_to_idx = vec![0usize; n];
        let mut seen = vec![false; n];
        for (j, u) in automorphisms.iter().enumerate() {
            let (val, _) = embeddings.eval_element(u, 0);
            let idx = embeddings.nearest_root(&val);
            exp_to_idx[j] = idx;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::Precondition(
                    "automorphism images do not permute the embeddings".into(),
                ));
            }
        }
        let mut idx_to_exp = vec![0usize; n];
        for (j, &i) in exp_to_idx.iter().enumerate() {
            idx_to_exp[i] = j;
        }
        let spec = CMFieldSpec {
            field,
            g,
            family,
            conj_image,
            real_gen,
            automorphisms: Some(automorphisms),
            embeddings,
            exp_to_idx: Some(exp_to_idx),
            idx_to_exp: Some(idx_to_exp),
        };
        spec.check_invariants()?;
        Ok(spec)
    }

    fn check_invariants(&self) -> Result<()> {
        // conjugation is an involution
        let theta = self.field.generator();
        let twice = self.conjugate(&self.conjugate(&theta)?)?;
        if twice != theta {
            return Err(Error::Precondition(
                "conjugation is not an involution".into(),
            ));
        }
        if !self.embeddings.is_totally_complex() {
            return Err(Error::Precondition(
                "field is not totally complex".into(),
            ));
        }
        // real subfield generator: minimal polynomial of degree g, all real
        let mp = self.field.minimal_polynomial(&self.real_gen)?;
        if mp.len() - 1 != self.g {
            return Err(Error::Precondition(
                "real subfield generator has the wrong degree".into(),
            ));
        }
        let mp_int = ratpoly_to_intpoly(&mp)?;
        if self.g > 1 {
            let real_field = NumberField::new(mp_int)?;
            let emb = real_field.complex_embeddings(96)?;
            if emb.roots().iter().any(|r| r.is_strictly_complex()) {
                return Err(Error::Precondition(
                    "real subfield generator is not totally real".into(),
                ));
            }
        }
        Ok(())
    }

    /// Parse `cyclotomic:<m>` or `quartic:<a>,<b>,<d>`.
    pub fn parse(s: &str) -> Result<CMFieldSpec> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("malformed field spec '{s}'")))?;
        match kind {
            "cyclotomic" => {
                let m: u64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad cyclotomic modulus '{rest}'")))?;
                CMFieldSpec::make_cyclotomic_cm(m)
            }
            "quartic" => {
                let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(
                        "quartic spec needs three integers a,b,d".into(),
                    ));
                }
                let vals: Vec<i64> = parts
                    .iter()
                    .map(|p| {
                        p.parse()
                            .map_err(|_| Error::Parse(format!("bad integer '{p}'")))
                    })
                    .collect::<Result<_>>()?;
                CMFieldSpec::make_quartic_cm(vals[0], vals[1], vals[2])
            }
            _ => Err(Error::Parse(format!("unknown field family '{kind}'"))),
        }
    }
}

fn scale(x: &FieldElement, s: &BigRational) -> FieldElement {
    FieldElement {
        coords: x.coords.iter().map(|c| c * s).collect(),
    }
}

fn int_power(field: &NumberField, x: &FieldElement, e: u64) -> FieldElement {
    let mut acc = field.one();
    for _ in 0..e {
        acc = field.mul(&acc, x).expect("same field");
    }
    acc
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn order_mod(a: u64, m: u64) -> u64 {
    let mut x = a % m;
    let mut ord = 1;
    while x != 1 {
        x = x * a % m;
        ord += 1;
        if ord > m {
            return 0;
        }
    }
    ord
}

fn isqrt_i128(v: i128) -> i128 {
    let mut r = (v as f64).sqrt() as i128;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

fn is_square_i128(v: i128) -> bool {
    if v < 0 {
        return false;
    }
    let r = isqrt_i128(v);
    r * r == v
}

/// All 2^g CM-types of the field, flagged primitive/imprimitive and grouped
/// into equivalence classes under composition with field automorphisms
/// (the full cyclic Galois group for Galois families, {id, conjugation}
/// otherwise).
pub fn enumerate_cm_types(spec: &CMFieldSpec) -> Vec<CMTypeInfo> {
    let g = spec.g();
    let mut types = Vec::with_capacity(1 << g);
    for mask in 0u32..(1 << g) {
        let selected: Vec<usize> = (0..g)
            .map(|i| 2 * i + ((mask >> i) & 1) as usize)
            .collect();
        types.push(CMTypeData {
            spec: spec.clone(),
            selected,
        });
    }
    // group into classes by canonical orbit representative
    let mut reps: Vec<Vec<usize>> = Vec::new();
    let mut infos = Vec::with_capacity(types.len());
    for t in types {
        let rep = orbit_representative(&t);
        let class = match reps.iter().position(|r| *r == rep) {
            Some(i) => i,
            None => {
                reps.push(rep);
                reps.len() - 1
            }
        };
        let primitive = is_primitive(&t);
        infos.push(CMTypeInfo {
            data: t,
            primitive,
            class,
        });
    }
    infos
}

fn orbit_representative(t: &CMTypeData) -> Vec<usize> {
    let spec = &t.spec;
    let n = spec.degree();
    if spec.is_galois() {
        // orbit under S -> S + j in exponent space
        let s: Vec<usize> = t
            .selected
            .iter()
            .map(|&i| spec.exponent_of_index(i))
            .collect();
        let mut best: Option<Vec<usize>> = None;
        for j in 0..n {
            let mut shifted: Vec<usize> = s.iter().map(|&e| (e + j) % n).collect();
            shifted.sort_unstable();
            if best.as_ref().is_none_or(|b| shifted < *b) {
                best = Some(shifted);
            }
        }
        best.unwrap()
    } else {
        // orbit under {id, conjugation}
        let mut conj: Vec<usize> = t
            .selected
            .iter()
            .map(|&i| spec.embeddings().conjugate_index(i))
            .collect();
        conj.sort_unstable();
        let mut own = t.selected.clone();
        own.sort_unstable();
        own.min(conj)
    }
}

/// Whether the CM-type is primitive (not induced from a proper CM-subfield).
/// For cyclic Galois groups this tests stability of the exponent set under
/// every nontrivial subgroup; quartic non-biquadratic types are always
/// primitive.
pub fn is_primitive(t: &CMTypeData) -> bool {
    let spec = &t.spec;
    if !spec.is_galois() {
        return true;
    }
    let n = spec.degree();
    let s: std::collections::BTreeSet<usize> = t
        .selected
        .iter()
        .map(|&i| spec.exponent_of_index(i))
        .collect();
    // S is stable under the subgroup generated by m iff S + m = S
    for m in 1..n {
        if n % m != 0 || m == n {
            continue;
        }
        if m == 1 && n == 1 {
            continue;
        }
        // subgroup {0, m, 2m, ...} is nontrivial iff m < n
        let shifted: std::collections::BTreeSet<usize> =
            s.iter().map(|&e| (e + m) % n).collect();
        if shifted == s {
            return false;
        }
    }
    true
}

/// Reduce (A, B, D) describing sqrt(-A + B*sqrt(D)) so that D is squarefree
/// and no square factor k^2 divides both A and B.
fn reduce_quartic_params(mut a: i128, mut b: i128, mut d: i128) -> (i64, i64, i64) {
    // push square factors of D into B
    for (p, e) in factor_u64(d as u64) {
        if e >= 2 {
            let k = (p as i128).pow((e / 2) as u32);
            b *= k;
            d /= k * k;
        }
    }
    // pull out common square factors k^2 | A, k^2 | B
    let mut k = 2i128;
    while k * k * k * k <= a * a + b * b + 1 {
        while a % (k * k) == 0 && b % (k * k) == 0 {
            a /= k * k;
            b /= k * k;
        }
        k += 1;
    }
    (a as i64, b as i64, d as i64)
}

/// The reflex (K-hat, Psi) of a primitive CM-type.
pub fn reflex(t: &CMTypeData) -> Result<ReflexData> {
    if !is_primitive(t) {
        return Err(Error::Precondition(
            "reflex of an imprimitive CM-type is not supported".into(),
        ));
    }
    let spec = &t.spec;
    if spec.is_galois() {
        let n = spec.degree();
        let mut psi_exponents: Vec<usize> = t
            .selected
            .iter()
            .map(|&i| (n - spec.exponent_of_index(i)) % n)
            .collect();
        psi_exponents.sort_unstable();
        let mut reflex_selected: Vec<usize> = psi_exponents
            .iter()
            .map(|&e| spec.index_of_exponent(e))
            .collect();
        reflex_selected.sort_unstable();
        Ok(ReflexData {
            base: t.clone(),
            reflex_field: spec.clone(),
            reflex_selected,
            kind: ReflexKind::Galois { psi_exponents },
        })
    } else {
        let (a, b, d) = match spec.family() {
            Family::QuarticNonGalois { a, b, d } => (*a, *b, *d),
            _ => unreachable!(),
        };
        // K-hat = Q(sqrt(-2a + 2 sqrt(a^2 - b^2 d))), reduced
        let q = (a as i128) * (a as i128) - (b as i128) * (b as i128) * (d as i128);
        let (ra, rb, rd) = reduce_quartic_params(2 * a as i128, 2, q);
        let reflex_field = CMFieldSpec::make_quartic_cm(ra, rb, rd)?;
        let mut data = ReflexData {
            base: t.clone(),
            reflex_field,
            reflex_selected: vec![0, 2],
            kind: ReflexKind::NonGalois {
                swap_other_pair: false,
            },
        };
        data.calibrate_nongalois()?;
        Ok(data)
    }
}

impl ReflexData {
    /// Dimension of the reflex: half the degree of K-hat.
    pub fn g_hat(&self) -> usize {
        self.reflex_field.g()
    }

    /// For Galois types, the automorphism exponents of Psi (sorted); None
    /// on the non-Galois quartic path.
    pub fn psi_exponents(&self) -> Option<&[usize]> {
        match &self.kind {
            ReflexKind::Galois { psi_exponents } => Some(psi_exponents),
            ReflexKind::NonGalois { .. } => None,
        }
    }

    /// The type norm N_Psi: K-hat -> K on an integral element.
    pub fn type_norm(&self, xi: &FieldElement) -> Result<FieldElement> {
        if !xi.is_integral() {
            return Err(Error::NonIntegral);
        }
        match &self.kind {
            ReflexKind::Galois { psi_exponents } => {
                let k = &self.base.spec;
                let mut acc = k.field().one();
                for &e in psi_exponents {
                    let img = k.apply_automorphism(e, xi)?;
                    acc = k.field().mul(&acc, &img)?;
                }
                Ok(acc)
            }
            ReflexKind::NonGalois { swap_other_pair } => {
                self.type_norm_numeric(xi, *swap_other_pair)
            }
        }
    }

    /// Numeric type-norm path: evaluate the product of the Psi-embeddings
    /// of xi, reconstruct exact coordinates in K against K's embeddings,
    /// and verify pi * conj(pi) = Norm(xi) exactly. Works for all families;
    /// the Galois families use it only as a cross-check.
    pub fn type_norm_numeric(&self, xi: &FieldElement, swap: bool) -> Result<FieldElement> {
        if !xi.is_integral() {
            return Err(Error::NonIntegral);
        }
        let bits = coord_bits(&xi.int_coords()?) as u32;
        let ghat = self.g_hat() as u32;
        let disc_bits = self.base.spec.field().disc().bits() as u32;
        let mut prec = 160 + 2 * ghat * (bits + 16) + disc_bits;
        for _ in 0..5 {
            match self.try_reconstruct(xi, swap, prec) {
                Ok(pi) => return Ok(pi),
                Err(Error::RootIsolation(_)) | Err(Error::PrecisionExhausted) => prec *= 2,
                Err(e) => return Err(e),
            }
        }
        Err(Error::PrecisionExhausted)
    }

    fn try_reconstruct(&self, xi: &FieldElement, swap: bool, prec: u32) -> Result<FieldElement> {
        let khat = &self.reflex_field;
        let k = self.base.spec.field();
        let emb_hat = khat.field().complex_embeddings(prec)?;
        let emb_k = k.complex_embeddings(prec)?;
        let n = k.degree();

        // the embedding images of pi = prod_{psi} psi(xi)
        let values: Vec<Cx> = if khat.is_galois() {
            // value at the embedding of exponent j is prod over psi-shifts
            let psi = match &self.kind {
                ReflexKind::Galois { psi_exponents } => psi_exponents.clone(),
                _ => unreachable!(),
            };
            let m = khat.degree();
            (0..n)
                .map(|i| {
                    let j = khat.exponent_of_index(i);
                    let mut acc = Cx::one(prec);
                    for &e in &psi {
                        let idx = khat.index_of_exponent((j + e) % m);
                        let (v, _) = emb_hat.eval_element(xi, idx);
                        acc = acc.mul(&v);
                    }
                    acc
                })
                .collect()
        } else {
            let (p1, p2) = (self.reflex_selected[0], self.reflex_selected[1]);
            let (a1, _) = emb_hat.eval_element(xi, p1);
            let (a2, _) = emb_hat.eval_element(xi, p2);
            let (a2c, _) = emb_hat.eval_element(xi, emb_hat.conjugate_index(p2));
            let v = a1.mul(&a2);
            let w = a1.mul(&a2c);
            let (w_pos, w_neg) = if swap {
                (w.conj(), w)
            } else {
                (w.clone(), w.conj())
            };
            vec![v.clone(), v.conj(), w_pos, w_neg]
        };

        // solve the Vandermonde system sum_i c_i z_j^i = values[j]
        let mut mat = Vec::with_capacity(n);
        for root in emb_k.roots() {
            let mut row = Vec::with_capacity(n);
            let mut p = Cx::one(prec);
            for _ in 0..n {
                row.push(p.clone());
                p = p.mul(&root.z);
            }
            mat.push(row);
        }
        let sol = solve_complex(mat, values.clone())?;

        // round to rationals with denominator dividing |disc|
        let den = k.disc().abs();
        let mut coords = Vec::with_capacity(n);
        for c in &sol {
            if c.re.rounding_slack(&den) > 0.25 || c.im.rounding_slack(&den) > 0.25 {
                return Err(Error::PrecisionExhausted);
            }
            let im = c.im.round_with_denominator(&den);
            if !im.is_zero() {
                return Err(Error::PrecisionExhausted);
            }
            coords.push(c.re.round_with_denominator(&den));
        }
        let pi = FieldElement { coords };

        // exact verification: pi * conj(pi) = Norm_{K-hat/Q}(xi) in K
        let conj_pi = self.base.spec.conjugate(&pi)?;
        let prod = k.mul(&pi, &conj_pi)?;
        let norm = khat.field().norm_integral(xi)?;
        if prod != k.integer(norm) {
            return Err(Error::PrecisionExhausted);
        }
        Ok(pi)
    }

    /// Pin the embedding correspondence for the non-Galois family by
    /// requiring numeric reconstruction to succeed on test elements. Both
    /// the choice of conjugate pair completing Psi and the orientation of
    /// the matching cross product are free a priori; exactly one combination
    /// (up to an overall conjugation) reconstructs rational coordinates.
    fn calibrate_nongalois(&mut self) -> Result<()> {
        for salt in 1i64..6 {
            let test = {
                let khat = self.reflex_field.field();
                let theta = khat.generator();
                let t2 = khat.mul(&theta, &theta)?;
                let t3 = khat.mul(&t2, &theta)?;
                let mut test = khat.add(
                    &scale(&t3, &BigRational::from_integer(BigInt::from(salt))),
                    &t2,
                )?;
                test = khat.add(&test, &theta)?;
                test.coords[0] += BigRational::from_integer(BigInt::from(2 + salt));
                test
            };
            let mut working = Vec::new();
            for psi_second in [2usize, 3] {
                for swap in [false, true] {
                    self.reflex_selected = vec![0, psi_second];
                    if self.type_norm_numeric(&test, swap).is_ok() {
                        working.push((psi_second, swap));
                    }
                }
            }
            if working.len() == 1 {
                let (psi_second, swap) = working[0];
                self.reflex_selected = vec![0, psi_second];
                self.kind = ReflexKind::NonGalois {
                    swap_other_pair: swap,
                };
                return Ok(());
            }
        }
        Err(Error::Precondition(
            "could not pin the reflex embedding correspondence".into(),
        ))
    }

    /// Labeled conjugate pairs of roots of K-hat's polynomial mod r, one
    /// pair per psi in Psi. `roots` must be all roots of the defining
    /// polynomial mod r (the completely-split case). For the non-Galois
    /// family, `flip` selects between the two consistent orientations of
    /// the second pair; Galois families ignore it.
    pub fn residual_labels(
        &self,
        roots: &[Residue],
        flip: bool,
    ) -> Result<Vec<(Residue, Residue)>> {
        let khat = &self.reflex_field;
        let f = khat.field();
        if roots.len() != khat.degree() {
            return Err(Error::NotSplit(
                roots
                    .first()
                    .map(|t| t.modulus().clone())
                    .unwrap_or_default(),
            ));
        }
        let base = roots
            .iter()
            .min_by(|a, b| a.value().cmp(b.value()))
            .unwrap()
            .clone();
        let conj_of = |t: &Residue| -> Result<Residue> {
            f.reduce_rat_mod_root(&khat.conj_image, t)
        };
        match &self.kind {
            ReflexKind::Galois { psi_exponents } => {
                let autos = khat.automorphisms.as_ref().unwrap();
                let mut out = Vec::with_capacity(psi_exponents.len());
                for &e in psi_exponents {
                    let label = f.reduce_rat_mod_root(&autos[e], &base)?;
                    let conj = conj_of(&label)?;
                    out.push((label, conj));
                }
                Ok(out)
            }
            ReflexKind::NonGalois { .. } => {
                let t = base;
                let t_conj = conj_of(&t)?;
                let u = roots
                    .iter()
                    .filter(|s| s.value() != t.value() && s.value() != t_conj.value())
                    .min_by(|a, b| a.value().cmp(b.value()))
                    .ok_or_else(|| Error::NotSplit(t.modulus().clone()))?
                    .clone();
                let u_conj = conj_of(&u)?;
                if flip {
                    Ok(vec![(t, t_conj), (u_conj, u)])
                } else {
                    Ok(vec![(t, t_conj), (u, u_conj)])
                }
            }
        }
    }
}

/// Select a CM-type from a string: `auto` (first primitive type) or
/// comma-separated canonical embedding indices.
pub fn parse_cm_type(spec: &CMFieldSpec, s: &str) -> Result<CMTypeData> {
    if s.trim() == "auto" {
        return enumerate_cm_types(spec)
            .into_iter()
            .find(|i| i.primitive)
            .map(|i| i.data)
            .ok_or_else(|| Error::Precondition("field has no primitive CM-type".into()));
    }
    let mut selected: Vec<usize> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad embedding index '{p}'")))
        })
        .collect::<Result<_>>()?;
    selected.sort_unstable();
    selected.dedup();
    let g = spec.g();
    if selected.len() != g {
        return Err(Error::Parse(format!(
            "a CM-type of this field selects exactly {g} embeddings"
        )));
    }
    if selected.iter().any(|&i| i >= 2 * g) {
        return Err(Error::Parse("embedding index out of range".into()));
    }
    for i in 0..g {
        let pair = [2 * i, 2 * i + 1];
        let count = selected.iter().filter(|&&s| pair.contains(&s)).count();
        if count != 1 {
            return Err(Error::Parse(
                "CM-type must select exactly one embedding from each conjugate pair".into(),
            ));
        }
    }
    Ok(CMTypeData {
        spec: spec.clone(),
        selected,
    })
}

/// Solve a dense complex linear system by Gaussian elimination with
/// partial pivoting. Errors when the matrix is numerically singular.
fn solve_complex(mut m: Vec<Vec<Cx>>, mut b: Vec<Cx>) -> Result<Vec<Cx>> {
    let n = b.len();
    let prec = b[0].prec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[i][col]
                    .abs2()
                    .cmp_abs(&m[j][col].abs2())
            })
            .unwrap();
        if m[pivot][col].is_zero() {
            return Err(Error::PrecisionExhausted);
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].div(&m[col][col]);
            for j in col..n {
                let delta = factor.mul(&m[col][j]);
                m[row][j] = m[row][j].sub(&delta);
            }
            let delta = factor.mul(&b[col]);
            b[row] = b[row].sub(&delta);
        }
    }
    let mut x = vec![Cx::zero(prec); n];
    for col in (0..n).rev() {
        let mut acc = b[col].clone();
        for j in col + 1..n {
            let delta = m[col][j].mul(&x[j]);
            acc = acc.sub(&delta);
        }
        x[col] = acc.div(&m[col][col]);
    }
    Ok(x)
}

/// Largest absolute value of any embedding of elements of the centered
/// fundamental parallelotope with coordinates in (-r/2, r/2], divided by
/// r/2; i.e. the field constant M such that |embedding| <= M * r/2 for all
/// such elements. Evaluated from the cached embeddings.
pub fn parallelotope_embedding_bound(spec: &CMFieldSpec) -> f64 {
    let n = spec.degree();
    let emb = spec.embeddings();
    let mut worst = 0.0f64;
    for root in emb.roots() {
        let (re, im) = root.z.to_f64();
        let zabs = (re * re + im * im).sqrt();
        // sum of |z|^i over basis coordinates, each at most 1 in units of r/2
        let mut sum = 0.0;
        let mut p = 1.0;
        for _ in 0..n {
            sum += p;
            p *= zabs;
        }
        worst = worst.max(sum);
    }
    worst
}
