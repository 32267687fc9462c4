//! Weil-number generation: residue sampling at the split prime r, CRT
//! lifting into the centered fundamental parallelotope, candidate testing,
//! full validation, exhaustive small-r searches with rho statistics, and
//! the genus-1 Cocks-Pinch specialization.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{
    all_primitive_kth_roots, cyclotomic_polynomial, factor_u64, is_prime,
    is_prime_u64, primitive_kth_root, IntPoly, PrimeField, Residue,
};
use crate::bigfloat::Fx;
use crate::cm::{is_primitive, reflex, CMTypeData, Family, ReflexData};
use crate::numfield::{EmbeddingSet, FieldElement, NumberField};
use crate::{Error, Result};

/// The complete splitting of r in the reflex order Z[theta-hat], as
/// conjugate root pairs labeled consistently with the reflex type Psi,
/// together with the Lagrange basis inverting evaluation-at-roots.
#[derive(Clone, Debug)]
pub struct SplitData {
    pub r: BigUint,
    /// g-hat pairs (t_psi, conj(t_psi)); the flattened evaluation order is
    /// [t_1, conj t_1, t_2, conj t_2, ...].
    pub pairs: Vec<(Residue, Residue)>,
    /// crt_basis[i] holds the power-basis coordinates mod r of the element
    /// that evaluates to 1 at flattened root i and to 0 at the others.
    crt_basis: Vec<Vec<BigUint>>,
    pub reflex: ReflexData,
}

impl SplitData {
    pub fn g_hat(&self) -> usize {
        self.pairs.len()
    }

    /// Flattened roots in evaluation order.
    pub fn flattened_roots(&self) -> Vec<Residue> {
        let mut out = Vec::with_capacity(2 * self.pairs.len());
        for (t, tb) in &self.pairs {
            out.push(t.clone());
            out.push(tb.clone());
        }
        out
    }
}

/// Values prescribed at the split prime: residues alpha_i at the Psi-labeled
/// roots and beta_i at their conjugates, with prod(alpha) = 1 and
/// prod(beta) = zeta, a primitive k-th root of unity mod r.
#[derive(Clone, Debug)]
pub struct ResidueAssignment {
    pub alphas: Vec<Residue>,
    pub betas: Vec<Residue>,
    pub zeta: Residue,
}

/// A fully validated q-Weil number pi in K with prescribed subgroup size r
/// and embedding degree k, plus the reflex element xi it came from.
#[derive(Clone, Debug)]
pub struct WeilNumber {
    pub pi: FieldElement,
    pub q: BigUint,
    pub r: BigUint,
    pub k: u64,
    /// N(pi - 1), the order of the group the subgroup of size r lives in.
    pub group_order: BigUint,
    /// g * log q / log r.
    pub rho: f64,
    /// The reflex-field element whose type norm is pi.
    pub xi: FieldElement,
    pub cm_type: CMTypeData,
    pub checks: ValidationReport,
    /// Number of candidate samples consumed before this one succeeded
    /// (zero for records reconstructed from an exhaustive enumeration).
    pub iterations: u64,
}

/// Per-check results of the seven-point Weil-number validation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// pi * conj(pi) = q, exactly in K.
    pub unit_weil: bool,
    /// |psi(pi)| = sqrt(q) within certified intervals at every embedding.
    pub abs_sqrt_q: bool,
    /// r | N(pi - 1).
    pub subgroup: bool,
    /// Phi_k(q) = 0 mod r with r not dividing q*k, so ord_r(q) = k exactly.
    pub embedding_degree: bool,
    /// minimal polynomial of pi has degree 2g, i.e. pi generates K.
    pub generates: bool,
    /// q does not divide the discriminant of K's defining polynomial.
    pub unramified: bool,
    /// gcd(N(pi + conj(pi)), q) = 1 (ordinarity, Waterhouse criterion).
    pub ordinary: bool,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.unit_weil
            && self.abs_sqrt_q
            && self.subgroup
            && self.embedding_degree
            && self.generates
            && self.unramified
            && self.ordinary
    }

    /// (name, passed) pairs in the canonical check order.
    pub fn items(&self) -> [(&'static str, bool); 7] {
        [
            ("unit_weil", self.unit_weil),
            ("abs_sqrt_q", self.abs_sqrt_q),
            ("subgroup", self.subgroup),
            ("embedding_degree", self.embedding_degree),
            ("generates", self.generates),
            ("unramified", self.unramified),
            ("ordinary", self.ordinary),
        ]
    }
}

/// Outcome of an exhaustive small-r enumeration.
#[derive(Clone, Debug)]
pub struct SearchReport {
    /// (r-1)^(2*ghat-2) times the number of zetas up to conjugation; the
    /// number of enumerated candidates.
    pub domain_size: u128,
    /// Candidates whose norm q passed the primality test (per candidate,
    /// duplicates not collapsed).
    pub prime_count: u64,
    /// Primes rejected afterwards because q ramifies or pi fails to
    /// generate K.
    pub step8_failures: u64,
    /// Minimum q over candidates passing every check.
    pub min_q: Option<BigUint>,
    /// Validated records achieving min_q (capped).
    pub winners: Vec<WeilNumber>,
    /// Histogram of rho over prime candidates, bin i covering
    /// [0.05*i, 0.05*(i+1)).
    pub rho_histogram: BTreeMap<i64, u64>,
}

const WINNER_CAP: usize = 8;

/// A genus-1 (Cocks-Pinch) parameter set: pi = a + b*theta in Q(sqrt(-d)).
#[derive(Clone, Debug)]
pub struct CocksPinchResult {
    pub q: BigUint,
    pub r: BigUint,
    pub k: u64,
    pub d: i64,
    pub a: BigInt,
    pub b: BigInt,
    /// N(pi - 1) = (a-1)^2 + d*b^2.
    pub group_order: BigUint,
    /// log q / log r.
    pub rho: f64,
}

/// Default iteration budget: generous against the ~2*ghat*ln(r) expectation.
pub fn default_max_iters(g_hat: usize, r: &BigUint) -> u64 {
    64 * (g_hat as u64).max(1) * (r.bits() as u64).max(1)
}

/// Factor r completely in the reflex order and label the conjugate root
/// pairs consistently with Psi. Errors if r is not prime, ramifies, or
/// fails to split completely in either K or K-hat.
pub fn split_completely(rx: &ReflexData, r: &BigUint) -> Result<SplitData> {
    if !is_prime(r) {
        return Err(Error::Precondition(format!("r = {r} is not prime")));
    }
    let k_field = rx.base.spec.field();
    let khat = rx.reflex_field.field();
    let roots_k = k_field.roots_mod_r(r)?;
    if roots_k.len() != k_field.degree() {
        return Err(Error::NotSplit(r.clone()));
    }
    let roots = khat.roots_mod_r(r)?;
    if roots.len() != khat.degree() {
        return Err(Error::NotSplit(r.clone()));
    }
    // The orientation within each conjugate pair is immaterial: the full
    // set of K-conjugates of the type norm realizes every product of one
    // residue from each pair, so prod(alpha) = 1 and N(xi) = zeta mod r
    // deliver the subgroup and order conditions under any orientation.
    build_split(rx, r, &roots, false)
}

fn build_split(rx: &ReflexData, r: &BigUint, roots: &[Residue], flip: bool) -> Result<SplitData> {
    let labels = rx.residual_labels(roots, flip)?;
    let mut flat: Vec<BigUint> = Vec::with_capacity(2 * labels.len());
    for (t, tb) in &labels {
        flat.push(t.value().clone());
        flat.push(tb.value().clone());
    }
    let n = flat.len();
    for i in 0..n {
        for j in i + 1..n {
            if flat[i] == flat[j] {
                return Err(Error::Precondition(format!(
                    "roots of the reflex polynomial mod {r} are not distinct"
                )));
            }
        }
    }
    let fr = PrimeField::new(r.clone());
    let mut crt_basis = Vec::with_capacity(n);
    for i in 0..n {
        // numerator poly prod_{j != i} (x - s_j), then scale by the inverse
        // of its value at s_i.
        let mut num = vec![BigUint::one()];
        for (j, s) in flat.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut next = vec![BigUint::zero(); num.len() + 1];
            let neg_s = fr.neg(s);
            for (deg, coeff) in num.iter().enumerate() {
                next[deg + 1] = fr.add(&next[deg + 1], coeff);
                next[deg] = fr.add(&next[deg], &fr.mul(coeff, &neg_s));
            }
            num = next;
        }
        let mut val = BigUint::zero();
        for coeff in num.iter().rev() {
            val = fr.add(&fr.mul(&val, &flat[i]), coeff);
        }
        let inv = fr
            .inv(&val)
            .ok_or_else(|| Error::NotInvertible(val.clone(), r.clone()))?;
        let mut basis = vec![BigUint::zero(); n];
        for (deg, coeff) in num.iter().enumerate() {
            basis[deg] = fr.mul(coeff, &inv);
        }
        crt_basis.push(basis);
    }
    Ok(SplitData {
        r: r.clone(),
        pairs: labels,
        crt_basis,
        reflex: rx.clone(),
    })
}

/// Draw alpha_1..alpha_{ghat-1} and beta_1..beta_{ghat-1} uniformly from
/// the units mod r; the last entries are forced so that prod(alpha) = 1 and
/// prod(beta) = zeta.
pub fn sample_residues<R: Rng + ?Sized>(
    rng: &mut R,
    g_hat: usize,
    zeta: &Residue,
) -> ResidueAssignment {
    let r = zeta.modulus().clone();
    let rm1 = &r - BigUint::one();
    let one = Residue::from_u64(1, &r);
    let mut alphas = Vec::with_capacity(g_hat);
    let mut betas = Vec::with_capacity(g_hat);
    let mut pa = one.clone();
    let mut pb = one;
    for _ in 0..g_hat.saturating_sub(1) {
        let a = Residue::new(rng.gen_biguint_below(&rm1) + BigUint::one(), r.clone());
        pa = pa.mul(&a).expect("same modulus");
        alphas.push(a);
        let b = Residue::new(rng.gen_biguint_below(&rm1) + BigUint::one(), r.clone());
        pb = pb.mul(&b).expect("same modulus");
        betas.push(b);
    }
    alphas.push(pa.inv().expect("unit"));
    betas.push(zeta.mul(&pb.inv().expect("unit")).expect("same modulus"));
    ResidueAssignment {
        alphas,
        betas,
        zeta: zeta.clone(),
    }
}

/// Interpolate the element of the reflex order with the prescribed residues
/// at the labeled roots, center-lifted so every power-basis coordinate lies
/// in (-r/2, r/2].
pub fn lift_crt(split: &SplitData, assign: &ResidueAssignment) -> Result<FieldElement> {
    let g_hat = split.g_hat();
    if assign.alphas.len() != g_hat || assign.betas.len() != g_hat {
        return Err(Error::Precondition(
            "assignment length does not match the number of root pairs".into(),
        ));
    }
    let r = &split.r;
    let fr = PrimeField::new(r.clone());
    let n = 2 * g_hat;
    let mut values = Vec::with_capacity(n);
    for i in 0..g_hat {
        if assign.alphas[i].modulus() != r || assign.betas[i].modulus() != r {
            return Err(Error::ModulusMismatch);
        }
        values.push(assign.alphas[i].value().clone());
        values.push(assign.betas[i].value().clone());
    }
    let half = (r - BigUint::one()) / BigUint::from(2u32);
    let r_int = BigInt::from(r.clone());
    let mut coords = Vec::with_capacity(n);
    for j in 0..n {
        let mut c = BigUint::zero();
        for (i, v) in values.iter().enumerate() {
            c = fr.add(&c, &fr.mul(v, &split.crt_basis[i][j]));
        }
        let mut ci = BigInt::from(c.clone());
        if c > half {
            ci -= &r_int;
        }
        coords.push(ci);
    }
    Ok(FieldElement::from_int_coords(coords))
}

fn check_construct_preconditions(t: &CMTypeData, k: u64, r: &BigUint) -> Result<()> {
    if t.spec.g() < 2 {
        return Err(Error::Precondition(
            "degree-2 fields are handled by cocks_pinch_g1".into(),
        ));
    }
    if !is_primitive(t) {
        return Err(Error::Precondition(
            "the CM-type must be primitive".into(),
        ));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    if !is_prime(r) {
        return Err(Error::Precondition(format!("r = {r} is not prime")));
    }
    if !((r - BigUint::one()) % BigUint::from(k)).is_zero() {
        return Err(Error::Precondition(format!("k = {k} does not divide r - 1")));
    }
    Ok(())
}

/// The main construction: sample residues, lift, test the norm for
/// primality, take the type norm, and return the first candidate passing
/// the full validation.
pub fn construct_pi<R: Rng + ?Sized>(
    t: &CMTypeData,
    k: u64,
    r: &BigUint,
    rng: &mut R,
    max_iters: u64,
) -> Result<WeilNumber> {
    check_construct_preconditions(t, k, r)?;
    let rx = reflex(t)?;
    let split = split_completely(&rx, r)?;
    search_loop(t, &split, k, r, rng, max_iters, None)
}

/// Seeded multi-worker variant of `construct_pi`. With threads <= 1 this is
/// exactly the single-threaded construction with a ChaCha8 stream seeded by
/// `seed` (deterministic); otherwise the first worker to succeed wins.
pub fn construct_pi_parallel(
    t: &CMTypeData,
    k: u64,
    r: &BigUint,
    seed: u64,
    threads: usize,
    max_iters: u64,
) -> Result<WeilNumber> {
    check_construct_preconditions(t, k, r)?;
    let rx = reflex(t)?;
    let split = split_completely(&rx, r)?;
    if threads <= 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return search_loop(t, &split, k, r, &mut rng, max_iters, None);
    }
    let stop = AtomicBool::new(false);
    let found: Mutex<Option<WeilNumber>> = Mutex::new(None);
    let last_err: Mutex<Option<Error>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for i in 0..threads {
            let split = &split;
            let stop = &stop;
            let found = &found;
            let last_err = &last_err;
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed.wrapping_add((i as u64).wrapping_mul(0x9E3779B97F4A7C15)));
            scope.spawn(move || {
                match search_loop(t, split, k, r, &mut rng, max_iters, Some(stop)) {
                    Ok(w) => {
                        stop.store(true, AtomicOrdering::SeqCst);
                        let mut slot = found.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some(w);
                        }
                    }
                    Err(e) => {
                        *last_err.lock().unwrap() = Some(e);
                    }
                }
            });
        }
    });
    if let Some(w) = found.into_inner().unwrap() {
        return Ok(w);
    }
    Err(last_err
        .into_inner()
        .unwrap()
        .unwrap_or(Error::IterationLimit(max_iters)))
}

fn search_loop<R: Rng + ?Sized>(
    t: &CMTypeData,
    split: &SplitData,
    k: u64,
    r: &BigUint,
    rng: &mut R,
    max_iters: u64,
    stop: Option<&AtomicBool>,
) -> Result<WeilNumber> {
    let g_hat = split.g_hat();
    let khat = split.reflex.reflex_field.field();
    let k_field = t.spec.field();
    let g = t.spec.g();
    let disc_k = k_field.disc().magnitude().clone();
    for iter_count in 0..max_iters {
        if let Some(flag) = stop {
            if flag.load(AtomicOrdering::Relaxed) {
                return Err(Error::IterationLimit(0));
            }
        }
        let zeta = primitive_kth_root(r, k, rng)?;
        let assign = sample_residues(rng, g_hat, &zeta);
        let xi = lift_crt(split, &assign)?;
        let q_int = khat.norm_integral(&xi)?;
        if !q_int.is_positive() {
            continue;
        }
        let q = q_int.magnitude().clone();
        if !is_prime(&q) {
            continue;
        }
        if (&disc_k % &q).is_zero() {
            continue;
        }
        let pi = split.reflex.type_norm(&xi)?;
        if k_field.element_degree(&pi)? != 2 * g {
            continue;
        }
        let mut w = assemble_weil(t, pi, q, r.clone(), k, xi)?;
        let report = validate_weil(&w, 0)?;
        if report.all_pass() {
            w.checks = report;
            w.iterations = iter_count + 1;
            return Ok(w);
        }
    }
    Err(Error::IterationLimit(max_iters))
}

fn assemble_weil(
    t: &CMTypeData,
    pi: FieldElement,
    q: BigUint,
    r: BigUint,
    k: u64,
    xi: FieldElement,
) -> Result<WeilNumber> {
    let field = t.spec.field();
    let order = group_order(field, &pi)?;
    let rho_val = rho(t.spec.g(), &q, &r);
    Ok(WeilNumber {
        pi,
        q,
        r,
        k,
        group_order: order,
        rho: rho_val,
        xi,
        cm_type: t.clone(),
        checks: ValidationReport::default(),
        iterations: 0,
    })
}

/// Norm of an algebraic integer whose power-basis coordinates may still
/// carry denominators (the type norm can land outside Z[theta]).
fn integer_norm(field: &NumberField, a: &FieldElement) -> Result<BigInt> {
    let n = field.norm(a)?;
    if !n.denom().is_one() {
        return Err(Error::NonIntegral);
    }
    Ok(n.numer().clone())
}

/// |N(pi - 1)|, the group order prescribed by pi.
pub fn group_order(field: &NumberField, pi: &FieldElement) -> Result<BigUint> {
    let pm1 = field.sub(pi, &field.one())?;
    Ok(integer_norm(field, &pm1)?.magnitude().clone())
}

/// rho = g * log q / log r.
pub fn rho(g: usize, q: &BigUint, r: &BigUint) -> f64 {
    g as f64 * log2_biguint(q) / log2_biguint(r)
}

/// Base-2 logarithm that stays finite past the f64 exponent range.
pub fn log2_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().unwrap_or(1.0).log2();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().unwrap_or(1.0);
    top.log2() + shift as f64
}

/// Run the seven validation checks; `precision` is a floor for the working
/// precision of the archimedean check (raised to q's size automatically).
pub fn validate_weil(w: &WeilNumber, precision: u32) -> Result<ValidationReport> {
    let spec = &w.cm_type.spec;
    let field = spec.field();
    let g = spec.g();
    let q_int = BigInt::from(w.q.clone());
    let r_int = BigInt::from(w.r.clone());

    // (1) pi * conj(pi) = q, exactly.
    let conj = spec.conjugate(&w.pi)?;
    let prod = field.mul(&w.pi, &conj)?;
    let unit_weil = prod == field.integer(q_int.clone());

    // (2) |psi(pi)| = sqrt(q) at every embedding, within the certified root
    // radii (redundant with (1), but checked independently at precision).
    let prec = precision.max(w.q.bits() as u32 + 96);
    let emb = field.complex_embeddings(prec)?;
    let q_fx = Fx::from_bigint(&q_int, prec);
    let eps = Fx::one(prec).div(&Fx::from_bigint(&(BigInt::one() << (prec / 2)), prec));
    let mut abs_sqrt_q = true;
    for i in 0..emb.len() {
        let (z, err) = emb.eval_element(&w.pi, i);
        let diff = z.abs2().sub(&q_fx);
        // | |z|^2 - |psi(pi)|^2 | <= err * (2|z| + err), plus fixed-point slack.
        let tol = err
            .mul(&z.abs().mul(&Fx::from_i64(2, prec)).add(&err))
            .add(&q_fx.abs().add(&Fx::one(prec)).mul(&eps));
        if diff.cmp_abs(&tol) == std::cmp::Ordering::Greater {
            abs_sqrt_q = false;
        }
    }

    // (3) r | N(pi - 1).
    let pm1 = field.sub(&w.pi, &field.one())?;
    let subgroup = integer_norm(field, &pm1)?.mod_floor(&r_int).is_zero();

    // (4) Phi_k(q) = 0 mod r and r does not divide q or k, which pins
    // ord_r(q) = k exactly (r prime).
    let q_mod_r = q_int.mod_floor(&r_int);
    let phik = cyclotomic_polynomial(w.k);
    let embedding_degree = phik.eval(&q_mod_r).mod_floor(&r_int).is_zero()
        && !q_mod_r.is_zero()
        && !BigInt::from(w.k).mod_floor(&r_int).is_zero();

    // (5) pi generates K.
    let generates = field.element_degree(&w.pi)? == 2 * g;

    // (6) q unramified (defining-polynomial discriminant test).
    let unramified = !(field.disc().magnitude() % &w.q).is_zero();

    // (7) ordinary: pi + conj(pi) coprime to q.
    let trace = field.add(&w.pi, &conj)?;
    let tn = integer_norm(field, &trace)?.magnitude().clone();
    let ordinary = tn.gcd(&w.q).is_one();

    Ok(ValidationReport {
        unit_weil,
        abs_sqrt_q,
        subgroup,
        embedding_degree,
        generates,
        unramified,
        ordinary,
    })
}

/// M: the largest complex absolute value attained, across all embeddings,
/// at the 2^n vertices (coordinates +-1/2) of the centered unit
/// parallelotope of the power basis.
pub fn parallelotope_vertex_bound(emb: &EmbeddingSet) -> f64 {
    let n = emb.len();
    let zs: Vec<(f64, f64)> = emb.roots().iter().map(|root| root.z.to_f64()).collect();
    // powers[j][i] = z_j^i
    let powers: Vec<Vec<(f64, f64)>> = zs
        .iter()
        .map(|&(re, im)| {
            let mut p = Vec::with_capacity(n);
            let (mut ar, mut ai) = (1.0f64, 0.0f64);
            for _ in 0..n {
                p.push((ar, ai));
                let nr = ar * re - ai * im;
                let ni = ar * im + ai * re;
                ar = nr;
                ai = ni;
            }
            p
        })
        .collect();
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << n) {
        for p in &powers {
            let (mut sr, mut si) = (0.0f64, 0.0f64);
            for (i, &(pr, pi)) in p.iter().enumerate() {
                let s = if mask & (1 << i) != 0 { 0.5 } else { -0.5 };
                sr += s * pr;
                si += s * pi;
            }
            best = best.max((sr * sr + si * si).sqrt());
        }
    }
    best
}

/// Upper bound 2*g*ghat*(1 + log M / log r) on the rho-value of anything
/// the construction can emit, from q <= (r*M)^(2*ghat).
pub fn rho_bound(rx: &ReflexData, r: &BigUint) -> f64 {
    let g = rx.base.spec.g() as f64;
    let ghat = rx.g_hat() as f64;
    let m = parallelotope_vertex_bound(rx.reflex_field.embeddings());
    2.0 * g * ghat * (1.0 + m.log2() / log2_biguint(r))
}

/// Enumerate every residue assignment and every primitive k-th root of
/// unity; count primality passes, keep the rho histogram, and track the
/// smallest q passing all checks. `budget` caps the domain size.
pub fn exhaustive_search(t: &CMTypeData, k: u64, r: &BigUint, budget: u64) -> Result<SearchReport> {
    exhaustive_search_with(t, k, r, budget, false)
}

/// As `exhaustive_search`, with the specialized small-modulus fast path
/// optionally disabled for cross-validation.
pub fn exhaustive_search_with(
    t: &CMTypeData,
    k: u64,
    r: &BigUint,
    budget: u64,
    force_generic: bool,
) -> Result<SearchReport> {
    check_construct_preconditions(t, k, r)?;
    let rx = reflex(t)?;
    let split = split_completely(&rx, r)?;
    let g_hat = split.g_hat();
    let rm1 = r - BigUint::one();
    let rm1_u = rm1
        .to_u128()
        .ok_or(Error::BudgetExceeded(budget))?;
    // Enumerate zeta up to complex conjugation (inversion mod r): the
    // candidates for zeta and zeta^-1 are conjugate element-by-element and
    // produce the same q's, so counting both would double every statistic.
    let zetas: Vec<Residue> = all_primitive_kth_roots(r, k)?
        .into_iter()
        .filter(|z| match z.inv() {
            Ok(inv) => z.value() <= inv.value(),
            Err(_) => true,
        })
        .collect();
    let mut domain: u128 = zetas.len() as u128;
    for _ in 0..(2 * g_hat - 2) {
        domain = domain
            .checked_mul(rm1_u)
            .ok_or(Error::BudgetExceeded(budget))?;
    }
    if domain > budget as u128 {
        return Err(Error::BudgetExceeded(budget));
    }
    if !force_generic {
        if let Some(fast) = FastContext::try_new(t, &split, r) {
            return run_fast(t, &split, &fast, &zetas, k, domain);
        }
    }
    run_generic(t, &split, &zetas, k, domain)
}

/// Shared winner bookkeeping; keyed by (zeta, flattened residue values).
struct WinnerSet {
    min_q: Option<BigUint>,
    raw: Vec<(BigUint, Vec<BigUint>)>,
}

impl WinnerSet {
    fn new() -> Self {
        WinnerSet {
            min_q: None,
            raw: Vec::new(),
        }
    }

    fn offer(&mut self, q: &BigUint, zeta: BigUint, values: Vec<BigUint>) {
        match &self.min_q {
            Some(m) if q > m => {}
            Some(m) if q == m => {
                if self.raw.len() < WINNER_CAP {
                    self.raw.push((zeta, values));
                }
            }
            _ => {
                self.min_q = Some(q.clone());
                self.raw.clear();
                self.raw.push((zeta, values));
            }
        }
    }

    fn finish(
        self,
        t: &CMTypeData,
        split: &SplitData,
        k: u64,
        domain: u128,
        prime_count: u64,
        step8_failures: u64,
        rho_histogram: BTreeMap<i64, u64>,
    ) -> Result<SearchReport> {
        let khat = split.reflex.reflex_field.field();
        let mut winners = Vec::new();
        for (zeta, values) in self.raw {
            let g_hat = split.g_hat();
            let mut alphas = Vec::with_capacity(g_hat);
            let mut betas = Vec::with_capacity(g_hat);
            for i in 0..g_hat {
                alphas.push(Residue::new(values[2 * i].clone(), split.r.clone()));
                betas.push(Residue::new(values[2 * i + 1].clone(), split.r.clone()));
            }
            let assign = ResidueAssignment {
                alphas,
                betas,
                zeta: Residue::new(zeta, split.r.clone()),
            };
            let xi = lift_crt(split, &assign)?;
            let q = khat.norm_integral(&xi)?.magnitude().clone();
            let pi = split.reflex.type_norm(&xi)?;
            let mut w = assemble_weil(t, pi, q, split.r.clone(), k, xi)?;
            w.checks = validate_weil(&w, 0)?;
            winners.push(w);
        }
        Ok(SearchReport {
            domain_size: domain,
            prime_count,
            step8_failures,
            min_q: self.min_q,
            winners,
            rho_histogram,
        })
    }
}

fn rho_bin(rho: f64) -> i64 {
    (rho / 0.05).floor() as i64
}

/// Odometer over (F_r^*)^len as u64 values 1..=r-1; calls f with the slice.
fn for_each_unit_vector(r: u64, len: usize, mut f: impl FnMut(&[u64])) {
    let mut v = vec![1u64; len];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            v[i] += 1;
            if v[i] <= r - 1 {
                break;
            }
            v[i] = 1;
            i += 1;
        }
        if len == 0 {
            return;
        }
    }
}

fn run_generic(
    t: &CMTypeData,
    split: &SplitData,
    zetas: &[Residue],
    k: u64,
    domain: u128,
) -> Result<SearchReport> {
    let g_hat = split.g_hat();
    let g = t.spec.g();
    let k_field = t.spec.field();
    let khat = split.reflex.reflex_field.field();
    let disc_k = k_field.disc().magnitude().clone();
    let r_u = split
        .r
        .to_u64()
        .ok_or_else(|| Error::Precondition("exhaustive search requires a small r".into()))?;
    let free = 2 * g_hat - 2;
    let mut prime_count = 0u64;
    let mut step8_failures = 0u64;
    let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
    let mut winners = WinnerSet::new();
    let mut failure: Option<Error> = None;
    for zeta in zetas {
        for_each_unit_vector(r_u, free, |v| {
            if failure.is_some() {
                return;
            }
            let mut alphas = Vec::with_capacity(g_hat);
            let mut betas = Vec::with_capacity(g_hat);
            let mut pa = Residue::from_u64(1, &split.r);
            let mut pb = pa.clone();
            for i in 0..g_hat - 1 {
                let a = Residue::from_u64(v[i], &split.r);
                pa = pa.mul(&a).expect("same modulus");
                alphas.push(a);
                let b = Residue::from_u64(v[g_hat - 1 + i], &split.r);
                pb = pb.mul(&b).expect("same modulus");
                betas.push(b);
            }
            alphas.push(pa.inv().expect("unit"));
            betas.push(zeta.mul(&pb.inv().expect("unit")).expect("same modulus"));
            let assign = ResidueAssignment {
                alphas,
                betas,
                zeta: zeta.clone(),
            };
            let mut step = || -> Result<()> {
                let xi = lift_crt(split, &assign)?;
                let q = khat.norm_integral(&xi)?.magnitude().clone();
                if !is_prime(&q) {
                    return Ok(());
                }
                prime_count += 1;
                *hist.entry(rho_bin(rho(g, &q, &split.r))).or_insert(0) += 1;
                if (&disc_k % &q).is_zero() {
                    step8_failures += 1;
                    return Ok(());
                }
                let pi = split.reflex.type_norm(&xi)?;
                if k_field.element_degree(&pi)? != 2 * g {
                    step8_failures += 1;
                    return Ok(());
                }
                let mut values = Vec::with_capacity(2 * g_hat);
                for i in 0..g_hat {
                    values.push(assign.alphas[i].value().clone());
                    values.push(assign.betas[i].value().clone());
                }
                winners.offer(&q, assign.zeta.value().clone(), values);
                Ok(())
            };
            if let Err(e) = step() {
                failure = Some(e);
            }
        });
    }
    if let Some(e) = failure {
        return Err(e);
    }
    winners.finish(t, split, k, domain, prime_count, step8_failures, hist)
}

/// Precomputed small-modulus data: u64 roots, Lagrange basis, reduction
/// polynomial, and the cyclotomic permutation tables for the generation
/// check. Applies to prime-conductor cyclotomic fields with small degree.
struct FastContext {
    r: u64,
    basis: Vec<Vec<u64>>,
    n: usize,
    /// Defining polynomial's non-leading coefficients as i64.
    f_lo: Vec<i64>,
    disc: i128,
    m: usize,
    /// m-conductor cyclotomic permutations: sigma_table[e][i] = i*a^e mod m.
    sigma_table: Vec<Vec<usize>>,
    psi_exponents: Vec<usize>,
    /// n/p for each prime p | n: exponents whose fixed fields are the
    /// maximal proper subfields.
    subfield_exponents: Vec<usize>,
}

impl FastContext {
    fn try_new(t: &CMTypeData, split: &SplitData, r: &BigUint) -> Option<FastContext> {
        let (m, a) = match t.spec.family() {
            Family::CyclotomicGalois { m, generator } => (*m, *generator),
            _ => return None,
        };
        if !is_prime_u64(m) {
            return None;
        }
        let psi = split.reflex.psi_exponents()?.to_vec();
        let n = t.spec.degree();
        if n != (m - 1) as usize || n > 10 {
            return None;
        }
        // The reflex of a primitive type on a prime-conductor cyclotomic
        // field is the field itself; bail out if representations differ.
        if split.reflex.reflex_field.field().poly() != t.spec.field().poly()
            || split.reflex.reflex_field.family() != t.spec.family()
        {
            return None;
        }
        let r_u = r.to_u64()?;
        if r_u >= 1 << 31 {
            return None;
        }
        // Entry-size feasibility for the i128 fraction-free determinant:
        // coordinates <= r/2 grow by at most (1 + sum|f_i|) per reduction
        // step, and Hadamard bounds the determinant.
        let f = t.spec.field().poly();
        let mut f_lo = Vec::with_capacity(n);
        let mut f_abs_sum = 0f64;
        for i in 0..n {
            let c = f.coeff(i).to_i64()?;
            f_abs_sum += c.unsigned_abs() as f64;
            f_lo.push(c);
        }
        let entry_log = ((r_u as f64) / 2.0).log2() + (n as f64) * (1.0 + f_abs_sum).log2();
        let hadamard_log = (n as f64) * (entry_log + 0.5 * (n as f64).log2());
        if hadamard_log > 120.0 {
            return None;
        }
        let disc = t.spec.field().disc().to_i128()?;
        let mu = m as usize;
        let mut sigma_table = Vec::with_capacity(n);
        let mut ae = 1u64;
        for _ in 0..n {
            let tbl: Vec<usize> = (0..mu).map(|i| ((i as u64 * ae) % m) as usize).collect();
            sigma_table.push(tbl);
            ae = (ae * a) % m;
        }
        let mut subfield_exponents = Vec::new();
        for (p, _) in factor_u64(n as u64) {
            subfield_exponents.push(n / p as usize);
        }
        let basis = split
            .crt_basis
            .iter()
            .map(|b| b.iter().map(|c| c.to_u64().unwrap()).collect())
            .collect();
        Some(FastContext {
            r: r_u,
            basis,
            n,
            f_lo,
            disc,
            m: mu,
            sigma_table,
            psi_exponents: psi,
            subfield_exponents,
        })
    }
}

fn mulmod(a: u64, b: u64, r: u64) -> u64 {
    ((a as u128 * b as u128) % r as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, r: u64) -> u64 {
    let mut acc = 1u64;
    a %= r;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, r);
        }
        a = mulmod(a, a, r);
        e >>= 1;
    }
    acc
}

/// Fraction-free determinant; None on i128 overflow (caller falls back to
/// exact arithmetic for that candidate).
fn bareiss_det(mut a: Vec<Vec<i128>>) -> Option<i128> {
    let n = a.len();
    if n == 0 {
        return Some(1);
    }
    let mut prev = 1i128;
    let mut sign = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let pivot = (k + 1..n).find(|&i| a[i][k] != 0);
            match pivot {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j]
                    .checked_mul(a[k][k])?
                    .checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = t / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

/// Canonical representative of a length-m exponent vector modulo the
/// all-ones direction (the kernel of reduction mod the m-th cyclotomic).
fn canonical_exponent_vec(mut v: Vec<i128>, m: usize) -> Vec<i128> {
    let last = v[m - 1];
    if last != 0 {
        for x in v.iter_mut() {
            *x -= last;
        }
    }
    v
}

fn permute_exponent_vec(v: &[i128], table: &[usize]) -> Vec<i128> {
    let mut w = vec![0i128; v.len()];
    for (i, &x) in v.iter().enumerate() {
        w[table[i]] += x;
    }
    w
}

fn convolve_mod_xm(a: &[i128], b: &[i128], m: usize) -> Vec<i128> {
    let mut out = vec![0i128; m];
    for i in 0..m {
        if a[i] == 0 {
            continue;
        }
        for j in 0..m {
            let idx = i + j;
            let idx = if idx >= m { idx - m } else { idx };
            out[idx] += a[i] * b[j];
        }
    }
    out
}

fn run_fast(
    t: &CMTypeData,
    split: &SplitData,
    fx: &FastContext,
    zetas: &[Residue],
    k: u64,
    domain: u128,
) -> Result<SearchReport> {
    let r = fx.r;
    let n = fx.n;
    let g = t.spec.g();
    let g_hat = split.g_hat();
    let khat = split.reflex.reflex_field.field();
    let free_each = g_hat - 1;
    let log2_r = (r as f64).log2();
    let half = (r - 1) / 2;
    let mut prime_count = 0u64;
    let mut step8_failures = 0u64;
    let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
    let mut winners = WinnerSet::new();
    let mut values = vec![0u64; 2 * g_hat];
    let mut coords_i = vec![0i64; n];
    for zeta in zetas {
        let z = zeta.value().to_u64().expect("small modulus");
        for_each_unit_vector(r, 2 * free_each, |v| {
            let mut pa = 1u64;
            let mut pb = 1u64;
            for i in 0..free_each {
                values[2 * i] = v[i];
                pa = mulmod(pa, v[i], r);
                values[2 * i + 1] = v[free_each + i];
                pb = mulmod(pb, v[free_each + i], r);
            }
            values[2 * (g_hat - 1)] = powmod(pa, r - 2, r);
            values[2 * (g_hat - 1) + 1] = mulmod(z, powmod(pb, r - 2, r), r);
            // CRT coordinates, centered.
            for j in 0..n {
                let mut acc = 0u128;
                for (i, &val) in values.iter().enumerate() {
                    acc += val as u128 * fx.basis[i][j] as u128;
                }
                let c = (acc % r as u128) as u64;
                coords_i[j] = if c > half { c as i64 - r as i64 } else { c as i64 };
            }
            // Multiplication-by-xi matrix rows: theta^t * xi reduced mod f.
            let mut mat: Vec<Vec<i128>> = Vec::with_capacity(n);
            let mut row: Vec<i128> = coords_i.iter().map(|&c| c as i128).collect();
            mat.push(row.clone());
            for _ in 1..n {
                let lead = row[n - 1];
                let mut next = vec![0i128; n];
                for j in (1..n).rev() {
                    next[j] = row[j - 1] - lead * fx.f_lo[j] as i128;
                }
                next[0] = -lead * fx.f_lo[0] as i128;
                row = next;
                mat.push(row.clone());
            }
            let q128 = match bareiss_det(mat) {
                Some(d) => d.unsigned_abs(),
                None => {
                    // Per-candidate exact fallback.
                    let coords: Vec<BigInt> = coords_i.iter().map(|&c| BigInt::from(c)).collect();
                    khat.norm_int(&coords)
                        .magnitude()
                        .to_u128()
                        .unwrap_or(u128::MAX)
                }
            };
            if q128 < 2 {
                return;
            }
            let q_is_prime = match u64::try_from(q128) {
                Ok(qu) => is_prime_u64(qu),
                Err(_) => is_prime(&BigUint::from(q128)),
            };
            if !q_is_prime {
                return;
            }
            prime_count += 1;
            let rho_val = g as f64 * (q128 as f64).log2() / log2_r;
            *hist.entry(rho_bin(rho_val)).or_insert(0) += 1;
            // Step 8a: q unramified (defining-polynomial discriminant).
            let disc_abs = fx.disc.unsigned_abs();
            if disc_abs % q128 == 0 {
                step8_failures += 1;
                return;
            }
            // Step 8b: pi = type norm of xi must generate the field. Work
            // in Z[x]/(x^m - 1): products are cyclic convolutions, and two
            // vectors agree mod the cyclotomic factor iff their canonical
            // forms (last coordinate zeroed) coincide.
            let mut base = vec![0i128; fx.m];
            for j in 0..n {
                base[j] = coords_i[j] as i128;
            }
            let mut pi_vec = vec![0i128; fx.m];
            pi_vec[0] = 1;
            for &e in &fx.psi_exponents {
                let img = permute_exponent_vec(&base, &fx.sigma_table[e]);
                pi_vec = convolve_mod_xm(&pi_vec, &img, fx.m);
            }
            let pi_canon = canonical_exponent_vec(pi_vec, fx.m);
            for &e in &fx.subfield_exponents {
                let moved = permute_exponent_vec(&pi_canon, &fx.sigma_table[e]);
                if canonical_exponent_vec(moved, fx.m) == pi_canon {
                    step8_failures += 1;
                    return;
                }
            }
            winners.offer(
                &BigUint::from(q128),
                BigUint::from(z),
                values.iter().map(|&v| BigUint::from(v)).collect(),
            );
        });
    }
    winners.finish(t, split, k, domain, prime_count, step8_failures, hist)
}

/// The genus-1 specialization in Q(sqrt(-d)): pick residues (1, zeta) at
/// the two roots of x^2 + d mod r, center-lift, and scan small translates
/// by r until the norm is a suitable prime.
pub fn cocks_pinch_g1<R: Rng + ?Sized>(
    d: i64,
    k: u64,
    r: &BigUint,
    rng: &mut R,
    max_iters: u64,
) -> Result<CocksPinchResult> {
    if d <= 0 || factor_u64(d as u64).iter().any(|&(_, e)| e > 1) {
        return Err(Error::Precondition(
            "d must be a positive squarefree integer".into(),
        ));
    }
    if !is_prime(r) {
        return Err(Error::Precondition(format!("r = {r} is not prime")));
    }
    let field = NumberField::new(IntPoly::from_i64(&[d, 0, 1]))?;
    let roots = field.roots_mod_r(r)?;
    if roots.len() < 2 {
        return Err(Error::NotSplit(r.clone()));
    }
    let zeta = primitive_kth_root(r, k, rng)?;
    let fr = PrimeField::new(r.clone());
    let (s1, s2) = if roots[0].value() < roots[1].value() {
        (roots[0].value().clone(), roots[1].value().clone())
    } else {
        (roots[1].value().clone(), roots[0].value().clone())
    };
    // a + b*s1 = 1 and a + b*s2 = zeta mod r.
    let denom = fr.sub(&s1, &s2);
    let denom_inv = fr
        .inv(&denom)
        .ok_or_else(|| Error::NotInvertible(denom, r.clone()))?;
    let b0 = fr.mul(&fr.sub(&BigUint::one(), zeta.value()), &denom_inv);
    let a0 = fr.sub(&BigUint::one(), &fr.mul(&b0, &s1));
    let center = |c: BigUint| -> BigInt {
        let half = (r - BigUint::one()) / BigUint::from(2u32);
        if c > half {
            BigInt::from(c) - BigInt::from(r.clone())
        } else {
            BigInt::from(c)
        }
    };
    let a0 = center(a0);
    let b0 = center(b0);
    let r_int = BigInt::from(r.clone());
    let d_int = BigInt::from(d);
    let four_d = BigInt::from(4 * d);
    let mut iters = 0u64;
    let mut ring: i64 = 0;
    loop {
        // All (u, v) with max(|u|, |v|) = ring, in a fixed scan order.
        let cells: Vec<(i64, i64)> = if ring == 0 {
            vec![(0, 0)]
        } else {
            let mut c = Vec::new();
            for u in -ring..=ring {
                for v in -ring..=ring {
                    if u.abs().max(v.abs()) == ring {
                        c.push((u, v));
                    }
                }
            }
            c
        };
        for (u, v) in cells {
            iters += 1;
            if iters > max_iters {
                return Err(Error::IterationLimit(max_iters));
            }
            let a = &a0 + &r_int * BigInt::from(u);
            let b = &b0 + &r_int * BigInt::from(v);
            if b.is_zero() {
                continue;
            }
            let q_int = &a * &a + &d_int * &b * &b;
            let q = q_int.magnitude().clone();
            if !is_prime(&q) {
                continue;
            }
            if (four_d.magnitude() % &q).is_zero() {
                continue;
            }
            // Ordinary: trace 2a coprime to q.
            if !(BigInt::from(2) * &a).magnitude().gcd(&q).is_one() {
                continue;
            }
            let am1 = &a - BigInt::one();
            let order = (&am1 * &am1 + &d_int * &b * &b).magnitude().clone();
            let rho_val = rho(1, &q, r);
            return Ok(CocksPinchResult {
                q,
                r: r.clone(),
                k,
                d,
                a,
                b,
                group_order: order,
                rho: rho_val,
            });
        }
        ring += 1;
    }
}

#[cfg(test)]
mod tests;
