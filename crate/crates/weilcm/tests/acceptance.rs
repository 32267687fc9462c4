//! End-to-end acceptance checks: golden-value reproductions, statistical
//! distribution checks at cryptographic sizes, curve linkage, and property
//! suites. Each check prints a single PASS/FAIL line with its measured
//! values; tolerances are pinned in the assertions.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weilcm::arith::{cyclotomic_polynomial, multiplicative_order, IntPoly};
use weilcm::cm::{enumerate_cm_types, parse_cm_type, reflex, CMFieldSpec, CMTypeData};
use weilcm::jacobian::{
    divisor_add, probable_order_check, random_divisor, twist_search, HyperellipticCurve,
};
use weilcm::numfield::FieldElement;
use weilcm::weil::{
    construct_pi_parallel, exhaustive_search, log2_biguint, rho_bound, validate_weil, WeilNumber,
};

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn cm_type(field: &str) -> CMTypeData {
    let spec = CMFieldSpec::parse(field).expect("field parses");
    parse_cm_type(&spec, "auto").expect("primitive type exists")
}

fn parse_pow2(e: u32, offset: i64) -> BigUint {
    let base = BigUint::one() << e;
    if offset >= 0 {
        base + big(offset as u64)
    } else {
        base - big((-offset) as u64)
    }
}

fn report(name: &str, pass: bool, detail: &str) {
    println!(
        "{}: {name} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{name} failed: {detail}");
}

/// Exhaustive reproduction, genus 2: Q(zeta_5), r = 1021, k = 2.
#[test]
fn criterion_1_exhaustive_genus2() {
    let t = cm_type("cyclotomic:5");
    let rep = exhaustive_search(&t, 2, &big(1021), 2_000_000_000).unwrap();
    let expected = 125_578f64;
    let count_ok = (rep.prime_count as f64 - expected).abs() / expected <= 0.01;
    let min_q_ok = rep.min_q == Some(big(2_023_621));
    let winner_ok = rep
        .winners
        .iter()
        .any(|w| w.group_order == big(4_092_747_290_896) && w.checks.all_pass());
    report(
        "criterion 1 (exhaustive genus 2)",
        count_ok && min_q_ok && winner_ok,
        &format!(
            "prime_count={} (target 125578 ±1%), min_q={:?} (target 2023621), golden winner order found: {winner_ok}",
            rep.prime_count, rep.min_q
        ),
    );
}

/// Exhaustive reproduction, genus 3: Q(zeta_7), r = 29, k = 4.
#[test]
fn criterion_2_exhaustive_genus3() {
    let t = cm_type("cyclotomic:7");
    let rep = exhaustive_search(&t, 4, &big(29), 2_000_000_000).unwrap();
    let expected = 162_643f64;
    let count_ok = (rep.prime_count as f64 - expected).abs() / expected <= 0.01;
    let min_q_ok = rep.min_q == Some(big(911));
    let rho_ok = rep
        .winners
        .first()
        .map(|w| (w.rho - 6.07).abs() <= 0.01)
        .unwrap_or(false);
    let order_ok = rep
        .winners
        .iter()
        .any(|w| w.group_order == big(778_417_333) && w.checks.all_pass());
    report(
        "criterion 2 (exhaustive genus 3)",
        count_ok && min_q_ok && rho_ok && order_ok,
        &format!(
            "prime_count={} (target 162643 ±1%), min_q={:?} (target 911), winner rho={:?} (target 6.07 ±0.01), winner order 778417333 found: {order_ok}",
            rep.prime_count,
            rep.min_q,
            rep.winners.first().map(|w| w.rho)
        ),
    );
}

/// Curve linkage: the printed curves realize the exhaustive-search orders.
#[test]
fn criterion_3_curve_linkage() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let c2 = HyperellipticCurve::parse("hyperelliptic:2023621:18,0,0,0,0,1").unwrap();
    let n2 = big(4_092_747_290_896);
    let check2 = probable_order_check(&c2, &n2, 10, &mut rng).unwrap();
    let c3 = HyperellipticCurve::parse("hyperelliptic:911:34,0,0,0,0,0,0,1").unwrap();
    let n3 = big(778_417_333);
    let check3 = probable_order_check(&c3, &n3, 10, &mut rng).unwrap();
    let t2 = twist_search(5, &n2, &big(2_023_621), 100, &mut rng)
        .unwrap()
        .map(|(a, _)| a);
    let t3 = twist_search(7, &n3, &big(911), 100, &mut rng)
        .unwrap()
        .map(|(a, _)| a);
    report(
        "criterion 3 (curve linkage)",
        check2 && check3 && t2 == Some(18) && t3 == Some(34),
        &format!(
            "order checks (10 trials): genus2={check2}, genus3={check3}; twists: x^5+a -> a={t2:?} (target 18), x^7+a -> a={t3:?} (target 34)"
        ),
    );
}

fn crypto_runs(count: usize) -> (CMTypeData, BigUint, Vec<WeilNumber>) {
    let t = cm_type("cyclotomic:5");
    let r = parse_pow2(160, 685);
    let runs: Vec<WeilNumber> = (0..count as u64)
        .map(|seed| {
            construct_pi_parallel(&t, 10, &r, seed + 1, 1, 1_000_000).expect("search succeeds")
        })
        .collect();
    (t, r, runs)
}

/// rho-distribution at cryptographic size: Q(zeta_5), r = 2^160 + 685,
/// k = 10, 200 successes.
#[test]
fn criterion_4_rho_distribution() {
    let (t, r, runs) = crypto_runs(200);
    let bound = rho_bound(&reflex(&t).unwrap(), &r);
    let in_band = runs.iter().filter(|w| (7.8..=8.0).contains(&w.rho)).count();
    let max_rho = runs.iter().map(|w| w.rho).fold(f64::MIN, f64::max);
    let all_valid = runs.iter().all(|w| w.checks.all_pass());
    report(
        "criterion 4 (rho distribution at 160 bits)",
        in_band * 10 >= runs.len() * 9 && max_rho <= bound && all_valid,
        &format!(
            "{in_band}/200 rho in [7.8, 8.0] (need >= 180), max rho {max_rho:.4} vs bound {bound:.4}, all validated: {all_valid}"
        ),
    );
}

/// Non-Galois quartic at cryptographic size, with the reflex field pinned.
#[test]
fn criterion_5_nongalois_quartic() {
    let t = cm_type("quartic:30,2,5");
    let r = parse_pow2(160, -1445);
    let w = construct_pi_parallel(&t, 13, &r, 1, 1, 1_000_000).unwrap();
    let bits = w.q.bits();
    let rx = reflex(&t).unwrap();
    let expected_poly = IntPoly::new(vec![
        BigInt::from(5),
        BigInt::from(0),
        BigInt::from(30),
        BigInt::from(0),
        BigInt::from(1),
    ]);
    let reflex_ok = *rx.reflex_field.field().poly() == expected_poly;
    report(
        "criterion 5 (non-Galois quartic)",
        (630..=660).contains(&bits) && w.checks.all_pass() && reflex_ok,
        &format!(
            "q has {bits} bits (target 630..660), checks {:?}, reflex poly x^4+30x^2+5: {reflex_ok}",
            w.checks.all_pass()
        ),
    );
}

/// Property suite: type-norm identity on random integral xi.
#[test]
fn criterion_6a_type_norm_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0usize;
    for field in ["cyclotomic:5", "cyclotomic:7", "quartic:30,2,5"] {
        let spec = CMFieldSpec::parse(field).unwrap();
        for info in enumerate_cm_types(&spec).into_iter().filter(|i| i.primitive) {
            let rx = reflex(&info.data).unwrap();
            let khat = rx.reflex_field.field();
            let k_field = info.data.spec.field();
            for _ in 0..1000 {
                let coords: Vec<BigInt> = (0..khat.degree())
                    .map(|_| BigInt::from(rng.gen_range(-50i64..=50)))
                    .collect();
                let xi = FieldElement::from_int_coords(coords);
                let pi = rx.type_norm(&xi).unwrap();
                let conj = info.data.spec.conjugate(&pi).unwrap();
                let prod = k_field.mul(&pi, &conj).unwrap();
                let n = khat.norm(&xi).unwrap();
                assert!(n.denom().is_one());
                let expected = k_field.integer(n.numer().clone());
                assert_eq!(prod, expected, "type norm identity failed in {field}");
                checked += 1;
            }
        }
    }
    report(
        "criterion 6a (type-norm identity)",
        checked >= 3000,
        &format!("pi * conj(pi) = N(xi) on {checked} random xi across three fields"),
    );
}

/// Property suite: Cantor group laws on >= 10^3 random triples per curve.
#[test]
fn criterion_6b_cantor_group_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let curves = [
        HyperellipticCurve::parse("hyperelliptic:2023621:18,0,0,0,0,1").unwrap(),
        HyperellipticCurve::parse("hyperelliptic:911:34,0,0,0,0,0,0,1").unwrap(),
    ];
    let mut triples = 0usize;
    for c in &curves {
        for _ in 0..1000 {
            let a = random_divisor(c, &mut rng).unwrap();
            let b = random_divisor(c, &mut rng).unwrap();
            let d = random_divisor(c, &mut rng).unwrap();
            let ab = divisor_add(&a, &b, c).unwrap();
            assert_eq!(ab, divisor_add(&b, &a, c).unwrap(), "commutativity");
            let left = divisor_add(&ab, &d, c).unwrap();
            let right = divisor_add(&a, &divisor_add(&b, &d, c).unwrap(), c).unwrap();
            assert_eq!(left, right, "associativity");
            assert!(
                divisor_add(&a, &c.negate(&a), c).unwrap().is_identity(),
                "inverse"
            );
            triples += 1;
        }
    }
    report(
        "criterion 6b (Cantor group laws)",
        triples == 2000,
        &format!("{triples} random triples across two curves"),
    );
}

/// Property suite: Phi_k(q) = 0 mod r if and only if ord_r(q) = k, for all
/// primes r < 500 and k | r-1 with r not dividing k, brute-forced over q.
#[test]
fn criterion_6c_cyclotomic_order_consistency() {
    let mut checked = 0usize;
    for r in (3u64..500).filter(|&r| weilcm::arith::is_prime(&big(r))) {
        let rb = big(r);
        let r_int = BigInt::from(r);
        for k in (1..r).filter(|k| (r - 1) % k == 0) {
            let phi = cyclotomic_polynomial(k);
            for q in 1..r {
                let ord = multiplicative_order(&big(q), &rb, None).unwrap();
                let divides = (phi.eval(&BigInt::from(q)) % &r_int) == BigInt::default();
                assert_eq!(
                    divides,
                    ord == big(k),
                    "mismatch at r={r}, k={k}, q={q}"
                );
                checked += 1;
            }
        }
    }
    report(
        "criterion 6c (cyclotomic order consistency)",
        checked > 100_000,
        &format!("{checked} (r, k, q) combinations"),
    );
}

/// Property suite: every generated output passes full validation at
/// elevated precision.
#[test]
fn criterion_6d_validation_invariants() {
    let (_, _, runs) = crypto_runs(10);
    let mut all = true;
    for w in &runs {
        let rep = validate_weil(w, 256).unwrap();
        all &= rep.all_pass();
        all &= (&w.group_order % &w.r) == BigUint::default();
    }
    report(
        "criterion 6d (validation invariants)",
        all,
        "10 fresh outputs re-validated at 256-bit precision, r | group order",
    );
}

/// Report-only: mean iteration count over 50 runs at r near 2^160 versus
/// the 2*ghat*ln(r) heuristic; flagged (not failed) outside a factor of 4.
#[test]
fn criterion_7_iteration_heuristic_report() {
    let (t, r, runs) = crypto_runs(50);
    let mean =
        runs.iter().map(|w| w.iterations as f64).sum::<f64>() / runs.len() as f64;
    let g_hat = reflex(&t).unwrap().g_hat();
    let heuristic = 2.0 * g_hat as f64 * log2_biguint(&r) * std::f64::consts::LN_2;
    let ratio = mean / heuristic;
    let flagged = !(0.25..=4.0).contains(&ratio);
    println!(
        "REPORT: criterion 7 (iteration heuristic) — mean iterations {mean:.1} vs 2*ghat*ln(r) = {heuristic:.1}, ratio {ratio:.3}{}",
        if flagged { " [FLAGGED: outside factor 4]" } else { "" }
    );
}

/// Randomized-output demonstration: Q(zeta_7), k = 17, r = 2^180 - 7427
/// gives a validated q near 1077 bits (±5%).
#[test]
fn demo_genus3_1077_bits() {
    let t = cm_type("cyclotomic:7");
    let r = parse_pow2(180, -7427);
    let w = construct_pi_parallel(&t, 17, &r, 1, 1, 1_000_000).unwrap();
    let bits = w.q.bits() as f64;
    report(
        "demo (genus 3, ~1077-bit q)",
        (bits - 1077.0).abs() / 1077.0 <= 0.05 && w.checks.all_pass(),
        &format!("q has {} bits (target 1077 ±5%), rho {:.4}", w.q.bits(), w.rho),
    );
}

/// Randomized-output demonstration: the 8-dimensional Q(zeta_17) family
/// with r = 1021, k = 10 gives a validated q of comparable size (±5% of
/// the reference 153 bits).
#[test]
fn demo_zeta17_8_dimensional() {
    let t = cm_type("cyclotomic:17");
    let w = construct_pi_parallel(&t, 10, &big(1021), 1, 1, 1_000_000).unwrap();
    let bits = w.q.bits() as f64;
    report(
        "demo (8-dimensional, ~153-bit q)",
        (bits - 153.0).abs() / 153.0 <= 0.05 && w.checks.all_pass(),
        &format!("q has {} bits (target 153 ±5%), rho {:.4}", w.q.bits(), w.rho),
    );
}
