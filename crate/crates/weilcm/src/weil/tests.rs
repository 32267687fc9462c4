use super::*;
use crate::cm::{enumerate_cm_types, reflex, CMFieldSpec};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn first_primitive_type(spec: &CMFieldSpec) -> CMTypeData {
    enumerate_cm_types(spec)
        .into_iter()
        .find(|info| info.primitive)
        .expect("primitive type")
        .data
}

fn zeta5_type() -> CMTypeData {
    first_primitive_type(&CMFieldSpec::make_cyclotomic_cm(5).unwrap())
}

fn zeta7_type() -> CMTypeData {
    first_primitive_type(&CMFieldSpec::make_cyclotomic_cm(7).unwrap())
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

#[test]
fn split_zeta5_r1021_gives_two_labeled_pairs() {
    let t = zeta5_type();
    let rx = reflex(&t).unwrap();
    let split = split_completely(&rx, &big(1021)).unwrap();
    assert_eq!(split.g_hat(), 2);
    let khat = rx.reflex_field.field();
    let mut seen = std::collections::BTreeSet::new();
    for (a, b) in &split.pairs {
        // each label is a root of the reflex polynomial mod r
        for s in [a, b] {
            let val = khat
                .poly()
                .eval(&BigInt::from(s.value().clone()))
                .mod_floor(&BigInt::from(1021));
            assert!(val.is_zero());
            seen.insert(s.value().clone());
        }
        // the second entry is the conjugate of the first
        let conj = khat
            .reduce_rat_mod_root(rx.reflex_field.conjugation_image(), a)
            .unwrap();
        assert_eq!(&conj, b);
    }
    assert_eq!(seen.len(), 4);
}

#[test]
fn split_zeta7_r29_gives_three_pairs() {
    let t = zeta7_type();
    let rx = reflex(&t).unwrap();
    let split = split_completely(&rx, &big(29)).unwrap();
    assert_eq!(split.g_hat(), 3);
}

#[test]
fn split_rejects_non_split_prime() {
    let t = zeta5_type();
    let rx = reflex(&t).unwrap();
    // 13 = 3 mod 5, so 13 does not split completely in Q(zeta_5)
    match split_completely(&rx, &big(13)) {
        Err(Error::NotSplit(r)) => assert_eq!(r, big(13)),
        other => panic!("expected NotSplit, got {other:?}"),
    }
}

#[test]
fn split_rejects_composite_r() {
    let t = zeta5_type();
    let rx = reflex(&t).unwrap();
    assert!(split_completely(&rx, &big(1001)).is_err());
}

#[test]
fn sample_residues_satisfies_product_conditions() {
    let r = big(1021);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..32 {
        let zeta = primitive_kth_root(&r, 4, &mut rng).unwrap();
        let a = sample_residues(&mut rng, 3, &zeta);
        let mut pa = Residue::from_u64(1, &r);
        for x in &a.alphas {
            assert!(!x.value().is_zero());
            pa = pa.mul(x).unwrap();
        }
        assert!(pa.value().is_one());
        let mut pb = Residue::from_u64(1, &r);
        for x in &a.betas {
            assert!(!x.value().is_zero());
            pb = pb.mul(x).unwrap();
        }
        assert_eq!(pb, zeta);
    }
}

#[test]
fn lift_all_ones_is_one() {
    let t = zeta5_type();
    let rx = reflex(&t).unwrap();
    let split = split_completely(&rx, &big(1021)).unwrap();
    let one = Residue::from_u64(1, &big(1021));
    let assign = ResidueAssignment {
        alphas: vec![one.clone(), one.clone()],
        betas: vec![one.clone(), one.clone()],
        zeta: one,
    };
    let xi = lift_crt(&split, &assign).unwrap();
    assert_eq!(xi, rx.reflex_field.field().one());
}

#[test]
fn lift_round_trips_and_stays_centered() {
    let t = zeta7_type();
    let rx = reflex(&t).unwrap();
    let r = big(29);
    let split = split_completely(&rx, &r).unwrap();
    let khat = rx.reflex_field.field();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..16 {
        let zeta = primitive_kth_root(&r, 4, &mut rng).unwrap();
        let assign = sample_residues(&mut rng, split.g_hat(), &zeta);
        let xi = lift_crt(&split, &assign).unwrap();
        let coords = xi.int_coords().unwrap();
        for c in &coords {
            assert!(c.magnitude() <= &BigUint::from(14u32), "coordinate {c} outside (-r/2, r/2]");
        }
        for (i, (ta, tb)) in split.pairs.iter().enumerate() {
            assert_eq!(khat.reduce_int_mod_root(&coords, ta), assign.alphas[i]);
            assert_eq!(khat.reduce_int_mod_root(&coords, tb), assign.betas[i]);
        }
    }
}

#[test]
fn construct_pi_zeta5_r1021() {
    let t = zeta5_type();
    let r = big(1021);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let w = construct_pi(&t, 2, &r, &mut rng, 4096).unwrap();
    assert!(w.checks.all_pass());
    assert!(is_prime(&w.q));
    assert!((&w.group_order % &r).is_zero());
    // q has order exactly 2 mod 1021
    let qm = &w.q % &r;
    assert_ne!(qm, BigUint::one());
    assert!((&qm * &qm % &r).is_one());
    assert!(w.rho > 2.0 && w.rho < rho_bound(&reflex(&t).unwrap(), &r));
}

#[test]
fn construct_pi_quartic_cyclic() {
    // x^4 + 4x^2 + 2, the CM field inside Q(zeta_16); 17 = 1 mod 16 splits.
    let spec = CMFieldSpec::make_quartic_cm(2, -1, 2).unwrap();
    let t = first_primitive_type(&spec);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = construct_pi(&t, 2, &big(17), &mut rng, 8192).unwrap();
    assert!(w.checks.all_pass());
    assert!((&w.group_order % &big(17)).is_zero());
}

#[test]
fn construct_pi_nongalois_quartic_small() {
    let spec = CMFieldSpec::make_quartic_cm(30, 2, 5).unwrap();
    let t = first_primitive_type(&spec);
    // need r = 1 mod k splitting completely in both x^4+60x^2+880 and
    // x^4+30x^2+5; scan small primes for one.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rx = reflex(&t).unwrap();
    let mut done = false;
    for r in [79u64, 89, 131, 151, 211, 239, 269, 271] {
        let r = big(r);
        if !((&r - BigUint::one()) % BigUint::from(2u32)).is_zero() {
            continue;
        }
        if split_completely(&rx, &r).is_err() {
            continue;
        }
        let w = construct_pi(&t, 2, &r, &mut rng, 8192).unwrap();
        assert!(w.checks.all_pass());
        assert!((&w.group_order % &r).is_zero());
        done = true;
        break;
    }
    assert!(done, "no small split prime in the scan list");
}

#[test]
fn construct_pi_rejects_bad_inputs() {
    let t = zeta5_type();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    // composite r
    assert!(construct_pi(&t, 2, &big(1000), &mut rng, 10).is_err());
    // k does not divide r - 1
    assert!(construct_pi(&t, 7, &big(1021), &mut rng, 10).is_err());
    // r does not split
    assert!(construct_pi(&t, 2, &big(13), &mut rng, 10).is_err());
}

#[test]
fn construct_pi_parallel_deterministic_single_thread() {
    let t = zeta5_type();
    let r = big(1021);
    let a = construct_pi_parallel(&t, 2, &r, 99, 1, 4096).unwrap();
    let b = construct_pi_parallel(&t, 2, &r, 99, 1, 4096).unwrap();
    assert_eq!(a.q, b.q);
    assert_eq!(a.pi, b.pi);
    let c = construct_pi_parallel(&t, 2, &r, 99, 2, 4096).unwrap();
    assert!(c.checks.all_pass());
}

#[test]
fn validate_rejects_rational_pi() {
    let t = zeta5_type();
    let field = t.spec.field().clone();
    let w = WeilNumber {
        pi: field.integer(BigInt::from(3)),
        q: big(9),
        r: big(5),
        k: 2,
        group_order: big(16),
        rho: 0.0,
        xi: field.integer(BigInt::from(3)),
        cm_type: t,
        checks: ValidationReport::default(),
        iterations: 0,
    };
    let rep = validate_weil(&w, 0).unwrap();
    assert!(rep.unit_weil); // 3 * 3 = 9 holds
    assert!(!rep.generates); // but 3 does not generate the field
    assert!(!rep.all_pass());
}

#[test]
fn rho_matches_reported_values() {
    assert!((rho(3, &big(911), &big(29)) - 6.07).abs() < 0.01);
    assert!((rho(2, &big(2023621), &big(1021)) - 4.19).abs() < 0.01);
}

#[test]
fn log2_biguint_handles_huge_inputs() {
    let n = BigUint::one() << 1000;
    assert!((log2_biguint(&n) - 1000.0).abs() < 1e-9);
    assert!((log2_biguint(&big(1024)) - 10.0).abs() < 1e-12);
}

#[test]
fn vertex_bound_quadratic_field() {
    // x^2 + 1: vertices (+-1/2, +-1/2) all have modulus sqrt(2)/2 at +-i.
    let field = NumberField::new(IntPoly::from_i64(&[1, 0, 1])).unwrap();
    let emb = field.complex_embeddings(96).unwrap();
    let m = parallelotope_vertex_bound(&emb);
    assert!((m - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
}

#[test]
fn rho_bound_zeta5_limits_to_eight() {
    let t = zeta5_type();
    let rx = reflex(&t).unwrap();
    let r = (BigUint::one() << 160) + BigUint::from(685u32);
    let bound = rho_bound(&rx, &r);
    assert!(bound > 7.9 && bound < 8.5, "bound = {bound}");
    // and it certifies the small exhaustive winner
    assert!(rho(2, &big(2023621), &big(1021)) <= rho_bound(&rx, &big(1021)));
}

#[test]
fn exhaustive_budget_enforced() {
    let t = zeta5_type();
    match exhaustive_search(&t, 2, &big(1021), 1000) {
        Err(Error::BudgetExceeded(b)) => assert_eq!(b, 1000),
        other => panic!("expected BudgetExceeded, got {other:?}"),
    }
}

#[test]
fn exhaustive_tiny_fast_and_generic_agree() {
    let t = zeta5_type();
    let r = big(31);
    let fast = exhaustive_search_with(&t, 2, &r, 1_000_000, false).unwrap();
    let generic = exhaustive_search_with(&t, 2, &r, 1_000_000, true).unwrap();
    assert_eq!(fast.domain_size, 900);
    assert_eq!(fast.domain_size, generic.domain_size);
    assert_eq!(fast.prime_count, generic.prime_count);
    assert_eq!(fast.step8_failures, generic.step8_failures);
    assert_eq!(fast.min_q, generic.min_q);
    assert_eq!(fast.rho_histogram, generic.rho_histogram);
    assert!(fast.prime_count > 0);
    let min_q = fast.min_q.clone().expect("some valid candidate");
    for w in &fast.winners {
        assert_eq!(w.q, min_q);
        assert!(w.checks.all_pass());
    }
    // residual round trip: some root of K's polynomial mod r reduces the
    // winner to 1, and q has order k mod r.
    let w = &fast.winners[0];
    let roots = t.spec.field().roots_mod_r(&r).unwrap();
    let coords = w.pi.int_coords().unwrap();
    let hits = roots
        .iter()
        .filter(|root| t.spec.field().reduce_int_mod_root(&coords, root).value().is_one())
        .count();
    assert!(hits >= 1);
    let qm = &w.q % &r;
    assert_ne!(qm, BigUint::one());
    assert!((&qm * &qm % &r).is_one());
    // every prime candidate respects the rho bound
    let rx = reflex(&t).unwrap();
    let bound = rho_bound(&rx, &r);
    let max_bin = *fast.rho_histogram.keys().max().unwrap();
    assert!((max_bin as f64) * 0.05 <= bound);
}

#[test]
fn exhaustive_prime_count_bounded_by_domain() {
    let t = zeta5_type();
    let rep = exhaustive_search(&t, 2, &big(11), 1_000_000).unwrap();
    assert_eq!(rep.domain_size, 100);
    assert!(rep.prime_count <= 100);
    let total: u64 = rep.rho_histogram.values().sum();
    assert_eq!(total, rep.prime_count);
}

#[test]
fn cocks_pinch_small_example() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let res = cocks_pinch_g1(1, 2, &big(5), &mut rng, 1000).unwrap();
    // the smallest suitable translate: q = 29 = 25 + 4, group order 40
    assert_eq!(res.q, big(29));
    assert_eq!(res.group_order, big(40));
    assert!((&res.group_order % &big(5)).is_zero());
    assert_eq!(&res.q % &big(5), big(4)); // q = -1 mod 5, order 2
}

#[test]
fn cocks_pinch_cubic_order_example() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let res = cocks_pinch_g1(3, 3, &big(7), &mut rng, 1000).unwrap();
    assert!(is_prime(&res.q));
    // q mod 7 is a primitive cube root of unity: 2 or 4
    let qm = (&res.q % &big(7)).to_u64().unwrap();
    assert!(qm == 2 || qm == 4, "q mod 7 = {qm}");
    assert!((&res.group_order % &big(7)).is_zero());
    // group order = q + 1 - 2a
    let lhs = BigInt::from(res.group_order.clone());
    let rhs = BigInt::from(res.q.clone()) + BigInt::one() - BigInt::from(2) * &res.a;
    assert_eq!(lhs, rhs);
}

#[test]
fn cocks_pinch_rejects_inert_prime() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // -1 is a non-residue mod 7
    match cocks_pinch_g1(1, 2, &big(7), &mut rng, 1000) {
        Err(Error::NotSplit(r)) => assert_eq!(r, big(7)),
        other => panic!("expected NotSplit, got {other:?}"),
    }
}

#[test]
fn cocks_pinch_rejects_bad_d() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    assert!(cocks_pinch_g1(4, 2, &big(5), &mut rng, 100).is_err());
    assert!(cocks_pinch_g1(0, 2, &big(5), &mut rng, 100).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lift_round_trip_random(seed in 0u64..1_000_000) {
        let t = zeta5_type();
        let rx = reflex(&t).unwrap();
        let r = big(1021);
        let split = split_completely(&rx, &r).unwrap();
        let khat = rx.reflex_field.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zeta = primitive_kth_root(&r, 2, &mut rng).unwrap();
        let assign = sample_residues(&mut rng, split.g_hat(), &zeta);
        let xi = lift_crt(&split, &assign).unwrap();
        let coords = xi.int_coords().unwrap();
        for (i, (ta, tb)) in split.pairs.iter().enumerate() {
            prop_assert_eq!(khat.reduce_int_mod_root(&coords, ta), assign.alphas[i].clone());
            prop_assert_eq!(khat.reduce_int_mod_root(&coords, tb), assign.betas[i].clone());
        }
        // q = N(xi) = zeta mod r
        let q = khat.norm_integral(&xi).unwrap();
        let qm = q.mod_floor(&BigInt::from(1021));
        prop_assert_eq!(qm.to_biguint().unwrap(), assign.zeta.value().clone());
    }
}
