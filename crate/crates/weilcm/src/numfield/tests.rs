use super::*;
use crate::arith::IntPoly;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn cyclotomic5() -> NumberField {
    NumberField::new(IntPoly::from_i64(&[1, 1, 1, 1, 1])).unwrap()
}

fn quartic_30_2_5() -> NumberField {
    // x^4 + 30x^2 + 205, theta^2 = -15 + 2*sqrt(5)... a CM quartic
    NumberField::new(IntPoly::from_i64(&[205, 0, 30, 0, 1])).unwrap()
}

#[test]
fn rejects_non_monic_and_non_squarefree() {
    assert!(NumberField::new(IntPoly::from_i64(&[1, 0, 2])).is_err());
    assert!(NumberField::new(IntPoly::from_i64(&[0, 0, 1])).is_err());
    assert!(NumberField::new(IntPoly::from_i64(&[7])).is_err());
}

#[test]
fn norm_of_zeta5_minus_one_is_five() {
    let k = cyclotomic5();
    let zeta = k.generator();
    let a = k.sub(&zeta, &k.one()).unwrap();
    assert_eq!(k.norm_integral(&a).unwrap(), BigInt::from(5));
}

#[test]
fn norm_of_rational_integer() {
    let k = quartic_30_2_5();
    assert_eq!(
        k.norm_integral(&k.integer(BigInt::from(2))).unwrap(),
        BigInt::from(16)
    );
    assert_eq!(
        k.norm_integral(&k.integer(BigInt::from(-3))).unwrap(),
        BigInt::from(81)
    );
    assert_eq!(k.norm_integral(&k.zero()).unwrap(), BigInt::from(0));
}

#[test]
fn norm_of_generator_is_constant_term_up_to_sign() {
    // N(theta) = (-1)^n f(0) for monic f of degree n
    let k = cyclotomic5();
    assert_eq!(k.norm_integral(&k.generator()).unwrap(), BigInt::from(1));
    let k = quartic_30_2_5();
    assert_eq!(k.norm_integral(&k.generator()).unwrap(), BigInt::from(205));
}

#[test]
fn minimal_polynomial_of_real_subfield_generator() {
    // zeta5 + zeta5^-1 satisfies x^2 + x - 1
    let k = cyclotomic5();
    let zeta = k.generator();
    // zeta^-1 = zeta^4 = -1 - zeta - zeta^2 - zeta^3
    let zeta_inv = FieldElement::from_i64_coords(&[-1, -1, -1, -1]);
    let a = k.add(&zeta, &zeta_inv).unwrap();
    let mp = k.minimal_polynomial(&a).unwrap();
    let mp = ratpoly_to_intpoly(&mp).unwrap();
    assert_eq!(mp, IntPoly::from_i64(&[-1, 1, 1]));
    assert_eq!(k.element_degree(&a).unwrap(), 2);
    assert_eq!(k.element_degree(&zeta).unwrap(), 4);
    assert_eq!(k.element_degree(&k.one()).unwrap(), 1);
}

#[test]
fn generator_satisfies_defining_polynomial() {
    for k in [cyclotomic5(), quartic_30_2_5()] {
        let mp = k.minimal_polynomial(&k.generator()).unwrap();
        let f = ratpoly_to_intpoly(&mp).unwrap();
        assert_eq!(&f, k.poly());
    }
}

#[test]
fn mul_matches_reduction() {
    // zeta^4 * zeta = 1 in Q(zeta5)
    let k = cyclotomic5();
    let z4 = FieldElement::from_i64_coords(&[-1, -1, -1, -1]);
    let p = k.mul(&z4, &k.generator()).unwrap();
    assert_eq!(p, k.one());
}

#[test]
fn roots_mod_r_cyclotomic() {
    let k = cyclotomic5();
    // 1021 = 1 mod 5, so x^4+...+1 splits completely
    let roots = k.roots_mod_r(&BigUint::from(1021u32)).unwrap();
    assert_eq!(roots.len(), 4);
    for t in &roots {
        // each root has multiplicative order 5
        let fp = PrimeField::new(BigUint::from(1021u32));
        assert_eq!(fp.pow(t.value(), &BigUint::from(5u32)), BigUint::one());
        assert_ne!(t.value(), &BigUint::one());
    }
    // 7 = 2 mod 5: inert, no roots
    assert!(k.roots_mod_r(&BigUint::from(7u32)).unwrap().is_empty());
    // 5 ramifies (divides the discriminant 125)
    assert!(matches!(
        k.roots_mod_r(&BigUint::from(5u32)),
        Err(Error::RamifiedPrime(_))
    ));
}

#[test]
fn reduce_mod_root_is_ring_homomorphism() {
    let k = cyclotomic5();
    let r = BigUint::from(1021u32);
    let roots = k.roots_mod_r(&r).unwrap();
    let t = &roots[0];
    let a = FieldElement::from_i64_coords(&[3, -7, 2, 11]);
    let b = FieldElement::from_i64_coords(&[-4, 5, 0, 9]);
    let red = |x: &FieldElement| k.reduce_mod_root(x, t).unwrap();
    assert_eq!(
        red(&k.add(&a, &b).unwrap()),
        red(&a).add(&red(&b)).unwrap()
    );
    assert_eq!(
        red(&k.mul(&a, &b).unwrap()),
        red(&a).mul(&red(&b)).unwrap()
    );
}

#[test]
fn embeddings_of_cyclotomic5() {
    let k = cyclotomic5();
    let emb = k.complex_embeddings(96).unwrap();
    assert_eq!(emb.len(), 4);
    assert!(emb.is_totally_complex());
    // roots are primitive fifth roots of unity: |z| = 1, re in
    // {cos 72, cos 144 degrees}
    for root in emb.roots() {
        let (re, im) = root.z.to_f64();
        let norm = (re * re + im * im).sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(
            (re - 0.30901699437494745).abs() < 1e-12
                || (re + 0.8090169943749475).abs() < 1e-12
        );
    }
    // conjugate pairing: adjacent roots, positive imaginary part first
    for i in (0..4).step_by(2) {
        assert_eq!(emb.conjugate_index(i), i + 1);
        let (_, im0) = emb.roots()[i].z.to_f64();
        let (_, im1) = emb.roots()[i + 1].z.to_f64();
        assert!(im0 > 0.0 && im1 < 0.0);
        assert!((im0 + im1).abs() < 1e-12);
    }
}

#[test]
fn embeddings_detect_real_field() {
    let k = NumberField::new(IntPoly::from_i64(&[-5, 0, 1])).unwrap(); // x^2 - 5
    let emb = k.complex_embeddings(96).unwrap();
    assert_eq!(emb.len(), 2);
    assert!(!emb.is_totally_complex());
    let sqrt5 = 5f64.sqrt();
    let values: Vec<f64> = emb.roots().iter().map(|r| r.z.to_f64().0).collect();
    assert!((values[0] + sqrt5).abs() < 1e-12);
    assert!((values[1] - sqrt5).abs() < 1e-12);
}

#[test]
fn embeddings_of_cm_quartic() {
    let k = quartic_30_2_5();
    let emb = k.complex_embeddings(128).unwrap();
    assert_eq!(emb.len(), 4);
    assert!(emb.is_totally_complex());
    // theta^2 = -15 +- 2*sqrt(5): purely imaginary roots
    for root in emb.roots() {
        let (re, im) = root.z.to_f64();
        assert!(re.abs() < 1e-12);
        let target1 = (15.0 - 2.0 * 5f64.sqrt()).sqrt();
        let target2 = (15.0 + 2.0 * 5f64.sqrt()).sqrt();
        assert!((im.abs() - target1).abs() < 1e-10 || (im.abs() - target2).abs() < 1e-10);
    }
}

#[test]
fn eval_element_tracks_norm() {
    // |N(a)| equals the product of |sigma(a)| over all embeddings
    let k = cyclotomic5();
    let a = FieldElement::from_i64_coords(&[2, -1, 3, 1]);
    let emb = k.complex_embeddings(128).unwrap();
    let mut prod = 1.0f64;
    for i in 0..emb.len() {
        let (v, err) = emb.eval_element(&a, i);
        assert!(err.to_f64() < 1e-20);
        let (re, im) = v.to_f64();
        prod *= (re * re + im * im).sqrt();
    }
    let norm = k.norm_integral(&a).unwrap();
    let expected = norm.abs().to_f64().unwrap();
    assert!((prod - expected).abs() / expected < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative(
        a in proptest::collection::vec(-50i64..50, 4),
        b in proptest::collection::vec(-50i64..50, 4),
    ) {
        let k = cyclotomic5();
        let x = FieldElement::from_i64_coords(&a);
        let y = FieldElement::from_i64_coords(&b);
        let xy = k.mul(&x, &y).unwrap();
        prop_assert_eq!(
            k.norm_integral(&xy).unwrap(),
            k.norm_integral(&x).unwrap() * k.norm_integral(&y).unwrap()
        );
    }

    #[test]
    fn reduction_commutes_with_norm_product(
        a in proptest::collection::vec(-30i64..30, 4),
    ) {
        // product of a over all reduction maps equals N(a) mod r
        let k = cyclotomic5();
        let r = BigUint::from(1021u32);
        let x = FieldElement::from_i64_coords(&a);
        let roots = k.roots_mod_r(&r).unwrap();
        let mut prod = Residue::new(BigUint::one(), r.clone());
        for t in &roots {
            prod = prod.mul(&k.reduce_mod_root(&x, t).unwrap()).unwrap();
        }
        let n = k.norm_integral(&x).unwrap();
        let rb = BigInt::from(r.clone());
        let n_mod = (((&n % &rb) + &rb) % &rb).to_biguint().unwrap();
        prop_assert_eq!(prod.value(), &n_mod);
    }
}
