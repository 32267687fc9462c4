use super::*;
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn b(n: u64) -> BigUint {
    BigUint::from(n)
}

#[test]
fn primality_examples() {
    assert!(is_prime(&b(911)));
    assert!(!is_prime(&b(1)));
    assert!(is_prime(&b(2023621)));
    assert!(!is_prime(&b(0)));
    assert!(is_prime(&b(2)));
    assert!(!is_prime(&b(911 * 2023621)));
}

#[test]
fn primality_agrees_with_trial_division_below_1e6() {
    let primes = primality::sieve(1_000_000);
    let mut idx = 0usize;
    for n in 0u64..1_000_000 {
        let expected = idx < primes.len() && primes[idx] == n;
        if expected {
            idx += 1;
        }
        assert_eq!(primality::is_prime_u64(n), expected, "mismatch at {n}");
    }
}

#[test]
fn primality_large() {
    // 2^160 + 685 and 2^160 - 1445 are prime, 2^160 + 1 is not
    let two160 = BigUint::from(1u32) << 160;
    assert!(is_prime(&(&two160 + b(685))));
    assert!(is_prime(&(&two160 - b(1445u64))));
    assert!(!is_prime(&(&two160 + b(1))));
}

#[test]
fn multiplicative_order_examples() {
    assert_eq!(
        multiplicative_order(&b(911), &b(29), None).unwrap(),
        b(4)
    );
    assert_eq!(multiplicative_order(&b(1), &b(29), None).unwrap(), b(1));
    assert_eq!(
        multiplicative_order(&b(2023621), &b(1021), None).unwrap(),
        b(2)
    );
    assert!(multiplicative_order(&b(58), &b(29), None).is_err());
}

#[test]
fn multiplicative_order_randomized_property() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    use rand::Rng;
    for _ in 0..200 {
        let r = loop {
            let c: u64 = rng.gen_range(3..50_000);
            if primality::is_prime_u64(c) {
                break c;
            }
        };
        let a: u64 = rng.gen_range(1..r);
        let ord = multiplicative_order(&b(a), &b(r), None).unwrap();
        assert!(b(a).modpow(&ord, &b(r)).is_one());
        for (p, _) in factor(&ord).unwrap() {
            let sub = &ord / &p;
            assert!(!b(a).modpow(&sub, &b(r)).is_one());
        }
    }
}

#[test]
fn cyclotomic_small() {
    assert_eq!(cyclotomic_polynomial(1), IntPoly::from_i64(&[-1, 1]));
    assert_eq!(cyclotomic_polynomial(2), IntPoly::from_i64(&[1, 1]));
    assert_eq!(
        cyclotomic_polynomial(10),
        IntPoly::from_i64(&[1, -1, 1, -1, 1])
    );
    assert_eq!(
        cyclotomic_polynomial(5),
        IntPoly::from_i64(&[1, 1, 1, 1, 1])
    );
}

#[test]
fn cyclotomic_product_identity() {
    for n in 1u64..=100 {
        let mut prod = IntPoly::one();
        for d in 1..=n {
            if n % d == 0 {
                prod = prod.mul(&cyclotomic_polynomial(d));
            }
        }
        let expected = IntPoly::monomial(n as usize).sub(&IntPoly::one());
        assert_eq!(prod, expected, "product of cyclotomics at n = {n}");
    }
}

#[test]
fn primitive_root_examples() {
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let z = primitive_kth_root(&b(29), 1, &mut rng).unwrap();
    assert!(z.is_one());
    let z = primitive_kth_root(&b(29), 4, &mut rng).unwrap();
    assert!(z.value() == &b(12) || z.value() == &b(17));
    let z = primitive_kth_root(&b(1021), 2, &mut rng).unwrap();
    assert_eq!(z.value(), &b(1020));
    assert!(primitive_kth_root(&b(29), 5, &mut rng).is_err());
}

#[test]
fn primitive_root_is_cyclotomic_root() {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    for (r, k) in [(29u64, 4u64), (1021, 4), (1021, 10), (113, 16)] {
        let z = primitive_kth_root(&b(r), k, &mut rng).unwrap();
        let phi = cyclotomic_polynomial(k);
        let v = phi.eval(&BigInt::from(z.value().clone()));
        let v = v % BigInt::from(r);
        assert!(v.is_zero(), "Phi_{k}(zeta) != 0 mod {r}");
    }
}

#[test]
fn all_primitive_roots() {
    let roots = all_primitive_kth_roots(&b(29), 4).unwrap();
    assert_eq!(
        roots.iter().map(|z| z.value().clone()).collect::<Vec<_>>(),
        vec![b(12), b(17)]
    );
}

#[test]
fn resultant_and_discriminant() {
    let f = IntPoly::from_i64(&[-1, 0, 1]); // x^2 - 1
    let g = IntPoly::from_i64(&[-4, 0, 1]); // x^2 - 4
    assert_eq!(f.resultant(&g), BigInt::from(9));
    assert_eq!(g.resultant(&f), BigInt::from(9));

    let h = IntPoly::from_i64(&[1, 0, 1]); // x^2 + 1
    assert_eq!(h.discriminant(), BigInt::from(-4));

    // disc(Phi_5) = 125, disc(Phi_7) = -16807
    assert_eq!(
        cyclotomic_polynomial(5).discriminant(),
        BigInt::from(125)
    );
    assert_eq!(
        cyclotomic_polynomial(7).discriminant(),
        BigInt::from(-16807)
    );
}

#[test]
fn resultant_multiplicative() {
    let f = IntPoly::from_i64(&[2, -3, 1, 5]);
    let g = IntPoly::from_i64(&[1, 4, -2]);
    let h = IntPoly::from_i64(&[-7, 0, 3, 1]);
    let gh = g.mul(&h);
    assert_eq!(f.resultant(&gh), f.resultant(&g) * f.resultant(&h));
}

#[test]
fn fp_roots_of_cyclotomic() {
    let fp = PrimeField::new(b(1021));
    let phi5: FpPoly = vec![b(1), b(1), b(1), b(1), b(1)];
    let roots = fp.roots(&phi5);
    assert_eq!(roots.len(), 4);
    for t in &roots {
        assert!(fp.peval(&phi5, t).is_zero());
    }

    // 7 has order 4 mod 5, so Phi_5 has no roots mod 7
    let fp7 = PrimeField::new(b(7));
    let phi5_7: FpPoly = vec![b(1), b(1), b(1), b(1), b(1)];
    assert!(fp7.roots(&phi5_7).is_empty());
}

#[test]
fn fp_sqrt() {
    let fp = PrimeField::new(b(1021));
    for a in [1u64, 4, 9, 100, 555] {
        let a = b(a);
        let sq = fp.mul(&a, &a);
        let r = fp.sqrt(&sq).unwrap();
        assert!(r == a || fp.neg(&r) == a || fp.mul(&r, &r) == sq);
    }
    // 29 = 1 mod 4 exercises the full Tonelli-Shanks path
    let fp29 = PrimeField::new(b(29));
    let mut squares = 0;
    for a in 1u64..29 {
        if let Some(r) = fp29.sqrt(&b(a)) {
            assert_eq!(fp29.mul(&r, &r), b(a));
            squares += 1;
        }
    }
    assert_eq!(squares, 14);
}

#[test]
fn factor_reassembles() {
    for n in [778417333u64, 4092747290896, 2023620, 1 << 32] {
        let fs = factor(&b(n)).unwrap();
        let mut prod = BigUint::one();
        for (p, e) in &fs {
            assert!(is_prime(p), "{p} not prime");
            prod *= p.pow(*e);
        }
        assert_eq!(prod, b(n));
    }
}
