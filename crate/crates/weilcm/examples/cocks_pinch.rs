//! The genus-1 specialization: Cocks-Pinch parameters for an ordinary
//! elliptic curve with CM by Q(sqrt(-d)), prescribed subgroup size r, and
//! embedding degree k.
//!
//! Run with: cargo run --release --example cocks_pinch

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weilcm::weil::cocks_pinch_g1;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    // the textbook toy case: d = 1, r = 5, k = 2 gives q = 29
    let res = cocks_pinch_g1(1, 2, &BigUint::from(5u32), &mut rng, 10_000).unwrap();
    println!(
        "d=1 r=5 k=2: q = {}, pi = {} + {} i, group order = {}",
        res.q, res.a, res.b, res.group_order
    );

    // a larger subgroup: r = 2^31 - 1, k = 6, CM by Q(sqrt(-3))
    let r = BigUint::from((1u64 << 31) - 1);
    let res = cocks_pinch_g1(3, 6, &r, &mut rng, 100_000).unwrap();
    println!(
        "d=3 r=2^31-1 k=6: q = {} ({} bits), group order = {}, rho = {:.3}",
        res.q,
        res.q.bits(),
        res.group_order,
        res.rho
    );
}
