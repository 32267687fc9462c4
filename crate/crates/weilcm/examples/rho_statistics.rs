//! Empirical distribution of the rho-value g*log(q)/log(r) over repeated
//! randomized runs at cryptographic size, compared against the
//! parallelotope upper bound.
//!
//! Run with: cargo run --release --example rho_statistics

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use weilcm::cm::{parse_cm_type, reflex, CMFieldSpec};
use weilcm::weil::{construct_pi_parallel, rho_bound};

fn main() {
    let spec = CMFieldSpec::parse("cyclotomic:5").unwrap();
    let t = parse_cm_type(&spec, "auto").unwrap();
    let r = (BigUint::one() << 160u32) + BigUint::from(685u32);
    let bound = rho_bound(&reflex(&t).unwrap(), &r);

    let runs = 200;
    let mut hist: BTreeMap<i64, u32> = BTreeMap::new();
    let mut max_rho = f64::MIN;
    for seed in 1..=runs {
        let w = construct_pi_parallel(&t, 10, &r, seed, 1, 1_000_000).unwrap();
        *hist.entry((w.rho / 0.05).floor() as i64).or_default() += 1;
        max_rho = max_rho.max(w.rho);
    }

    println!("{runs} successes on Q(zeta_5), r = 2^160 + 685, k = 10");
    println!("rho bound: {bound:.4}, observed max: {max_rho:.4}");
    for (&bin, &count) in &hist {
        let bar: String = std::iter::repeat('#').take(count as usize / 2).collect();
        println!("[{:.2}, {:.2})  {count:>4} {bar}", bin as f64 * 0.05, (bin + 1) as f64 * 0.05);
    }
}
