//! Exhaustively enumerate every candidate for Q(zeta_5), r = 1021, k = 2
//! and report the prime count, the smallest usable q, and the rho
//! histogram. The smallest q is 2023621 with group order 4092747290896,
//! realized by the Jacobian of y^2 = x^5 + 18 (see the curve_check
//! example).
//!
//! Run with: cargo run --release --example exhaustive_small_r

use num_bigint::BigUint;
use weilcm::cm::{parse_cm_type, CMFieldSpec};
use weilcm::weil::exhaustive_search;

fn main() {
    let spec = CMFieldSpec::parse("cyclotomic:5").unwrap();
    let t = parse_cm_type(&spec, "auto").unwrap();
    let r = BigUint::from(1021u32);

    let report = exhaustive_search(&t, 2, &r, 2_000_000_000).unwrap();

    println!("domain size:    {}", report.domain_size);
    println!("prime q found:  {}", report.prime_count);
    println!("step-8 rejects: {}", report.step8_failures);
    println!("min_q:          {:?}", report.min_q);
    for w in &report.winners {
        println!(
            "winner: q = {}, group order = {}, rho = {:.4}",
            w.q, w.group_order, w.rho
        );
    }
    println!("rho histogram (bin width 0.05):");
    for (&bin, &count) in &report.rho_histogram {
        println!("  [{:.2}, {:.2})  {count}", bin as f64 * 0.05, (bin + 1) as f64 * 0.05);
    }
}
