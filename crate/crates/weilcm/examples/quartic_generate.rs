//! Weil-number generation in a non-Galois quartic CM-field: the field
//! Q[x]/(x^4 + 60x^2 + 880) (parameters a=30, b=2, d=5), whose reflex field
//! is Q[x]/(x^4 + 30x^2 + 5). The reflex type norm maps a reflex-field
//! element xi to pi in the original field; pi can land in the maximal order
//! outside Z[theta], so its printed coordinates may carry denominators.
//!
//! Run with: cargo run --release --example quartic_generate

use num_bigint::BigUint;
use num_traits::One;
use weilcm::cm::{parse_cm_type, reflex, CMFieldSpec};
use weilcm::weil::{construct_pi_parallel, default_max_iters};

fn main() {
    let spec = CMFieldSpec::parse("quartic:30,2,5").unwrap();
    let t = parse_cm_type(&spec, "auto").unwrap();
    let rx = reflex(&t).unwrap();
    println!("base field:   {:?}", spec.field().poly());
    println!("reflex field: {:?}", rx.reflex_field.field().poly());

    let r = (BigUint::one() << 160u32) - BigUint::from(1445u32);
    let k = 13;
    let w = construct_pi_parallel(&t, k, &r, 1, 1, default_max_iters(2, &r)).unwrap();

    println!("r = 2^160 - 1445, k = {k}");
    println!("q:           {} ({} bits)", w.q, w.q.bits());
    println!("pi coords:   {:?}", w.pi.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    println!("group order: {}", w.group_order);
    println!("rho:         {:.4}", w.rho);
    for (name, ok) in w.checks.items() {
        println!("check {name:<17} {}", if ok { "pass" } else { "FAIL" });
    }
}
