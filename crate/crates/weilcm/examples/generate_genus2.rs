//! Generate a genus-2 parameter set at cryptographic size: a q-Weil number
//! in Q(zeta_5) whose abelian surface has a subgroup of 161-bit prime size
//! r with embedding degree 10.
//!
//! Run with: cargo run --release --example generate_genus2

use num_bigint::BigUint;
use num_traits::One;
use weilcm::cm::{parse_cm_type, CMFieldSpec};
use weilcm::weil::{construct_pi_parallel, default_max_iters};

fn main() {
    let spec = CMFieldSpec::parse("cyclotomic:5").unwrap();
    let t = parse_cm_type(&spec, "auto").unwrap();
    let r = (BigUint::one() << 160u32) + BigUint::from(685u32);
    let k = 10;

    let w = construct_pi_parallel(&t, k, &r, 1, 1, default_max_iters(2, &r))
        .expect("the search succeeds for split r");

    println!("field:       Q(zeta_5), defining polynomial {:?}", spec.field().poly());
    println!("r:           2^160 + 685 = {r}");
    println!("k:           {k}");
    println!("q:           {} ({} bits)", w.q, w.q.bits());
    println!("pi coords:   {:?}", w.pi.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    println!("group order: {}", w.group_order);
    println!("rho:         {:.4}", w.rho);
    println!("iterations:  {}", w.iterations);
    for (name, ok) in w.checks.items() {
        println!("check {name:<17} {}", if ok { "pass" } else { "FAIL" });
    }
}
