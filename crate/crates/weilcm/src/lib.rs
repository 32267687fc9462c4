//! Construction of q-Weil numbers in CM-fields with a prescribed subgroup
//! size r and embedding degree k, together with verification of the
//! resulting parameters against explicit hyperelliptic Jacobians.
//!
//! The main entry points are [`cm::CMFieldSpec`] for setting up a CM-field
//! from one of the supported families, [`weil::construct_pi`] for
//! the randomized search, [`weil::exhaustive_search`] for small subgroup
//! sizes, and [`jacobian`] for Cantor arithmetic on odd-degree hyperelliptic
//! curves. See the `examples/` directory for runnable walkthroughs of each
//! capability.

use num_bigint::BigUint;
use thiserror::Error;

pub mod arith;
pub mod bigfloat;
pub mod cli;
pub mod cm;
pub mod jacobian;
pub mod numfield;
pub mod weil;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch between residues")]
    ModulusMismatch,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(BigUint, BigUint),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("prime {0} is ramified or divides the defining polynomial discriminant")]
    RamifiedPrime(BigUint),
    #[error("prime {0} does not split completely")]
    NotSplit(BigUint),
    #[error("failed to isolate complex roots at {0} bits")]
    RootIsolation(u32),
    #[error("precision exhausted reconstructing a type norm")]
    PrecisionExhausted,
    #[error("iteration limit {0} exceeded")]
    IterationLimit(u64),
    #[error("enumeration budget {0} exceeded")]
    BudgetExceeded(u64),
    #[error("could not complete the factorization of {0}")]
    FactorizationIncomplete(BigUint),
    #[error("element is not integral")]
    NonIntegral,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
