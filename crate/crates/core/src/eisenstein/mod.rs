//! Eisenstein integers and the rational number theory behind the norm solver.

mod arith;
mod ring;

pub use arith::{factor, is_prime, sqrt_mod, Budget, FactorOutcome, Factorization, DEFAULT_FACTOR_SEED};
pub use ring::{gcd, EisensteinInt};

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EisensteinError {
    #[error("division by zero in Z[ω]")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("{0} is not an odd prime")]
    NotPrime(BigInt),
    #[error("expected a positive integer, got {0}")]
    NonPositive(BigInt),
}
