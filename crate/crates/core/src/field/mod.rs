//! Exact arithmetic in prime fields and canonical GF(2) subspaces.

mod bits;
mod scalar;
mod subspace;

pub use bits::BitRow;
pub use scalar::{PrimeField, Scalar};
pub use subspace::BinarySubspace;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not a prime below 2^15")]
    BadModulus(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
}
