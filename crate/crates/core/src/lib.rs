//! Qutrit two-level state synthesis over the Eisenstein lattice.
//!
//! Given a target `x0|i⟩ + x1|j⟩` and a precision ε the search finds Eisenstein
//! integers `u, v, w` and a level `k` with `|u|² + |v|² + |w|² = 3^k` such that
//! `(u|i⟩ + v|j⟩ + w|l⟩)/√3^k` is ε-close to the target.

pub mod ball;
pub mod decimal;
pub mod eisenstein;
pub mod expr;
pub mod geometry;
pub mod householder;
pub mod lattice;
pub mod norm;
pub mod p9;
pub mod scalar;
pub mod search;

pub use ball::Ball;
pub use eisenstein::{EisensteinError, EisensteinInt};
pub use expr::RealExpr;
pub use geometry::{Candidate, Levels, Meniscus, TwoLevelState};
pub use lattice::RationalPolytope;
pub use scalar::{Real, Scalar};

/// Default working precision in bits for interval computations.
pub const DEFAULT_PRECISION_BITS: u32 = 256;
