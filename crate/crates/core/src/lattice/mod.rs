//! Integer points in small rational polytopes.

mod cvp;
mod em;
mod enumerate;
mod lll;
mod lp;
mod polytope;

pub use cvp::{cvp_2d, gauss_reduce};
pub use em::{em_closed_empty, em_feasible, find_integer_point, SLICE_LIMIT};
pub use enumerate::{ip_enumerate, ip_enumerate_limited, EnumStats, Enumeration};
pub use lll::{is_lll_reduced, lll_gram, lll_reduce, LllReduced};
pub use lp::{maximize, LpOutcome};
pub use polytope::{
    brute_force_enumerate, hyperplane_lattice, parse_rational, rational_to_string, unimodular_completion, Polytope,
    RationalPolytope,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("row of length {found} in a {expected}-dimensional polytope")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("basis is rank deficient")]
    RankDeficient,
    #[error("degenerate two-dimensional basis")]
    DegenerateBasis,
    #[error("reduction did not converge")]
    NoConvergence,
    #[error("bounding box holds {count} points, above the cap {cap}")]
    CapExceeded { count: String, cap: u64 },
    #[error("feasibility search would branch into {count} slices")]
    SliceExplosion { count: String },
}
