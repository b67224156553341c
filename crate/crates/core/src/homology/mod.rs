//! Boundary operators, Laplacians and Betti numbers of clique complexes over
//! the reals.

mod betti;
mod boundary;
mod dirac;
mod estimator;
mod laplacian;
mod precision;

use alloc::vec::Vec;

use thiserror::Error;

pub use betti::{
    attach_estimates, betti_by_kernel, betti_by_rank, betti_exact, betti_rational, BettiEntry, BettiReport,
    RATIONAL_ORACLE_LIMIT,
};
pub use boundary::{boundary_matrix, BoundaryOperator};
pub use dirac::{assemble_dirac, DiracOperator};
pub use estimator::{betti_normalized_estimate, probe_count, Estimate, FilterPlan, GAP_FLOOR, MAX_FILTER_DEGREE};
pub use laplacian::{laplacian, Laplacian};
pub use precision::{gap_route_depth_estimate, multiplicative_precision, PrecisionConversion};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HomologyError {
    #[error("dimension {r} needs simplices up to {needed}, but the complex stops at {r_max} and is not complete")]
    Range { r: usize, needed: usize, r_max: usize },
    #[error("dimension {r}: rank formula gives {by_rank}, Laplacian kernel gives {by_kernel} (borderline singular values {borderline:?})")]
    NumericalRank {
        r: usize,
        by_rank: usize,
        by_kernel: usize,
        borderline: Vec<f64>,
    },
    #[error("dimension {r}: floating-point Betti number {numeric} disagrees with exact rational value {exact}")]
    OracleMismatch { r: usize, numeric: usize, exact: usize },
    #[error("spectral gap {lambda_min:e} is below the floor {floor:e}")]
    GapTooSmall { lambda_min: f64, floor: f64 },
    #[error("filter needs degree above {cap} to reach sup-error {target:e} (gap ratio {gap_ratio:e})")]
    FilterDegree { cap: usize, target: f64, gap_ratio: f64 },
    #[error("S_{r} is empty")]
    Empty { r: usize },
    #[error("multiplicative precision is undefined when the Betti number is zero")]
    UndefinedMultiplicative,
    #[error("invalid parameter: {0}")]
    Invalid(&'static str),
}
