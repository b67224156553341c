//! Dense and sparse linear algebra shared by the solvers and homology code.

mod rank;
mod sparse;
mod spectrum;

pub use rank::{exact_rank, numerical_rank, NumericalRank};
pub use sparse::{CsrMatrix, SparseIntMatrix};
pub use spectrum::{psd_spectrum, symmetric_eigenvalues, PsdSpectrum, Tridiagonal};
