use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::{boundary_matrix, HomologyError};
use crate::complex::CliqueComplex;
use crate::linalg::{numerical_rank, symmetric_eigenvalues};

/// Block operator centred on dimension `r`, acting on
/// `C_{r-1} ⊕ C_r ⊕ C_{r+1}`:
///
/// ```text
/// [ 0      ∂_r        0       ]
/// [ ∂_rᵀ   0          ∂_{r+1} ]
/// [ 0      ∂_{r+1}ᵀ   0       ]
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct DiracOperator {
    pub r: usize,
    /// `|S_{r-1}|, |S_r|, |S_{r+1}|` (the first is 0 when `r = 0`).
    pub sizes: [usize; 3],
    pub matrix: DMatrix<f64>,
}

pub fn assemble_dirac(k: &CliqueComplex, r: usize) -> Result<DiracOperator, HomologyError> {
    let down = boundary_matrix(k, r)?.matrix;
    let up = boundary_matrix(k, r + 1)
        .map_err(|_| HomologyError::Range {
            r,
            needed: r + 1,
            r_max: k.r_max(),
        })?
        .matrix;
    let sizes = [down.rows(), k.count(r), up.cols()];
    let (o1, o2) = (sizes[0], sizes[0] + sizes[1]);
    let n = o2 + sizes[2];
    let mut m = DMatrix::zeros(n, n);
    for j in 0..down.cols() {
        for (i, v) in down.column(j) {
            m[(i, o1 + j)] = f64::from(v);
            m[(o1 + j, i)] = f64::from(v);
        }
    }
    for j in 0..up.cols() {
        for (i, v) in up.column(j) {
            m[(o1 + i, o2 + j)] = f64::from(v);
            m[(o2 + j, o1 + i)] = f64::from(v);
        }
    }
    Ok(DiracOperator { r, sizes, matrix: m })
}

impl DiracOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn block_of(&self, i: usize) -> usize {
        if i < self.sizes[0] {
            0
        } else if i < self.sizes[0] + self.sizes[1] {
            1
        } else {
            2
        }
    }

    /// Frobenius norm of the part of `B²` outside the three diagonal blocks.
    pub fn square_off_block_norm(&self) -> f64 {
        let sq = &self.matrix * &self.matrix;
        let mut sum = 0.0;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                if self.block_of(i) != self.block_of(j) {
                    sum += sq[(i, j)] * sq[(i, j)];
                }
            }
        }
        libm::sqrt(sum)
    }

    /// Dimension of the kernel of `B` restricted to vectors supported on the
    /// centre block, i.e. the nullity of the stacked map `[∂_r; ∂_{r+1}ᵀ]`.
    pub fn center_kernel_dim(&self) -> usize {
        let (o1, s) = (self.sizes[0], self.sizes[1]);
        if s == 0 {
            return 0;
        }
        let column_block = self.matrix.columns(o1, s).into_owned();
        s - numerical_rank(&column_block).rank
    }

    /// Eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.matrix)
    }

    /// Largest mismatch when pairing the `k`-th smallest eigenvalue with the
    /// negated `k`-th largest.
    pub fn spectral_asymmetry(&self) -> f64 {
        let ev = self.spectrum();
        let n = ev.len();
        (0..n).map(|k| (ev[k] + ev[n - 1 - k]).abs()).fold(0.0, f64::max)
    }
}
