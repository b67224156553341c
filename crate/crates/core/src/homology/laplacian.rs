use nalgebra::DMatrix;

use super::{boundary_matrix, HomologyError};
use crate::complex::CliqueComplex;

#[derive(Clone, Debug, PartialEq)]
pub struct Laplacian {
    pub r: usize,
    pub matrix: DMatrix<f64>,
}

/// `Δ_r = ∂_{r+1} ∂_{r+1}ᵀ + ∂_rᵀ ∂_r`, assembled densely. Entries are small
/// integers, so the result is exactly symmetric.
pub fn laplacian(k: &CliqueComplex, r: usize) -> Result<Laplacian, HomologyError> {
    let down = boundary_matrix(k, r)?.matrix;
    let up = boundary_matrix(k, r + 1).map_err(|_| HomologyError::Range {
        r,
        needed: r + 1,
        r_max: k.r_max(),
    })?;
    Ok(Laplacian {
        r,
        matrix: up.matrix.gram_rows() + down.gram_columns(),
    })
}
