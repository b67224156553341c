use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Zero;

use super::SparseIntMatrix;

/// Rank decision made from singular values.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericalRank {
    pub rank: usize,
    /// `max(rows, cols) · eps · σ_max`.
    pub tolerance: f64,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
}

impl NumericalRank {
    /// Singular values within three orders of magnitude of the cutoff, on
    /// either side. These are the ones a different tolerance could flip.
    pub fn borderline(&self) -> Vec<f64> {
        let lo = self.tolerance * 1e-3;
        let hi = self.tolerance * 1e3;
        self.singular_values
            .iter()
            .copied()
            .filter(|&s| s >= lo && s <= hi)
            .collect()
    }
}

/// Numerical rank with the tolerance `max(m, n) · eps · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>) -> NumericalRank {
    if m.nrows() == 0 || m.ncols() == 0 {
        return NumericalRank {
            rank: 0,
            tolerance: 0.0,
            singular_values: Vec::new(),
        };
    }
    let mut singular_values: Vec<f64> = m.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let tolerance = (m.nrows().max(m.ncols()) as f64) * f64::EPSILON * sigma_max;
    let rank = singular_values.iter().filter(|&&s| s > tolerance).count();
    NumericalRank {
        rank,
        tolerance,
        singular_values,
    }
}

/// Exact rank over the rationals by fraction-free (Bareiss) elimination.
///
/// Every intermediate value is an integer minor of the input, so the
/// arithmetic is exact; big integers keep it exact regardless of size.
pub fn exact_rank(m: &SparseIntMatrix) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut a: Vec<Vec<BigInt>> = m
        .to_dense_int()
        .into_iter()
        .map(|row| row.into_iter().map(BigInt::from).collect())
        .collect();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..rows {
            if a[r][col].is_zero() {
                // Entries in this row still need the Bareiss scaling.
                for c in col + 1..cols {
                    if !a[r][c].is_zero() {
                        let v = &a[r][c] * &a[rank][col];
                        a[r][c] = v / &prev;
                    }
                }
                continue;
            }
            for c in col + 1..cols {
                let v = &a[r][c] * &a[rank][col] - &a[r][col] * &a[rank][c];
                debug_assert!((&v % &prev).is_zero());
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}
