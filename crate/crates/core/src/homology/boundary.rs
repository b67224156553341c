use alloc::vec::Vec;

use super::HomologyError;
use crate::complex::CliqueComplex;
use crate::linalg::SparseIntMatrix;

/// Signed incidence matrix of `∂_r`: rows follow `S_{r-1}`, columns `S_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryOperator {
    pub r: usize,
    pub matrix: SparseIntMatrix,
}

/// `∂_r` for `r ≥ 0`. `∂_0` is the zero map to the empty chain group, and
/// dimensions past `r_max` are zero maps when the complex is complete.
pub fn boundary_matrix(k: &CliqueComplex, r: usize) -> Result<BoundaryOperator, HomologyError> {
    if r > k.r_max() && !k.is_complete() {
        return Err(HomologyError::Range {
            r,
            needed: r,
            r_max: k.r_max(),
        });
    }
    if r == 0 {
        return Ok(BoundaryOperator {
            r,
            matrix: SparseIntMatrix::zeros(0, k.count(0)),
        });
    }
    let rows = k.count(r - 1);
    let columns = k.simplices(r).iter().map(|s| {
        (0..=r)
            .map(|i| {
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &v)| v)
                    .collect();
                let row = k.index_of(&face).expect("clique complexes are closed under faces");
                (row, if i % 2 == 0 { 1 } else { -1 })
            })
            .collect::<Vec<_>>()
    });
    Ok(BoundaryOperator {
        r,
        matrix: SparseIntMatrix::from_columns(rows, columns),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{enumerate_cliques, Graph};
    use alloc::vec;

    #[test]
    fn single_edge() {
        let k = enumerate_cliques(&Graph::new(2, [(0, 1)]).unwrap(), 1);
        let d = boundary_matrix(&k, 1).unwrap().matrix;
        assert_eq!(d.to_dense_int(), vec![vec![-1], vec![1]]);
    }

    #[test]
    fn triangle_signs() {
        let k = enumerate_cliques(&Graph::complete(3), 2);
        let d = boundary_matrix(&k, 2).unwrap().matrix;
        // rows: [0,1], [0,2], [1,2]
        assert_eq!(d.to_dense_int(), vec![vec![1], vec![-1], vec![1]]);
    }

    #[test]
    fn composition_vanishes_on_k5() {
        let k = enumerate_cliques(&Graph::complete(5), 4);
        for r in 1..=4 {
            let a = boundary_matrix(&k, r).unwrap().matrix;
            let b = boundary_matrix(&k, r + 1).unwrap().matrix;
            assert!(a.mul_exact(&b).iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn beyond_range_needs_completeness() {
        let k = enumerate_cliques(&Graph::complete(4), 1);
        assert!(boundary_matrix(&k, 2).is_err());
        let c = enumerate_cliques(&Graph::cycle(4), 1);
        let d = boundary_matrix(&c, 2).unwrap().matrix;
        assert_eq!((d.rows(), d.cols()), (4, 0));
    }
}
