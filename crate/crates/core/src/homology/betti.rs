use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{betti_normalized_estimate, boundary_matrix, HomologyError};
use crate::complex::CliqueComplex;
use crate::linalg::{exact_rank, numerical_rank, psd_spectrum, NumericalRank, SparseIntMatrix};

/// Complexes with at most this many simplices (dimensions `0..=r_max + 1`)
/// are also checked with exact rational elimination.
pub const RATIONAL_ORACLE_LIMIT: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiEntry {
    pub r: usize,
    pub betti: usize,
    pub s_r: usize,
    /// `β_r / |S_r|`, or 0 when `S_r` is empty.
    pub normalized: f64,
    pub estimate: Option<f64>,
    /// Additive accuracy of `estimate`; 0 when there is none.
    pub eps: f64,
    /// Failure probability of `estimate`; 0 when there is none.
    pub eta: f64,
    pub probes: usize,
}

impl BettiEntry {
    fn exact(r: usize, betti: usize, s_r: usize) -> Self {
        Self {
            r,
            betti,
            s_r,
            normalized: if s_r == 0 { 0.0 } else { betti as f64 / s_r as f64 },
            estimate: None,
            eps: 0.0,
            eta: 0.0,
            probes: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiReport {
    pub entries: Vec<BettiEntry>,
    /// Whether the exact rational route was also run and agreed.
    pub rational_checked: bool,
}

impl BettiReport {
    pub fn betti(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.betti).collect()
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.normalized).collect()
    }

    pub fn get(&self, r: usize) -> Option<&BettiEntry> {
        self.entries.get(r)
    }
}

fn check_range(k: &CliqueComplex, r_max: usize) -> Result<(), HomologyError> {
    if r_max + 1 > k.r_max() && !k.is_complete() {
        return Err(HomologyError::Range {
            r: r_max,
            needed: r_max + 1,
            r_max: k.r_max(),
        });
    }
    Ok(())
}

/// `∂_0, …, ∂_{r_max + 1}`.
fn boundaries(k: &CliqueComplex, r_max: usize) -> Result<Vec<SparseIntMatrix>, HomologyError> {
    (0..=r_max + 1).map(|r| boundary_matrix(k, r).map(|b| b.matrix)).collect()
}

fn numerical_ranks(bd: &[SparseIntMatrix]) -> Vec<NumericalRank> {
    bd.iter().map(|m| numerical_rank(&m.to_dense())).collect()
}

fn rank_formula(k: &CliqueComplex, r_max: usize, ranks: &[usize]) -> Vec<usize> {
    (0..=r_max).map(|r| k.count(r) - ranks[r] - ranks[r + 1]).collect()
}

fn kernel_dims(bd: &[SparseIntMatrix], r_max: usize) -> Vec<usize> {
    (0..=r_max)
        .map(|r| {
            let lap: DMatrix<f64> = bd[r + 1].gram_rows() + bd[r].gram_columns();
            psd_spectrum(&lap).kernel_dim
        })
        .collect()
}

/// `β_r = |S_r| - rank ∂_r - rank ∂_{r+1}` with SVD ranks.
pub fn betti_by_rank(k: &CliqueComplex, r_max: usize) -> Result<Vec<usize>, HomologyError> {
    check_range(k, r_max)?;
    let ranks: Vec<usize> = numerical_ranks(&boundaries(k, r_max)?).iter().map(|n| n.rank).collect();
    Ok(rank_formula(k, r_max, &ranks))
}

/// `β_r = dim ker Δ_r` from the Sturm count of the Laplacian spectrum.
pub fn betti_by_kernel(k: &CliqueComplex, r_max: usize) -> Result<Vec<usize>, HomologyError> {
    check_range(k, r_max)?;
    Ok(kernel_dims(&boundaries(k, r_max)?, r_max))
}

/// Rank formula with exact rational ranks. Cost grows quickly; meant for
/// small complexes.
pub fn betti_rational(k: &CliqueComplex, r_max: usize) -> Result<Vec<usize>, HomologyError> {
    check_range(k, r_max)?;
    let ranks: Vec<usize> = boundaries(k, r_max)?.iter().map(exact_rank).collect();
    Ok(rank_formula(k, r_max, &ranks))
}

/// Betti numbers for `r = 0..=r_max` by the rank formula and by Laplacian
/// kernels, which must agree. Small complexes are additionally checked
/// against exact rational ranks.
pub fn betti_exact(k: &CliqueComplex, r_max: usize) -> Result<BettiReport, HomologyError> {
    check_range(k, r_max)?;
    let bd = boundaries(k, r_max)?;
    let numeric = numerical_ranks(&bd);
    let ranks: Vec<usize> = numeric.iter().map(|n| n.rank).collect();
    let by_rank = rank_formula(k, r_max, &ranks);
    let by_kernel = kernel_dims(&bd, r_max);
    for r in 0..=r_max {
        if by_rank[r] != by_kernel[r] {
            let mut borderline = numeric[r].borderline();
            borderline.extend(numeric[r + 1].borderline());
            return Err(HomologyError::NumericalRank {
                r,
                by_rank: by_rank[r],
                by_kernel: by_kernel[r],
                borderline,
            });
        }
    }
    let size: usize = (0..=r_max + 1).map(|r| k.count(r)).sum();
    let rational_checked = size <= RATIONAL_ORACLE_LIMIT;
    if rational_checked {
        let exact: Vec<usize> = bd.iter().map(exact_rank).collect();
        let exact = rank_formula(k, r_max, &exact);
        if let Some(r) = (0..=r_max).find(|&r| exact[r] != by_rank[r]) {
            return Err(HomologyError::OracleMismatch {
                r,
                numeric: by_rank[r],
                exact: exact[r],
            });
        }
    }
    let entries = (0..=r_max).map(|r| BettiEntry::exact(r, by_rank[r], k.count(r))).collect();
    Ok(BettiReport {
        entries,
        rational_checked,
    })
}

/// Fills `estimate`, `eps`, `eta` and `probes` for every non-empty level.
/// Level `r` uses the seed `seed + r`.
pub fn attach_estimates(
    report: &mut BettiReport,
    k: &CliqueComplex,
    eps: f64,
    eta: f64,
    seed: u64,
) -> Result<(), HomologyError> {
    let mut filled = vec![];
    for entry in &report.entries {
        if entry.s_r == 0 {
            filled.push(None);
            continue;
        }
        filled.push(Some(betti_normalized_estimate(k, entry.r, eps, eta, seed.wrapping_add(entry.r as u64))?));
    }
    for (entry, est) in report.entries.iter_mut().zip(filled) {
        if let Some(est) = est {
            entry.estimate = Some(est.value);
            entry.eps = eps;
            entry.eta = eta;
            entry.probes = est.probes;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{enumerate_cliques, Graph};

    fn report(g: &Graph, r_max: usize) -> Vec<usize> {
        betti_exact(&enumerate_cliques(g, r_max + 1), r_max).unwrap().betti()
    }

    #[test]
    fn square_is_a_loop() {
        assert_eq!(report(&Graph::cycle(4), 1), vec![1, 1]);
    }

    #[test]
    fn tetrahedron_is_contractible() {
        let k = enumerate_cliques(&Graph::complete(4), 3);
        let rep = betti_exact(&k, 3).unwrap();
        assert_eq!(rep.betti(), vec![1, 0, 0, 0]);
        assert!(rep.rational_checked);
    }

    #[test]
    fn two_disjoint_edges() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(report(&g, 1), vec![2, 0]);
    }

    #[test]
    fn hollow_octahedron_is_a_sphere() {
        // K_{2,2,2}: every vertex adjacent to all but its antipode
        let edges = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).filter(|&(i, j)| j != i + 3);
        let g = Graph::new(6, edges).unwrap();
        assert_eq!(report(&g, 2), vec![1, 0, 1]);
    }

    #[test]
    fn triangulations_of_the_circle_agree() {
        assert_eq!(report(&Graph::cycle(4), 2), report(&Graph::cycle(6), 2));
    }

    #[test]
    fn normalized_is_zero_on_empty_levels() {
        let rep = betti_exact(&enumerate_cliques(&Graph::cycle(5), 3), 2).unwrap();
        let e = rep.get(2).unwrap();
        assert_eq!((e.s_r, e.betti, e.normalized), (0, 0, 0.0));
        assert_eq!(rep.get(1).unwrap().normalized, 0.2);
    }

    #[test]
    fn incomplete_enumeration_is_rejected() {
        let k = enumerate_cliques(&Graph::complete(5), 2);
        assert!(matches!(betti_exact(&k, 2), Err(HomologyError::Range { .. })));
        assert!(betti_exact(&k, 1).is_ok());
    }

    #[test]
    fn entry_json_shape() {
        let e = BettiEntry::exact(1, 1, 4);
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(
            json,
            r#"{"r":1,"betti":1,"s_r":4,"normalized":0.25,"estimate":null,"eps":0.0,"eta":0.0,"probes":0}"#
        );
    }
}
