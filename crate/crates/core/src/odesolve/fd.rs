use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use super::{LinearSystem, OdeError, SolverTag, TimeGrid, Trajectory};
use crate::linalg::CsrMatrix;

/// Stacked forward-difference system `L · (x_0, …, x_S) = rhs`.
///
/// Block row 0 pins `x_0`; block row `i + 1` reads
/// `x_{i+1} - (I + h A(t_i)) x_i = h b(t_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FdSystem {
    pub matrix: CsrMatrix,
    pub rhs: DVector<f64>,
    pub grid: TimeGrid,
    pub dim: usize,
}

pub fn assemble_fd_system(sys: &LinearSystem, x0: &DVector<f64>, grid: &TimeGrid) -> Result<FdSystem, OdeError> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(OdeError::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    let steps = grid.steps();
    let h = grid.step();
    let size = (steps + 1) * n;
    let mut triplets = Vec::with_capacity(size + steps * n * (n + 1));
    let mut rhs = DVector::zeros(size);
    for i in 0..n {
        triplets.push((i, i, 1.0));
        rhs[i] = x0[i];
    }
    for step in 0..steps {
        let t = grid.node(step);
        let a = sys.matrix(t)?;
        let b = sys.drive(t)?;
        let row0 = (step + 1) * n;
        let col_prev = step * n;
        for i in 0..n {
            triplets.push((row0 + i, row0 + i, 1.0));
            for j in 0..n {
                let coupling = if i == j { 1.0 } else { 0.0 } + h * a[(i, j)];
                if coupling != 0.0 {
                    triplets.push((row0 + i, col_prev + j, -coupling));
                }
            }
            rhs[row0 + i] = h * b[i];
        }
    }
    Ok(FdSystem {
        matrix: CsrMatrix::from_triplets(size, size, triplets),
        rhs,
        grid: *grid,
        dim: n,
    })
}

/// Solves the assembled system by forward substitution and unstacks the
/// solution into one state per grid node.
///
/// The residual `‖L·sol - rhs‖` must stay within `1e-10 · ‖rhs‖`.
pub fn solve_fd_system(system: &FdSystem) -> Result<Trajectory, OdeError> {
    let l = &system.matrix;
    let size = l.rows();
    if l.cols() != size || system.rhs.len() != size || size != (system.grid.steps() + 1) * system.dim {
        return Err(OdeError::Invalid("system shape does not match its grid"));
    }
    let mut max_entry = 0.0f64;
    let mut diag = vec![0.0; size];
    for i in 0..size {
        for (j, v) in l.row(i) {
            if j > i && v != 0.0 {
                return Err(OdeError::Invalid("forward-difference system must be lower triangular"));
            }
            if j == i {
                diag[i] = v;
            }
            max_entry = max_entry.max(v.abs());
        }
    }
    let (dmin, dmax) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d.abs()), hi.max(d.abs())));
    if dmin <= f64::EPSILON * max_entry {
        return Err(OdeError::SingularSystem {
            condition: if dmin == 0.0 { f64::INFINITY } else { dmax / dmin },
        });
    }

    let mut sol = vec![0.0; size];
    for i in 0..size {
        let mut acc = system.rhs[i];
        for (j, v) in l.row(i) {
            if j < i {
                acc -= v * sol[j];
            }
        }
        sol[i] = acc / diag[i];
        if !sol[i].is_finite() {
            return Err(OdeError::Diverged { step: i / system.dim });
        }
    }

    let residual = DVector::from_vec(l.mul_vec(&sol)) - &system.rhs;
    let residual = residual.norm();
    let tolerance = 1e-10 * system.rhs.norm();
    if residual > tolerance {
        return Err(OdeError::Residual { residual, tolerance });
    }

    let states = sol
        .chunks(system.dim)
        .map(DVector::from_column_slice)
        .collect();
    Trajectory::new(system.grid.nodes(), states, SolverTag::FiniteDifference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odesolve::euler_integrate;
    use nalgebra::DMatrix;
    #[allow(unused_imports)]
    use num_traits::Float;

    #[test]
    fn scalar_rows_are_direct_rearrangement() {
        let (a, b, h) = (-0.5, 2.0, 0.25);
        let sys = LinearSystem::constant(DMatrix::from_element(1, 1, a), DVector::from_element(1, b)).unwrap();
        let fd = assemble_fd_system(&sys, &DVector::from_element(1, 3.0), &TimeGrid::new(0.5, 2).unwrap()).unwrap();
        let dense = fd.matrix.to_dense();
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, -(1.0 + h * a), 1.0, 0.0, 0.0, -(1.0 + h * a), 1.0]);
        assert_eq!(dense, expected);
        assert_eq!(fd.rhs.as_slice(), &[3.0, h * b, h * b]);
    }

    #[test]
    fn constant_zero_system_stays_put() {
        let sys = LinearSystem::constant(DMatrix::zeros(1, 1), DVector::zeros(1)).unwrap();
        let fd = assemble_fd_system(&sys, &DVector::from_element(1, 4.0), &TimeGrid::new(1.0, 5).unwrap()).unwrap();
        let traj = solve_fd_system(&fd).unwrap();
        assert!(traj.states().iter().all(|s| s[0] == 4.0));
    }

    #[test]
    fn growth_matches_recurrence() {
        let sys = LinearSystem::homogeneous(DMatrix::from_element(1, 1, 1.0)).unwrap();
        let fd = assemble_fd_system(&sys, &DVector::from_element(1, 1.0), &TimeGrid::new(1.0, 10).unwrap()).unwrap();
        let traj = solve_fd_system(&fd).unwrap();
        assert!((traj.last()[0] - 1.1f64.powi(10)).abs() < 1e-13);
    }

    #[test]
    fn time_varying_matches_euler() {
        let sys = LinearSystem::time_varying(
            2,
            |t| DMatrix::from_row_slice(2, 2, &[-0.1 * t, 1.0, -1.0 - 0.2 * t, 0.0]),
            |t| DVector::from_vec(alloc::vec![0.0, (0.5 * t).sin()]),
        )
        .unwrap();
        let grid = TimeGrid::new(3.0, 60).unwrap();
        let x0 = DVector::from_vec(alloc::vec![1.0, 0.0]);
        let fd = solve_fd_system(&assemble_fd_system(&sys, &x0, &grid).unwrap()).unwrap();
        let eu = euler_integrate(&sys.clone().into(), &x0, &grid).unwrap();
        for (a, b) in fd.states().iter().zip(eu.states()) {
            assert!((a - b).norm() <= 1e-9 * b.norm().max(1e-300));
        }
    }

    #[test]
    fn zero_diagonal_is_singular() {
        let fd = FdSystem {
            matrix: CsrMatrix::from_triplets(2, 2, alloc::vec![(0, 0, 1.0), (1, 0, 1.0)]),
            rhs: DVector::from_vec(alloc::vec![1.0, 1.0]),
            grid: TimeGrid::new(1.0, 1).unwrap(),
            dim: 1,
        };
        assert!(matches!(solve_fd_system(&fd), Err(OdeError::SingularSystem { .. })));
    }
}
