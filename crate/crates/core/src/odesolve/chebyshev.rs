use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::{LinearSystem, OdeError, SolverTag, Trajectory};

/// Collocation residual allowed after the dense solve, relative to the
/// right-hand side (or absolute when that is below one).
const COLLOCATION_TOLERANCE: f64 = 1e-10;

/// `x(t) ≈ Σ_k c_k T_k(2t/τ - 1)` on `[0, τ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevSolution {
    t_end: f64,
    coefficients: Vec<DVector<f64>>,
    node_times: Vec<f64>,
    residual: f64,
}

/// `T_k(s)` and `T_k'(s)` for `k < n`.
fn chebyshev_values(s: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = vec![0.0; n];
    let mut dt = vec![0.0; n];
    if n > 0 {
        t[0] = 1.0;
    }
    if n > 1 {
        t[1] = s;
        dt[1] = 1.0;
    }
    for k in 1..n.saturating_sub(1) {
        t[k + 1] = 2.0 * s * t[k] - t[k - 1];
        dt[k + 1] = 2.0 * t[k] + 2.0 * s * dt[k] - dt[k - 1];
    }
    (t, dt)
}

/// Chebyshev–Gauss–Lobatto points on `[-1, 1]`, ascending.
fn lobatto_points(n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|j| {
            if j == 0 {
                -1.0
            } else if j == n - 1 {
                1.0
            } else {
                -(PI * j as f64 / last).cos()
            }
        })
        .collect()
}

/// Spectral collocation on `n_nodes` Gauss–Lobatto nodes mapped to
/// `[0, t_end]`. The initial condition is imposed at `t = 0` and the ODE at
/// every other node; the coefficient system is solved densely.
pub fn chebyshev_spectral_solve(
    sys: &LinearSystem,
    x0: &DVector<f64>,
    t_end: f64,
    n_nodes: usize,
) -> Result<ChebyshevSolution, OdeError> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(OdeError::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    if n_nodes < 2 {
        return Err(OdeError::Invalid("spectral collocation needs at least two nodes"));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(OdeError::Invalid("end time must be positive and finite"));
    }
    let points = lobatto_points(n_nodes);
    let node_times: Vec<f64> = points.iter().map(|s| 0.5 * t_end * (s + 1.0)).collect();
    let size = n_nodes * n;
    let mut m = DMatrix::zeros(size, size);
    let mut rhs = DVector::zeros(size);
    let scale = 2.0 / t_end;

    let (t0, _) = chebyshev_values(-1.0, n_nodes);
    for i in 0..n {
        for (k, tk) in t0.iter().enumerate() {
            m[(i, k * n + i)] = *tk;
        }
        rhs[i] = x0[i];
    }
    for (j, (&s, &t)) in points.iter().zip(&node_times).enumerate().skip(1) {
        let a = sys.matrix(t)?;
        let b = sys.drive(t)?;
        let (tk, dtk) = chebyshev_values(s, n_nodes);
        let row0 = j * n;
        for i in 0..n {
            for k in 0..n_nodes {
                m[(row0 + i, k * n + i)] += scale * dtk[k];
                for l in 0..n {
                    m[(row0 + i, k * n + l)] -= a[(i, l)] * tk[k];
                }
            }
            rhs[row0 + i] = b[i];
        }
    }

    let solution = m.clone().lu().solve(&rhs).ok_or(OdeError::SpectralFailure {
        reason: "singular collocation matrix",
    })?;
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::SpectralFailure {
            reason: "non-finite coefficients",
        });
    }
    let residual = (&m * &solution - &rhs).amax();
    if residual > COLLOCATION_TOLERANCE * rhs.amax().max(1.0) {
        return Err(OdeError::SpectralFailure {
            reason: "collocation residual above tolerance",
        });
    }
    let coefficients = solution.as_slice().chunks(n).map(DVector::from_column_slice).collect();
    Ok(ChebyshevSolution {
        t_end,
        coefficients,
        node_times,
        residual,
    })
}

impl ChebyshevSolution {
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// `c_0, c_1, …`; one vector per Chebyshev degree.
    pub fn coefficients(&self) -> &[DVector<f64>] {
        &self.coefficients
    }

    /// Collocation nodes in `[0, τ]`, ascending.
    pub fn node_times(&self) -> &[f64] {
        &self.node_times
    }

    /// Largest absolute collocation residual.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Clenshaw evaluation at `t ∈ [0, τ]`.
    pub fn evaluate(&self, t: f64) -> DVector<f64> {
        let s = 2.0 * t / self.t_end - 1.0;
        let dim = self.coefficients[0].len();
        let mut b1 = DVector::zeros(dim);
        let mut b2 = DVector::zeros(dim);
        for c in self.coefficients.iter().skip(1).rev() {
            let b0 = c + &b1 * (2.0 * s) - &b2;
            b2 = b1;
            b1 = b0;
        }
        &self.coefficients[0] + b1 * s - b2
    }

    /// States at the collocation nodes.
    pub fn node_trajectory(&self) -> Result<Trajectory, OdeError> {
        self.sample(&self.node_times)
    }

    pub fn sample(&self, times: &[f64]) -> Result<Trajectory, OdeError> {
        if times.iter().any(|&t| !(0.0..=self.t_end).contains(&t)) {
            return Err(OdeError::Invalid("sample time outside the solved interval"));
        }
        let states = times.iter().map(|&t| self.evaluate(t)).collect();
        Trajectory::new(times.to_vec(), states, SolverTag::Chebyshev)
    }
}
