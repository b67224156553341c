//! Trajectory generation for the systems the pipeline probes.
//!
//! Four schemes are provided: forward Euler for polynomial right-hand sides,
//! the truncated-series exact solution for constant linear systems, the
//! forward-difference linear system for time-varying linear systems, and
//! Chebyshev spectral collocation.

mod chebyshev;
mod euler;
mod exact;
mod fd;
mod system;

use alloc::vec::Vec;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chebyshev::{chebyshev_spectral_solve, ChebyshevSolution};
pub use euler::euler_integrate;
pub use exact::{
    exact_stepping, linear_exact_solve, series_order, truncated_exp, truncated_phi1,
    EXP_TOLERANCE, MAX_SERIES_ORDER,
};
pub use fd::{assemble_fd_system, solve_fd_system, FdSystem};
pub use system::{LinearSystem, Monomial, OdeSystem, PolynomialField, SystemKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("state became non-finite at step {step}")]
    Diverged { step: usize },
    #[error("series truncation cannot reach {requested:e} within order {max_order}; best bound {achieved:e}")]
    Truncation {
        requested: f64,
        achieved: f64,
        max_order: usize,
    },
    #[error("linear system is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },
    #[error("linear solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("spectral collocation failed: {reason}")]
    SpectralFailure { reason: &'static str },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{scheme} requires a {required} system")]
    WrongKind {
        scheme: &'static str,
        required: &'static str,
    },
    #[error("invalid input: {0}")]
    Invalid(&'static str),
}

/// Uniform grid `0 = t_0 < … < t_steps = t_end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self, OdeError> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(OdeError::Invalid("grid end time must be positive and finite"));
        }
        if steps == 0 {
            return Err(OdeError::Invalid("grid needs at least one step"));
        }
        Ok(Self { t_end, steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    /// Node `i`; the last node is exactly `t_end`.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.steps {
            self.t_end
        } else {
            i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|i| self.node(i)).collect()
    }
}

/// Which scheme produced a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverTag {
    Euler,
    ExactSeries,
    FiniteDifference,
    Chebyshev,
    External,
}

/// Time-stamped samples of a solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DVector<f64>>,
    source: SolverTag,
}

impl Trajectory {
    /// Checks that times strictly increase, every state has the same length,
    /// and there are at least two samples.
    pub fn new(times: Vec<f64>, states: Vec<DVector<f64>>, source: SolverTag) -> Result<Self, OdeError> {
        if times.len() != states.len() {
            return Err(OdeError::Invalid("times and states differ in length"));
        }
        if times.len() < 2 {
            return Err(OdeError::Invalid("a trajectory needs at least two samples"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(OdeError::Invalid("sample times must be strictly increasing"));
        }
        let dim = states[0].len();
        if dim == 0 {
            return Err(OdeError::Invalid("states must be non-empty"));
        }
        if let Some(bad) = states.iter().find(|s| s.len() != dim) {
            return Err(OdeError::Dimension {
                expected: dim,
                got: bad.len(),
            });
        }
        Ok(Self { times, states, source })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DVector<f64>] {
        &self.states
    }

    pub fn source(&self) -> SolverTag {
        self.source
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn last(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory is never empty")
    }

    /// Keeps the samples at `indices` (ascending, in range).
    pub fn select(&self, indices: &[usize]) -> Result<Self, OdeError> {
        if indices.iter().any(|&i| i >= self.len()) {
            return Err(OdeError::Invalid("sample index out of range"));
        }
        let times = indices.iter().map(|&i| self.times[i]).collect();
        let states = indices.iter().map(|&i| self.states[i].clone()).collect();
        Self::new(times, states, self.source)
    }
}
