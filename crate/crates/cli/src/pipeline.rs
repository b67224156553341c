//! Solver → overlaps → sweep → classification.

use std::fmt;

use phasetopo_core::analysis::{classify_dynamics, threshold_sweep, AnalysisError, DynamicsSignature, SweepResult};
use phasetopo_core::odesolve::{
    chebyshev_spectral_solve, euler_integrate, exact_stepping, solve_fd_system, assemble_fd_system, OdeError, OdeSystem,
    Trajectory,
};
use phasetopo_core::quantum::{pairwise_overlaps, OverlapError, OverlapMatrix};

use crate::config::{ResolvedConfig, Scheme};

/// A failed stage, tagged with the module that reported it.
#[derive(Debug)]
pub struct PipelineError {
    pub module: &'static str,
    pub message: String,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.module, self.message)
    }
}

impl std::error::Error for PipelineError {}

impl From<OdeError> for PipelineError {
    fn from(e: OdeError) -> Self {
        Self {
            module: "odesolve",
            message: e.to_string(),
        }
    }
}

impl From<OverlapError> for PipelineError {
    fn from(e: OverlapError) -> Self {
        Self {
            module: "quantumsim",
            message: e.to_string(),
        }
    }
}

impl From<AnalysisError> for PipelineError {
    fn from(e: AnalysisError) -> Self {
        Self {
            module: e.module(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    /// Solution on the full solver grid.
    pub trajectory: Trajectory,
    pub samples: Trajectory,
    pub overlaps: OverlapMatrix,
    pub sweep: SweepResult,
    pub signature: DynamicsSignature,
}

pub fn solve(cfg: &ResolvedConfig) -> Result<Trajectory, PipelineError> {
    let x0 = &cfg.initial_state;
    let linear = match &cfg.system {
        OdeSystem::Linear(l) => Some(l),
        OdeSystem::Polynomial(_) => None,
    };
    // Scheme/system compatibility was checked during validation.
    let traj = match (cfg.scheme, linear) {
        (Scheme::Euler, _) => euler_integrate(&cfg.system, x0, &cfg.grid)?,
        (Scheme::ExactSeries, Some(l)) => exact_stepping(l, x0, &cfg.grid)?,
        (Scheme::FiniteDifference, Some(l)) => solve_fd_system(&assemble_fd_system(l, x0, &cfg.grid)?)?,
        (Scheme::Chebyshev, Some(l)) => {
            let nodes = cfg.nodes.expect("validated");
            chebyshev_spectral_solve(l, x0, cfg.grid.t_end(), nodes)?.sample(&cfg.grid.nodes())?
        }
        (_, None) => unreachable!("validated config pairs polynomial systems with euler"),
    };
    Ok(traj)
}

/// Samples of the trajectory at the configured indices.
pub fn sample(cfg: &ResolvedConfig, traj: &Trajectory) -> Result<Trajectory, PipelineError> {
    Ok(traj.select(&cfg.sample_indices)?)
}

pub fn overlaps(cfg: &ResolvedConfig, samples: &Trajectory) -> Result<OverlapMatrix, PipelineError> {
    Ok(pairwise_overlaps(samples, cfg.mode, cfg.shots, cfg.seed)?)
}

pub fn run(cfg: &ResolvedConfig) -> Result<PipelineOutput, PipelineError> {
    let trajectory = solve(cfg)?;
    let samples = sample(cfg, &trajectory)?;
    let overlaps = overlaps(cfg, &samples)?;
    let sweep = threshold_sweep(&overlaps, &cfg.eps_grid, &cfg.sweep)?;
    let signature = classify_dynamics(&sweep, cfg.classify)?;
    Ok(PipelineOutput {
        trajectory,
        samples,
        overlaps,
        sweep,
        signature,
    })
}
