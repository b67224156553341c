//! Threshold sweeps and the mapping from Betti curves to coarse dynamical
//! labels.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{build_graph, enumerate_cliques, graph_stats, ComplexError, GraphStats, Metric, ThresholdRule};
use crate::homology::{attach_estimates, betti_exact, BettiEntry, BettiReport, HomologyError};
use crate::quantum::OverlapMatrix;

/// Fewest grid points `classify_dynamics` accepts.
pub const MIN_GRID_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StageError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

impl StageError {
    /// Name of the module the error came from.
    pub fn module(&self) -> &'static str {
        match self {
            StageError::Complex(_) => "cliquecomplex",
            StageError::Homology(_) => "homology",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("threshold grid is empty")]
    EmptyGrid,
    #[error("threshold grid must be strictly increasing and finite")]
    UnsortedGrid,
    #[error("at ε = {eps}: {source}")]
    AtThreshold { eps: f64, source: StageError },
    #[error("at ε = {eps}: {simplices} simplices exceed the budget of {limit}")]
    Budget { eps: f64, simplices: usize, limit: usize },
    #[error("classification needs at least {min} grid points, got {got}")]
    GridTooShort { got: usize, min: usize },
}

impl AnalysisError {
    pub fn module(&self) -> &'static str {
        match self {
            AnalysisError::AtThreshold { source, .. } => source.module(),
            _ => "analysis",
        }
    }
}

/// Parameters of the stochastic normalised-Betti estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub eps: f64,
    pub eta: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub metric: Metric,
    pub r_max: usize,
    /// Upper limit on `Σ_{r ≤ r_max+1} |S_r|` at any single threshold.
    pub max_simplices: Option<usize>,
    pub estimator: Option<EstimatorParams>,
}

impl SweepOptions {
    pub fn new(metric: Metric, r_max: usize) -> Self {
        Self {
            metric,
            r_max,
            max_simplices: None,
            estimator: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub edges: usize,
    /// `|S_0|, …, |S_{r_max+1}|`.
    pub counts: Vec<usize>,
    pub stats: GraphStats,
    pub report: BettiReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metric: Metric,
    pub r_max: usize,
    pub points: Vec<SweepPoint>,
}

/// Builds the graph, complex and Betti report at one threshold.
pub fn sweep_point(d: &OverlapMatrix, eps: f64, opts: &SweepOptions) -> Result<SweepPoint, AnalysisError> {
    let at = |source: StageError| AnalysisError::AtThreshold { eps, source };
    let rule = ThresholdRule::new(opts.metric, eps).map_err(|e| at(e.into()))?;
    let graph = build_graph(d, &rule).map_err(|e| at(e.into()))?;
    let complex = enumerate_cliques(&graph, opts.r_max + 1);
    let simplices = complex.total_simplices();
    if let Some(limit) = opts.max_simplices {
        if simplices > limit {
            return Err(AnalysisError::Budget { eps, simplices, limit });
        }
    }
    let mut report = betti_exact(&complex, opts.r_max).map_err(|e| at(e.into()))?;
    if let Some(est) = opts.estimator {
        attach_estimates(&mut report, &complex, est.eps, est.eta, est.seed).map_err(|e| at(e.into()))?;
    }
    Ok(SweepPoint {
        eps,
        edges: graph.edges().len(),
        counts: complex.counts(),
        stats: graph_stats(&graph),
        report,
    })
}

pub fn validate_grid(grid: &[f64]) -> Result<(), AnalysisError> {
    if grid.is_empty() {
        return Err(AnalysisError::EmptyGrid);
    }
    if grid.iter().any(|e| !e.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::UnsortedGrid);
    }
    Ok(())
}

/// [`sweep_point`] at every threshold of an ascending grid.
pub fn threshold_sweep(d: &OverlapMatrix, grid: &[f64], opts: &SweepOptions) -> Result<SweepResult, AnalysisError> {
    validate_grid(grid)?;
    let points = grid.iter().map(|&eps| sweep_point(d, eps, opts)).collect::<Result<_, _>>()?;
    Ok(SweepResult {
        metric: opts.metric,
        r_max: opts.r_max,
        points,
    })
}

impl SweepResult {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.eps).collect()
    }

    /// `β_r` along the grid.
    pub fn betti_curve(&self, r: usize) -> Vec<usize> {
        self.points
            .iter()
            .map(|p| p.report.get(r).map_or(0, |e| e.betti))
            .collect()
    }

    /// Whether every `|S_r|` is non-decreasing along the grid.
    pub fn counts_monotone(&self) -> bool {
        self.points.windows(2).all(|w| {
            w[0].counts
                .iter()
                .zip(&w[1].counts)
                .all(|(a, b)| a <= b)
        })
    }

    /// Flat `(ε, entry)` rows in grid order, then by `r`.
    pub fn rows(&self) -> impl Iterator<Item = (f64, &BettiEntry)> {
        self.points
            .iter()
            .flat_map(|p| p.report.entries.iter().map(move |e| (p.eps, e)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsLabel {
    Trivial,
    PeriodicCandidate,
    QuasiPeriodicCandidate,
    ChaoticCandidate,
}

impl DynamicsLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            DynamicsLabel::Trivial => "trivial",
            DynamicsLabel::PeriodicCandidate => "periodic-candidate",
            DynamicsLabel::QuasiPeriodicCandidate => "quasi-periodic-candidate",
            DynamicsLabel::ChaoticCandidate => "chaotic-candidate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    /// Fraction of the grid a signature must hold over, contiguously.
    pub p_min: f64,
    /// Variation score above which the curve counts as erratic.
    pub v_min: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self { p_min: 0.25, v_min: 1.0 }
    }
}

/// Longest contiguous run of grid points satisfying a predicate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub points: usize,
    pub fraction: f64,
    pub eps_from: Option<f64>,
    pub eps_to: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Run with `(β_1, β_2) = (2, 1)`.
    pub torus_span: Span,
    /// Run with `β_1 ≥ 1`.
    pub loop_span: Span,
    /// Sum of L¹ distances between consecutive normalised Betti vectors.
    pub variation_score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSignature {
    pub label: DynamicsLabel,
    pub evidence: Evidence,
    pub params: ClassifyParams,
    pub grid_points: usize,
}

fn longest_run(sweep: &SweepResult, pred: impl Fn(&BettiReport) -> bool) -> Span {
    let (mut best, mut best_end, mut run) = (0, 0, 0);
    for (i, p) in sweep.points.iter().enumerate() {
        if pred(&p.report) {
            run += 1;
            if run > best {
                best = run;
                best_end = i;
            }
        } else {
            run = 0;
        }
    }
    let n = sweep.points.len();
    Span {
        points: best,
        fraction: if n == 0 { 0.0 } else { best as f64 / n as f64 },
        eps_from: (best > 0).then(|| sweep.points[best_end + 1 - best].eps),
        eps_to: (best > 0).then(|| sweep.points[best_end].eps),
    }
}

pub fn variation_score(sweep: &SweepResult) -> f64 {
    sweep
        .points
        .windows(2)
        .map(|w| {
            let a = w[0].report.normalized();
            let b = w[1].report.normalized();
            let len = a.len().max(b.len());
            (0..len)
                .map(|r| (a.get(r).copied().unwrap_or(0.0) - b.get(r).copied().unwrap_or(0.0)).abs())
                .sum::<f64>()
        })
        .sum()
}

/// Applies, in order: a persistent `(β_1, β_2) = (2, 1)` window, a
/// persistent `β_1 ≥ 1` window, a variation score above `v_min`, and
/// otherwise `trivial`.
pub fn classify_dynamics(sweep: &SweepResult, params: ClassifyParams) -> Result<DynamicsSignature, AnalysisError> {
    let n = sweep.points.len();
    if n < MIN_GRID_POINTS {
        return Err(AnalysisError::GridTooShort {
            got: n,
            min: MIN_GRID_POINTS,
        });
    }
    let beta = |rep: &BettiReport, r: usize| rep.get(r).map(|e| e.betti);
    let evidence = Evidence {
        torus_span: longest_run(sweep, |rep| beta(rep, 1) == Some(2) && beta(rep, 2) == Some(1)),
        loop_span: longest_run(sweep, |rep| beta(rep, 1).is_some_and(|b| b >= 1)),
        variation_score: variation_score(sweep),
    };
    let label = if evidence.torus_span.fraction >= params.p_min {
        DynamicsLabel::QuasiPeriodicCandidate
    } else if evidence.loop_span.fraction >= params.p_min {
        DynamicsLabel::PeriodicCandidate
    } else if evidence.variation_score > params.v_min {
        DynamicsLabel::ChaoticCandidate
    } else {
        DynamicsLabel::Trivial
    };
    Ok(DynamicsSignature {
        label,
        evidence,
        params,
        grid_points: n,
    })
}
