//! TOML pipeline configuration and its validation.
//!
//! A config either describes a system inline or names a preset under
//! `[system] preset = "..."`. In the second case the preset's own config is
//! the base document and every key in the user file overrides it, table by
//! table.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use phasetopo_core::analysis::{validate_grid, ClassifyParams, EstimatorParams, SweepOptions, MIN_GRID_POINTS};
use phasetopo_core::complex::{Metric, ThresholdRule};
use phasetopo_core::odesolve::{LinearSystem, Monomial, OdeSystem, PolynomialField, SystemKind, TimeGrid};
use phasetopo_core::quantum::OverlapMode;

use crate::presets;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("{field}: {message}")]
    Invalid { field: &'static str, message: String },
}

impl ConfigError {
    /// Dotted path of the offending key, when there is one.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            ConfigError::UnknownPreset(_) => Some("system.preset"),
            ConfigError::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        message: message.into(),
    }
}

/// Raw file contents after preset merging.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub system: SystemSpec,
    pub solver: SolverSpec,
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub overlaps: OverlapSpec,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub classify: ClassifySpec,
    pub estimator: Option<EstimatorSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `dx/dt = (a + t a_t) x + (b + t b_t)`.
    Linear {
        a: Vec<Vec<f64>>,
        a_t: Option<Vec<Vec<f64>>>,
        b: Option<Vec<f64>>,
        b_t: Option<Vec<f64>>,
        initial_state: Vec<f64>,
    },
    Polynomial {
        terms: Vec<TermSpec>,
        initial_state: Vec<f64>,
    },
}

/// One monomial `coeff · Π x_j^{powers[j]} · t^{powers[dim]}` of component
/// `component`. The time power is optional.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub component: usize,
    pub coeff: f64,
    pub powers: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Euler,
    ExactSeries,
    FiniteDifference,
    Chebyshev,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub scheme: Option<Scheme>,
    pub t_end: f64,
    pub steps: usize,
    /// Collocation nodes, chebyshev only.
    pub nodes: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub samples: Option<usize>,
    pub times: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapSpec {
    #[serde(default = "default_mode")]
    pub mode: OverlapMode,
    #[serde(default)]
    pub shots: u64,
}

fn default_mode() -> OverlapMode {
    OverlapMode::Exact
}

impl Default for OverlapSpec {
    fn default() -> Self {
        Self {
            mode: OverlapMode::Exact,
            shots: 0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_metric")]
    pub metric: Metric,
    pub eps: Vec<f64>,
    #[serde(default = "default_r_max")]
    pub r_max: usize,
    pub max_simplices: Option<usize>,
}

fn default_metric() -> Metric {
    Metric::CosineDissimilarity
}

fn default_r_max() -> usize {
    3
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySpec {
    #[serde(default = "default_p_min")]
    pub p_min: f64,
    #[serde(default = "default_v_min")]
    pub v_min: f64,
}

fn default_p_min() -> f64 {
    ClassifyParams::default().p_min
}

fn default_v_min() -> f64 {
    ClassifyParams::default().v_min
}

impl Default for ClassifySpec {
    fn default() -> Self {
        let p = ClassifyParams::default();
        Self {
            p_min: p.p_min,
            v_min: p.v_min,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub eps: f64,
    pub eta: f64,
}

/// Command-line overrides applied after parsing.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub exact: bool,
}

/// A config that passed validation, with every default resolved.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub name: String,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub system: OdeSystem,
    pub initial_state: DVector<f64>,
    pub scheme: Scheme,
    pub grid: TimeGrid,
    pub nodes: Option<usize>,
    pub sample_indices: Vec<usize>,
    pub mode: OverlapMode,
    pub shots: u64,
    pub eps_grid: Vec<f64>,
    pub sweep: SweepOptions,
    pub classify: ClassifyParams,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<ResolvedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse(&text, overrides)
}

pub fn parse(text: &str, overrides: &Overrides) -> Result<ResolvedConfig, ConfigError> {
    let user: toml::Table = toml::from_str(text)?;
    let (merged, preset) = merge_preset(user)?;
    let mut cfg: PipelineConfig = merged.try_into()?;
    if cfg.name.is_none() {
        cfg.name = Some(preset.unwrap_or("inline").to_owned());
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &overrides.out_dir {
        cfg.out_dir = Some(dir.clone());
    }
    if overrides.exact {
        cfg.overlaps = OverlapSpec::default();
    }
    cfg.validate()
}

fn merge_preset(mut user: toml::Table) -> Result<(toml::Table, Option<&'static str>), ConfigError> {
    let name = match user.get_mut("system").and_then(|s| s.as_table_mut()) {
        Some(system) => match system.remove("preset") {
            Some(toml::Value::String(name)) => name,
            Some(_) => return Err(invalid("system.preset", "must be a string")),
            None => return Ok((user, None)),
        },
        None => return Ok((user, None)),
    };
    let preset = presets::find(&name).ok_or(ConfigError::UnknownPreset(name))?;
    let mut base: toml::Table = toml::from_str(preset.config).expect("preset configs are valid TOML");
    // A preset's system is replaced wholesale if the user picks another kind.
    if let Some(kind) = user.get("system").and_then(|s| s.get("kind")) {
        if base.get("system").and_then(|s| s.get("kind")) != Some(kind) {
            base.remove("system");
        }
    }
    deep_merge(&mut base, user);
    Ok((base, Some(preset.name)))
}

fn deep_merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => deep_merge(b, o),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

fn matrix(rows: &[Vec<f64>], n: usize, field: &'static str) -> Result<DMatrix<f64>, ConfigError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(invalid(field, format!("must be a {n}×{n} matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn vector(v: &Option<Vec<f64>>, n: usize, field: &'static str) -> Result<DVector<f64>, ConfigError> {
    match v {
        None => Ok(DVector::zeros(n)),
        Some(v) if v.len() == n => Ok(DVector::from_column_slice(v)),
        Some(v) => Err(invalid(field, format!("has length {}, expected {n}", v.len()))),
    }
}

impl SystemSpec {
    fn build(&self) -> Result<(OdeSystem, DVector<f64>), ConfigError> {
        match self {
            SystemSpec::Linear {
                a,
                a_t,
                b,
                b_t,
                initial_state,
            } => {
                let n = a.len();
                if n == 0 {
                    return Err(invalid("system.a", "must not be empty"));
                }
                let a = matrix(a, n, "system.a")?;
                let b = vector(b, n, "system.b")?;
                let x0 = vector(&Some(initial_state.clone()), n, "system.initial_state")?;
                let sys = match (a_t, b_t) {
                    (None, None) => LinearSystem::constant(a, b),
                    _ => {
                        let a_t = match a_t {
                            Some(rows) => matrix(rows, n, "system.a_t")?,
                            None => DMatrix::zeros(n, n),
                        };
                        let b_t = vector(b_t, n, "system.b_t")?;
                        LinearSystem::time_varying(n, move |t| &a + &a_t * t, move |t| &b + &b_t * t)
                    }
                }
                .map_err(|e| invalid("system", e.to_string()))?;
                Ok((sys.into(), x0))
            }
            SystemSpec::Polynomial { terms, initial_state } => {
                let n = initial_state.len();
                if n == 0 {
                    return Err(invalid("system.initial_state", "must not be empty"));
                }
                let mut components = vec![Vec::new(); n];
                for term in terms {
                    if term.component >= n {
                        return Err(invalid(
                            "system.terms",
                            format!("component {} out of range for dimension {n}", term.component),
                        ));
                    }
                    if term.powers.len() != n && term.powers.len() != n + 1 {
                        return Err(invalid(
                            "system.terms",
                            format!("powers must have {n} or {} entries", n + 1),
                        ));
                    }
                    let mut powers = term.powers.clone();
                    powers.resize(n + 1, 0);
                    components[term.component].push(Monomial::new(term.coeff, powers));
                }
                let field = PolynomialField::new(components).map_err(|e| invalid("system.terms", e.to_string()))?;
                Ok((field.into(), DVector::from_column_slice(initial_state)))
            }
        }
    }
}

impl PipelineConfig {
    pub fn validate(self) -> Result<ResolvedConfig, ConfigError> {
        let (system, initial_state) = self.system.build()?;
        if initial_state.iter().any(|v| !v.is_finite()) {
            return Err(invalid("system.initial_state", "must be finite"));
        }

        let kind = system.kind();
        let scheme = self.solver.scheme.unwrap_or(match kind {
            SystemKind::LinearConst => Scheme::ExactSeries,
            SystemKind::LinearTimeVarying => Scheme::FiniteDifference,
            SystemKind::Polynomial => Scheme::Euler,
        });
        let compatible = match scheme {
            Scheme::Euler => true,
            Scheme::ExactSeries => kind == SystemKind::LinearConst,
            Scheme::FiniteDifference | Scheme::Chebyshev => kind != SystemKind::Polynomial,
        };
        if !compatible {
            return Err(invalid("solver.scheme", format!("{scheme:?} cannot integrate a {kind:?} system")));
        }
        let grid = TimeGrid::new(self.solver.t_end, self.solver.steps).map_err(|e| invalid("solver", e.to_string()))?;
        let nodes = match (scheme, self.solver.nodes) {
            (Scheme::Chebyshev, Some(n)) if n >= 2 => Some(n),
            (Scheme::Chebyshev, _) => return Err(invalid("solver.nodes", "chebyshev needs at least 2 nodes")),
            (_, Some(_)) => return Err(invalid("solver.nodes", "only used by the chebyshev scheme")),
            (_, None) => None,
        };

        let sample_indices = sample_indices(&self.sampling, &grid)?;

        match (self.overlaps.mode, self.overlaps.shots) {
            (OverlapMode::Exact, 0) => {}
            (OverlapMode::Exact, _) => return Err(invalid("overlaps.shots", "must be 0 in exact mode")),
            (OverlapMode::SwapTest, 0) => return Err(invalid("overlaps.shots", "swap_test needs at least 1 shot")),
            (OverlapMode::HadamardTest, s) if s < 2 => {
                return Err(invalid("overlaps.shots", "hadamard_test needs at least 2 shots"))
            }
            _ => {}
        }

        let eps_grid = self.sweep.eps;
        validate_grid(&eps_grid).map_err(|e| invalid("sweep.eps", e.to_string()))?;
        if eps_grid.len() < MIN_GRID_POINTS {
            return Err(invalid(
                "sweep.eps",
                format!("classification needs at least {MIN_GRID_POINTS} thresholds, got {}", eps_grid.len()),
            ));
        }
        for &eps in &eps_grid {
            ThresholdRule::new(self.sweep.metric, eps).map_err(|e| invalid("sweep.eps", e.to_string()))?;
        }
        if self.sweep.r_max < 1 {
            return Err(invalid("sweep.r_max", "must be at least 1"));
        }
        if self.sweep.max_simplices == Some(0) {
            return Err(invalid("sweep.max_simplices", "must be positive"));
        }

        let c = self.classify;
        if !(c.p_min > 0.0 && c.p_min <= 1.0) {
            return Err(invalid("classify.p_min", "must lie in (0, 1]"));
        }
        if !(c.v_min.is_finite() && c.v_min >= 0.0) {
            return Err(invalid("classify.v_min", "must be finite and non-negative"));
        }

        let estimator = match self.estimator {
            None => None,
            Some(e) => {
                if !(e.eps > 0.0 && e.eps < 1.0) {
                    return Err(invalid("estimator.eps", "must lie in (0, 1)"));
                }
                if !(e.eta > 0.0 && e.eta < 1.0) {
                    return Err(invalid("estimator.eta", "must lie in (0, 1)"));
                }
                Some(EstimatorParams {
                    eps: e.eps,
                    eta: e.eta,
                    seed: self.seed,
                })
            }
        };

        Ok(ResolvedConfig {
            name: self.name.unwrap_or_else(|| "inline".to_owned()),
            seed: self.seed,
            out_dir: self.out_dir,
            system,
            initial_state,
            scheme,
            grid,
            nodes,
            sample_indices,
            mode: self.overlaps.mode,
            shots: self.overlaps.shots,
            eps_grid,
            sweep: SweepOptions {
                metric: self.sweep.metric,
                r_max: self.sweep.r_max,
                max_simplices: self.sweep.max_simplices,
                estimator,
            },
            classify: ClassifyParams {
                p_min: c.p_min,
                v_min: c.v_min,
            },
        })
    }
}

/// Uniform subsampling `i_k = ⌊k (N+1) / M⌋`, or explicit times that must
/// land on grid nodes.
fn sample_indices(spec: &SamplingSpec, grid: &TimeGrid) -> Result<Vec<usize>, ConfigError> {
    let available = grid.steps() + 1;
    let indices = match (&spec.times, spec.samples) {
        (None, None) => return Err(invalid("sampling", "set either samples or times")),
        (None, Some(m)) => {
            if m > available {
                return Err(invalid(
                    "sampling.samples",
                    format!("{m} samples requested but the solver grid has only {available} nodes"),
                ));
            }
            (0..m).map(|k| k * available / m).collect()
        }
        (Some(times), m) => {
            if m.is_some_and(|m| m != times.len()) {
                return Err(invalid("sampling.samples", "disagrees with the number of sampling times"));
            }
            let h = grid.step();
            let mut out = Vec::with_capacity(times.len());
            for &t in times {
                let i = (t / h).round();
                if !(t.is_finite() && i >= 0.0 && (i as usize) < available && (t - grid.node(i as usize)).abs() <= 1e-9 * h.max(1.0)) {
                    return Err(invalid("sampling.times", format!("{t} is not a node of the solver grid")));
                }
                out.push(i as usize);
            }
            if out.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid("sampling.times", "must be strictly increasing"));
            }
            out
        }
    };
    if indices.len() < 2 {
        return Err(invalid("sampling", "need at least 2 samples"));
    }
    Ok(indices)
}
