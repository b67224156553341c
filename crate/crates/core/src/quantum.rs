//! Emulation of the state-overlap layer: amplitude encoding of trajectory
//! samples and shot-noise estimates of `|⟨a|b⟩|` from SWAP and Hadamard
//! tests.
//!
//! The tests are simulated at the level of their ancilla statistics. A SWAP
//! test succeeds with probability `(1 + |⟨a|b⟩|²) / 2`; the two Hadamard
//! tests succeed with `(1 + Re⟨a|b⟩) / 2` and `(1 + Im⟨a|b⟩) / 2`. The number
//! of successes in `shots` independent runs is drawn from the matching
//! binomial law.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::Complex;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::odesolve::Trajectory;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OverlapError {
    #[error("cannot encode a zero or non-finite vector (sample {index})")]
    Encoding { index: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("{mode:?} needs at least {min} shots, got {got}")]
    Shots { mode: OverlapMode, min: u64, got: u64 },
    #[error("overlap matrix needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("overlap matrix entries must be symmetric, finite and in [0, 1]")]
    InvalidEntries,
}

/// A unit vector of amplitudes plus the norm that was divided out.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedState {
    amplitudes: Vec<Complex<f64>>,
    source_norm: f64,
}

/// `x / ‖x‖₂`, keeping `‖x‖₂` on the side.
pub fn amplitude_encode(x: &[f64]) -> Result<EncodedState, OverlapError> {
    EncodedState::from_complex(x.iter().map(|&v| Complex::new(v, 0.0)).collect())
}

impl EncodedState {
    pub fn from_complex(x: Vec<Complex<f64>>) -> Result<Self, OverlapError> {
        let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) || x.is_empty() {
            return Err(OverlapError::Encoding { index: 0 });
        }
        let amplitudes = x.into_iter().map(|c| c / norm).collect();
        Ok(Self {
            amplitudes,
            source_norm: norm,
        })
    }

    pub fn amplitudes(&self) -> &[Complex<f64>] {
        &self.amplitudes
    }

    pub fn source_norm(&self) -> f64 {
        self.source_norm
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩ = Σ conj(a_i) b_i`.
    pub fn inner(&self, other: &EncodedState) -> Result<Complex<f64>, OverlapError> {
        if self.dim() != other.dim() {
            return Err(OverlapError::Dimension {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// The original (unnormalised) vector `source_norm · amplitudes`.
    pub fn source_vector(&self) -> Vec<Complex<f64>> {
        self.amplitudes.iter().map(|a| a * self.source_norm).collect()
    }
}

/// `|⟨a|b⟩|`, clamped into `[0, 1]` against rounding.
pub fn exact_overlap(a: &EncodedState, b: &EncodedState) -> Result<f64, OverlapError> {
    Ok(a.inner(b)?.norm_sqr().sqrt().min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMode {
    Exact,
    SwapTest,
    HadamardTest,
}

/// Fraction of `shots` Bernoulli(`p`) trials that succeed.
fn success_fraction<R: Rng>(rng: &mut R, shots: u64, p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let successes = Binomial::new(shots, p)
        .expect("probability clamped into [0, 1]")
        .sample(rng);
    successes as f64 / shots as f64
}

fn swap_with_rng<R: Rng>(rng: &mut R, a: &EncodedState, b: &EncodedState, shots: u64) -> Result<f64, OverlapError> {
    if shots < 1 {
        return Err(OverlapError::Shots {
            mode: OverlapMode::SwapTest,
            min: 1,
            got: shots,
        });
    }
    let overlap_sq = a.inner(b)?.norm_sqr().min(1.0);
    let p_hat = success_fraction(rng, shots, 0.5 * (1.0 + overlap_sq));
    Ok((2.0 * p_hat - 1.0).max(0.0).sqrt())
}

fn hadamard_with_rng<R: Rng>(rng: &mut R, a: &EncodedState, b: &EncodedState, shots: u64) -> Result<f64, OverlapError> {
    if shots < 2 {
        return Err(OverlapError::Shots {
            mode: OverlapMode::HadamardTest,
            min: 2,
            got: shots,
        });
    }
    let inner = a.inner(b)?;
    let re_shots = shots.div_ceil(2);
    let im_shots = shots - re_shots;
    let re = 2.0 * success_fraction(rng, re_shots, 0.5 * (1.0 + inner.re)) - 1.0;
    let im = 2.0 * success_fraction(rng, im_shots, 0.5 * (1.0 + inner.im)) - 1.0;
    Ok((re * re + im * im).sqrt().clamp(0.0, 1.0))
}

const SWAP_DOMAIN: u64 = 0x5357_4150;
const HADAMARD_DOMAIN: u64 = 0x4841_4441;

/// Generator for the `(i, j)` substream of `seed` within a domain.
pub(crate) fn substream(seed: u64, domain: u64, i: u64, j: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.rotate_left(32));
    rng.set_stream((i << 32) | (j & 0xffff_ffff));
    rng
}

/// SWAP-test estimate of `|⟨a|b⟩|`: `sqrt(max(0, 2p̂ - 1))`.
pub fn swap_test_estimate(a: &EncodedState, b: &EncodedState, shots: u64, seed: u64) -> Result<f64, OverlapError> {
    swap_with_rng(&mut substream(seed, SWAP_DOMAIN, 0, 0), a, b, shots)
}

/// Hadamard-test estimate of `|⟨a|b⟩|`. Half of the shots (rounded up) go
/// to the real-part circuit and the rest to the imaginary-part circuit.
pub fn hadamard_test_estimate(a: &EncodedState, b: &EncodedState, shots: u64, seed: u64) -> Result<f64, OverlapError> {
    hadamard_with_rng(&mut substream(seed, HADAMARD_DOMAIN, 0, 0), a, b, shots)
}

/// Symmetric matrix of pairwise overlaps `d_ij ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix {
    size: usize,
    entries: Vec<f64>,
    mode: OverlapMode,
    shots: u64,
    seed: u64,
    states: Option<Vec<EncodedState>>,
}

impl OverlapMatrix {
    /// Wraps a row-major matrix given directly (no encoded states attached).
    pub fn from_entries(size: usize, entries: Vec<f64>) -> Result<Self, OverlapError> {
        if size < 2 {
            return Err(OverlapError::TooFewSamples(size));
        }
        if entries.len() != size * size {
            return Err(OverlapError::InvalidEntries);
        }
        for i in 0..size {
            for j in 0..size {
                let v = entries[i * size + j];
                if !(0.0..=1.0).contains(&v) || v != entries[j * size + i] {
                    return Err(OverlapError::InvalidEntries);
                }
            }
        }
        Ok(Self {
            size,
            entries,
            mode: OverlapMode::Exact,
            shots: 0,
            seed: 0,
            states: None,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn mode(&self) -> OverlapMode {
        self.mode
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Encoded samples the matrix was built from, when known.
    pub fn states(&self) -> Option<&[EncodedState]> {
        self.states.as_deref()
    }

    /// Relabels vertices: entry `(i, j)` of the result is entry
    /// `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.size, "permutation length");
        let n = self.size;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        let states = self
            .states
            .as_ref()
            .map(|s| perm.iter().map(|&p| s[p].clone()).collect());
        Self {
            entries,
            states,
            ..self.clone()
        }
    }
}

/// Encodes every sample of `traj` and fills all `M(M-1)/2` pairs with the
/// chosen estimator. Pair `(i, j)` draws from its own substream of `seed`,
/// so the result does not depend on evaluation order. `shots` is ignored in
/// exact mode.
pub fn pairwise_overlaps(traj: &Trajectory, mode: OverlapMode, shots: u64, seed: u64) -> Result<OverlapMatrix, OverlapError> {
    let states = traj
        .states()
        .iter()
        .enumerate()
        .map(|(index, x)| amplitude_encode(x.as_slice()).map_err(|_| OverlapError::Encoding { index }))
        .collect::<Result<Vec<_>, _>>()?;
    overlaps_of_states(states, mode, shots, seed)
}

/// [`pairwise_overlaps`] for states that are already encoded.
pub fn overlaps_of_states(states: Vec<EncodedState>, mode: OverlapMode, shots: u64, seed: u64) -> Result<OverlapMatrix, OverlapError> {
    let m = states.len();
    if m < 2 {
        return Err(OverlapError::TooFewSamples(m));
    }
    match mode {
        OverlapMode::SwapTest if shots < 1 => {
            return Err(OverlapError::Shots { mode, min: 1, got: shots })
        }
        OverlapMode::HadamardTest if shots < 2 => {
            return Err(OverlapError::Shots { mode, min: 2, got: shots })
        }
        _ => {}
    }
    let mut entries = vec![0.0; m * m];
    for i in 0..m {
        entries[i * m + i] = 1.0;
        for j in i + 1..m {
            let (a, b) = (&states[i], &states[j]);
            let d = match mode {
                OverlapMode::Exact => exact_overlap(a, b)?,
                OverlapMode::SwapTest => swap_with_rng(&mut substream(seed, SWAP_DOMAIN, i as u64 + 1, j as u64), a, b, shots)?,
                OverlapMode::HadamardTest => {
                    hadamard_with_rng(&mut substream(seed, HADAMARD_DOMAIN, i as u64 + 1, j as u64), a, b, shots)?
                }
            };
            entries[i * m + j] = d;
            entries[j * m + i] = d;
        }
    }
    Ok(OverlapMatrix {
        size: m,
        entries,
        mode,
        shots: if mode == OverlapMode::Exact { 0 } else { shots },
        seed,
        states: Some(states),
    })
}
