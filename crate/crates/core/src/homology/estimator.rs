//! Stochastic estimate of `β_r / |S_r|` as the normalised trace of a
//! polynomial approximation to the projector onto `ker Δ_r`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::RngCore;

use super::{laplacian, HomologyError};
use crate::complex::CliqueComplex;
use crate::linalg::{psd_spectrum, CsrMatrix};
use crate::quantum::substream;

/// Smallest spectral gap the estimator accepts.
pub const GAP_FLOOR: f64 = 1e-8;
/// Highest Chebyshev degree tried for the step filter.
pub const MAX_FILTER_DEGREE: usize = 500;

const PROBE_DOMAIN: u64 = 0x4855_5443;

/// `⌈(2/ε²) ln(2/η)⌉` Rademacher probes.
pub fn probe_count(eps: f64, eta: f64) -> usize {
    libm::ceil(2.0 / (eps * eps) * libm::log(2.0 / eta)) as usize
}

/// Chebyshev expansion on `[0, upper]` of a smooth step that is close to 1
/// on `[0, λ_min/2]` and close to 0 on `[λ_min, upper]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterPlan {
    pub lambda_min: f64,
    pub upper: f64,
    pub degree: usize,
    pub coefficients: Vec<f64>,
    /// Largest deviation from the 0/1 target seen on the check grid.
    pub sup_error: f64,
}

fn smooth_step(lambda: f64, centre: f64, width: f64) -> f64 {
    0.5 * libm::erfc((lambda - centre) / width)
}

fn chebyshev_coefficients(f: impl Fn(f64) -> f64, degree: usize) -> Vec<f64> {
    let n = degree + 1;
    let values: Vec<f64> = (0..n)
        .map(|j| f(libm::cos(PI * (j as f64 + 0.5) / n as f64)))
        .collect();
    (0..n)
        .map(|k| {
            let sum: f64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * libm::cos(PI * k as f64 * (j as f64 + 0.5) / n as f64))
                .sum();
            let c = 2.0 * sum / n as f64;
            if k == 0 {
                0.5 * c
            } else {
                c
            }
        })
        .collect()
}

impl FilterPlan {
    /// Smallest degree (up to [`MAX_FILTER_DEGREE`]) whose sup-error on the
    /// two flat regions is at most `target`.
    pub fn design(lambda_min: f64, lambda_max: f64, target: f64) -> Result<Self, HomologyError> {
        if !(lambda_min > 0.0 && lambda_max >= lambda_min && target > 0.0) {
            return Err(HomologyError::Invalid("filter needs 0 < λ_min ≤ λ_max and a positive target"));
        }
        let upper = lambda_max * (1.0 + 1e-9);
        let centre = 0.75 * lambda_min;
        // widen the erfc tail until its own error is an eighth of the budget
        let mut q = 0.5;
        while 0.5 * libm::erfc(q) > target / 8.0 {
            q += 0.05;
        }
        let width = 0.25 * lambda_min / q;
        let to_lambda = |x: f64| 0.5 * upper * (x + 1.0);
        let mut degree = 4;
        loop {
            let coefficients = chebyshev_coefficients(|x| smooth_step(to_lambda(x), centre, width), degree);
            let mut plan = Self {
                lambda_min,
                upper,
                degree,
                coefficients,
                sup_error: 0.0,
            };
            plan.sup_error = plan.measure_error();
            if plan.sup_error <= target {
                return Ok(plan);
            }
            if degree == MAX_FILTER_DEGREE {
                return Err(HomologyError::FilterDegree {
                    cap: MAX_FILTER_DEGREE,
                    target,
                    gap_ratio: lambda_min / lambda_max,
                });
            }
            degree = (degree + degree / 4 + 1).min(MAX_FILTER_DEGREE);
        }
    }

    fn measure_error(&self) -> f64 {
        let points = 8 * self.degree + 200;
        let half = 0.5 * self.lambda_min;
        let pass = (0..=points).map(|i| {
            let l = half * i as f64 / points as f64;
            (self.eval(l) - 1.0).abs()
        });
        let stop = (0..=points).map(|i| {
            let l = self.lambda_min + (self.upper - self.lambda_min) * i as f64 / points as f64;
            self.eval(l).abs()
        });
        pass.chain(stop).fold(0.0, f64::max)
    }

    /// Scalar evaluation by Clenshaw's recurrence.
    pub fn eval(&self, lambda: f64) -> f64 {
        let x = 2.0 * lambda / self.upper - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coefficients.iter().skip(1).rev() {
            let b0 = c + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients[0] + x * b1 - b2
    }

    /// `f(A) z` via the three-term recurrence on `X = 2A/upper - I`.
    pub fn apply(&self, a: &CsrMatrix, z: &[f64]) -> Vec<f64> {
        let n = z.len();
        let scale = 2.0 / self.upper;
        let step = |v: &[f64], out: &mut [f64]| {
            a.mul_vec_into(v, out);
            for (o, vi) in out.iter_mut().zip(v) {
                *o = scale * *o - vi;
            }
        };
        let mut prev = z.to_vec();
        let mut acc: Vec<f64> = z.iter().map(|v| self.coefficients[0] * v).collect();
        if self.degree == 0 {
            return acc;
        }
        let mut cur = vec![0.0; n];
        step(&prev, &mut cur);
        for (o, c) in acc.iter_mut().zip(&cur) {
            *o += self.coefficients[1] * c;
        }
        let mut next = vec![0.0; n];
        for &ck in &self.coefficients[2..] {
            step(&cur, &mut next);
            for i in 0..n {
                next[i] = 2.0 * next[i] - prev[i];
                acc[i] += ck * next[i];
            }
            core::mem::swap(&mut prev, &mut cur);
            core::mem::swap(&mut cur, &mut next);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    /// Estimate of `β_r / |S_r|`, clamped to `[0, 1]`.
    pub value: f64,
    pub probes: usize,
    /// Filter degree; 0 when `Δ_r` is the zero matrix.
    pub degree: usize,
    pub lambda_min: Option<f64>,
    pub lambda_max: f64,
}

/// Hutchinson estimate of `tr f(Δ_r) / |S_r|` with Rademacher probes, where
/// `f` is a Chebyshev step filter with sup-error at most `eps / 4`.
///
/// Probe `p` draws from its own substream of `(seed, r, p)`.
pub fn betti_normalized_estimate(
    k: &CliqueComplex,
    r: usize,
    eps: f64,
    eta: f64,
    seed: u64,
) -> Result<Estimate, HomologyError> {
    if !(eps > 0.0 && eps < 1.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(HomologyError::Invalid("ε and η must lie in (0, 1)"));
    }
    let s = k.count(r);
    if s == 0 {
        return Err(HomologyError::Empty { r });
    }
    let lap = laplacian(k, r)?.matrix;
    let spectrum = psd_spectrum(&lap);
    let probes = probe_count(eps, eta);
    let lambda_min = match spectrum.smallest_nonzero {
        // a zero Laplacian: the filter is the identity and every probe gives |S_r|
        None => {
            return Ok(Estimate {
                value: 1.0,
                probes,
                degree: 0,
                lambda_min: None,
                lambda_max: spectrum.largest,
            })
        }
        Some(l) if l < GAP_FLOOR => {
            return Err(HomologyError::GapTooSmall {
                lambda_min: l,
                floor: GAP_FLOOR,
            })
        }
        Some(l) => l,
    };
    let plan = FilterPlan::design(lambda_min, spectrum.largest, eps / 4.0)?;
    let a = CsrMatrix::from_dense(&lap);
    let mut z = vec![0.0; s];
    let mut total = 0.0;
    for p in 0..probes {
        let mut rng = substream(seed, PROBE_DOMAIN, r as u64, p as u64);
        let mut bits = 0u64;
        for (i, zi) in z.iter_mut().enumerate() {
            if i % 64 == 0 {
                bits = rng.next_u64();
            }
            *zi = if bits & 1 == 1 { 1.0 } else { -1.0 };
            bits >>= 1;
        }
        let fz = plan.apply(&a, &z);
        total += z.iter().zip(&fz).map(|(a, b)| a * b).sum::<f64>();
    }
    let value = (total / (probes as f64 * s as f64)).clamp(0.0, 1.0);
    Ok(Estimate {
        value,
        probes,
        degree: plan.degree,
        lambda_min: Some(lambda_min),
        lambda_max: spectrum.largest,
    })
}
