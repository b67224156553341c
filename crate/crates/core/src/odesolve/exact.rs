use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::{LinearSystem, OdeError, SolverTag, TimeGrid, Trajectory};

/// Target bound on the first omitted series term.
pub const EXP_TOLERANCE: f64 = 1e-12;
/// Largest series order tried before giving up.
pub const MAX_SERIES_ORDER: usize = 64;

/// `Σ_{j=0}^{k} A^j / j!`.
pub fn truncated_exp(a: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for j in 1..=k {
        term = &term * a / j as f64;
        sum += &term;
    }
    sum
}

/// `Σ_{j=1}^{k} A^{j-1} / j!`, the series of `(exp(A) - I) A⁻¹` with no
/// inverse involved. Returns the zero matrix for `k = 0`.
pub fn truncated_phi1(a: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = a.nrows();
    if k == 0 {
        return DMatrix::zeros(n, n);
    }
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for j in 2..=k {
        term = &term * a / j as f64;
        sum += &term;
    }
    sum
}

/// Smallest order `1 ≤ k ≤ MAX_SERIES_ORDER` with `‖M‖^{k+1}/(k+1)! < tol`,
/// where `‖M‖` is the Frobenius norm of the series argument. The floor of
/// one keeps the leading `I` of the φ₁ series.
pub fn series_order(norm: f64, tol: f64) -> Result<usize, OdeError> {
    if !norm.is_finite() {
        return Err(OdeError::Invalid("series argument must be finite"));
    }
    let mut next = norm * norm / 2.0; // ‖M‖^{k+1} / (k+1)! for k = 1
    for k in 1..=MAX_SERIES_ORDER {
        if next < tol {
            return Ok(k);
        }
        next *= norm / (k + 2) as f64;
    }
    Err(OdeError::Truncation {
        requested: tol,
        achieved: next,
        max_order: MAX_SERIES_ORDER,
    })
}

/// `x(t) = exp(At) x0 + t · φ₁(At) b` for constant `A`, `b`.
///
/// The series order is picked so the first dropped term is below
/// [`EXP_TOLERANCE`]; singular `A` is fine.
pub fn linear_exact_solve(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    x0: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>, OdeError> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n || x0.len() != n {
        return Err(OdeError::Dimension {
            expected: n,
            got: if b.len() != n { b.len() } else { x0.len() },
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(OdeError::Invalid("time must be finite and non-negative"));
    }
    let at = a * t;
    let k = series_order(at.norm(), EXP_TOLERANCE)?;
    Ok(truncated_exp(&at, k) * x0 + truncated_phi1(&at, k) * b * t)
}

/// Steps the exact solution across a uniform grid: with `E = exp(Ah)` and
/// `P = h · φ₁(Ah)` fixed, `x_{i+1} = E x_i + P b`.
pub fn exact_stepping(sys: &LinearSystem, x0: &DVector<f64>, grid: &TimeGrid) -> Result<Trajectory, OdeError> {
    let (a, b) = sys.constant_parts().ok_or(OdeError::WrongKind {
        scheme: "exact stepping",
        required: "constant linear",
    })?;
    if x0.len() != sys.dim() {
        return Err(OdeError::Dimension {
            expected: sys.dim(),
            got: x0.len(),
        });
    }
    let h = grid.step();
    let ah = a * h;
    let k = series_order(ah.norm(), EXP_TOLERANCE)?;
    let propagator = truncated_exp(&ah, k);
    let drift = truncated_phi1(&ah, k) * b * h;
    let mut states = Vec::with_capacity(grid.steps() + 1);
    let mut x = x0.clone();
    states.push(x.clone());
    for step in 1..=grid.steps() {
        x = &propagator * &x + &drift;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::Diverged { step });
        }
        states.push(x.clone());
    }
    Trajectory::new(grid.nodes(), states, SolverTag::ExactSeries)
}
