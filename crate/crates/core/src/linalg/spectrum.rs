//! Eigenvalues of real symmetric matrices.
//!
//! The matrix is reduced to tridiagonal form with Householder reflections and
//! eigenvalues are then located by Sturm-sequence bisection. Counting the
//! eigenvalues below a cutoff is a single Sturm sweep, which is what kernel
//! dimensions need; individual eigenvalues are bracketed to full precision
//! on demand.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

/// Tridiagonal form `(diagonal, off_diagonal)` of a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(
            diag.is_empty() && off.is_empty() || off.len() + 1 == diag.len(),
            "off-diagonal must be one shorter than the diagonal"
        );
        Self { diag, off }
    }

    /// Householder reduction. Only the lower triangle of `m` is trusted;
    /// symmetry is not checked here.
    pub fn from_symmetric(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        assert_eq!(n, m.ncols(), "matrix must be square");
        if n == 0 {
            return Self::new(Vec::new(), Vec::new());
        }
        // Row-major working copy of the full symmetric matrix.
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = m[(i, j)];
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        for k in 0..n.saturating_sub(1) {
            let lo = k + 1;
            let len = n - lo;
            let mut norm_sq = 0.0;
            for i in lo..n {
                let x = a[i * n + k];
                v[i - lo] = x;
                norm_sq += x * x;
            }
            let norm = norm_sq.sqrt();
            diag[k] = a[k * n + k];
            if norm == 0.0 {
                off[k] = 0.0;
                continue;
            }
            let x0 = v[0];
            let alpha = if x0 >= 0.0 { -norm } else { norm };
            v[0] = x0 - alpha;
            let v_norm_sq = norm_sq - x0 * x0 + v[0] * v[0];
            off[k] = alpha;
            if v_norm_sq == 0.0 {
                continue;
            }
            let beta = 2.0 / v_norm_sq;
            // p = beta * A22 v
            for i in 0..len {
                let row = &a[(lo + i) * n + lo..(lo + i) * n + n];
                let dot: f64 = row.iter().zip(&v[..len]).map(|(x, y)| x * y).sum();
                p[i] = beta * dot;
            }
            // q = p - (beta/2)(vᵀp) v, stored back into p
            let vp: f64 = v[..len].iter().zip(&p[..len]).map(|(x, y)| x * y).sum();
            let kappa = 0.5 * beta * vp;
            for i in 0..len {
                p[i] -= kappa * v[i];
            }
            // A22 -= v qᵀ + q vᵀ
            for i in 0..len {
                let vi = v[i];
                let qi = p[i];
                let row = &mut a[(lo + i) * n + lo..(lo + i) * n + n];
                for (j, r) in row.iter_mut().enumerate() {
                    *r -= vi * p[j] + qi * v[j];
                }
            }
        }
        diag[n - 1] = a[(n - 1) * n + (n - 1)];
        Self::new(diag, off)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.diag.len();
        if n == 0 {
            return 0;
        }
        let tiny = f64::MIN_POSITIVE / f64::EPSILON;
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            if q == 0.0 {
                q = tiny;
            }
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to roughly unit
    /// roundoff of the spectral radius.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.dim(), "eigenvalue index {k} out of range");
        let (mut lo, mut hi) = self.bounds();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= f64::EPSILON * scale;
        hi += f64::EPSILON * scale;
        // Invariant: count_below(lo) <= k < count_below(hi)
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.eigenvalue(k)).collect()
    }
}

/// Summary of the low end of a positive semidefinite spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdSpectrum {
    /// Number of eigenvalues at or below `zero_tolerance`.
    pub kernel_dim: usize,
    /// Smallest eigenvalue above the tolerance, if any.
    pub smallest_nonzero: Option<f64>,
    pub smallest: f64,
    pub largest: f64,
    pub zero_tolerance: f64,
}

/// Kernel dimension and spectral extremes of a symmetric positive
/// semidefinite matrix. Eigenvalues up to `n · eps · λ_max` count as zero.
pub fn psd_spectrum(m: &DMatrix<f64>) -> PsdSpectrum {
    let n = m.nrows();
    if n == 0 {
        return PsdSpectrum {
            kernel_dim: 0,
            smallest_nonzero: None,
            smallest: 0.0,
            largest: 0.0,
            zero_tolerance: 0.0,
        };
    }
    let tri = Tridiagonal::from_symmetric(m);
    let largest = tri.eigenvalue(n - 1);
    let smallest = tri.eigenvalue(0);
    let zero_tolerance = (n as f64) * f64::EPSILON * largest.abs().max(1.0);
    let kernel_dim = tri.count_below(zero_tolerance);
    let smallest_nonzero = (kernel_dim < n).then(|| tri.eigenvalue(kernel_dim));
    PsdSpectrum {
        kernel_dim,
        smallest_nonzero,
        smallest,
        largest,
        zero_tolerance,
    }
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    Tridiagonal::from_symmetric(m).eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let ev = symmetric_eigenvalues(&m);
        assert!(close(ev[0], -1.0, 1e-14) && close(ev[1], 2.0, 1e-14) && close(ev[2], 3.0, 1e-14));
    }

    #[test]
    fn path_laplacian_matches_closed_form() {
        // Path graph P_n Laplacian: eigenvalues 2 - 2cos(kπ/n), k = 0..n-1.
        let n = 7;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            m[(i, i)] += 1.0;
            m[(i + 1, i + 1)] += 1.0;
            m[(i, i + 1)] -= 1.0;
            m[(i + 1, i)] -= 1.0;
        }
        let ev = symmetric_eigenvalues(&m);
        for (k, e) in ev.iter().enumerate() {
            let expected = 2.0 - 2.0 * (core::f64::consts::PI * k as f64 / n as f64).cos();
            assert!(close(*e, expected, 1e-12), "{k}: {e} vs {expected}");
        }
        let s = psd_spectrum(&m);
        assert_eq!(s.kernel_dim, 1);
        assert!(close(s.smallest_nonzero.unwrap(), ev[1], 1e-12));
    }

    #[test]
    fn agrees_with_nalgebra_on_dense_symmetric() {
        let n = 9;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            ((a * 7 + b * 3) % 11) as f64 - 5.0
        });
        let mut ours = symmetric_eigenvalues(&m);
        let mut theirs: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        ours.sort_by(|a, b| a.partial_cmp(b).unwrap());
        theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ours.iter().zip(&theirs) {
            assert!(close(*a, *b, 1e-10), "{a} vs {b}");
        }
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        let s = psd_spectrum(&DMatrix::zeros(4, 4));
        assert_eq!(s.kernel_dim, 4);
        assert_eq!(s.smallest_nonzero, None);
    }
}
