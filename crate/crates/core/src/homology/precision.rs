use serde::{Deserialize, Serialize};

use super::HomologyError;

/// Additive accuracy needed for a relative accuracy `δ` on `β_r`, with the
/// factors by which the two estimation routes' costs scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionConversion {
    /// `δ · β_r / |S_r|`.
    pub eps: f64,
    /// `|S_r|² / β_r²`, the factor on the `1/ε²` probe count.
    pub quadratic_cost: f64,
    /// `√(|S_r| / β_r)`, the factor on the `1/√ε` depth.
    pub sqrt_cost: f64,
}

pub fn multiplicative_precision(delta: f64, betti: usize, s_r: usize) -> Result<PrecisionConversion, HomologyError> {
    if betti == 0 {
        return Err(HomologyError::UndefinedMultiplicative);
    }
    if s_r < betti {
        return Err(HomologyError::Invalid("β_r cannot exceed |S_r|"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(HomologyError::Invalid("δ must lie in (0, 1)"));
    }
    let (b, s) = (betti as f64, s_r as f64);
    Ok(PrecisionConversion {
        eps: delta * b / s,
        quadratic_cost: (s * s) / (b * b),
        sqrt_cost: libm::sqrt(s / b),
    })
}

/// `6 |E| ln(1/η) / √ε`, an informational depth estimate for the
/// gap-dependent quantum route. Nothing in the pipeline depends on it.
pub fn gap_route_depth_estimate(edges: usize, eta: f64, eps: f64) -> f64 {
    6.0 * edges as f64 * libm::log(1.0 / eta) / libm::sqrt(eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        let p = multiplicative_precision(0.1, 1, 4).unwrap();
        assert_eq!(p.eps, 0.025);
        let p = multiplicative_precision(0.3, 7, 7).unwrap();
        assert_eq!((p.eps, p.quadratic_cost, p.sqrt_cost), (0.3, 1.0, 1.0));
        let p = multiplicative_precision(0.5, 2, 100).unwrap();
        assert_eq!((p.eps, p.quadratic_cost, p.sqrt_cost), (0.01, 2500.0, libm::sqrt(50.0)));
        assert_eq!(multiplicative_precision(0.1, 0, 4), Err(HomologyError::UndefinedMultiplicative));
    }

    #[test]
    fn depth_estimate_scales_with_edges() {
        let a = gap_route_depth_estimate(10, 0.05, 0.01);
        assert!((gap_route_depth_estimate(20, 0.05, 0.01) - 2.0 * a).abs() < 1e-9 * a);
    }
}
