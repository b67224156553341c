use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::OdeError;

/// `coeff · x_1^p_1 ⋯ x_N^p_N · t^p_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    /// One exponent per state variable followed by the exponent of `t`.
    pub powers: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: f64, powers: Vec<u32>) -> Self {
        Self { coeff, powers }
    }

    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        let n = x.len();
        let mut v = self.coeff;
        for (i, &p) in self.powers.iter().enumerate() {
            if p == 0 {
                continue;
            }
            let base = if i < n { x[i] } else { t };
            v *= base.powi(p as i32);
        }
        v
    }
}

/// Polynomial right-hand side `F = (f_1, …, f_N)` in the state and time.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialField {
    dim: usize,
    components: Vec<Vec<Monomial>>,
}

impl PolynomialField {
    /// `components[i]` lists the monomials of `f_i`; each must carry `N + 1`
    /// exponents.
    pub fn new(components: Vec<Vec<Monomial>>) -> Result<Self, OdeError> {
        let dim = components.len();
        if dim == 0 {
            return Err(OdeError::Invalid("system dimension must be at least 1"));
        }
        for m in components.iter().flatten() {
            if m.powers.len() != dim + 1 {
                return Err(OdeError::Dimension {
                    expected: dim + 1,
                    got: m.powers.len(),
                });
            }
            if !m.coeff.is_finite() {
                return Err(OdeError::Invalid("monomial coefficients must be finite"));
            }
        }
        Ok(Self { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Vec<Monomial>] {
        &self.components
    }

    pub fn eval(&self, x: &[f64], t: f64) -> DVector<f64> {
        DVector::from_iterator(
            self.dim,
            self.components
                .iter()
                .map(|f| f.iter().map(|m| m.eval(x, t)).sum::<f64>()),
        )
    }
}

type MatrixFn = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;
type VectorFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

#[derive(Clone)]
enum Coefficients {
    Constant { a: DMatrix<f64>, b: DVector<f64> },
    TimeVarying { a: MatrixFn, b: VectorFn },
}

/// `dx/dt = A(t) x + b(t)`.
#[derive(Clone)]
pub struct LinearSystem {
    dim: usize,
    coefficients: Coefficients,
}

impl fmt::Debug for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.coefficients {
            Coefficients::Constant { a, b } => f
                .debug_struct("LinearSystem")
                .field("a", a)
                .field("b", b)
                .finish(),
            Coefficients::TimeVarying { .. } => f
                .debug_struct("LinearSystem")
                .field("dim", &self.dim)
                .field("a", &"<fn>")
                .finish(),
        }
    }
}

impl LinearSystem {
    pub fn constant(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self, OdeError> {
        let dim = a.nrows();
        if dim == 0 || a.ncols() != dim {
            return Err(OdeError::Invalid("A must be a non-empty square matrix"));
        }
        if b.len() != dim {
            return Err(OdeError::Dimension {
                expected: dim,
                got: b.len(),
            });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(OdeError::Invalid("A and b must be finite"));
        }
        Ok(Self {
            dim,
            coefficients: Coefficients::Constant { a, b },
        })
    }

    /// Homogeneous constant system `dx/dt = A x`.
    pub fn homogeneous(a: DMatrix<f64>) -> Result<Self, OdeError> {
        let n = a.nrows();
        Self::constant(a, DVector::zeros(n))
    }

    /// Time-varying coefficients. Shapes are checked at `t = 0` and again on
    /// every evaluation.
    pub fn time_varying<A, B>(dim: usize, a: A, b: B) -> Result<Self, OdeError>
    where
        A: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
        B: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(OdeError::Invalid("system dimension must be at least 1"));
        }
        let sys = Self {
            dim,
            coefficients: Coefficients::TimeVarying {
                a: Arc::new(a),
                b: Arc::new(b),
            },
        };
        sys.matrix(0.0)?;
        sys.drive(0.0)?;
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.coefficients, Coefficients::Constant { .. })
    }

    pub fn matrix(&self, t: f64) -> Result<DMatrix<f64>, OdeError> {
        let a = match &self.coefficients {
            Coefficients::Constant { a, .. } => a.clone(),
            Coefficients::TimeVarying { a, .. } => a(t),
        };
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(OdeError::Dimension {
                expected: self.dim,
                got: a.nrows(),
            });
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::Invalid("A(t) has a non-finite entry"));
        }
        Ok(a)
    }

    pub fn drive(&self, t: f64) -> Result<DVector<f64>, OdeError> {
        let b = match &self.coefficients {
            Coefficients::Constant { b, .. } => b.clone(),
            Coefficients::TimeVarying { b, .. } => b(t),
        };
        if b.len() != self.dim {
            return Err(OdeError::Dimension {
                expected: self.dim,
                got: b.len(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::Invalid("b(t) has a non-finite entry"));
        }
        Ok(b)
    }

    /// Constant `(A, b)`, if the system has them.
    pub fn constant_parts(&self) -> Option<(&DMatrix<f64>, &DVector<f64>)> {
        match &self.coefficients {
            Coefficients::Constant { a, b } => Some((a, b)),
            Coefficients::TimeVarying { .. } => None,
        }
    }

    /// A constant linear system written as a degree-one polynomial field.
    pub fn to_polynomial(&self) -> Option<PolynomialField> {
        let (a, b) = self.constant_parts()?;
        let n = self.dim;
        let components = (0..n)
            .map(|i| {
                let mut terms = Vec::new();
                for j in 0..n {
                    if a[(i, j)] != 0.0 {
                        let mut powers = vec![0; n + 1];
                        powers[j] = 1;
                        terms.push(Monomial::new(a[(i, j)], powers));
                    }
                }
                if b[i] != 0.0 {
                    terms.push(Monomial::new(b[i], vec![0; n + 1]));
                }
                terms
            })
            .collect();
        PolynomialField::new(components).ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Polynomial,
    LinearConst,
    LinearTimeVarying,
}

#[derive(Clone, Debug)]
pub enum OdeSystem {
    Polynomial(PolynomialField),
    Linear(LinearSystem),
}

impl OdeSystem {
    pub fn kind(&self) -> SystemKind {
        match self {
            OdeSystem::Polynomial(_) => SystemKind::Polynomial,
            OdeSystem::Linear(l) if l.is_constant() => SystemKind::LinearConst,
            OdeSystem::Linear(_) => SystemKind::LinearTimeVarying,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OdeSystem::Polynomial(p) => p.dim(),
            OdeSystem::Linear(l) => l.dim(),
        }
    }

    /// `F(x, t)`.
    pub fn rhs(&self, x: &DVector<f64>, t: f64) -> Result<DVector<f64>, OdeError> {
        match self {
            OdeSystem::Polynomial(p) => Ok(p.eval(x.as_slice(), t)),
            OdeSystem::Linear(l) => Ok(l.matrix(t)? * x + l.drive(t)?),
        }
    }
}

impl From<PolynomialField> for OdeSystem {
    fn from(p: PolynomialField) -> Self {
        OdeSystem::Polynomial(p)
    }
}

impl From<LinearSystem> for OdeSystem {
    fn from(l: LinearSystem) -> Self {
        OdeSystem::Linear(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_includes_time_power() {
        // 2 x_1^2 x_2 t
        let m = Monomial::new(2.0, vec![2, 1, 1]);
        assert_eq!(m.eval(&[3.0, 0.5], 4.0), 2.0 * 9.0 * 0.5 * 4.0);
    }

    #[test]
    fn rejects_wrong_exponent_count() {
        let err = PolynomialField::new(vec![vec![Monomial::new(1.0, vec![1])]]).unwrap_err();
        assert_eq!(err, OdeError::Dimension { expected: 2, got: 1 });
    }

    #[test]
    fn constant_linear_as_polynomial_agrees() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, 0.5]);
        let b = DVector::from_vec(vec![1.0, -1.0]);
        let lin = LinearSystem::constant(a, b).unwrap();
        let poly = lin.to_polynomial().unwrap();
        let x = DVector::from_vec(vec![0.3, -0.7]);
        let lhs = OdeSystem::from(lin).rhs(&x, 1.0).unwrap();
        let rhs = OdeSystem::from(poly).rhs(&x, 1.0).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn time_varying_shape_checked() {
        let bad = LinearSystem::time_varying(2, |_| DMatrix::zeros(3, 3), |_| DVector::zeros(2));
        assert!(bad.is_err());
    }
}
