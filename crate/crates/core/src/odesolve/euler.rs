use alloc::vec::Vec;

use nalgebra::DVector;

use super::{OdeError, OdeSystem, SolverTag, TimeGrid, Trajectory};

/// Forward Euler: `x_{j+1} = x_j + h · F(x_j, t_j)`.
///
/// Every node of the grid is returned. A non-finite state stops the run with
/// [`OdeError::Diverged`] naming the step that produced it.
pub fn euler_integrate(sys: &OdeSystem, x0: &DVector<f64>, grid: &TimeGrid) -> Result<Trajectory, OdeError> {
    if x0.len() != sys.dim() {
        return Err(OdeError::Dimension {
            expected: sys.dim(),
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::Invalid("initial state must be finite"));
    }
    let h = grid.step();
    let mut states = Vec::with_capacity(grid.steps() + 1);
    states.push(x0.clone());
    let mut x = x0.clone();
    for j in 0..grid.steps() {
        let f = sys.rhs(&x, grid.node(j))?;
        x += f * h;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::Diverged { step: j + 1 });
        }
        states.push(x.clone());
    }
    Trajectory::new(grid.nodes(), states, SolverTag::Euler)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odesolve::{Monomial, PolynomialField};
    use alloc::vec;

    fn scalar(terms: Vec<Monomial>) -> OdeSystem {
        PolynomialField::new(vec![terms]).unwrap().into()
    }

    #[test]
    fn zero_rhs_is_a_fixed_point() {
        let sys = scalar(vec![]);
        let traj = euler_integrate(&sys, &DVector::from_element(1, 1.0), &TimeGrid::new(3.0, 7).unwrap()).unwrap();
        assert_eq!(traj.len(), 8);
        assert!(traj.states().iter().all(|s| s[0] == 1.0));
    }

    #[test]
    fn exponential_growth_matches_recurrence() {
        // dx/dt = x, h = 0.1, 10 steps -> 1.1^10
        let sys = scalar(vec![Monomial::new(1.0, vec![1, 0])]);
        let traj = euler_integrate(&sys, &DVector::from_element(1, 1.0), &TimeGrid::new(1.0, 10).unwrap()).unwrap();
        let expected = 1.1f64.powi(10);
        assert!((traj.last()[0] - expected).abs() < 1e-13);
        assert!((expected - 2.59374).abs() < 1e-5);
    }

    #[test]
    fn riccati_decay_close_to_closed_form() {
        // dx/dt = -x^2, x(0) = 1 -> 1/(1+t)
        let sys = scalar(vec![Monomial::new(-1.0, vec![2, 0])]);
        let traj = euler_integrate(&sys, &DVector::from_element(1, 1.0), &TimeGrid::new(1.0, 100).unwrap()).unwrap();
        assert!((traj.last()[0] - 0.5).abs() <= 0.01);
    }

    #[test]
    fn blow_up_is_reported_with_step() {
        // dx/dt = x^2 from x = 1e100 overflows on the first step.
        let sys = scalar(vec![Monomial::new(1.0, vec![2, 0])]);
        let err = euler_integrate(&sys, &DVector::from_element(1, 1e200), &TimeGrid::new(1.0, 10).unwrap()).unwrap_err();
        assert_eq!(err, OdeError::Diverged { step: 1 });
    }

    #[test]
    fn first_order_convergence() {
        // dx/dt = -x on [0, 1]; error ratio under halving h is about 1/2.
        let sys = scalar(vec![Monomial::new(-1.0, vec![1, 0])]);
        let exact = (-1.0f64).exp();
        let err = |steps: usize| {
            let traj = euler_integrate(&sys, &DVector::from_element(1, 1.0), &TimeGrid::new(1.0, steps).unwrap()).unwrap();
            (traj.last()[0] - exact).abs()
        };
        for steps in [20, 40, 80, 160] {
            let ratio = err(2 * steps) / err(steps);
            assert!((0.4..=0.6).contains(&ratio), "ratio {ratio} at {steps} steps");
        }
    }
}
