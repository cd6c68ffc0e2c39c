//! A problem bundles an objective with its declared analytic constants.

use crate::error::{Error, Result};
use crate::oracle::Objective;

/// Optional instrumentation: a known minimizer and its value.
///
/// Solvers never require it; when present, traces carry per-iteration error
/// and distance diagnostics and target-accuracy stopping becomes available.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub point: Vec<f64>,
    pub value: f64,
}

/// An objective together with its declared smoothness and quasar-convexity
/// constants.
///
/// Constants are declared, not verified, at construction; the `verify` module
/// provides sampling-based certification.
pub struct Problem<O> {
    pub objective: O,
    /// Smoothness constant L > 0.
    pub l_smooth: f64,
    /// Quasar-convexity weight γ ∈ (0, 1].
    pub gamma: f64,
    /// Strong quasar-convexity modulus μ ≥ 0.
    pub mu: f64,
    /// Optional upper bound on ‖x⁰ − x*‖.
    pub radius: Option<f64>,
    /// Optional known minimizer for instrumentation.
    pub optimum: Option<Optimum>,
}

impl<O: Objective> Problem<O> {
    /// Validates γ ∈ (0,1], μ ≥ 0, L > 0, and the compatibility constraint
    /// L ≥ γμ/(2−γ) (no function is L-smooth and (γ,μ)-strongly
    /// quasar-convex below that threshold).
    pub fn new(objective: O, l_smooth: f64, gamma: f64, mu: f64) -> Result<Self> {
        if !(l_smooth.is_finite() && l_smooth > 0.0) {
            return Err(Error::InvalidConstant(format!(
                "smoothness constant must be positive and finite, got {l_smooth}"
            )));
        }
        if !(gamma.is_finite() && gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidConstant(format!(
                "gamma must lie in (0, 1], got {gamma}"
            )));
        }
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidConstant(format!(
                "mu must be non-negative and finite, got {mu}"
            )));
        }
        if mu > 0.0 && l_smooth < gamma * mu / (2.0 - gamma) {
            return Err(Error::InvalidConstant(format!(
                "L = {l_smooth} is below gamma*mu/(2-gamma) = {}; no such smooth function exists",
                gamma * mu / (2.0 - gamma)
            )));
        }
        Ok(Self {
            objective,
            l_smooth,
            gamma,
            mu,
            radius: None,
            optimum: None,
        })
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidConstant(format!(
                "radius must be positive and finite, got {radius}"
            )));
        }
        self.radius = Some(radius);
        Ok(self)
    }

    pub fn with_optimum(mut self, point: Vec<f64>, value: f64) -> Result<Self> {
        if point.len() != self.objective.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.objective.dim(),
                got: point.len(),
            });
        }
        self.optimum = Some(Optimum { point, value });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// Condition number L/μ; `None` when μ = 0.
    pub fn condition_number(&self) -> Option<f64> {
        (self.mu > 0.0).then(|| self.l_smooth / self.mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FnObjective;

    fn toy() -> impl Objective {
        FnObjective::new(1, |x: &[f64], g: &mut [f64]| {
            g[0] = x[0];
            0.5 * x[0] * x[0]
        })
    }

    #[test]
    fn accepts_valid_constants() {
        let p = Problem::new(toy(), 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.condition_number(), Some(1.0));
    }

    #[test]
    fn rejects_gamma_out_of_range() {
        assert!(Problem::new(toy(), 1.0, 0.0, 0.0).is_err());
        assert!(Problem::new(toy(), 1.0, 1.5, 0.0).is_err());
    }

    #[test]
    fn rejects_incompatible_smoothness() {
        // gamma*mu/(2-gamma) = 1*4/(2-1) = 4 > L = 1.
        assert!(Problem::new(toy(), 1.0, 1.0, 4.1).is_err());
        // Boundary L = gamma*mu/(2-gamma) is allowed.
        assert!(Problem::new(toy(), 4.0, 1.0, 4.0).is_ok());
    }

    #[test]
    fn optimum_dimension_checked() {
        let p = Problem::new(toy(), 1.0, 1.0, 0.0).unwrap();
        assert!(p.with_optimum(vec![0.0, 0.0], 0.0).is_err());
    }
}
