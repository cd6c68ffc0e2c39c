//! Diagonal quadratic sanity objectives.
//!
//! Strongly convex quadratics `½ (x−c)ᵀ D (x−c)` with a prescribed diagonal
//! spectrum. Every such function is quasar-convex with curve parameter 1 and
//! strong-curvature parameter `min(D)`, so these are the well-understood end
//! of the problem family: solvers should hit their certified rates on them
//! before being pointed at the chain instances.

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::problem::Problem;

/// How eigenvalues are spread across `[mu, l_smooth]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumShape {
    /// Geometric progression from `mu` to `l_smooth`.
    LogSpaced,
    /// Arithmetic progression from `mu` to `l_smooth`.
    LinearSpaced,
}

/// `½ (x − center)ᵀ D (x − center)` with diagonal `D`.
#[derive(Debug, Clone)]
pub struct DiagonalQuadratic {
    diag: Vec<f64>,
    center: Vec<f64>,
    mu: f64,
    l_smooth: f64,
}

impl DiagonalQuadratic {
    /// Builds the quadratic from an explicit diagonal and center.
    /// The diagonal must be positive and finite; curvature bounds are taken
    /// from its extremes.
    pub fn new(diag: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidConfig("empty spectrum".into()));
        }
        if diag.len() != center.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len(),
                got: center.len(),
            });
        }
        if let Some(bad) = diag.iter().find(|d| !d.is_finite() || **d <= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "spectrum entries must be positive and finite, found {bad}"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("center must be finite".into()));
        }
        let mu = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let l_smooth = diag.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            diag,
            center,
            mu,
            l_smooth,
        })
    }

    /// Builds the quadratic with `dim` eigenvalues spread across
    /// `[mu, l_smooth]` in the given shape. The extreme eigenvalues are set
    /// to `mu` and `l_smooth` exactly.
    pub fn from_spectrum(
        dim: usize,
        mu: f64,
        l_smooth: f64,
        shape: SpectrumShape,
        center: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        if !(mu.is_finite() && l_smooth.is_finite()) || mu <= 0.0 || l_smooth < mu {
            return Err(Error::InvalidConfig(format!(
                "need 0 < mu <= l_smooth, got mu = {mu}, l_smooth = {l_smooth}"
            )));
        }
        let mut diag = Vec::with_capacity(dim);
        if dim == 1 {
            diag.push(l_smooth);
        } else {
            for i in 0..dim {
                let t = i as f64 / (dim - 1) as f64;
                let d = match shape {
                    SpectrumShape::LogSpaced => (mu.ln() + t * (l_smooth.ln() - mu.ln())).exp(),
                    SpectrumShape::LinearSpaced => mu + t * (l_smooth - mu),
                };
                diag.push(d);
            }
            diag[0] = mu;
            diag[dim - 1] = l_smooth;
        }
        Self::new(diag, center)
    }

    /// Smallest eigenvalue (the strong-curvature parameter).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Largest eigenvalue (the smoothness constant).
    pub fn l_smooth(&self) -> f64 {
        self.l_smooth
    }

    /// The minimizer.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Eigenvalues.
    pub fn spectrum(&self) -> &[f64] {
        &self.diag
    }

    /// Full problem description: curve parameter 1, strong curvature `mu`,
    /// optimum at the center with value 0.
    pub fn problem(self) -> Result<Problem<DiagonalQuadratic>> {
        let (l, mu, center) = (self.l_smooth, self.mu, self.center.clone());
        Problem::new(self, l, 1.0, mu)?.with_optimum(center, 0.0)
    }
}

impl Objective for DiagonalQuadratic {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let mut value = 0.0;
        for i in 0..x.len() {
            let offset = x[i] - self.center[i];
            value += 0.5 * self.diag[i] * offset * offset;
            grad[i] = self.diag[i] * offset;
        }
        value
    }
}
