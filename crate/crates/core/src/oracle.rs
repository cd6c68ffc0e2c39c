//! The differentiable-oracle abstraction and exact evaluation accounting.
//!
//! Every objective exposes one combined value-plus-gradient query. Solvers
//! only ever touch objectives through [`CountingOracle`], so the per-run
//! counters are an exact record of the oracle calls made: one combined call
//! increments both the function and the gradient counter by one.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::vector;

/// A deterministic differentiable objective on ℝⁿ.
///
/// `value_grad` writes ∇f(x) into `grad` and returns f(x). Implementations
/// must be pure: identical input produces identical output.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64;
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (**self).value_grad(x, grad)
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (**self).value_grad(x, grad)
    }
}

/// Closure-backed objective, mostly for tests and probes.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64], &mut [f64]) -> f64 + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64], &mut [f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (self.f)(x, grad)
    }
}

/// Snapshot of the evaluation counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalCounts {
    pub fn_evals: u64,
    pub grad_evals: u64,
}

impl EvalCounts {
    /// Combined calls made between `earlier` and `self`.
    pub fn calls_since(&self, earlier: EvalCounts) -> u64 {
        self.fn_evals - earlier.fn_evals
    }
}

/// Counted access to an objective. One wrapper per solver run; the counters
/// are the run's exact oracle-call record.
pub struct CountingOracle<'a> {
    inner: &'a dyn Objective,
    fn_evals: Cell<u64>,
    grad_evals: Cell<u64>,
}

impl<'a> CountingOracle<'a> {
    pub fn new(inner: &'a dyn Objective) -> Self {
        Self {
            inner,
            fn_evals: Cell::new(0),
            grad_evals: Cell::new(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn counts(&self) -> EvalCounts {
        EvalCounts {
            fn_evals: self.fn_evals.get(),
            grad_evals: self.grad_evals.get(),
        }
    }

    /// One combined value-plus-gradient call; increments both counters.
    ///
    /// Rejects non-finite input up front and non-finite oracle output with a
    /// diagnostic identifying the offending coordinate.
    pub fn eval(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        if x.len() != self.inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.inner.dim(),
                got: x.len(),
            });
        }
        if let Some(index) = vector::first_non_finite(x) {
            return Err(Error::NonFiniteInput {
                what: "query point",
                index,
            });
        }
        let value = self.inner.value_grad(x, grad);
        self.fn_evals.set(self.fn_evals.get() + 1);
        self.grad_evals.set(self.grad_evals.get() + 1);
        if !value.is_finite() {
            return Err(Error::NonFiniteOutput {
                what: "objective value",
                index: 0,
                value,
                input_norm: vector::norm(x),
            });
        }
        if let Some(index) = vector::first_non_finite(grad) {
            return Err(Error::NonFiniteOutput {
                what: "gradient entry",
                index,
                value: grad[index],
                input_norm: vector::norm(x),
            });
        }
        Ok(value)
    }

    /// Convenience allocating variant of [`CountingOracle::eval`].
    pub fn eval_alloc(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut grad = vec![0.0; self.inner.dim()];
        let value = self.eval(x, &mut grad)?;
        Ok((value, grad))
    }
}

/// Central-difference gradient estimate, component-wise
/// (f(x+h·eᵢ) − f(x−h·eᵢ))/(2h). Test oracle for analytic gradients;
/// bypasses counting.
pub fn finite_diff_gradient(objective: &dyn Objective, x: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let n = x.len();
    let mut scratch_grad = vec![0.0; n];
    let mut point = x.to_vec();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        point[i] = x[i] + h;
        let plus = objective.value_grad(&point, &mut scratch_grad);
        point[i] = x[i] - h;
        let minus = objective.value_grad(&point, &mut scratch_grad);
        point[i] = x[i];
        out.push((plus - minus) / (2.0 * h));
    }
    out
}
