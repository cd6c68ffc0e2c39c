//! Accelerated first-order minimization of smooth (strongly) quasar-convex
//! functions.
//!
//! The crate provides:
//!
//! - a counted differentiable-oracle abstraction ([`oracle`]) so every
//!   function/gradient evaluation a solver makes is accounted for exactly,
//! - a bisection line search over the segment between the two solver states
//!   that picks the momentum weight ([`linesearch`]),
//! - accelerated solvers for the strongly and non-strongly quasar-convex
//!   cases, a gradient-descent baseline, and a regularization reduction
//!   ([`solvers`]),
//! - the chain-structured worst-case instance family with analytic gradients
//!   and optima, plus diagonal quadratic sanity objectives ([`instances`]),
//! - numerical certification utilities: quasar-convexity sampling, smoothness
//!   estimation, structural checks, and zero-respecting instrumentation
//!   ([`verify`]).
//!
//! All arithmetic is `f64`. Solver runs are deterministic; randomized
//! utilities take explicit seeds.

pub mod error;
pub mod instances;
pub mod linesearch;
pub mod omega;
pub mod oracle;
pub mod problem;
pub mod solvers;
pub mod trace;
pub mod vector;
pub mod verify;

pub use error::Error;
pub use oracle::{CountingOracle, EvalCounts, Objective};
pub use problem::Problem;
pub use solvers::{
    solve_gd, solve_nonstrong_qc, solve_strongly_qc, solve_via_regularization, SolveOptions,
};
pub use trace::{IterateRecord, SolverTrace, Termination};
