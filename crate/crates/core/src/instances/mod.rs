//! Benchmark objectives with analytic gradients and known optima.
//!
//! Two families live here:
//!
//! * the chain instances ([`HardInstanceUnscaled`], [`HardInstanceScaled`]) —
//!   quasar-convex objectives built from a coupling quadratic plus a scalar
//!   bump per coordinate, constructed so that first-order methods must walk
//!   the chain link by link; they realize (up to constants) the worst case
//!   for this problem class, which makes them the natural stress tests;
//! * diagonal quadratics ([`DiagonalQuadratic`]) — the easy end of the class,
//!   for validating certified rates before moving to the chains.

pub mod bump;
pub mod chain;
pub mod quadratic;
pub mod scaled;

pub use bump::{
    adaptive_simpson, bump_integrand, upsilon, upsilon_prime, upsilon_quadrature, upsilon_second,
    BUMP_SMOOTHNESS,
};
pub use chain::{
    chain_quadratic, chain_quadratic_value_grad, HardInstanceUnscaled, UnscaledChainObjective,
};
pub use quadratic::{DiagonalQuadratic, SpectrumShape};
pub use scaled::{HardInstanceScaled, ScaledChainObjective, MAX_CHAIN_LEN};
