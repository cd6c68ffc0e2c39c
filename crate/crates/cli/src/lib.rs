//! Command-line front end for the quasar-convex optimization library.
//!
//! The `quasar` binary exposes five subcommands:
//!
//! - `solve`: run one solver on one instance and write its iterate trace
//!   (CSV or JSON) with exact oracle accounting;
//! - `bench-scaling`: run seeded scaling studies on the worst-case chain
//!   family and fit log-log slopes of iteration cost;
//! - `linesearch-probe`: run the momentum line search once and report the
//!   step, branch, evaluation count, certified bound, and residual;
//! - `verify`: certify an instance's declared curve parameter and
//!   smoothness constant by seeded sampling;
//! - `instance-dump`: parse, validate, and re-emit an instance spec.
//!
//! Every run is a pure function of the spec and seed, so repeated
//! invocations produce byte-identical output files.

pub mod bench;
pub mod cli;
pub mod instance;
pub mod probe;
pub mod rows;
pub mod run;
pub mod verify_cmd;
