//! Sampling-based certification of declared analytic constants.
//!
//! Solvers trust the constants a [`crate::problem::Problem`] declares. This
//! module provides the independent desk checks: a seeded-sampling estimate of
//! the quasar-convexity weight with violation witnesses, an empirical
//! smoothness constant, cross-checks between the chord and tangent forms of
//! the defining inequality, structural invariance checks (scaling, the
//! weight/modulus trade-off, unimodal sections), and zero-chain oracle
//! instrumentation that records per-call nonzero-prefix growth.
//!
//! Every check is deterministic: sampling uses a seeded counter-based
//! generator, so certificates are exactly reproducible from their recorded
//! seed.

mod gamma;
mod prefix;
mod sample;
mod smoothness;
mod structural;

pub use gamma::{
    check_characterization_equivalence, distance_bound_violations, estimate_gamma,
    estimate_gamma_at, transition_patterns, EquivalenceReport, GammaWitness, QuasarCertificate,
};
pub use prefix::{
    exact_nonzero_prefix, nonzero_prefix, run_with_prefix_instrumentation, PrefixRecord,
    PrefixRecordingObjective, PrefixTrace, PREFIX_ZERO_TOL,
};
pub use sample::SamplePlan;
pub use smoothness::{smoothness_estimate, SmoothnessReport};
pub use structural::{
    check_scaling_invariance, check_structural_observations, curvature_tradeoff_violations,
    unimodal_section_violations, SectionViolation, StructuralReport, SCALING_MISMATCH_TOL,
};
