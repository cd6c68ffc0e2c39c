//! Structural verification suite: the seeded checks behind the library's
//! declared constants.
//!
//! Runs the full structural bundle (scaling invariance of the per-sample
//! feasible weight, the weight/modulus trade-off, and unimodal coordinate
//! sections) on a chain instance and on a strongly convex quadratic, the
//! tangent/chord characterization cross-check on both a function where the
//! two forms must hold and one where both must fail, the distance lower
//! bound implied by strong quasar-convexity, and a closed-form weight
//! estimate with a known answer.

use quasar_opt::instances::{DiagonalQuadratic, HardInstanceUnscaled, SpectrumShape};
use quasar_opt::oracle::FnObjective;
use quasar_opt::verify::{
    check_characterization_equivalence, check_structural_observations, distance_bound_violations,
    estimate_gamma, SamplePlan, SCALING_MISMATCH_TOL,
};

#[test]
fn structural_bundle_passes_on_chain_instance() {
    let chain = HardInstanceUnscaled::new(1000, 1e-6).unwrap();
    let objective = chain.objective();
    let x_star = vec![1.0; chain.chain_len()];
    let plan = SamplePlan::new(2_000, 640_001);
    let report =
        check_structural_observations(&objective, &x_star, chain.gamma(), 0.0, &plan).unwrap();
    assert!(
        report.passed(),
        "structural checks failed on the chain: mismatch {}, trade-off violations {:?}, \
         section violations {:?}",
        report.scaling_max_mismatch,
        report.tradeoff_violations,
        report.section_violations
    );
    assert!(
        report.samples_checked > 0,
        "structural report checked no samples"
    );
    assert!(
        report.scaling_max_mismatch <= SCALING_MISMATCH_TOL,
        "per-sample feasible weight is not scaling-invariant: mismatch {}",
        report.scaling_max_mismatch
    );
}

#[test]
fn structural_bundle_passes_on_strong_quadratic() {
    let center: Vec<f64> = (0..20).map(|i| 0.1 * (i as f64) - 1.0).collect();
    let quadratic =
        DiagonalQuadratic::from_spectrum(20, 0.05, 1.0, SpectrumShape::LogSpaced, center.clone())
            .unwrap();
    let plan = SamplePlan::new(2_000, 998_877);
    let report = check_structural_observations(&quadratic, &center, 1.0, 0.05, &plan).unwrap();
    assert!(
        report.passed(),
        "structural checks failed on the quadratic: mismatch {}, trade-off violations {:?}, \
         section violations {:?}",
        report.scaling_max_mismatch,
        report.tradeoff_violations,
        report.section_violations
    );
    assert_eq!(
        report.tradeoff_skipped, 0,
        "every sample satisfies the base inequality on a strongly convex quadratic"
    );
}

#[test]
fn characterizations_agree_where_they_must_hold() {
    let center: Vec<f64> = vec![0.25; 12];
    let quadratic =
        DiagonalQuadratic::from_spectrum(12, 0.2, 1.0, SpectrumShape::LinearSpaced, center.clone())
            .unwrap();
    let plan = SamplePlan::new(5_000, 31_337);
    let report =
        check_characterization_equivalence(&quadratic, &center, 1.0, 0.2, &plan).unwrap();
    assert!(
        report.both_hold(),
        "tangent/chord forms must both hold on a strongly convex quadratic: \
         tangent violations {}, chord violations {}",
        report.tangent_violations.len(),
        report.chord_violations.len()
    );
    assert!(report.consistent(), "the two forms must agree sample-wise");
    assert_eq!(report.samples_checked, 5_000);
}

#[test]
fn characterizations_agree_where_they_must_fail() {
    // A double well with two global minima: no positive weight can make the
    // tangent inequality hold at the local maximum between them, and the
    // chord through it overshoots the value cap. Both forms must notice.
    let double_well = FnObjective::new(1, |x: &[f64], grad: &mut [f64]| {
        let s = x[0] * x[0] - 1.0;
        grad[0] = 4.0 * x[0] * s;
        s * s
    });
    let x_star = vec![1.0];
    let plan = SamplePlan::new(5_000, 5_417);
    let report =
        check_characterization_equivalence(&double_well, &x_star, 0.9, 0.0, &plan).unwrap();
    assert!(
        !report.tangent_violations.is_empty(),
        "tangent form found no witnesses on the double well"
    );
    assert!(
        !report.chord_violations.is_empty(),
        "chord form found no witnesses on the double well"
    );
}

#[test]
fn distance_bound_holds_under_strong_curvature() {
    let center = vec![0.0; 10];
    let quadratic =
        DiagonalQuadratic::from_spectrum(10, 1.0, 2.0, SpectrumShape::LinearSpaced, center.clone())
            .unwrap();
    let plan = SamplePlan::new(10_000, 40_320);
    let violations = distance_bound_violations(&quadratic, &center, 1.0, 1.0, &plan).unwrap();
    assert!(
        violations.is_empty(),
        "distance lower bound violated on {} samples (worst shortfall {:?})",
        violations.len(),
        violations.first()
    );
}

#[test]
fn weight_estimate_recovers_known_answer() {
    // ½‖x‖² is (1, 1)-strongly quasar-convex about the origin, with the
    // per-sample feasible weight exactly 1 everywhere.
    let half_norm = FnObjective::new(6, |x: &[f64], grad: &mut [f64]| {
        grad.copy_from_slice(x);
        0.5 * x.iter().map(|v| v * v).sum::<f64>()
    });
    let x_star = vec![0.0; 6];
    let plan = SamplePlan::new(5_000, 271_828);
    let certificate = estimate_gamma(&half_norm, &x_star, 1.0, &plan).unwrap();
    assert!(
        certificate.is_clean(),
        "estimate found {} violations on ½‖x‖²",
        certificate.violation_count
    );
    assert!(
        (certificate.gamma_hat - 1.0).abs() <= 1e-9,
        "certified weight should be exactly 1, got {}",
        certificate.gamma_hat
    );
}
