//! Discrimination tests for the law validator: the reference law is clean,
//! each pathological fixture trips exactly the checks its construction
//! targets, reports are deterministic, and every fail witness reproduces its
//! violating inequality when re-evaluated pointwise.

use nsf_core::coeff::CoefficientFn;
use nsf_core::law::ThermoPoint;
use nsf_core::presets;
use nsf_core::scan::{ScanGrid, Spacing};
use nsf_core::validator::{self, CheckStatus, ValidatorConfig};

fn audit_config() -> ValidatorConfig {
    // Densities capped at 1: the discrimination fixtures are compared in the
    // moderate-density regime the solver actually runs in.
    ValidatorConfig {
        grid: ScanGrid::new(1e-3, 1e3, 1e-3, 1.0, 128, Spacing::Log).unwrap(),
        ..ValidatorConfig::default()
    }
}

#[test]
fn reference_law_passes_every_check() {
    let report = validator::validate(&presets::reference_law(), &audit_config()).unwrap();
    assert!(report.passes(), "failed: {:?}", report.failed_ids());
    assert!(report.nonmonotone_witness.is_none());
}

#[test]
fn reference_law_passes_on_default_grid_too() {
    let report =
        validator::validate(&presets::reference_law(), &ValidatorConfig::default()).unwrap();
    assert!(report.passes(), "failed: {:?}", report.failed_ids());
}

#[test]
fn constant_b2_fails_exactly_the_growth_limit_check() {
    let report = validator::validate(&presets::constant_b2_law(), &audit_config()).unwrap();
    assert_eq!(report.failed_ids(), vec!["growth-p6bis"]);
    // Concavity explicitly passes (constant coefficient).
    assert_eq!(
        report.find("concavity").unwrap().status,
        CheckStatus::Pass
    );
    let check = report.find("growth-p6bis").unwrap();
    assert!(check.fitted_c.unwrap() > validator::FIT_PASS_THRESHOLD);
}

#[test]
fn nonconcave_b2_fails_concavity_with_witness_in_range() {
    // B_2 = -theta/(1 + theta^2): theta^2 B_2' increases toward its limit.
    // The same coefficient genuinely breaks entropy concavity at moderate
    // density (independently confirmed against a high-precision Hessian
    // oracle), so that check fails alongside.
    let law = presets::nonconcave_b2_law();
    let report = validator::validate(&law, &audit_config()).unwrap();
    assert_eq!(report.failed_ids(), vec!["concavity", "entropy-concavity"]);
    let check = report.find("concavity").unwrap();
    let (_, theta) = check.worst_point.unwrap();
    assert!((1.5..=3.0).contains(&theta), "witness at theta = {theta}");
    // Witness soundness: the pointwise derivative of theta^2 B_2' is
    // positive there.
    assert!(law.theta2_bprime_dtheta(2, theta) > 0.0);
}

#[test]
fn demo_law_nonmonotone_witness_is_sound() {
    let law = presets::nonmonotone_demo_law();
    let grid = ScanGrid::default();
    let witness = validator::detect_nonmonotone(&law, &grid).unwrap();
    let slope = law.pressure_drho(ThermoPoint::new(witness.0, witness.1));
    assert!(slope < -0.01, "witness slope {slope}");
    assert!(validator::detect_nonmonotone(&presets::reference_law(), &grid).is_none());
}

#[test]
fn radiative_bounds_examples() {
    let grid = ScanGrid::default();
    // B_0 = theta^3 cannot satisfy the lower bound at small theta.
    let mut law = presets::reference_law();
    law.b[0] = CoefficientFn::power(1.0, 3.0);
    let checks = validator::check_radiative(&law, &grid);
    let b = checks.iter().find(|c| c.id == "radiative-bounds").unwrap();
    assert_eq!(b.status, CheckStatus::Fail);
    let (_, theta) = b.worst_point.unwrap();
    // Witness soundness: the two-sided bound with the radiative threshold
    // constant really is violated at the witness temperature.
    let value = law.b[0].eval(theta, 0).unwrap();
    let reference = theta.powf(law.gamma_theta - 1.0);
    let needed = (value / reference).max(reference / value);
    assert!(needed > validator::RADIATIVE_PASS_THRESHOLD);
}

#[test]
fn cv_goes_negative_at_large_density_for_strong_p5_violation() {
    // On the wide default grid the concavity-violating coefficient drives
    // C_v = 2 theta / rho - d/dtheta(theta^2 B_2') rho below zero at large
    // density, and the witness sits there.
    let law = presets::nonconcave_b2_law();
    let report = validator::validate(&law, &ValidatorConfig::default()).unwrap();
    let cv = report.find("cv-nonneg").unwrap();
    assert_eq!(cv.status, CheckStatus::Fail);
    let (rho, theta) = cv.worst_point.unwrap();
    assert!(rho > 10.0, "witness density {rho}");
    // Witness soundness.
    assert!(law.specific_heat(ThermoPoint::new(rho, theta)) < 0.0);
}

#[test]
fn phi_gap_vanishes_without_coefficients() {
    // All B_n = 0: the gap is identically zero (up to the round-off of
    // evaluating phi' rho - phi and rho^gamma separately).
    let mut law = presets::reference_law();
    law.b[0] = CoefficientFn::zero();
    let check = validator::check_phi_gap(&law, &ScanGrid::default());
    assert_eq!(check.status, CheckStatus::Pass);
    assert!(check.fitted_c.unwrap() < 1e-10, "C = {:?}", check.fitted_c);
}

#[test]
fn growth_check_vacuous_for_disabled_coefficients() {
    // All B_n = 0 for n >= 1: nothing to bound beyond B_0.
    let report = validator::validate(&presets::reference_law(), &audit_config()).unwrap();
    let p6bis = report.find("growth-p6bis").unwrap();
    assert_eq!(p6bis.status, CheckStatus::Pass);
    assert_eq!(p6bis.fitted_c, Some(0.0));
}

#[test]
fn reports_are_deterministic() {
    let cfg = audit_config();
    let law = presets::nonmonotone_demo_law();
    let a = validator::validate(&law, &cfg).unwrap();
    let b = validator::validate(&law, &cfg).unwrap();
    assert_eq!(a.nonmonotone_witness, b.nonmonotone_witness);
    assert_eq!(a.checks.len(), b.checks.len());
    for (ca, cb) in a.checks.iter().zip(&b.checks) {
        assert_eq!(ca.id, cb.id);
        assert_eq!(ca.status, cb.status);
        assert_eq!(ca.worst_point, cb.worst_point);
        assert!(ca.margin == cb.margin || (ca.margin.is_nan() && cb.margin.is_nan()));
        assert_eq!(ca.fitted_c, cb.fitted_c);
    }
}

#[test]
fn check_ids_appear_exactly_once() {
    let report = validator::validate(&presets::reference_law(), &audit_config()).unwrap();
    let mut ids: Vec<&str> = report.checks.iter().map(|c| c.id).collect();
    let before = ids.len();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(before, ids.len());
}

#[test]
fn every_fail_carries_a_witness() {
    for law in [
        presets::nonmonotone_demo_law(),
        presets::constant_b2_law(),
        presets::nonconcave_b2_law(),
    ] {
        let report = validator::validate(&law, &audit_config()).unwrap();
        for c in &report.checks {
            if c.status == CheckStatus::Fail {
                assert!(c.worst_point.is_some(), "{} fail without witness", c.id);
            }
        }
    }
}
