use nevan_core::expr::parse_expression;
use nevan_core::growth::AdmissibilityVerdict;
use nevan_core::report::Verdict;
use nevan_core::settings::{geometric_radii, Settings};
use nevan_core::suite::{check_smt_constants, check_smt_moving, classify_admissible, Target};
use nevan_core::MeroExpr;

fn e(s: &str) -> MeroExpr {
    parse_expression(s).unwrap()
}

#[test]
fn three_targets_for_a_transcendental_function() {
    let radii = geometric_radii(2.0, 20.0, 8);
    let targets = [Target::real(0.0), Target::real(1.0), Target::Infinity];
    let sweep = check_smt_constants(&e("exp(z)"), &targets, &radii, &Settings::default()).unwrap();
    assert_eq!(sweep.rows.len(), radii.len());
    assert_ne!(sweep.verdict(), Verdict::Fail);
    for row in &sweep.rows {
        assert!((row.recompute_residual() - row.residual).abs() < 1e-9);
    }
}

#[test]
fn constant_targets_may_repeat_as_moving_targets() {
    let radii = geometric_radii(2.0, 12.0, 6);
    let targets: Vec<Target> = [0.0, 1.0, -1.0, 2.0, -2.0].iter().map(|&x| Target::real(x)).collect();
    let sweep = check_smt_moving(&e("exp(z)"), &targets, &radii, &Settings::default()).unwrap();
    assert_ne!(sweep.verdict(), Verdict::Fail);
}

#[test]
fn coincident_targets_are_rejected() {
    let radii = geometric_radii(2.0, 4.0, 3);
    let targets = [Target::real(1.0), Target::real(1.0), Target::Infinity];
    assert!(check_smt_constants(&e("exp(z)"), &targets, &radii, &Settings::default()).is_err());
}

#[test]
fn growth_separates_rational_from_transcendental() {
    let radii = geometric_radii(2.0, 50.0, 10);
    let s = Settings::default();
    let rational = classify_admissible(&e("(z^2+3)/(z-0.5)"), &radii, &s).unwrap();
    assert_eq!(rational.verdict, AdmissibilityVerdict::NotAdmissibleEvidence);
    let entire = classify_admissible(&e("exp(z)"), &radii, &s).unwrap();
    assert_eq!(entire.verdict, AdmissibilityVerdict::AdmissibleEvidence);
}

#[test]
fn admissibility_needs_enough_radii() {
    let radii = geometric_radii(2.0, 50.0, 4);
    assert!(classify_admissible(&e("exp(z)"), &radii, &Settings::default()).is_err());
}
