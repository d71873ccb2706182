use nevan_core::expr::{is_identically_equal, parse_expression};
use nevan_core::report::Verdict;
use nevan_core::scalar::c64;
use nevan_core::settings::{geometric_radii, Settings};
use nevan_core::transforms::{
    build_determinant_f, build_l31, build_l32, check_l31_bounds, check_l32_bounds, classify_degenerate_case,
    multiple_zero_transfer, row_identity_error, DegenerateCase,
};
use nevan_core::MeroExpr;

fn e(s: &str) -> MeroExpr {
    parse_expression(s).unwrap()
}

#[test]
fn mobius_transform_of_three_targets() {
    let t = build_l31(&e("exp(z)"), &e("1"), &e("-1"), &e("2")).unwrap();
    let expected = e("(exp(z)-1)/(exp(z)+1)");
    assert!(is_identically_equal(&t.f2, &expected));
    let z = c64(0.3, -0.7);
    let w = z.exp();
    assert!((t.f2.eval(z).unwrap() - (w - 1.0) / (w + 1.0)).norm() < 1e-12);
}

#[test]
fn cross_ratio_transform_sends_third_target_to_one() {
    let t = build_l32(&e("z^2"), &e("0"), &e("1"), &e("3"), &e("-2")).unwrap();
    // f₁ = a₃ where z² = 3
    let z = c64(3f64.sqrt(), 0.0);
    assert!((t.f2.eval(z).unwrap() - c64(1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn transform_bounds_hold_for_exponential() {
    let radii = geometric_radii(2.0, 10.0, 6);
    let s = Settings::default();
    let t = build_l31(&e("exp(z)"), &e("0"), &e("1"), &e("-1")).unwrap();
    let sweeps = check_l31_bounds(&t, &radii, &s).unwrap();
    assert!(!sweeps.is_empty());
    assert!(sweeps.iter().all(|w| w.verdict() != Verdict::Fail));
    let t = build_l32(&e("exp(z)"), &e("0"), &e("1"), &e("-1"), &e("2")).unwrap();
    let sweeps = check_l32_bounds(&t, &radii, &s).unwrap();
    assert!(sweeps.iter().all(|w| w.verdict() != Verdict::Fail));
}

#[test]
fn coincident_targets_are_degenerate() {
    assert!(build_l31(&e("exp(z)"), &e("z"), &e("z"), &e("1")).is_err());
    assert!(build_l31(&e("z+1"), &e("0"), &e("z+1"), &e("1")).is_err());
}

#[test]
fn determinant_row_identity() {
    for (f, b1, b2) in [("exp(z)", "z", "z^2+1"), ("z^3/(z-2)", "1/z", "z-4"), ("exp(2*z)+z", "exp(z)", "3")] {
        let d = build_determinant_f(&e(f), &e(b1), &e(b2));
        assert!(!d.is_degenerate, "{f}");
        assert!(row_identity_error(&d) < 1e-6, "{f}");
        assert_eq!(classify_degenerate_case(&d), DegenerateCase::NotDegenerate);
    }
}

#[test]
fn repeated_rows_make_the_determinant_vanish() {
    let d = build_determinant_f(&e("exp(z)"), &e("z^2"), &e("z^2"));
    assert!(d.is_degenerate);
    assert_eq!(classify_degenerate_case(&d), DegenerateCase::Sub1);
}

#[test]
fn multiple_zeros_transfer_to_the_determinant() {
    let f = e("(z-2)^3+z").to_rational().unwrap();
    let b1 = e("z").to_rational().unwrap();
    let b2 = e("1/z").to_rational().unwrap();
    let rows = multiple_zero_transfer(&f, &b1, &b2, 10.0).unwrap();
    let triple = rows.iter().find(|r| r.target == 1 && (r.location - c64(2.0, 0.0)).norm() < 1e-6).unwrap();
    assert_eq!(triple.multiplicity, 3);
    assert!(triple.det_multiplicity >= 2);
    assert!(rows.iter().all(|r| r.satisfied));
}
