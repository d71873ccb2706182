use nevan_core::divisor::{Divisor, TruncationLevel};
use nevan_core::expr::parse_expression;
use nevan_core::functionals::{characteristic, counting, jensen_residual, proximity};
use nevan_core::sample::{random_rational, rng};
use nevan_core::scalar::c64;
use nevan_core::settings::Settings;
use nevan_core::MeroExpr;

fn e(s: &str) -> MeroExpr {
    parse_expression(s).unwrap()
}

/// Counting function by trapezoidal integration of `n(t)/t` over `log t`.
fn counting_by_integration(points: &[(f64, i64)], r: f64, level: TruncationLevel) -> f64 {
    let steps = 200_000;
    let inner = |t: f64| points.iter().filter(|&&(a, _)| t < a && a <= 1.0).map(|&(_, m)| level.apply(m)).sum::<i64>();
    let outer = |t: f64| points.iter().filter(|&&(a, _)| 1.0 < a && a <= t).map(|&(_, m)| level.apply(m)).sum::<i64>();
    let h = r.ln() / steps as f64;
    let mut total = 0.0;
    for i in 0..steps {
        let s = (i as f64 + 0.5) * h;
        total += (inner((-s).exp()) + outer(s.exp())) as f64 * h;
    }
    total
}

#[test]
fn counting_matches_its_integral_definition() {
    let pts = [(0.3, 2), (0.8, 1), (1.5, 3), (4.0, 1), (9.0, 2)];
    let d = Divisor::from_points(10.0, pts.iter().enumerate().map(|(i, &(a, m))| (c64(a, 0.0) * c64(0.0, i as f64).exp(), m)));
    for r in [1.2, 2.0, 5.0, 9.5] {
        for level in [TruncationLevel::Finite(1), TruncationLevel::Finite(2), TruncationLevel::Infinite] {
            let closed = counting(&d, r, level).unwrap().value;
            let direct = counting_by_integration(&pts, r, level);
            assert!((closed - direct).abs() < 1e-4, "r={r} {level:?}: {closed} vs {direct}");
        }
    }
}

#[test]
fn counting_rejects_radii_outside_the_divisor() {
    let d = Divisor::new(5.0);
    assert!(counting(&d, 6.0, TruncationLevel::Infinite).is_err());
    assert!(counting(&d, 1.0, TruncationLevel::Infinite).is_err());
}

#[test]
fn monomial_characteristic_is_degree_times_log() {
    let s = Settings::default();
    for r in [1.5, 3.0, 7.0] {
        let t = characteristic(&e("z^3"), r, &s).unwrap().total.value;
        assert!((t - 3.0 * f64::ln(r)).abs() < 1e-8, "r={r}: {t}");
        let t = characteristic(&e("1/z^2"), r, &s).unwrap().total.value;
        assert!((t - 2.0 * f64::ln(r)).abs() < 1e-8, "r={r}: {t}");
    }
}

#[test]
fn inversion_of_the_variable_preserves_the_characteristic() {
    let s = Settings::default();
    for r in [2.0, 4.0] {
        let a = characteristic(&e("exp(z)*(z-3)"), r, &s).unwrap().total.value;
        let b = characteristic(&e("exp(1/z)*(1/z-3)"), r, &s).unwrap().total.value;
        assert!((a - b).abs() < 1e-6, "r={r}: {a} vs {b}");
    }
}

#[test]
fn characteristic_splits_into_proximity_and_poles() {
    let s = Settings::default();
    let f = e("(z^2+1)/((z-0.5)*(z-3))");
    for r in [2.0, 5.0] {
        let c = characteristic(&f, r, &s).unwrap();
        assert!((c.total.value - c.proximity.value - c.pole_count.value).abs() < 1e-12);
        let m = proximity(&f, r, &s).unwrap().value;
        assert!((m - c.proximity.value).abs() < 1e-8);
        let drift = c.cartan_drift.unwrap();
        assert!(drift.is_finite());
    }
}

#[test]
fn first_main_theorem_keeps_the_difference_bounded() {
    let s = Settings::default();
    let f = e("exp(z)");
    let g = e("1/(exp(z)-2)");
    let gaps: Vec<f64> = [2.0, 4.0, 8.0]
        .iter()
        .map(|&r| characteristic(&f, r, &s).unwrap().total.value - characteristic(&g, r, &s).unwrap().total.value)
        .collect();
    for gap in &gaps {
        assert!(gap.abs() < 4.0 * 2f64.ln() + 1e-6, "{gaps:?}");
    }
}

#[test]
fn jensen_holds_on_seeded_rationals() {
    let s = Settings::default();
    let mut r = rng(77);
    for _ in 0..20 {
        let f = random_rational(&mut r, 6).function;
        for radius in [1.5, 3.0, 6.0] {
            let j = jensen_residual(&f, radius, &s).unwrap();
            assert!(j.residual < 1e-7, "{j:?}");
        }
    }
}
