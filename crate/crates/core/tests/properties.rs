use proptest::prelude::*;

use nevan_core::divisor::{Divisor, TruncationLevel};
use nevan_core::expr::{is_identically_equal, parse_expression};
use nevan_core::functionals::counting;
use nevan_core::scalar::c64;
use nevan_core::settings::Settings;
use nevan_core::sharing::{shares_set, FiniteSet};
use nevan_core::{ComplexScalar, MeroExpr};

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("z".to_string()),
        (1i32..6).prop_map(|n| n.to_string()),
        (1i32..4).prop_map(|n| format!("z^{n}")),
        (-2i32..3).prop_map(|n| format!("exp({n}*z)")),
        Just("exp(1/z)".to_string()),
    ]
}

fn expression() -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        (inner.clone(), inner, 0usize..4).prop_map(|(a, b, op)| match op {
            0 => format!("({a})+({b})"),
            1 => format!("({a})-({b})"),
            2 => format!("({a})*({b})"),
            _ => format!("({a})/({b}+7)"),
        })
    })
}

fn rational_text() -> impl Strategy<Value = String> {
    (prop::collection::vec(-3i32..4, 1..4), prop::collection::vec(-3i32..4, 0..3)).prop_map(|(num, den)| {
        let factors = |v: &[i32]| v.iter().map(|a| format!("(z-{a}.5)")).collect::<Vec<_>>().join("*");
        if den.is_empty() {
            factors(&num)
        } else {
            format!("{}/({})", factors(&num), factors(&den))
        }
    })
}

fn point() -> impl Strategy<Value = ComplexScalar> {
    (1.2f64..3.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| ComplexScalar::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_matches_finite_difference(text in expression(), z in point()) {
        let Ok(e) = parse_expression(&text) else { return Ok(()) };
        let h = 1e-5 * (1.0 + z.norm());
        let (Ok(a), Ok(b), Ok(d)) = (e.eval(z + h), e.eval(z - h), e.differentiate().eval(z)) else { return Ok(()) };
        let fd = (a - b) / (2.0 * h);
        let scale = 1.0 + d.norm() + a.norm().max(b.norm()) / h * 1e-9;
        prop_assert!((fd - d).norm() / scale < 1e-4, "{text} at {z}: {fd} vs {d}");
    }

    #[test]
    fn print_parse_round_trip(text in expression()) {
        let Ok(e) = parse_expression(&text) else { return Ok(()) };
        let again = parse_expression(&e.to_string()).unwrap();
        prop_assert_eq!(e.to_string(), again.to_string());
        prop_assert!(is_identically_equal(&e, &again));
    }

    #[test]
    fn rational_simplification_is_idempotent(text in rational_text()) {
        let e = parse_expression(&text).unwrap();
        let once = e.simplify_rational().unwrap();
        let twice = once.simplify_rational().unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(is_identically_equal(&e, &once));
    }

    #[test]
    fn counting_is_monotone_and_ordered_by_truncation(
        points in prop::collection::vec((0.12f64..9.0, 0.0f64..std::f64::consts::TAU, 1i64..5), 0..8),
        r1 in 1.01f64..9.5,
        r2 in 1.01f64..9.5,
    ) {
        let d = Divisor::from_points(10.0, points.iter().map(|&(m, t, k)| (ComplexScalar::from_polar(m, t), k)));
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        let n = |r, l| counting(&d, r, l).unwrap().value;
        prop_assert!(n(lo, TruncationLevel::Infinite) <= n(hi, TruncationLevel::Infinite) + 1e-12);
        prop_assert!(n(hi, TruncationLevel::Finite(1)) <= n(hi, TruncationLevel::Finite(2)) + 1e-12);
        prop_assert!(n(hi, TruncationLevel::Finite(2)) <= n(hi, TruncationLevel::Infinite) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sharing_is_symmetric(f in rational_text(), g in rational_text(), a in -2i32..3, l in 1u32..4) {
        let (f, g) = (parse_expression(&f).unwrap(), parse_expression(&g).unwrap());
        let set = FiniteSet::new(vec![c64(a as f64 + 0.25, 0.0), c64(0.0, 1.0)]).unwrap();
        let level = TruncationLevel::Finite(l);
        let s = Settings::default();
        let fg = shares_set(&f, &g, &set, level, 10.0, &s).unwrap();
        let gf = shares_set(&g, &f, &set, level, 10.0, &s).unwrap();
        prop_assert_eq!(fg.shares, gf.shares);
        prop_assert!(shares_set(&f, &f, &set, level, 10.0, &s).unwrap().shares);
    }
}

#[test]
fn permuted_set_is_shared() {
    let s = FiniteSet::from_reals(&[1.0, -1.0, 0.0]).unwrap();
    let g = parse_expression("z^2+1/z").unwrap();
    let f = MeroExpr::real(0.0).sub(&g);
    let i = shares_set(&f, &g, &s, TruncationLevel::Infinite, 10.0, &Settings::default()).unwrap();
    assert!(i.shares);
}
