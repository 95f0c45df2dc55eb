mod common;

use causal_diffusion::upsilon::{SeriesCoefficients, UpsilonEvaluator, ZeroKind};
use common::series_oracle;
use proptest::prelude::*;
use std::f64::consts::PI;

fn ev(n: u32) -> UpsilonEvaluator {
    UpsilonEvaluator::new(n).unwrap()
}

fn scan(a: f64, b: f64, step: f64) -> impl Iterator<Item = f64> {
    let count = ((b - a) / step).round() as usize;
    (0..=count).map(move |i| a + i as f64 * step)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_forms_match_series(n in 1u32..=3, t in 0.0f64..50.0) {
        let got = ev(n).eval(t).unwrap();
        prop_assert!((got - series_oracle(n, t)).abs() < 1e-10, "N={} t={} got {}", n, t, got);
    }

    #[test]
    fn recurrence_matches_eval(n in 3u32..=8, t in 0.1f64..30.0) {
        let e = ev(n);
        let diff = (e.eval(t).unwrap() - e.eval_by_recurrence(t).unwrap()).abs();
        prop_assert!(diff < 1e-9, "N={} t={} diff {}", n, t, diff);
    }

    #[test]
    fn ode_is_satisfied(n in 1u32..=8, t in 0.1f64..30.0) {
        let r = ev(n).ode_residual(t).unwrap();
        prop_assert!(r.abs() < 1e-8, "N={} t={} residual {}", n, t, r);
    }

    #[test]
    fn eval_matches_high_precision_series(n in 4u32..=8, t in 0.0f64..30.0) {
        let got = ev(n).eval(t).unwrap();
        prop_assert!((got - series_oracle(n, t)).abs() < 1e-10, "N={} t={} got {}", n, t, got);
    }
}

#[test]
fn coefficients_follow_the_product_formula() {
    for n in 1..=8u32 {
        let a = SeriesCoefficients::new(n, 30);
        let a = a.as_slice();
        assert_eq!(a[0], 1.0);
        for j in 1..a.len() {
            let two_j = 2.0 * j as f64;
            let expected = a[j - 1] * (two_j - 1.0) / (two_j * (two_j - 1.0) * (n as f64 + two_j - 2.0));
            assert!((a[j] - expected).abs() <= 1e-15 * expected);
            assert!(a[j] > 0.0);
        }
    }
    let mut factorial = 1.0;
    for (j, &a) in SeriesCoefficients::new(3, 15).as_slice().iter().enumerate() {
        if j > 0 {
            factorial *= (2 * j) as f64 * (2 * j + 1) as f64;
        }
        assert!((a * factorial - 1.0).abs() < 1e-14);
    }
}

#[test]
fn normalisation_is_exact() {
    for n in 1..=8 {
        assert_eq!(ev(n).eval(0.0).unwrap(), 1.0);
        assert_eq!(ev(n).eval_derivative(0.0).unwrap(), 0.0);
    }
}

#[test]
fn bounded_by_one() {
    for n in 1..=8 {
        let e = ev(n);
        for t in scan(0.0, 100.0, 0.01) {
            assert!(e.eval(t).unwrap().abs() <= 1.0 + 1e-15, "N={n} t={t}");
        }
    }
}

#[test]
fn zeros_are_simple() {
    for n in 1..=8 {
        let e = ev(n);
        let roots = e.zeros_in(0.0, 60.0, ZeroKind::Function).unwrap();
        assert!(roots.len() >= 15, "N={n}: {} roots", roots.len());
        assert!(roots.windows(2).all(|w| w[0] < w[1]));
        for r in roots {
            assert!(e.eval(r).unwrap().abs() < 1e-10);
            assert!(e.eval_derivative(r).unwrap().abs() > 1e-8, "N={n} root {r}");
        }
    }
}

#[test]
fn derivative_zeros_interlace_function_zeros() {
    for n in 1..=6 {
        let e = ev(n);
        let f = e.zeros_in(0.5, 40.0, ZeroKind::Function).unwrap();
        let d = e.zeros_in(0.5, 40.0, ZeroKind::Derivative).unwrap();
        for w in f.windows(2) {
            assert_eq!(d.iter().filter(|&&x| x > w[0] && x < w[1]).count(), 1, "N={n}");
        }
    }
}

#[test]
fn examples_from_closed_forms() {
    assert!((ev(1).eval(PI).unwrap() + 1.0).abs() < 1e-15);
    assert!(ev(3).eval(PI).unwrap().abs() < 1e-15);
    assert!((ev(5).eval(PI).unwrap() - 3.0 / (PI * PI)).abs() < 1e-12);
    assert!((ev(5).eval(PI).unwrap() - series_oracle(5, PI)).abs() < 1e-14);
    assert!((ev(1).eval_derivative(PI / 2.0).unwrap() + 1.0).abs() < 1e-15);
    let h = 1e-6;
    let fd = (ev(3).eval(PI + h).unwrap() - ev(3).eval(PI - h).unwrap()) / (2.0 * h);
    assert!((ev(3).eval_derivative(PI).unwrap() - fd).abs() < 1e-8);
    assert!((ev(3).eval_derivative(PI).unwrap() + 1.0 / PI).abs() < 1e-14);
    assert!((ev(4).eval_by_recurrence(2.0).unwrap() - series_oracle(4, 2.0)).abs() < 1e-13);
    assert!((ev(5).eval_by_recurrence(2.0).unwrap() - series_oracle(5, 2.0)).abs() < 1e-13);
}

#[test]
fn second_derivative_matches_finite_differences() {
    let h = 1e-4;
    for n in 1..=8 {
        let e = ev(n);
        for t in [0.3, 2.0, 7.5, 21.0] {
            let fd = (e.eval_derivative(t + h).unwrap() - e.eval_derivative(t - h).unwrap()) / (2.0 * h);
            assert!((e.eval_second_derivative(t).unwrap() - fd).abs() < 1e-7, "N={n} t={t}");
        }
    }
}

#[test]
fn envelope_dominates_on_scan_range() {
    for n in 1..=8 {
        let e = ev(n);
        for t in scan(1.0, 200.0, 0.05) {
            assert!(e.eval(t).unwrap().abs() <= e.envelope_bound(t).unwrap() * (1.0 + 1e-12), "N={n} t={t}");
        }
    }
    assert_eq!(ev(1).envelope_constant().unwrap(), 1.0);
    let c2 = ev(2).envelope_bound(100.0).unwrap();
    assert!((c2 / ((2.0 / PI).sqrt() / 10.0) - 1.0).abs() < 0.05, "{c2}");
}

#[test]
fn non_finite_arguments_are_rejected() {
    for n in [1, 2, 3, 6] {
        assert!(ev(n).eval(f64::NAN).is_err());
        assert!(ev(n).eval(f64::INFINITY).is_err());
        assert!(ev(n).eval(-1.0).is_err());
    }
}
