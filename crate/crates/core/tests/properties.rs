use std::f64::consts::PI;

use proptest::prelude::*;

use besselsum::engine::Evaluator;
use besselsum::report::{Inputs, Report, ResultRecord};
use besselsum::special::{gamma, zeta};
use besselsum::sum_k::excluded_distance;
use besselsum::{EvalOptions, MethodChoice, MethodId, SumKind, SumParams};

fn ev() -> Evaluator {
    Evaluator::new(EvalOptions::with_tol(1e-12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn report_round_trip(value in any::<f64>(), err in 0.0f64..1e300, a in 0.0f64..10.0, nu in -0.49f64..5.0) {
        let mut r = Report::new(Inputs {
            command: "eval".into(), kind: SumKind::K, alternating: true,
            a: vec![a], b: vec![1.0], nu, method: "auto".into(), tol: 1e-10, max_terms: 5,
        });
        r.results.push(ResultRecord {
            a, b: 1.0, value, est_error: err, terms: 1, method: "direct".into(), flags: vec![], error: None,
        });
        let back = Report::from_json(&r.to_json()).unwrap();
        let v = back.results[0].value;
        let same = if value.is_finite() { v.to_bits() == value.to_bits() } else { v.is_nan() };
        prop_assert!(same);
        prop_assert_eq!(back.results[0].est_error.to_bits(), err.to_bits());
        prop_assert_eq!(back.inputs.nu.to_bits(), nu.to_bits());
    }

    #[test]
    fn j_rearrangement(a in 0.001f64..0.3, b in 0.5f64..3.0, nu in -0.45f64..2.0) {
        let e = ev();
        let t1 = e.evaluate_method(SumKind::J, a, b, nu, MethodId::Theorem1).unwrap();
        let t2 = e.evaluate_method(SumKind::J, a, b, nu, MethodId::Theorem2).unwrap();
        prop_assert!((t1.value - t2.value).abs() <= 1e-10 * (1.0 + t1.value.abs()));
    }

    #[test]
    fn j_theorem_matches_direct(a in 0.05f64..1.0, b in 1.0f64..3.0, nu in -0.45f64..2.0) {
        let e = ev();
        let t = e.evaluate_method(SumKind::J, a, b, nu, MethodId::Theorem1).unwrap();
        let d = e.evaluate_method(SumKind::J, a, b, nu, MethodId::Direct).unwrap();
        prop_assert!((t.value - d.value).abs() <= 1e-9 * (1.0 + d.value.abs()));
    }

    #[test]
    fn k_theorem_matches_direct(a in 0.0f64..1.0, b in 1.0f64..3.0, nu in 0.0f64..2.0) {
        prop_assume!(excluded_distance(nu) > 0.01);
        let e = ev();
        let t = e.evaluate_method(SumKind::K, a, b, nu, MethodId::Theorem3).unwrap();
        let d = e.evaluate_method(SumKind::K, a, b, nu, MethodId::Direct).unwrap();
        prop_assert!((t.value - d.value).abs() <= 1e-8 * (1.0 + d.value.abs()), "{} vs {}", t.value, d.value);
    }

    #[test]
    fn auto_is_deterministic_and_honest(kind in prop_oneof![Just(SumKind::J), Just(SumKind::K)],
                                        a in 0.001f64..4.0, b in 0.1f64..6.0, nu in 0.0f64..2.5) {
        let e = Evaluator::new(EvalOptions::with_tol(1e-10));
        let p = SumParams::new(kind, a, b, nu);
        let r1 = e.evaluate(&p, MethodChoice::Auto).unwrap();
        let r2 = e.evaluate(&p, MethodChoice::Auto).unwrap();
        prop_assert_eq!(&r1, &r2);
        prop_assert!(r1.est_error >= 0.0 && r1.terms_used >= 1);
        prop_assert!(r1.est_error <= 1e-10, "{:?}", r1);
        prop_assert!(r1.method.applies_to(kind));
    }

    #[test]
    fn alternating_identity(kind in prop_oneof![Just(SumKind::J), Just(SumKind::K)],
                            a in 0.05f64..2.0, b in 0.2f64..4.0, nu in 0.0f64..1.5) {
        let e = ev();
        let alt = e.evaluate(&SumParams::new(kind, a, b, nu).alternating(true), MethodChoice::Direct).unwrap();
        let s1 = e.evaluate(&SumParams::new(kind, a, b, nu), MethodChoice::Auto).unwrap();
        let s2 = e.evaluate(&SumParams::new(kind, 2.0 * a, 2.0 * b, nu), MethodChoice::Auto).unwrap();
        prop_assert!((alt.value + 2.0 * s2.value - s1.value).abs() <= 1e-10 * (1.0 + s1.value.abs()));
    }

    #[test]
    fn gamma_reflection(x in 0.001f64..0.999) {
        let v = gamma(x).unwrap() * gamma(1.0 - x).unwrap() * (PI * x).sin() / PI;
        prop_assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_functional_equation(s in -6.0f64..0.9) {
        prop_assume!((s - s.round()).abs() > 1e-3);
        let rhs = 2f64.powf(s) * PI.powf(s - 1.0) * zeta(1.0 - s).unwrap() * gamma(1.0 - s).unwrap() * (PI * s / 2.0).sin();
        prop_assert!((zeta(s).unwrap() - rhs).abs() <= 1e-11 * rhs.abs().max(1e-300));
    }
}
