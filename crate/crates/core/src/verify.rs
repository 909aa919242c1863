//! Self-verification suites run by `besselsum verify`.

use std::f64::consts::PI;

use crate::engine::Evaluator;
use crate::error::Error;
use crate::params::{EvalOptions, MethodChoice, MethodId, SumKind, SumParams};
use crate::report::CheckRecord;
use crate::special::{gamma, rgamma, zeta, zeta_neg_int};
use crate::sum_k::nu0_bracket;

/// Which set of checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Quick,
    Full,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Suite::Quick),
            "full" => Ok(Suite::Full),
            other => Err(format!("unknown suite '{other}' (expected quick or full)")),
        }
    }
}

fn arctan_closed(a: f64, b: f64) -> f64 {
    2.0 / (PI.sqrt() * b) * (b.sin() / (a.exp() - b.cos())).atan()
}

fn arctan_closed_alt(a: f64, b: f64) -> f64 {
    2.0 / (PI.sqrt() * b) * (b.sin() / (a.exp() + b.cos())).atan()
}

fn log_closed(a: f64, b: f64) -> f64 {
    -(PI.sqrt() / b) * (-(-(a + b)).exp()).ln_1p()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

/// Tracks the worst relative error across a check.
struct Tally {
    name: &'static str,
    bound: f64,
    worst: f64,
    count: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str, bound: f64) -> Self {
        Tally {
            name,
            bound,
            worst: 0.0,
            count: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, label: impl FnOnce() -> String, err: f64) {
        self.count += 1;
        if err > self.worst || err.is_nan() {
            self.worst = if err.is_nan() { f64::INFINITY } else { err };
        }
        if !(err <= self.bound) && self.failures.len() < 3 {
            self.failures.push(format!("{} (err {err:.2e})", label()));
        }
    }

    fn fail(&mut self, msg: String) {
        self.count += 1;
        self.worst = f64::INFINITY;
        if self.failures.len() < 3 {
            self.failures.push(msg);
        }
    }

    fn finish(self) -> CheckRecord {
        let passed = self.failures.is_empty() && self.count > 0;
        let mut detail = format!(
            "{} comparisons, worst {:.2e} (bound {:.0e})",
            self.count, self.worst, self.bound
        );
        if !passed {
            detail.push_str("; ");
            detail.push_str(&self.failures.join("; "));
        }
        CheckRecord {
            name: self.name.to_owned(),
            passed,
            detail,
        }
    }
}

/// Every method that accepts the point, with its value; region-type refusals are skipped.
fn admissible(ev: &Evaluator, kind: SumKind, a: f64, b: f64, nu: f64, t: &mut Tally, oracle: f64) {
    for m in MethodId::ALL.into_iter().filter(|m| m.applies_to(kind)) {
        match ev.evaluate_method(kind, a, b, nu, m) {
            Ok(r) => t.record(|| format!("{m} at a={a}, b={b}"), rel(r.value, oracle)),
            Err(Error::Region { .. } | Error::Conditioning { .. } | Error::Routing(_)) => {}
            Err(e) => t.fail(format!("{m} at a={a}, b={b}: {e}")),
        }
    }
}

fn grid(suite: Suite) -> (Vec<f64>, Vec<f64>) {
    match suite {
        Suite::Quick => (vec![0.01, 0.5], vec![1.0, 3.0]),
        Suite::Full => (vec![0.001, 0.01, 0.1, 0.5, 1.0], vec![0.5, 1.0, 2.0, 3.0]),
    }
}

fn check_j_half(ev: &Evaluator, suite: Suite) -> CheckRecord {
    let mut t = Tally::new("j-half-order-closed-form", 1e-10);
    let (aa, bb) = grid(suite);
    for &a in &aa {
        for &b in &bb {
            admissible(ev, SumKind::J, a, b, 0.5, &mut t, arctan_closed(a, b));
        }
    }
    t.finish()
}

fn check_k_half(ev: &Evaluator, suite: Suite) -> CheckRecord {
    let mut t = Tally::new("k-half-order-closed-form", 1e-10);
    let (aa, bb) = grid(suite);
    for &a in &aa {
        for &b in &bb {
            admissible(ev, SumKind::K, a, b, 0.5, &mut t, log_closed(a, b));
        }
    }
    t.finish()
}

fn check_a0(ev: &Evaluator, suite: Suite) -> CheckRecord {
    let mut t = Tally::new("j-zero-damping-reduction", 1e-13);
    let nus: &[f64] = match suite {
        Suite::Quick => &[0.25, 1.3],
        Suite::Full => &[-0.25, 0.25, 0.75, 1.3],
    };
    for &nu in nus {
        for b in [0.5, 1.0, 3.0] {
            let expect = PI.sqrt() * rgamma(nu + 0.5) / b - 0.5 * rgamma(1.0 + nu);
            match ev.evaluate_method(SumKind::J, 0.0, b, nu, MethodId::Theorem1) {
                Ok(r) => t.record(|| format!("nu={nu}, b={b}"), (r.value - expect).abs()),
                Err(e) => t.fail(e.to_string()),
            }
        }
    }
    t.finish()
}

fn pairwise(
    ev: &Evaluator,
    t: &mut Tally,
    kind: SumKind,
    a: f64,
    b: f64,
    nu: f64,
    methods: &[MethodId],
) {
    let vals: Vec<(MethodId, f64)> = methods
        .iter()
        .filter_map(|&m| match ev.evaluate_method(kind, a, b, nu, m) {
            Ok(r) => Some((m, r.value)),
            Err(e) => {
                t.fail(format!("{m} at a={a}, b={b}, nu={nu}: {e}"));
                None
            }
        })
        .collect();
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            let (mi, vi) = vals[i];
            let (mj, vj) = vals[j];
            t.record(
                || format!("{mi} vs {mj} at a={a}, b={b}, nu={nu}"),
                (vi - vj).abs() / (1.0 + vj.abs()),
            );
        }
    }
}

fn check_j_cross(ev: &Evaluator, suite: Suite) -> CheckRecord {
    let mut t = Tally::new("j-cross-method", 1e-9);
    let (nus, pts): (&[f64], &[(f64, f64)]) = match suite {
        Suite::Quick => (&[0.25, 1.0], &[(0.1, 1.0), (0.2, 2.0)]),
        Suite::Full => (
            &[-0.25, 0.25, 0.5, 1.0, 1.3],
            &[(0.05, 0.5), (0.1, 1.0), (0.2, 2.0), (0.5, 3.0), (1.0, 1.0)],
        ),
    };
    let ms = [MethodId::Theorem1, MethodId::Theorem2, MethodId::Direct];
    for &nu in nus {
        for &(a, b) in pts {
            pairwise(ev, &mut t, SumKind::J, a, b, nu, &ms);
        }
    }
    t.finish()
}

fn check_k_cross(ev: &Evaluator, suite: Suite) -> CheckRecord {
    let mut t = Tally::new("k-cross-method", 1e-8);
    let (nus, pts): (&[f64], &[(f64, f64)]) = match suite {
        Suite::Quick => (&[0.3, 1.3], &[(0.1, 1.0), (0.0, 1.0)]),
        Suite::Full => (
            &[0.25, 0.3, 0.75, 1.3],
            &[(0.0, 1.0), (0.1, 1.0), (0.5, 0.5), (0.3, 2.0), (1.5, 3.0)],
        ),
    };
    let ms = [
        MethodId::Theorem3,
        MethodId::Theorem3Asymptotic,
        MethodId::Direct,
    ];
    for &nu in nus {
        for &(a, b) in pts {
            pairwise(ev, &mut t, SumKind::K, a, b, nu, &ms);
        }
    }
    t.finish()
}

fn check_nu0(ev: &Evaluator, suite: Suite) -> CheckRecord {
    let mut t = Tally::new("k-nu0-limit", 1e-9);
    let pts: &[(f64, f64)] = match suite {
        Suite::Quick => &[(0.0, 1.0), (0.2, 1.0)],
        Suite::Full => &[(0.0, 1.0), (0.2, 1.0), (0.99, 1.0), (1.0, 1.0)],
    };
    for &(a, b) in pts {
        pairwise(
            ev,
            &mut t,
            SumKind::K,
            a,
            b,
            0.0,
            &[MethodId::Nu0Limit, MethodId::Direct],
        );
    }
    t.record(
        || "bracket at a = b".into(),
        (nu0_bracket(1.0, 1.0) - 1.0).abs(),
    );
    let gaps: Vec<f64> = [0.99, 0.999, 0.9999]
        .iter()
        .map(|r| (nu0_bracket(*r, 1.0) - 1.0).abs())
        .collect();
    t.record(
        || format!("bracket a -> b gaps {gaps:?}"),
        if gaps[0] > gaps[1] && gaps[1] > gaps[2] {
            0.0
        } else {
            1.0
        },
    );
    t.finish()
}

fn check_half_integer(ev: &Evaluator, suite: Suite) -> CheckRecord {
    let mut t = Tally::new("k-half-integer-reduction", 1e-10);
    let ms: &[u32] = match suite {
        Suite::Quick => &[0, 2],
        Suite::Full => &[0, 1, 2, 3],
    };
    for &m in ms {
        for (a, b) in [(0.3, 1.0), (0.1, 2.5), (2.0, 1.0)] {
            pairwise(
                ev,
                &mut t,
                SumKind::K,
                a,
                b,
                m as f64 + 0.5,
                &[MethodId::HalfInteger, MethodId::Direct],
            );
        }
    }
    t.finish()
}

fn check_alternating(ev: &Evaluator, suite: Suite) -> CheckRecord {
    let mut t = Tally::new("alternating-identity", 1e-12);
    let pts: &[(f64, f64)] = match suite {
        Suite::Quick => &[(0.3, 1.0), (0.5, 3.5)],
        Suite::Full => &[(0.1, 0.5), (0.3, 1.0), (0.5, 2.0), (0.5, 3.5), (1.0, 0.5)],
    };
    for &(a, b) in pts {
        let p = SumParams::new(SumKind::J, a, b, 0.5).alternating(true);
        match ev.evaluate(&p, MethodChoice::Auto) {
            Ok(r) => t.record(
                || format!("J a={a}, b={b}"),
                rel(r.value, arctan_closed_alt(a, b)),
            ),
            Err(e) => t.fail(e.to_string()),
        }
        for nu in [0.3, 0.5] {
            let p = SumParams::new(SumKind::K, a, b, nu).alternating(true);
            let alt = ev.evaluate(&p, MethodChoice::Auto);
            let s1 = ev.evaluate(&SumParams::new(SumKind::K, a, b, nu), MethodChoice::Auto);
            let s2 = ev.evaluate(
                &SumParams::new(SumKind::K, 2.0 * a, 2.0 * b, nu),
                MethodChoice::Direct,
            );
            match (alt, s1, s2) {
                (Ok(alt), Ok(s1), Ok(s2)) => t.record(
                    || format!("K a={a}, b={b}, nu={nu}"),
                    rel(alt.value + 2.0 * s2.value, s1.value),
                ),
                _ => t.fail(format!("K a={a}, b={b}, nu={nu}: evaluation failed")),
            }
        }
    }
    t.finish()
}

fn check_performance(ev: &Evaluator) -> CheckRecord {
    let mut t = Tally::new("fixed-cost-expansion", 0.0);
    let mut k_terms = Vec::new();
    for a in [1e-2, 1e-3, 1e-4] {
        let opts = EvalOptions::with_tol(1e-10);
        let local = Evaluator::new(opts);
        match local.evaluate_method(SumKind::J, a, 1.0, 0.5, MethodId::Direct) {
            Ok(d) => {
                let ratio = d.terms_used as f64 / ((1.0 / a) * 1e10f64.ln());
                t.record(
                    || format!("direct terms ratio {ratio:.3} at a={a}"),
                    if (0.5..=2.0).contains(&ratio) {
                        0.0
                    } else {
                        1.0
                    },
                );
            }
            Err(e) => t.fail(e.to_string()),
        }
        match ev.evaluate_method(SumKind::J, a, 1.0, 0.5, MethodId::Theorem2) {
            Ok(r) => k_terms.push(r.terms_used),
            Err(e) => t.fail(e.to_string()),
        }
    }
    let constant = k_terms.windows(2).all(|w| w[0] == w[1]) && k_terms.iter().all(|&k| k <= 10);
    t.record(
        || format!("theorem2 k-terms {k_terms:?}"),
        if constant { 0.0 } else { 1.0 },
    );
    t.finish()
}

fn check_scalar() -> CheckRecord {
    let mut t = Tally::new("scalar-invariants", 1e-13);
    let g = |x: f64| gamma(x).unwrap_or(f64::NAN);
    let z = |s: f64| zeta(s).unwrap_or(f64::NAN);
    t.record(|| "Gamma(1/2)".into(), rel(g(0.5), PI.sqrt()));
    for x in [0.3, 0.7, 1.6] {
        t.record(
            || format!("reflection at {x}"),
            rel(g(x) * g(1.0 - x), PI / (PI * x).sin()),
        );
        t.record(
            || format!("duplication at {x}"),
            rel(
                g(x) * g(x + 0.5),
                2f64.powf(1.0 - 2.0 * x) * PI.sqrt() * g(2.0 * x),
            ),
        );
    }
    t.record(|| "zeta(2)".into(), rel(z(2.0), PI * PI / 6.0));
    for k in 1..=5 {
        t.record(
            || format!("trivial zero -{}", 2 * k),
            zeta_neg_int(2 * k).abs(),
        );
    }
    for s in [-2.5, 0.3, 3.5] {
        let rhs = 2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * g(1.0 - s) * z(1.0 - s);
        t.record(|| format!("functional equation at {s}"), rel(z(s), rhs));
    }
    t.finish()
}

/// Runs every check of `suite`; each record carries a one-line summary.
pub fn run_suite(suite: Suite) -> Vec<CheckRecord> {
    let ev = Evaluator::new(EvalOptions::with_tol(1e-13));
    vec![
        check_j_half(&ev, suite),
        check_k_half(&ev, suite),
        check_a0(&ev, suite),
        check_j_cross(&ev, suite),
        check_k_cross(&ev, suite),
        check_nu0(&ev, suite),
        check_half_integer(&ev, suite),
        check_alternating(&ev, suite),
        check_performance(&ev),
        check_scalar(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let checks = run_suite(Suite::Quick);
        assert_eq!(checks.len(), 10);
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
