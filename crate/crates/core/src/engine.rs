//! Method selection by parameter region, fallback, caching and convergence tables.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use std::time::Instant;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::params::{
    EvalOptions, EvalResult, JParams, KParams, MethodChoice, MethodId, RegionFlag, SumKind,
    SumParams,
};
use crate::sum_j::{self, JCoeffTable, ASYMPTOTIC_X_MAX, TWO_PI};
use crate::sum_k::{self, excluded_distance, KCoeffTable, NU_GUARD};

type TableKey = (u64, u64);

fn key(b: f64, nu: f64) -> TableKey {
    (b.to_bits(), nu.to_bits())
}

/// One (method, level) entry of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub method: MethodId,
    pub level: usize,
    pub value: f64,
    pub abs_error: f64,
    pub seconds: f64,
}

/// Rows plus notes on skipped method/region pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub reference: MethodId,
    pub reference_value: f64,
    pub rows: Vec<ConvergenceRow>,
    pub notes: Vec<String>,
}

/// Stateless dispatcher over the evaluators, with read-mostly coefficient caches.
#[derive(Debug, Default)]
pub struct Evaluator {
    opts: EvalOptions,
    j_tables: RwLock<HashMap<TableKey, Arc<JCoeffTable>>>,
    k_tables: RwLock<HashMap<TableKey, Arc<KCoeffTable>>>,
}

fn is_half_integer(nu: f64) -> bool {
    let m = nu - 0.5;
    m >= 0.0 && m == m.round()
}

fn is_positive_integer(nu: f64) -> bool {
    nu >= 1.0 && nu == nu.round()
}

fn in_theorem_region(a: f64, b: f64) -> bool {
    a <= b && a + b < TWO_PI
}

impl Evaluator {
    pub fn new(opts: EvalOptions) -> Self {
        Evaluator {
            opts,
            ..Default::default()
        }
    }

    pub fn options(&self) -> &EvalOptions {
        &self.opts
    }

    fn j_table(&self, b: f64, nu: f64) -> Result<Arc<JCoeffTable>> {
        let k = key(b, nu);
        if let Some(t) = self.j_tables.read().expect("cache lock").get(&k) {
            return Ok(t.clone());
        }
        let t = Arc::new(JCoeffTable::new(b, nu)?);
        Ok(self
            .j_tables
            .write()
            .expect("cache lock")
            .entry(k)
            .or_insert(t)
            .clone())
    }

    fn k_table(&self, b: f64, nu: f64) -> Result<Arc<KCoeffTable>> {
        let k = key(b, nu);
        if let Some(t) = self.k_tables.read().expect("cache lock").get(&k) {
            return Ok(t.clone());
        }
        let t = Arc::new(KCoeffTable::new(b, nu)?);
        Ok(self
            .k_tables
            .write()
            .expect("cache lock")
            .entry(k)
            .or_insert(t)
            .clone())
    }

    /// The method `auto` picks for a non-alternating sum; deterministic in its inputs.
    pub fn auto_method(&self, kind: SumKind, a: f64, b: f64, nu: f64) -> MethodId {
        match kind {
            SumKind::J => {
                if a == 0.0 {
                    MethodId::ZeroDamping
                } else if a > b {
                    MethodId::PolylogSeries
                } else if in_theorem_region(a, b) {
                    if a / TWO_PI < ASYMPTOTIC_X_MAX {
                        MethodId::Theorem2
                    } else {
                        MethodId::Theorem1
                    }
                } else {
                    MethodId::Direct
                }
            }
            SumKind::K => {
                let near_excluded = excluded_distance(nu) <= NU_GUARD;
                if is_half_integer(nu) {
                    MethodId::HalfInteger
                } else if a > b {
                    if near_excluded {
                        MethodId::Direct
                    } else {
                        MethodId::PolylogSeries
                    }
                } else if in_theorem_region(a, b) {
                    if nu == 0.0 {
                        MethodId::Nu0Limit
                    } else if is_positive_integer(nu) {
                        MethodId::EpsilonAverage
                    } else if near_excluded {
                        MethodId::Direct
                    } else if a / TWO_PI < ASYMPTOTIC_X_MAX {
                        MethodId::Theorem3Asymptotic
                    } else {
                        MethodId::Theorem3
                    }
                } else {
                    MethodId::Direct
                }
            }
        }
    }

    /// Resolves a method family to a concrete method for these parameters.
    pub fn resolve(&self, p: &SumParams, choice: MethodChoice) -> Result<MethodId> {
        let (kind, a, b, nu) = (p.kind, p.a, p.b, p.nu);
        Ok(match (choice, kind) {
            (MethodChoice::Auto, _) => self.auto_method(kind, a, b, nu),
            (MethodChoice::Direct, _) => MethodId::Direct,
            (MethodChoice::Polylog, _) => MethodId::PolylogSeries,
            (MethodChoice::Theorem, SumKind::J) => MethodId::Theorem1,
            (MethodChoice::Theorem, SumKind::K) => MethodId::Theorem3,
            (MethodChoice::Asymptotic, SumKind::J) => MethodId::Theorem2,
            (MethodChoice::Asymptotic, SumKind::K) => MethodId::Theorem3Asymptotic,
            (MethodChoice::Special, SumKind::J) => MethodId::ZeroDamping,
            (MethodChoice::Special, SumKind::K) => {
                if nu == 0.0 {
                    MethodId::Nu0Limit
                } else if is_half_integer(nu) {
                    MethodId::HalfInteger
                } else if is_positive_integer(nu) {
                    MethodId::EpsilonAverage
                } else {
                    return Err(Error::Routing(format!(
                        "no special-case formula for the K-sum at nu = {nu}; special forms exist for nu = 0, nu = m + 1/2 and integer nu >= 1"
                    )));
                }
            }
        })
    }

    /// Runs one concrete method on a non-alternating sum.
    pub fn evaluate_method(
        &self,
        kind: SumKind,
        a: f64,
        b: f64,
        nu: f64,
        method: MethodId,
    ) -> Result<EvalResult> {
        self.run(kind, a, b, nu, method, &self.opts)
    }

    fn run(
        &self,
        kind: SumKind,
        a: f64,
        b: f64,
        nu: f64,
        method: MethodId,
        opts: &EvalOptions,
    ) -> Result<EvalResult> {
        crate::params::require_kind(method, kind)?;
        match kind {
            SumKind::J => {
                let p = JParams::new(a, b, nu)?;
                match method {
                    MethodId::Theorem2 if in_theorem_region(a, b) => {
                        sum_j::sum_j_theorem2_with(&*self.j_table(b, nu)?, &p, opts)
                    }
                    m => sum_j::sum_j_by(m, &p, opts),
                }
            }
            SumKind::K => {
                let p = KParams::new(a, b, nu)?;
                match method {
                    MethodId::Theorem3Asymptotic
                        if excluded_distance(nu) > NU_GUARD && in_theorem_region(a, b) =>
                    {
                        sum_k::sum_k_theorem3_asymptotic_with(&*self.k_table(b, nu)?, &p, opts)
                    }
                    m => sum_k::sum_k_by(m, &p, opts),
                }
            }
        }
    }

    /// Non-alternating auto evaluation with fallback to direct summation.
    fn auto(&self, kind: SumKind, a: f64, b: f64, nu: f64) -> Result<EvalResult> {
        let method = self.auto_method(kind, a, b, nu);
        let primary = self.run(kind, a, b, nu, method, &self.opts);
        if method == MethodId::Direct || (kind == SumKind::J && a == 0.0) {
            return primary;
        }
        let needs_fallback = match &primary {
            Ok(r) => r.est_error > self.opts.tol || r.has_flag(RegionFlag::NotConverged),
            Err(Error::Domain(_)) => return primary,
            Err(_) => true,
        };
        if !needs_fallback {
            return primary;
        }
        match self.run(kind, a, b, nu, MethodId::Direct, &self.opts) {
            Ok(d) => Ok(d.with_flag(RegionFlag::FallbackUsed)),
            Err(e) => primary.or(Err(e)),
        }
    }

    /// Evaluates the (possibly alternating) sum with the requested method family.
    pub fn evaluate(&self, p: &SumParams, choice: MethodChoice) -> Result<EvalResult> {
        match p.kind {
            SumKind::J => {
                p.j()?;
            }
            SumKind::K => {
                p.k()?;
            }
        }
        if choice == MethodChoice::Auto {
            if !p.alternating {
                return self.auto(p.kind, p.a, p.b, p.nu);
            }
            let s1 = self.auto(p.kind, p.a, p.b, p.nu)?;
            let s2 = self.auto(p.kind, 2.0 * p.a, 2.0 * p.b, p.nu)?;
            let method = s1.method;
            return Ok(sum_j::combine_alternating(s1, s2, method));
        }
        let method = self.resolve(p, choice)?;
        self.evaluate_exact(p, method)
    }

    /// Evaluates the (possibly alternating) sum with exactly `method`, no fallback.
    pub fn evaluate_exact(&self, p: &SumParams, method: MethodId) -> Result<EvalResult> {
        crate::params::require_kind(method, p.kind)?;
        if !p.alternating {
            return self.run(p.kind, p.a, p.b, p.nu, method, &self.opts);
        }
        match p.kind {
            SumKind::J => sum_j::sum_j_alternating(&p.j()?, method, &self.opts),
            SumKind::K => sum_k::sum_k_alternating(&p.k()?, method, &self.opts),
        }
    }

    /// Partial values with exactly `level` leading terms per method, against `reference`.
    pub fn convergence_table(
        &self,
        kind: SumKind,
        a: f64,
        b: f64,
        nu: f64,
        methods: &[MethodId],
        reference: MethodId,
        levels: &[usize],
    ) -> Result<ConvergenceTable> {
        if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) || levels[0] == 0 {
            return Err(domain(
                "convergence levels must be positive and strictly increasing",
            ));
        }
        let reference_value = self.run(kind, a, b, nu, reference, &self.opts)?.value;
        let mut rows = Vec::new();
        let mut notes = Vec::new();
        for &method in methods {
            if !method.applies_to(kind) {
                notes.push(format!(
                    "skipped {method}: does not apply to the {kind}-sum"
                ));
                continue;
            }
            for &level in levels {
                let opts = self.opts.at_level(level);
                let start = Instant::now();
                match self.run(kind, a, b, nu, method, &opts) {
                    Ok(r) => rows.push(ConvergenceRow {
                        method,
                        level,
                        value: r.value,
                        abs_error: (r.value - reference_value).abs(),
                        seconds: start.elapsed().as_secs_f64(),
                    }),
                    Err(e) => {
                        notes.push(format!("skipped {method}: {e}"));
                        break;
                    }
                }
            }
        }
        Ok(ConvergenceTable {
            reference,
            reference_value,
            rows,
            notes,
        })
    }
}

/// One-shot evaluation with a fresh evaluator.
pub fn evaluate(p: &SumParams, choice: MethodChoice, opts: &EvalOptions) -> Result<EvalResult> {
    Evaluator::new(*opts).evaluate(p, choice)
}
