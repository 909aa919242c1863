//! Parameter and result types shared by the J- and K-sum evaluators.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which Bessel kernel the sum carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SumKind {
    J,
    K,
}

impl fmt::Display for SumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SumKind::J => "J",
            SumKind::K => "K",
        })
    }
}

impl FromStr for SumKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "J" | "j" => Ok(SumKind::J),
            "K" | "k" => Ok(SumKind::K),
            other => Err(format!("unknown sum kind '{other}' (expected J or K)")),
        }
    }
}

/// The concrete algorithm that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MethodId {
    /// Literal summation over n.
    Direct,
    /// Series in polylogarithms of negative order (a > b).
    PolylogSeries,
    /// J-sum: residue double series.
    Theorem1,
    /// J-sum: the same expansion rearranged in powers of a/2π.
    Theorem2,
    /// J-sum: closed form at a = 0.
    ZeroDamping,
    /// K-sum: residue double series.
    Theorem3,
    /// K-sum: D_k single series in powers of a/2π.
    Theorem3Asymptotic,
    /// K-sum: ν = 0 limiting formula.
    Nu0Limit,
    /// K-sum: reduction to exponential sums at ν = m + ½.
    HalfInteger,
    /// K-sum: integer ν ≥ 1 via symmetric extrapolation of the residue series.
    EpsilonAverage,
}

impl MethodId {
    pub const ALL: [MethodId; 10] = [
        MethodId::Direct,
        MethodId::PolylogSeries,
        MethodId::Theorem1,
        MethodId::Theorem2,
        MethodId::ZeroDamping,
        MethodId::Theorem3,
        MethodId::Theorem3Asymptotic,
        MethodId::Nu0Limit,
        MethodId::HalfInteger,
        MethodId::EpsilonAverage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::Direct => "direct",
            MethodId::PolylogSeries => "polylog-series",
            MethodId::Theorem1 => "theorem1",
            MethodId::Theorem2 => "theorem2",
            MethodId::ZeroDamping => "a0-closed-form",
            MethodId::Theorem3 => "theorem3",
            MethodId::Theorem3Asymptotic => "theorem3-asymptotic",
            MethodId::Nu0Limit => "nu0-limit",
            MethodId::HalfInteger => "half-integer",
            MethodId::EpsilonAverage => "epsilon-average",
        }
    }

    /// Which sum kinds the method applies to.
    pub fn applies_to(self, kind: SumKind) -> bool {
        match self {
            MethodId::Direct | MethodId::PolylogSeries => true,
            MethodId::Theorem1 | MethodId::Theorem2 | MethodId::ZeroDamping => kind == SumKind::J,
            _ => kind == SumKind::K,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        MethodId::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method id '{s}'"))
    }
}

/// Method family requested by a caller; `Auto` lets the engine pick by region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodChoice {
    Auto,
    Direct,
    Polylog,
    Theorem,
    Asymptotic,
    Special,
}

impl FromStr for MethodChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "auto" => MethodChoice::Auto,
            "direct" => MethodChoice::Direct,
            "polylog" => MethodChoice::Polylog,
            "theorem" => MethodChoice::Theorem,
            "asymptotic" => MethodChoice::Asymptotic,
            "special" => MethodChoice::Special,
            other => {
                return MethodId::from_str(other)
                    .map(MethodChoice::from)
                    .map_err(|_| {
                        format!(
                            "unknown method '{other}' (expected auto, direct, polylog, theorem, asymptotic or special)"
                        )
                    })
            }
        })
    }
}

impl From<MethodId> for MethodChoice {
    fn from(m: MethodId) -> Self {
        match m {
            MethodId::Direct => MethodChoice::Direct,
            MethodId::PolylogSeries => MethodChoice::Polylog,
            MethodId::Theorem1 | MethodId::Theorem3 => MethodChoice::Theorem,
            MethodId::Theorem2 | MethodId::Theorem3Asymptotic => MethodChoice::Asymptotic,
            MethodId::ZeroDamping
            | MethodId::Nu0Limit
            | MethodId::HalfInteger
            | MethodId::EpsilonAverage => MethodChoice::Special,
        }
    }
}

/// Diagnostics attached to a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionFlag {
    /// Close to the edge of the method's convergence region.
    NearBoundary,
    /// Series converges only conditionally; acceleration applied.
    ConditionalConvergence,
    /// The requested or preferred method was replaced by another.
    FallbackUsed,
    /// The truncation criterion was not met within the term cap.
    NotConverged,
}

impl RegionFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionFlag::NearBoundary => "near-boundary",
            RegionFlag::ConditionalConvergence => "conditional-convergence",
            RegionFlag::FallbackUsed => "fallback-used",
            RegionFlag::NotConverged => "not-converged",
        }
    }
}

impl FromStr for RegionFlag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            RegionFlag::NearBoundary,
            RegionFlag::ConditionalConvergence,
            RegionFlag::FallbackUsed,
            RegionFlag::NotConverged,
        ]
        .into_iter()
        .find(|f| f.as_str() == s)
        .ok_or_else(|| format!("unknown flag '{s}'"))
    }
}

/// A computed sum with its heuristic error estimate and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    /// Heuristic: magnitude of the first omitted contribution, or a cross-check residual.
    pub est_error: f64,
    pub terms_used: usize,
    pub method: MethodId,
    pub flags: BTreeSet<RegionFlag>,
}

impl EvalResult {
    pub(crate) fn new(value: f64, est_error: f64, terms_used: usize, method: MethodId) -> Self {
        EvalResult {
            value,
            est_error: est_error.abs(),
            terms_used: terms_used.max(1),
            method,
            flags: BTreeSet::new(),
        }
    }

    pub(crate) fn with_flag(mut self, flag: RegionFlag) -> Self {
        self.flags.insert(flag);
        self
    }

    pub fn has_flag(&self, flag: RegionFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// Truncation and tolerance controls passed to every evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Target absolute accuracy for methods with a tunable truncation (direct summation).
    pub tol: f64,
    /// Hard cap on terms for any single series.
    pub max_terms: usize,
    /// When set, sum exactly this many leading terms (convergence studies).
    pub level: Option<usize>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tol: 1e-10,
            max_terms: 10_000_000,
            level: None,
        }
    }
}

impl EvalOptions {
    pub fn with_tol(tol: f64) -> Self {
        EvalOptions {
            tol,
            ..Default::default()
        }
    }

    pub fn at_level(self, level: usize) -> Self {
        EvalOptions {
            level: Some(level),
            ..self
        }
    }
}

/// Inputs of the J-sum: Σ e^{-an} (½bn)^{-ν} J_ν(bn).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JParams {
    pub a: f64,
    pub b: f64,
    pub nu: f64,
}

impl JParams {
    pub fn new(a: f64, b: f64, nu: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && nu.is_finite()) {
            return Err(domain("J-sum parameters must be finite"));
        }
        if a < 0.0 {
            return Err(domain(format!("J-sum requires a >= 0, got a = {a}")));
        }
        if b <= 0.0 {
            return Err(domain(format!("J-sum requires b > 0, got b = {b}")));
        }
        if nu <= -0.5 {
            return Err(domain(format!("J-sum requires nu > -1/2, got nu = {nu}")));
        }
        Ok(JParams { a, b, nu })
    }

    pub fn doubled(&self) -> JParams {
        JParams {
            a: 2.0 * self.a,
            b: 2.0 * self.b,
            nu: self.nu,
        }
    }
}

/// Inputs of the K-sum: Σ e^{-an} (½bn)^{-ν} K_ν(bn).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KParams {
    pub a: f64,
    pub b: f64,
    pub nu: f64,
}

impl KParams {
    pub fn new(a: f64, b: f64, nu: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && nu.is_finite()) {
            return Err(domain("K-sum parameters must be finite"));
        }
        if a < 0.0 {
            return Err(domain(format!("K-sum requires a >= 0, got a = {a}")));
        }
        if b <= 0.0 {
            return Err(domain(format!("K-sum requires b > 0, got b = {b}")));
        }
        if nu < 0.0 {
            return Err(domain(format!(
                "K-sum requires nu >= 0 (K_{{-nu}} = K_nu), got nu = {nu}"
            )));
        }
        Ok(KParams { a, b, nu })
    }

    pub fn doubled(&self) -> KParams {
        KParams {
            a: 2.0 * self.a,
            b: 2.0 * self.b,
            nu: self.nu,
        }
    }
}

/// Kind-tagged parameters, as accepted by the engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumParams {
    pub kind: SumKind,
    pub alternating: bool,
    pub a: f64,
    pub b: f64,
    pub nu: f64,
}

impl SumParams {
    pub fn new(kind: SumKind, a: f64, b: f64, nu: f64) -> Self {
        SumParams {
            kind,
            alternating: false,
            a,
            b,
            nu,
        }
    }

    pub fn alternating(mut self, alternating: bool) -> Self {
        self.alternating = alternating;
        self
    }

    pub fn j(&self) -> Result<JParams> {
        JParams::new(self.a, self.b, self.nu)
    }

    pub fn k(&self) -> Result<KParams> {
        KParams::new(self.a, self.b, self.nu)
    }
}

/// Rejects a method tag that does not apply to `kind`.
pub(crate) fn require_kind(method: MethodId, kind: SumKind) -> Result<()> {
    if method.applies_to(kind) {
        Ok(())
    } else {
        Err(Error::Routing(format!(
            "method {method} does not apply to the {kind}-sum"
        )))
    }
}
