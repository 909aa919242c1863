//! Evaluation paths for S_J(a, b) = Σ_{n≥1} e^{-an} (½bn)^{-ν} J_ν(bn).

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::bessel::j_scaled_unchecked;
use crate::error::{domain, region, Error, Result};
use crate::hyp2f1::hyp2f1_special;
use crate::params::{EvalOptions, EvalResult, JParams, MethodId, RegionFlag};
use crate::polylog::{polylog_neg_int_ln, NEG_INT_CAP};
use crate::series::{euler_average, Neumaier};
use crate::special::{ln_gamma, rgamma, zeta};

pub(crate) const TWO_PI: f64 = 2.0 * PI;

/// Largest index accepted by [`coeff_a`] and [`coeff_c`].
pub const COEFF_CAP: usize = 600;
/// A-table edge cached eagerly per table.
pub const A_TABLE_M: usize = 48;
const C_CACHE_LEN: usize = 512;
/// Anti-diagonal cap for the double residue sums.
pub(crate) const MAX_DIAGONAL: usize = 600;

/// Alternating partial sums are handed to Euler averaging after this many terms.
const EULER_AFTER: usize = 20;
const EULER_TERMS: usize = 48;

/// Share of the a + b < 2π budget past which results are flagged near-boundary.
const NEAR_BOUNDARY: f64 = 0.9;

/// Which T2 representation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum T2Form {
    Series,
    Closed,
}

pub(crate) fn ln_zeta_even(j: usize) -> f64 {
    zeta(2.0 * j as f64).expect("even argument >= 2").ln()
}

fn check_cap(what: &str, idx: usize) -> Result<()> {
    if idx > COEFF_CAP {
        return Err(Error::Capacity {
            what: format!("{what} index {idx}"),
            cap: COEFF_CAP,
        });
    }
    Ok(())
}

/// ln A_{m,n}; every A_{m,n} is positive for ν > −½.
pub fn coeff_a_ln(m: usize, n: usize, nu: f64) -> Result<f64> {
    check_cap("A_{m,n}", m.max(n))?;
    if !(nu > -0.5) {
        return Err(domain(format!("A_{{m,n}} requires nu > -1/2, got {nu}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    let d = mf + nf;
    Ok(
        ln_gamma(d + 1.0) + ln_gamma(d + 1.5) + ln_zeta_even(m + n + 1)
            - ln_gamma(mf + 1.0)
            - ln_gamma(nf + 1.0)
            - ln_gamma(mf + 1.5)
            - ln_gamma(nf + 1.0 + nu),
    )
}

/// A_{m,n} = Γ(m+n+1)Γ(m+n+3/2)ζ(2m+2n+2) / (m! n! Γ(m+3/2) Γ(n+1+ν)).
pub fn coeff_a(m: usize, n: usize, nu: f64) -> Result<f64> {
    coeff_a_ln(m, n, nu).map(f64::exp)
}

/// C_k = Σ_n A_{k,n} y^{2n} with y = b/2π, alongside the number of n-terms
/// used; `alternating` selects the signed variant Σ_n (−)^n A_{k,n} y^{2n}.
pub(crate) fn c_series(k: usize, b: f64, nu: f64, alternating: bool) -> Result<(f64, usize)> {
    check_cap("C_k", k)?;
    let y = b / TWO_PI;
    if !(y < 1.0) || !(b > 0.0) {
        return Err(region(
            MethodId::Theorem2,
            format!("C_k diverges unless 0 < b < 2π, got b = {b}"),
            &[MethodId::Direct],
        ));
    }
    let ln_y2 = 2.0 * y.ln();
    let kf = k as f64;
    let mut ln_t = coeff_a_ln(k, 0, nu)?;
    let mut acc = Neumaier::new();
    let mut n = 0usize;
    loop {
        let t = ln_t.exp();
        let signed = if alternating && n % 2 == 1 { -t } else { t };
        acc.add(signed);
        let nf = n as f64;
        // A_{k,n+1}/A_{k,n}
        let ratio_ln = ((kf + nf + 1.0) * (kf + nf + 1.5) / ((nf + 1.0) * (nf + 1.0 + nu))).ln()
            + ln_zeta_even(k + n + 2)
            - ln_zeta_even(k + n + 1)
            + ln_y2;
        n += 1;
        if ratio_ln < 0.0 && t < 1e-17 * acc.value().abs() {
            return Ok((acc.value(), n));
        }
        if n > 20_000 {
            return Err(Error::Capacity {
                what: format!("C_{k} n-series at b = {b}"),
                cap: 20_000,
            });
        }
        ln_t += ratio_ln;
    }
}

/// C_k(b, ν) = Σ_n A_{k,n}(b/2π)^{2n}.
pub fn coeff_c(k: usize, b: f64, nu: f64) -> Result<f64> {
    c_series(k, b, nu, false).map(|(v, _)| v)
}

/// Cached A_{m,n} for m, n ≤ [`A_TABLE_M`] and lazily filled C_k for fixed (b, ν).
#[derive(Debug)]
pub struct JCoeffTable {
    pub nu: f64,
    pub b: f64,
    a: Vec<f64>,
    c: Vec<OnceLock<Result<(f64, usize)>>>,
}

impl JCoeffTable {
    pub fn new(b: f64, nu: f64) -> Result<Self> {
        let mut a = Vec::with_capacity((A_TABLE_M + 1) * (A_TABLE_M + 1));
        for m in 0..=A_TABLE_M {
            for n in 0..=A_TABLE_M {
                a.push(coeff_a(m, n, nu)?);
            }
        }
        Ok(JCoeffTable {
            nu,
            b,
            a,
            c: (0..C_CACHE_LEN).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn a(&self, m: usize, n: usize) -> Result<f64> {
        if m <= A_TABLE_M && n <= A_TABLE_M {
            Ok(self.a[m * (A_TABLE_M + 1) + n])
        } else {
            coeff_a(m, n, self.nu)
        }
    }

    fn c_entry(&self, k: usize) -> Result<(f64, usize)> {
        match self.c.get(k) {
            Some(cell) => cell
                .get_or_init(|| c_series(k, self.b, self.nu, false))
                .clone(),
            None => c_series(k, self.b, self.nu, false),
        }
    }

    pub fn c(&self, k: usize) -> Result<f64> {
        self.c_entry(k).map(|(v, _)| v)
    }

    /// Number of n-terms that went into C_k.
    pub fn c_terms(&self, k: usize) -> Result<usize> {
        self.c_entry(k).map(|(_, n)| n)
    }
}

/// Outcome of a double residue sum.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DoubleSum {
    pub value: f64,
    pub est_error: f64,
    pub terms: usize,
    pub converged: bool,
}

/// Σ_{m,n} s_{m,n} A_{m,n} x^{2m} y^{2n} swept by anti-diagonals d = m + n,
/// with s = (−)^m (`alt_n = false`) or (−)^{m+n} (`alt_n = true`).
pub(crate) fn a_double_sum(
    x: f64,
    y: f64,
    nu: f64,
    alt_n: bool,
    level: Option<usize>,
) -> DoubleSum {
    let ln_r = 2.0 * (x.ln() - y.ln());
    let ln_y2 = 2.0 * y.ln();
    let max_d = level.map_or(MAX_DIAGONAL, |l| l.saturating_sub(1).min(MAX_DIAGONAL));
    let mut total = Neumaier::new();
    let mut abs_sum = 0.0;
    let mut quiet = 0;
    let mut terms = 0;
    let mut last_max = 0.0;
    for d in 0..=max_d {
        let df = d as f64;
        // ln A_{0,d} y^{2d}
        let mut ln_t =
            ln_gamma(df + 1.5) + ln_zeta_even(d + 1) - ln_gamma(1.5) - ln_gamma(df + 1.0 + nu)
                + df * ln_y2;
        let mut diag = Neumaier::new();
        let mut max_t: f64 = 0.0;
        for m in 0..=d {
            let t = ln_t.exp();
            let sign = if alt_n {
                if d % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else if m % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            diag.add(sign * t);
            max_t = max_t.max(t);
            abs_sum += t;
            terms += 1;
            if m < d {
                let (mf, nf) = (m as f64, (d - m) as f64);
                ln_t += (nf * (nf + nu) / ((mf + 1.0) * (mf + 1.5))).ln() + ln_r;
            }
            if x == 0.0 {
                break;
            }
        }
        total.add(diag.value());
        last_max = max_t;
        if level.is_none() {
            if max_t <= 1e-17 * total.value().abs() {
                quiet += 1;
                if quiet >= 3 {
                    return DoubleSum {
                        value: total.value(),
                        est_error: max_t + 1e-16 * abs_sum,
                        terms,
                        converged: true,
                    };
                }
            } else {
                quiet = 0;
            }
        }
    }
    DoubleSum {
        value: total.value(),
        est_error: last_max + 1e-16 * abs_sum,
        terms,
        converged: level.is_some(),
    }
}

fn require_theorem_region(p: &JParams, method: MethodId) -> Result<()> {
    if p.a > p.b {
        return Err(region(
            method,
            format!("requires a <= b, got a = {} > b = {}", p.a, p.b),
            &[MethodId::PolylogSeries, MethodId::Direct],
        ));
    }
    if !(p.a + p.b < TWO_PI) {
        return Err(region(
            method,
            format!(
                "requires a + b < 2π (hence b < 2π) for the residue series to converge, got a + b = {}",
                p.a + p.b
            ),
            &[MethodId::Direct],
        ));
    }
    Ok(())
}

fn boundary_flag(mut r: EvalResult, a: f64, b: f64) -> EvalResult {
    if (a + b) / TWO_PI > NEAR_BOUNDARY {
        r = r.with_flag(RegionFlag::NearBoundary);
    }
    r
}

/// Tail bound sup_x |(½x)^{-ν}J_ν(x)| ≤ 1/Γ(1+ν), classical for ν ≥ −½.
fn j_kernel_bound(nu: f64) -> f64 {
    rgamma(1.0 + nu).abs()
}

/// Terms needed so that the geometric tail e^{-aN}·bound/(e^a − 1) stays below `tol`.
pub fn direct_j_terms(p: &JParams, tol: f64) -> usize {
    let bound = j_kernel_bound(p.nu);
    let n = (bound / (p.a.exp_m1() * tol)).ln() / p.a;
    n.ceil().max(1.0) as usize
}

/// Literal summation, truncated by the explicit tail bound (or at `level` terms).
pub fn sum_j_direct(p: &JParams, opts: &EvalOptions) -> Result<EvalResult> {
    if !(p.a > 0.0) {
        return Err(domain(format!(
            "direct J summation requires a > 0 (use the a = 0 closed form), got a = {}",
            p.a
        )));
    }
    let tol = opts.tol.max(1e-16);
    let mut flags = None;
    let n_max = match opts.level {
        Some(l) => l.max(1),
        None => {
            let n = direct_j_terms(p, tol);
            if n > opts.max_terms {
                flags = Some(RegionFlag::NotConverged);
                opts.max_terms
            } else {
                n
            }
        }
    };
    let mut acc = Neumaier::new();
    for n in 1..=n_max {
        let nf = n as f64;
        acc.add((-p.a * nf).exp() * j_scaled_unchecked(p.nu, p.b * nf));
    }
    let tail = j_kernel_bound(p.nu) * (-p.a * n_max as f64).exp() / p.a.exp_m1();
    let r = EvalResult::new(acc.value(), tail, n_max, MethodId::Direct);
    Ok(match flags {
        Some(f) => r.with_flag(f),
        None => r,
    })
}

/// Sums an alternating sequence, switching to Euler averaging after
/// [`EULER_AFTER`] terms when it has not settled; returns (value, error, terms, accelerated).
fn alternating_sum(
    mut term: impl FnMut(usize) -> Result<f64>,
    max_terms: usize,
    level: Option<usize>,
) -> Result<(f64, f64, usize, bool)> {
    if let Some(l) = level {
        let mut acc = Neumaier::new();
        let mut last = 0.0;
        for k in 0..l.min(max_terms) {
            last = term(k)?;
            acc.add(last);
        }
        return Ok((acc.value(), last.abs(), l.min(max_terms).max(1), false));
    }
    let mut acc = Neumaier::new();
    let mut partials = Vec::with_capacity(EULER_AFTER + EULER_TERMS + 1);
    let mut quiet = 0;
    for k in 0..max_terms {
        let t = term(k)?;
        acc.add(t);
        partials.push(acc.value());
        if t.abs() <= 1e-17 * acc.value().abs() || t == 0.0 && k > 0 {
            quiet += 1;
            if quiet >= 2 {
                return Ok((acc.value(), t.abs(), k + 1, false));
            }
        } else {
            quiet = 0;
        }
        if k + 1 >= EULER_AFTER + EULER_TERMS {
            break;
        }
    }
    if partials.len() <= EULER_AFTER {
        let v = acc.value();
        let e = (partials[partials.len() - 1] - partials[partials.len().saturating_sub(2)]).abs();
        return Ok((v, e, partials.len(), false));
    }
    let (v, e) = euler_average(&partials[EULER_AFTER - 1..]);
    Ok((v, e, partials.len(), true))
}

/// Σ_k (−)^k (½b)^{2k} Li_{−2k}(e^{−a}) / (k! Γ(1+ν+k)), for a ≥ b.
pub fn sum_j_polylog(p: &JParams, opts: &EvalOptions) -> Result<EvalResult> {
    if p.a < p.b {
        return Err(region(
            MethodId::PolylogSeries,
            format!("requires a >= b, got a = {} < b = {}", p.a, p.b),
            &[MethodId::Theorem1, MethodId::Theorem2, MethodId::Direct],
        ));
    }
    let ln_half_b = (0.5 * p.b).ln();
    let nu = p.nu;
    let a = p.a;
    let term = |k: usize| -> Result<f64> {
        let kf = k as f64;
        let ln = 2.0 * kf * ln_half_b + polylog_neg_int_ln(2 * k as u32, a)?
            - ln_gamma(kf + 1.0)
            - ln_gamma(1.0 + nu + kf);
        let t = ln.exp();
        Ok(if k.is_multiple_of(2) { t } else { -t })
    };
    let cap = (NEG_INT_CAP as usize / 2 + 1).min(opts.max_terms);
    let (value, err, terms, accel) = alternating_sum(term, cap, opts.level)?;
    let mut r = EvalResult::new(value, err, terms, MethodId::PolylogSeries);
    if accel {
        r = r.with_flag(RegionFlag::ConditionalConvergence);
    }
    if p.a == p.b {
        r = r.with_flag(RegionFlag::ConditionalConvergence);
    }
    if opts.level.is_none() && err > 1e-12 * value.abs().max(1e-300) {
        r = r.with_flag(RegionFlag::NotConverged);
    }
    Ok(r)
}

/// T2, the contribution of the residues on the right of the Mellin–Barnes contour.
pub fn t2_j(p: &JParams, form: T2Form) -> Result<f64> {
    if p.a > p.b {
        return Err(region(
            MethodId::Theorem1,
            format!("T2 requires a <= b, got a = {} > b = {}", p.a, p.b),
            &[MethodId::PolylogSeries, MethodId::Direct],
        ));
    }
    match form {
        T2Form::Closed => Ok(t2_j_closed(p)),
        T2Form::Series => t2_j_series(p).map(|(v, _)| v),
    }
}

fn t2_j_closed(p: &JParams) -> f64 {
    let (a, b, nu) = (p.a, p.b, p.nu);
    let r2 = (a / b) * (a / b);
    let lead = PI.sqrt() * rgamma(nu + 0.5) / b * (1.0 + r2).powf(nu - 0.5);
    if a == 0.0 {
        return lead;
    }
    let inv_g = rgamma(nu);
    if inv_g == 0.0 {
        return lead;
    }
    let f = hyp2f1_special(nu, -r2).expect("z <= 0 is always admissible");
    lead - 2.0 * a / (b * b) * inv_g * f
}

/// (1/b) Σ_k (−)^k Γ(k/2+½)(2a/b)^k / (k! Γ(½+ν−k/2)), summed as two alternating
/// subseries (even and odd k).
fn t2_j_series(p: &JParams) -> Result<(f64, f64)> {
    let (a, b, nu) = (p.a, p.b, p.nu);
    let q2 = (2.0 * a / b).powi(2);
    let sub = |t0: f64, first: usize| -> Result<(f64, f64, usize, bool)> {
        let mut t = t0;
        let mut k = first as f64;
        let mut idx = 0usize;
        alternating_sum(
            |j| {
                while idx < j {
                    t *= (0.5 * k + 0.5) * (nu - 0.5 - 0.5 * k) * q2 / ((k + 1.0) * (k + 2.0));
                    k += 2.0;
                    idx += 1;
                }
                Ok(t)
            },
            10_000,
            None,
        )
    };
    let (even, e_err, _, _) = sub(PI.sqrt() * rgamma(0.5 + nu), 0)?;
    let (odd, o_err, _, _) = sub(-(2.0 * a / b) * rgamma(nu), 1)?;
    Ok(((even + odd) / b, (e_err + o_err) / b))
}

/// The constant −1/(2Γ(1+ν)) shared by the expansions.
fn half_recip(nu: f64) -> f64 {
    0.5 * rgamma(1.0 + nu)
}

/// T2 − 1/(2Γ(1+ν)) + (a/2π²) Σ_{m,n} (−)^m A_{m,n}(a/2π)^{2m}(b/2π)^{2n}.
pub fn sum_j_theorem1(p: &JParams, opts: &EvalOptions) -> Result<EvalResult> {
    require_theorem_region(p, MethodId::Theorem1)?;
    let head = t2_j_closed(p) - half_recip(p.nu);
    if p.a == 0.0 {
        return Ok(boundary_flag(
            EvalResult::new(head, 0.0, 1, MethodId::Theorem1),
            p.a,
            p.b,
        ));
    }
    let (x, y) = (p.a / TWO_PI, p.b / TWO_PI);
    let ds = a_double_sum(x, y, p.nu, false, opts.level);
    let scale = p.a / (2.0 * PI * PI);
    let value = head + scale * ds.value;
    let mut r = EvalResult::new(
        value,
        scale * ds.est_error + 4.0 * f64::EPSILON * head.abs(),
        ds.terms,
        MethodId::Theorem1,
    );
    if !ds.converged {
        r = r.with_flag(RegionFlag::NotConverged);
    }
    Ok(boundary_flag(r, p.a, p.b))
}

/// Number of C_k terms used by [`sum_j_theorem2`]; fixed for every a/2π below
/// `x_ceiling`, so the cost of the expansion does not depend on a.
fn theorem2_terms(table: &JCoeffTable, x_ceiling: f64) -> Result<usize> {
    let ln_x2 = 2.0 * x_ceiling.ln();
    let lead = table.c(0)?.abs();
    let mut quiet = 0;
    for k in 1..C_CACHE_LEN {
        let t = table.c(k)?.abs() * (k as f64 * ln_x2).exp();
        if t < 1e-17 * lead {
            quiet += 1;
            if quiet >= 2 {
                return Ok(k + 1);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Capacity {
        what: "theorem2 k-series".into(),
        cap: C_CACHE_LEN,
    })
}

/// Ceiling on a/2π below which the C_k and D_k forms are preferred.
pub const ASYMPTOTIC_X_MAX: f64 = 0.05;

/// T2 − 1/(2Γ(1+ν)) + (1/π) Σ_k (−)^k C_k (a/2π)^{2k+1}.
pub fn sum_j_theorem2(p: &JParams, opts: &EvalOptions) -> Result<EvalResult> {
    require_theorem_region(p, MethodId::Theorem2)?;
    let table = JCoeffTable::new(p.b, p.nu)?;
    sum_j_theorem2_with(&table, p, opts)
}

/// [`sum_j_theorem2`] reusing a coefficient table built for the same (b, ν).
pub fn sum_j_theorem2_with(
    table: &JCoeffTable,
    p: &JParams,
    opts: &EvalOptions,
) -> Result<EvalResult> {
    require_theorem_region(p, MethodId::Theorem2)?;
    if table.b != p.b || table.nu.to_bits() != p.nu.to_bits() {
        return Err(Error::Routing(
            "coefficient table was built for a different (b, nu)".into(),
        ));
    }
    let head = t2_j_closed(p) - half_recip(p.nu);
    if p.a == 0.0 {
        let r = EvalResult::new(head, 0.0, 1, MethodId::Theorem2);
        return Ok(boundary_flag(r, p.a, p.b));
    }
    let x = p.a / TWO_PI;
    let k_terms = match opts.level {
        Some(l) => l.max(1),
        None => theorem2_terms(table, x.max(ASYMPTOTIC_X_MAX))?,
    };
    let mut acc = Neumaier::new();
    let x2 = x * x;
    let mut pow = x;
    for k in 0..k_terms {
        let t = table.c(k)? * pow;
        acc.add(if k % 2 == 0 { t } else { -t });
        pow *= x2;
    }
    let next = table.c(k_terms).map(|c| c * pow).unwrap_or(0.0).abs() / PI;
    let value = head + acc.value() / PI;
    let r = EvalResult::new(
        value,
        next + 4.0 * f64::EPSILON * head.abs(),
        k_terms,
        MethodId::Theorem2,
    );
    Ok(boundary_flag(r, p.a, p.b))
}

/// The a = 0 value √π/(bΓ(ν+½)) − 1/(2Γ(1+ν)), valid for 0 < b < 2π.
pub fn sum_j_a0(b: f64, nu: f64) -> Result<EvalResult> {
    if !(nu > -0.5) {
        return Err(domain(format!("J-sum requires nu > -1/2, got nu = {nu}")));
    }
    if !(b > 0.0 && b < TWO_PI) {
        return Err(region(
            MethodId::ZeroDamping,
            format!("the a = 0 closed form requires 0 < b < 2π, got b = {b}"),
            &[],
        ));
    }
    let v = PI.sqrt() * rgamma(nu + 0.5) / b - half_recip(nu);
    let mut r = EvalResult::new(v, 4.0 * f64::EPSILON * v.abs(), 1, MethodId::ZeroDamping);
    if b / TWO_PI > NEAR_BOUNDARY {
        r = r.with_flag(RegionFlag::NearBoundary);
    }
    Ok(r)
}

/// Dispatches a named J method.
pub fn sum_j_by(method: MethodId, p: &JParams, opts: &EvalOptions) -> Result<EvalResult> {
    crate::params::require_kind(method, crate::params::SumKind::J)?;
    match method {
        MethodId::Direct => sum_j_direct(p, opts),
        MethodId::PolylogSeries => sum_j_polylog(p, opts),
        MethodId::Theorem1 => sum_j_theorem1(p, opts),
        MethodId::Theorem2 => sum_j_theorem2(p, opts),
        MethodId::ZeroDamping => {
            if p.a != 0.0 {
                return Err(region(
                    MethodId::ZeroDamping,
                    format!("the closed form holds at a = 0 only, got a = {}", p.a),
                    &[MethodId::Theorem1, MethodId::Theorem2, MethodId::Direct],
                ));
            }
            sum_j_a0(p.b, p.nu)
        }
        _ => unreachable!("require_kind filters K-only methods"),
    }
}

/// Combines S(a,b) and S(2a,2b) into the alternating sum S(a,b) − 2S(2a,2b);
/// the even-n terms of S(a,b) are exactly the terms of S(2a,2b).
pub(crate) fn combine_alternating(s1: EvalResult, s2: EvalResult, method: MethodId) -> EvalResult {
    let mut r = EvalResult::new(
        s1.value - 2.0 * s2.value,
        s1.est_error + 2.0 * s2.est_error,
        s1.terms_used + s2.terms_used,
        method,
    );
    r.flags = s1.flags.union(&s2.flags).copied().collect();
    r
}

/// Σ (−)^{n−1} e^{−an}(½bn)^{−ν}J_ν(bn) = S(a,b) − 2S(2a,2b), both parts via `method`.
pub fn sum_j_alternating(p: &JParams, method: MethodId, opts: &EvalOptions) -> Result<EvalResult> {
    let s1 = sum_j_by(method, p, opts)?;
    let s2 = sum_j_by(method, &p.doubled(), opts).map_err(|e| match e {
        Error::Region {
            method, constraint, ..
        } => Error::Region {
            method,
            constraint: format!("doubled parameters (2a, 2b): {constraint}"),
            alternatives: vec![MethodId::Direct],
        },
        other => other,
    })?;
    Ok(combine_alternating(s1, s2, method))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp(a: f64, b: f64, nu: f64) -> JParams {
        JParams::new(a, b, nu).unwrap()
    }

    fn opts() -> EvalOptions {
        EvalOptions::with_tol(1e-13)
    }

    /// Σ e^{-an} sin(bn)/n = arctan(sin b/(e^a − cos b)), scaled to the ν = ½ kernel.
    fn arctan_oracle(a: f64, b: f64) -> f64 {
        2.0 / (PI.sqrt() * b) * (b.sin() / (a.exp() - b.cos())).atan()
    }

    fn alt_arctan_oracle(a: f64, b: f64) -> f64 {
        2.0 / (PI.sqrt() * b) * (b.sin() / (a.exp() + b.cos())).atan()
    }

    #[test]
    fn direct_matches_arctan_oracle() {
        let v = sum_j_direct(&jp(0.1, 1.0, 0.5), &EvalOptions::with_tol(1e-12)).unwrap();
        assert!((v.value - arctan_oracle(0.1, 1.0)).abs() < 1e-11);
    }

    #[test]
    fn direct_heavy_damping_is_dominated_by_first_terms() {
        let p = jp(5.0, 1.0, 1.0);
        let v = sum_j_direct(&p, &EvalOptions::with_tol(1e-12))
            .unwrap()
            .value;
        let few: f64 = (1..=2)
            .map(|n| (-5.0 * n as f64).exp() * j_scaled_unchecked(1.0, n as f64))
            .sum();
        assert!((v - few).abs() < 2.0 * (-10.0f64).exp());
    }

    #[test]
    fn direct_and_polylog_agree_at_a_equals_b() {
        let p = jp(1.0, 1.0, 0.25);
        let d = sum_j_direct(&p, &opts()).unwrap().value;
        let l = sum_j_polylog(&p, &opts()).unwrap();
        assert!((d - l.value).abs() < 1e-10, "{d} vs {}", l.value);
        assert!(l.has_flag(RegionFlag::ConditionalConvergence));
    }

    #[test]
    fn polylog_small_b_limit() {
        for nu in [-0.2, 0.5, 2.0] {
            let a = 0.7;
            let v = sum_j_polylog(&jp(a, 1e-8, nu), &opts()).unwrap().value;
            let e = rgamma(1.0 + nu) / a.exp_m1();
            assert!((v - e).abs() < 1e-10 * e.abs());
        }
    }

    #[test]
    fn polylog_matches_oracles() {
        let v = sum_j_polylog(&jp(2.0, 1.0, 0.5), &opts()).unwrap().value;
        assert!((v - arctan_oracle(2.0, 1.0)).abs() < 1e-11);
        let p = jp(1.5, 1.5, 0.75);
        let l = sum_j_polylog(&p, &opts()).unwrap().value;
        let d = sum_j_direct(&p, &opts()).unwrap().value;
        assert!((l - d).abs() < 1e-9);
        assert!(matches!(
            sum_j_polylog(&jp(0.5, 1.0, 0.5), &opts()),
            Err(Error::Region { .. })
        ));
    }

    #[test]
    fn coefficient_a_values() {
        let nu = 0.3;
        let a00 = coeff_a(0, 0, nu).unwrap();
        assert!((a00 - PI * PI / 6.0 * rgamma(1.0 + nu)).abs() < 1e-14);
        for (m, n) in [(0, 3), (1, 2)] {
            let x = coeff_a(m, n, 0.5).unwrap();
            let y = coeff_a(n, m, 0.5).unwrap();
            assert!((x - y).abs() < 1e-13 * x);
        }
        // plain product of gamma and zeta values
        let direct = [
            5040.0,
            crate::special::gamma(8.5).unwrap(),
            zeta(16.0).unwrap(),
        ];
        let den =
            6.0 * 24.0 * crate::special::gamma(4.5).unwrap() * crate::special::gamma(5.25).unwrap();
        let expect = direct.iter().product::<f64>() / den;
        let v = coeff_a(3, 4, 0.25).unwrap();
        assert!(v > 0.0 && (v - expect).abs() < 1e-12 * expect);
        assert!(matches!(
            coeff_a(COEFF_CAP + 1, 0, 0.5),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn a_ratio_grows_polynomially() {
        let t = JCoeffTable::new(1.0, 0.4).unwrap();
        for m in [0, 5, 20] {
            for n in 0..40 {
                let r = t.a(m, n + 1).unwrap() / t.a(m, n).unwrap();
                let bound = ((m + n + 2) as f64).powi(2) / ((n + 1) as f64 * (n as f64 + 1.4));
                assert!(r > 0.0 && r <= bound * 1.0001, "m = {m}, n = {n}");
            }
        }
    }

    #[test]
    fn t2_forms() {
        let p = jp(0.0, 2.0, 0.3);
        let c = t2_j(&p, T2Form::Closed).unwrap();
        assert!((c - PI.sqrt() * rgamma(0.8) / 2.0).abs() < 1e-15);
        let p = jp(0.5, 1.0, 0.75);
        let s = t2_j(&p, T2Form::Series).unwrap();
        let c = t2_j(&p, T2Form::Closed).unwrap();
        assert!((s - c).abs() < 1e-11);
        let p = jp(0.3, 1.0, 0.5);
        let expect = PI.sqrt() - 2.0 * 0.3f64.atan() / PI.sqrt();
        assert!((t2_j(&p, T2Form::Closed).unwrap() - expect).abs() < 1e-12);
        assert!((t2_j(&p, T2Form::Series).unwrap() - expect).abs() < 1e-12);
        // conditional convergence at a = b
        let p = jp(1.0, 1.0, 0.25);
        let s = t2_j(&p, T2Form::Series).unwrap();
        let c = t2_j(&p, T2Form::Closed).unwrap();
        assert!((s - c).abs() < 1e-10, "{s} vs {c}");
    }

    #[test]
    fn theorem1_cases() {
        let p = jp(0.0, 1.0, 0.75);
        let a0 = PI.sqrt() * rgamma(1.25) - 0.5 * rgamma(1.75);
        assert!((sum_j_theorem1(&p, &opts()).unwrap().value - a0).abs() < 1e-14);
        let v = sum_j_theorem1(&jp(0.1, 1.0, 0.5), &opts()).unwrap().value;
        assert!((v - arctan_oracle(0.1, 1.0)).abs() < 1e-10);
        let p = jp(1.0, 1.0, 0.25);
        let t = sum_j_theorem1(&p, &opts()).unwrap().value;
        let l = sum_j_polylog(&p, &opts()).unwrap().value;
        assert!((t - l).abs() < 1e-9);
        assert!(matches!(
            sum_j_theorem1(&jp(1.0, 0.5, 0.5), &opts()),
            Err(Error::Region { .. })
        ));
        assert!(matches!(
            sum_j_theorem1(&jp(1.0, 6.0, 0.5), &opts()),
            Err(Error::Region { .. })
        ));
    }

    #[test]
    fn coefficient_c_values() {
        let nu = 0.7;
        let c0 = coeff_c(0, 1e-9, nu).unwrap();
        assert!((c0 - coeff_a(0, 0, nu).unwrap()).abs() < 1e-14);
        let y2 = (1.0 / TWO_PI).powi(2);
        let partial: f64 = (0..40)
            .map(|n| coeff_a(0, n, 0.5).unwrap() * y2.powi(n as i32))
            .sum();
        assert!((coeff_c(0, 1.0, 0.5).unwrap() - partial).abs() < 1e-14 * partial);
        let t1 = JCoeffTable::new(1.0, 0.5).unwrap();
        let t6 = JCoeffTable::new(6.0, 0.5).unwrap();
        assert!(t6.c(2).unwrap().is_finite());
        assert!(t6.c_terms(2).unwrap() > t1.c_terms(2).unwrap());
        assert!(coeff_c(0, 7.0, 0.5).is_err());
    }

    #[test]
    fn theorem2_agrees_with_theorem1() {
        for (a, b, nu) in [
            (0.2, 1.0, 0.3),
            (0.9, 2.0, 1.3),
            (2.0, 3.5, -0.25),
            (0.05, 0.05, 0.5),
        ] {
            let p = jp(a, b, nu);
            let t1 = sum_j_theorem1(&p, &opts()).unwrap().value;
            let t2 = sum_j_theorem2(&p, &opts()).unwrap().value;
            assert!(
                (t1 - t2).abs() < 1e-10 * (1.0 + t1.abs()),
                "{a},{b},{nu}: {t1} vs {t2}"
            );
        }
    }

    #[test]
    fn theorem2_small_a() {
        let p = jp(1e-3, 1.0, 0.5);
        let r = sum_j_theorem2(&p, &opts()).unwrap();
        assert!((r.value - arctan_oracle(1e-3, 1.0)).abs() < 1e-12);
        let terms: Vec<usize> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&a| {
                sum_j_theorem2(&jp(a, 1.0, 0.5), &opts())
                    .unwrap()
                    .terms_used
            })
            .collect();
        assert!(terms.iter().all(|&t| t == terms[0] && t <= 10), "{terms:?}");
        let z = sum_j_theorem2(&jp(0.0, 2.0, 0.4), &opts()).unwrap().value;
        assert_eq!(z, sum_j_a0(2.0, 0.4).unwrap().value);
    }

    #[test]
    fn zero_damping_closed_form() {
        let v = sum_j_a0(1.0, 0.5).unwrap().value;
        assert!((v - (PI.sqrt() - 1.0 / PI.sqrt())).abs() < 1e-15);
        let cot_half = 1.0 / 0.5f64.tan();
        assert!((v - 2.0 / PI.sqrt() * cot_half.atan()).abs() < 1e-14);
        let r = sum_j_a0(TWO_PI - 1e-9, 1.0).unwrap();
        assert!(r.value.is_finite() && r.has_flag(RegionFlag::NearBoundary));
        assert!(matches!(sum_j_a0(7.0, 1.0), Err(Error::Region { .. })));
    }

    #[test]
    fn alternating_variant() {
        let p = jp(0.2, 1.0, 0.5);
        let r = sum_j_alternating(&p, MethodId::Theorem1, &opts()).unwrap();
        assert!((r.value - alt_arctan_oracle(0.2, 1.0)).abs() < 1e-11);
        let s = sum_j_theorem1(&p, &opts()).unwrap().value;
        let s2 = sum_j_theorem1(&p.doubled(), &opts()).unwrap().value;
        assert!((r.value + 2.0 * s2 - s).abs() < 1e-12);

        let p = jp(0.1, 3.2, 1.0);
        assert!(matches!(
            sum_j_alternating(&p, MethodId::Theorem1, &opts()),
            Err(Error::Region { .. })
        ));
        let d = sum_j_alternating(&p, MethodId::Direct, &opts())
            .unwrap()
            .value;
        let mut acc = 0.0;
        for n in 1..2000 {
            let nf = n as f64;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * (-0.1 * nf).exp() * j_scaled_unchecked(1.0, 3.2 * nf);
        }
        assert!((d - acc).abs() < 1e-10);
    }
}
