//! Evaluation paths for S_K(a, b) = Σ_{n≥1} e^{-an} (½bn)^{-ν} K_ν(bn).

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::bessel::k_scaled_unchecked;
use crate::error::{domain, region, Error, Result};
use crate::hyp2f1::hyp2f1_special;
use crate::params::{EvalOptions, EvalResult, KParams, MethodId, RegionFlag, SumKind};
use crate::polylog::{polylog_direct_ln, polylog_ln, polylog_neg_int_ln, NEG_INT_CAP};
use crate::series::{euler_average, Neumaier};
use crate::special::{
    digamma, gamma, ln_gamma, ln_gamma_signed, rgamma, sin_pi, zeta_ln_signed, zeta_neg_int_ln,
    zeta_prime_neg_int_ln, zeta_times_sm1, EULER_GAMMA,
};
use crate::sum_j::{
    a_double_sum, c_series, combine_alternating, DoubleSum, ASYMPTOTIC_X_MAX, COEFF_CAP,
    MAX_DIAGONAL, TWO_PI,
};

/// Minimum distance of ν from {0, ½, 1, 3/2, …} for the residue expansion.
pub const NU_GUARD: f64 = 1e-3;
/// t2_k switches from the closed form to the series above this a/b.
pub const T2_CLOSED_MAX_RATIO: f64 = 0.9;
/// Half-width of the symmetric ν-offsets used at integer ν.
pub const EPSILON_OFFSET: f64 = 1e-4;
/// Agreement required between the ε-average and direct summation.
const EPSILON_CHECK: f64 = 1e-6;
/// ζ·sin in B_{m,n} is evaluated jointly within this distance of the ζ pole.
const POLE_WINDOW: f64 = 0.05;
/// Largest w handled by the ζ-series of [`exp_sum_int`].
pub const EXP_SUM_MAX_W: u32 = 20;

const NEAR_BOUNDARY: f64 = 0.9;
const EULER_AFTER: usize = 20;
const EULER_TERMS: usize = 48;
const C_CACHE_LEN: usize = 256;

/// Distance from ν to the nearest element of {0, ½, 1, 3/2, …}.
pub fn excluded_distance(nu: f64) -> f64 {
    (2.0 * nu - (2.0 * nu).round()).abs() / 2.0
}

fn guard_nu(method: MethodId, nu: f64) -> Result<()> {
    if excluded_distance(nu) <= NU_GUARD {
        return Err(Error::Conditioning {
            method,
            reason: format!(
                "nu = {nu} lies within {NU_GUARD} of the excluded set {{0, 1/2, 1, 3/2, ...}}"
            ),
            alternatives: vec![
                MethodId::Nu0Limit,
                MethodId::HalfInteger,
                MethodId::EpsilonAverage,
                MethodId::Direct,
            ],
        });
    }
    Ok(())
}

fn require_theorem_region(p: &KParams, method: MethodId) -> Result<()> {
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

fn boundary_flag(r: EvalResult, a: f64, b: f64) -> EvalResult {
    if (a + b) / TWO_PI > NEAR_BOUNDARY {
        r.with_flag(RegionFlag::NearBoundary)
    } else {
        r
    }
}

fn sign_of(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// (sign, ln|ζ(s) sin(π(m/2 − ν))|) with s = m + 2n + 1 − 2ν; near s = 1 the pole
/// of ζ and the zero of sin are combined as (−)^n (s−1)ζ(s)·sin(πε)/(2ε), ε = (s−1)/2.
fn zeta_sin_ln(m: usize, n: usize, nu: f64) -> (f64, f64) {
    let s = m as f64 + 2.0 * n as f64 + 1.0 - 2.0 * nu;
    let parity = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    if (s - 1.0).abs() < POLE_WINDOW {
        let eps = 0.5 * (s - 1.0);
        let sinc = if eps == 0.0 { PI } else { sin_pi(eps) / eps };
        let v = parity * zeta_times_sm1(s) * 0.5 * sinc;
        return (sign_of(v), v.abs().ln());
    }
    let (zs, zl) = zeta_ln_signed(s).expect("s != 1 outside the pole window");
    let sn = sin_pi(0.5 * m as f64 - nu);
    if zs == 0.0 || sn == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    (zs * sign_of(sn), zl + sn.abs().ln())
}

/// (sign, ln|B_{m,n}|) without the excluded-ν guard.
fn coeff_b_ln_unchecked(m: usize, n: usize, nu: f64) -> (f64, f64) {
    let h = 0.5 * m as f64 + n as f64;
    let nf = n as f64;
    let (g1, s1) = ln_gamma_signed(h + 0.5 - nu);
    let (g2, s2) = ln_gamma_signed(h + 1.0 - nu);
    let (g3, s3) = ln_gamma_signed(nf + 1.0 - nu);
    let (zs, zl) = zeta_sin_ln(m, n, nu);
    let mh = 0.5 * m as f64;
    let ln = g1 + g2 + zl - ln_gamma(mh + 0.5) - ln_gamma(mh + 1.0) - ln_gamma(nf + 1.0) - g3;
    (s1 * s2 * s3 * zs, ln)
}

/// B_{m,n} = Γ(m/2+n+½−ν)Γ(m/2+n+1−ν) ζ(m+2n+1−2ν) sin(π(m/2−ν)) / (Γ(m/2+½)Γ(m/2+1) n! Γ(n+1−ν)).
pub fn coeff_b(m: usize, n: usize, nu: f64) -> Result<f64> {
    if m.max(n) > COEFF_CAP {
        return Err(Error::Capacity {
            what: format!("B_{{m,n}} index {}", m.max(n)),
            cap: COEFF_CAP,
        });
    }
    guard_nu(MethodId::Theorem3, nu)?;
    let (s, l) = coeff_b_ln_unchecked(m, n, nu);
    Ok(s * l.exp())
}

/// C′_k = Σ_n (−)^n B_{k,n} y^{2n−2ν}, y = b/2π, without the ν guard.
fn c_prime_unchecked(k: usize, b: f64, nu: f64) -> Result<(f64, usize)> {
    let y = b / TWO_PI;
    if !(y < 1.0) {
        return Err(region(
            MethodId::Theorem3Asymptotic,
            format!("C'_k diverges unless b < 2π, got b = {b}"),
            &[MethodId::Direct],
        ));
    }
    let ln_y = y.ln();
    let mut acc = Neumaier::new();
    let mut peak = 0.0f64;
    let mut n = 0usize;
    loop {
        let (s, l) = coeff_b_ln_unchecked(k, n, nu);
        let t = (l + (2.0 * n as f64 - 2.0 * nu) * ln_y).exp();
        let signed = if n.is_multiple_of(2) { s * t } else { -s * t };
        acc.add(signed);
        n += 1;
        // terms decay once past their peak
        if t < peak && t < 1e-17 * acc.value().abs().max(peak * 1e-3) {
            return Ok((acc.value(), n));
        }
        peak = peak.max(t);
        if n > 20_000 {
            return Err(Error::Capacity {
                what: format!("C'_{k} n-series at b = {b}"),
                cap: 20_000,
            });
        }
    }
}

/// C′_k(b, ν).
pub fn coeff_c_prime(k: usize, b: f64, nu: f64) -> Result<f64> {
    guard_nu(MethodId::Theorem3Asymptotic, nu)?;
    c_prime_unchecked(k, b, nu).map(|(v, _)| v)
}

/// C̃_k = Σ_n (−)^n A_{k,n} y^{2n}, the n-alternating companion of C_k.
pub fn coeff_c_tilde(k: usize, b: f64, nu: f64) -> Result<f64> {
    c_series(k, b, nu, true).map(|(v, _)| v)
}

fn d_from_parts(k: usize, c_prime: f64, c_tilde: impl FnOnce(usize) -> Result<f64>) -> Result<f64> {
    if k.is_multiple_of(2) {
        return Ok(c_prime);
    }
    let j = k / 2;
    // D_{2j+1} = C′_{2j+1} − (−)^j C̃_j
    let ct = c_tilde(j)?;
    Ok(if j.is_multiple_of(2) {
        c_prime - ct
    } else {
        c_prime + ct
    })
}

/// D_{2k} = C′_{2k}, D_{2k+1} = C′_{2k+1} + (−)^{k−1} C̃_k.
pub fn coeff_d(k: usize, b: f64, nu: f64) -> Result<f64> {
    let cp = coeff_c_prime(k, b, nu)?;
    d_from_parts(k, cp, |j| coeff_c_tilde(j, b, nu))
}

/// Lazily filled C′_k, C̃_k and D_k for fixed (b, ν).
#[derive(Debug)]
pub struct KCoeffTable {
    pub nu: f64,
    pub b: f64,
    c_prime: Vec<OnceLock<Result<f64>>>,
    c_tilde: Vec<OnceLock<Result<f64>>>,
}

impl KCoeffTable {
    pub fn new(b: f64, nu: f64) -> Result<Self> {
        if !(b > 0.0 && b < TWO_PI) {
            return Err(region(
                MethodId::Theorem3Asymptotic,
                format!("coefficient table requires 0 < b < 2π, got b = {b}"),
                &[MethodId::Direct],
            ));
        }
        Ok(Self::new_unchecked(b, nu))
    }

    fn new_unchecked(b: f64, nu: f64) -> Self {
        KCoeffTable {
            nu,
            b,
            c_prime: (0..C_CACHE_LEN).map(|_| OnceLock::new()).collect(),
            c_tilde: (0..C_CACHE_LEN).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn c_prime(&self, k: usize) -> Result<f64> {
        let f = || c_prime_unchecked(k, self.b, self.nu).map(|(v, _)| v);
        match self.c_prime.get(k) {
            Some(cell) => cell.get_or_init(f).clone(),
            None => f(),
        }
    }

    pub fn c_tilde(&self, k: usize) -> Result<f64> {
        let f = || coeff_c_tilde(k, self.b, self.nu);
        match self.c_tilde.get(k) {
            Some(cell) => cell.get_or_init(f).clone(),
            None => f(),
        }
    }

    pub fn d(&self, k: usize) -> Result<f64> {
        d_from_parts(k, self.c_prime(k)?, |j| self.c_tilde(j))
    }
}

/// Σ_{m,n} (−)^{m+n} B_{m,n} x^m y^{2n−2ν} swept by degree D = m + 2n.
fn b_double_sum(x: f64, y: f64, nu: f64, level: Option<usize>) -> DoubleSum {
    let ln_x = x.ln();
    let ln_y = y.ln();
    let ln_r = 2.0 * (ln_x - ln_y);
    let max_deg = level.map_or(2 * MAX_DIAGONAL, |l| {
        l.saturating_sub(1).min(2 * MAX_DIAGONAL)
    });
    let mut total = Neumaier::new();
    let mut abs_sum = 0.0;
    let mut terms = 0;
    let mut quiet = 0;
    let mut last_max = 0.0;
    for deg in 0..=max_deg {
        let m0 = deg % 2;
        let n0 = deg / 2;
        if x == 0.0 && m0 == 1 {
            continue;
        }
        let (s0, l0) = coeff_b_ln_unchecked(m0, n0, nu);
        let mut sign = s0 * if (m0 + n0) % 2 == 0 { 1.0 } else { -1.0 };
        let mut ln_t =
            l0 + m0 as f64 * if m0 == 0 { 0.0 } else { ln_x } + (2.0 * n0 as f64 - 2.0 * nu) * ln_y;
        let mut diag = Neumaier::new();
        let mut max_t: f64 = 0.0;
        let mut m = m0;
        let mut n = n0;
        loop {
            let t = ln_t.exp();
            diag.add(sign * t);
            max_t = max_t.max(t);
            abs_sum += t;
            terms += 1;
            if n == 0 || x == 0.0 {
                break;
            }
            // T(m+2, n−1)/T(m, n) = n(n−ν)(x/y)² / ((m/2+½)(m/2+1))
            let nf = n as f64;
            let mh = 0.5 * m as f64;
            let f = nf - nu;
            sign *= sign_of(f);
            ln_t += (nf * f.abs() / ((mh + 0.5) * (mh + 1.0))).ln() + ln_r;
            m += 2;
            n -= 1;
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

/// Which T2 representation to evaluate.
pub use crate::sum_j::T2Form;

/// T2 for the K-sum.
///
/// Series: (1/(2b)) Σ_k (−)^k Γ(k/2+½)Γ(k/2+½−ν)(2a/b)^k/k!. Closed:
/// (√π/(2b))Γ(½−ν)(1−a²/b²)^{ν−½} − (a/b²)Γ(1−ν)·₂F₁(1,1−ν;3/2;a²/b²).
pub fn t2_k(p: &KParams, form: T2Form) -> Result<f64> {
    if p.a > p.b {
        return Err(region(
            MethodId::Theorem3,
            format!("T2 requires a <= b, got a = {} > b = {}", p.a, p.b),
            &[MethodId::PolylogSeries, MethodId::Direct],
        ));
    }
    match form {
        T2Form::Closed => {
            if p.a / p.b > T2_CLOSED_MAX_RATIO {
                return Err(Error::Routing(format!(
                    "closed-form T2 cancels catastrophically for a/b > {T2_CLOSED_MAX_RATIO}; use the series form"
                )));
            }
            t2_k_closed(p.a, p.b, p.nu)
        }
        T2Form::Series => t2_k_series(p.a, p.b, p.nu).map(|(v, _, _)| v),
    }
}

fn t2_k_closed(a: f64, b: f64, nu: f64) -> Result<f64> {
    let r2 = (a / b) * (a / b);
    let lead = PI.sqrt() / (2.0 * b) * gamma(0.5 - nu)? * (1.0 - r2).powf(nu - 0.5);
    if a == 0.0 {
        return Ok(lead);
    }
    Ok(lead - a / (b * b) * gamma(1.0 - nu)? * hyp2f1_special(nu, r2)?)
}

/// Returns (value, error estimate, accelerated).
fn t2_k_series(a: f64, b: f64, nu: f64) -> Result<(f64, f64, bool)> {
    let q = 2.0 * a / b;
    let q2 = q * q;
    let mut even = PI.sqrt() * gamma(0.5 - nu)?;
    let mut odd = -gamma(1.0 - nu)? * q;
    let mut acc = Neumaier::new();
    let mut partials = Vec::with_capacity(EULER_AFTER + EULER_TERMS + 1);
    let mut quiet = 0;
    let mut k = 0usize;
    while k < 20_000 {
        let t = if k.is_multiple_of(2) { even } else { odd };
        acc.add(t);
        partials.push(acc.value());
        let kf = k as f64;
        // t_{k+2} = t_k (k/2+½)(k/2+½−ν)(2a/b)²/((k+1)(k+2))
        let step = (0.5 * kf + 0.5) * (0.5 * kf + 0.5 - nu) * q2 / ((kf + 1.0) * (kf + 2.0));
        if k.is_multiple_of(2) {
            even *= step;
        } else {
            odd *= step;
        }
        k += 1;
        if t.abs() <= 1e-17 * acc.value().abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok((acc.value() / (2.0 * b), t.abs() / (2.0 * b), false));
            }
        } else {
            quiet = 0;
        }
        if a / b > T2_CLOSED_MAX_RATIO && partials.len() == EULER_AFTER + EULER_TERMS {
            let (v, e) = euler_average(&partials[EULER_AFTER - 1..]);
            return Ok((v / (2.0 * b), e / (2.0 * b), true));
        }
    }
    Ok((acc.value() / (2.0 * b), f64::INFINITY, false))
}

/// Theorem-3 value at non-excluded ν with no guard; returns the result and
/// whether conditional-convergence acceleration was used.
fn theorem3_core(a: f64, b: f64, nu: f64, opts: &EvalOptions) -> Result<(EvalResult, bool)> {
    let (x, y) = (a / TWO_PI, b / TWO_PI);
    let (t2, t2_err, accel) = if a / b <= T2_CLOSED_MAX_RATIO {
        (t2_k_closed(a, b, nu)?, 0.0, false)
    } else {
        t2_k_series(a, b, nu)?
    };
    let sn = sin_pi(nu);
    let constant = PI / (4.0 * sn) * rgamma(1.0 + nu);
    let da = if a == 0.0 {
        DoubleSum {
            value: 0.0,
            est_error: 0.0,
            terms: 0,
            converged: true,
        }
    } else {
        a_double_sum(x, y, nu, true, opts.level)
    };
    let db = b_double_sum(x, y, nu, opts.level);
    let ds = x * da.value + db.value;
    let scale = 0.5 / sn.abs();
    let value = t2 + constant - ds / (2.0 * sn);
    let err = t2_err
        + scale * (x * da.est_error + db.est_error)
        + 4.0 * f64::EPSILON * (t2.abs() + constant.abs() + scale * ds.abs());
    let mut r = EvalResult::new(value, err, da.terms + db.terms, MethodId::Theorem3);
    if !(da.converged && db.converged) {
        r = r.with_flag(RegionFlag::NotConverged);
    }
    Ok((r, accel))
}

/// Double-sum expansion: T2 + π csc(πν)/(4Γ(1+ν)) − (1/(2 sin πν)) Σ (−)^{m+n}{A_{m,n}x^{2m+1}y^{2n} + B_{m,n}x^m y^{2n−2ν}}.
pub fn sum_k_theorem3(p: &KParams, opts: &EvalOptions) -> Result<EvalResult> {
    require_theorem_region(p, MethodId::Theorem3)?;
    guard_nu(MethodId::Theorem3, p.nu)?;
    let (mut r, accel) = theorem3_core(p.a, p.b, p.nu, opts)?;
    if accel || p.a == p.b && p.nu < 0.5 {
        r = r.with_flag(RegionFlag::ConditionalConvergence);
    }
    Ok(boundary_flag(r, p.a, p.b))
}

fn theorem3_terms(table: &KCoeffTable, x_ceiling: f64) -> Result<usize> {
    let ln_x = x_ceiling.ln();
    let lead = table.d(0)?.abs().max(table.d(1)?.abs() * x_ceiling);
    let mut quiet = 0;
    for k in 1..C_CACHE_LEN {
        let t = table.d(k)?.abs() * (k as f64 * ln_x).exp();
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
        what: "D_k series".into(),
        cap: C_CACHE_LEN,
    })
}

/// The double-sum expansion with the double sum replaced by −(1/(2 sin πν)) Σ_k (−)^k D_k (a/2π)^k.
pub fn sum_k_theorem3_asymptotic(p: &KParams, opts: &EvalOptions) -> Result<EvalResult> {
    require_theorem_region(p, MethodId::Theorem3Asymptotic)?;
    guard_nu(MethodId::Theorem3Asymptotic, p.nu)?;
    let table = KCoeffTable::new(p.b, p.nu)?;
    sum_k_theorem3_asymptotic_with(&table, p, opts)
}

/// [`sum_k_theorem3_asymptotic`] reusing a table built for the same (b, ν).
pub fn sum_k_theorem3_asymptotic_with(
    table: &KCoeffTable,
    p: &KParams,
    opts: &EvalOptions,
) -> Result<EvalResult> {
    require_theorem_region(p, MethodId::Theorem3Asymptotic)?;
    guard_nu(MethodId::Theorem3Asymptotic, p.nu)?;
    if table.b != p.b || table.nu.to_bits() != p.nu.to_bits() {
        return Err(Error::Routing(
            "coefficient table was built for a different (b, nu)".into(),
        ));
    }
    let (a, b, nu) = (p.a, p.b, p.nu);
    let x = a / TWO_PI;
    let (t2, t2_err, accel) = if a / b <= T2_CLOSED_MAX_RATIO {
        (t2_k_closed(a, b, nu)?, 0.0, false)
    } else {
        t2_k_series(a, b, nu)?
    };
    let sn = sin_pi(nu);
    let constant = PI / (4.0 * sn) * rgamma(1.0 + nu);
    let k_terms = match opts.level {
        Some(l) => l.max(1),
        None if x == 0.0 => 1,
        None => theorem3_terms(table, x.max(ASYMPTOTIC_X_MAX))?,
    };
    let mut acc = Neumaier::new();
    let mut pow = 1.0;
    for k in 0..k_terms {
        let t = table.d(k)? * pow;
        acc.add(if k % 2 == 0 { t } else { -t });
        pow *= x;
    }
    let next = if x == 0.0 {
        0.0
    } else {
        table.d(k_terms).map(|d| d * pow).unwrap_or(0.0).abs()
    };
    let value = t2 + constant - acc.value() / (2.0 * sn);
    let scale = 0.5 / sn.abs();
    let err = t2_err
        + scale * next
        + 4.0 * f64::EPSILON * (t2.abs() + constant.abs() + scale * acc.value().abs());
    let mut r = EvalResult::new(value, err, k_terms, MethodId::Theorem3Asymptotic);
    if accel {
        r = r.with_flag(RegionFlag::ConditionalConvergence);
    }
    Ok(boundary_flag(r, a, b))
}

/// Tail bound for direct summation: the kernel times e^x decreases in x, so the
/// remainder after term T_N is at most T_N e^{−(a+b)}/(1 − e^{−(a+b)}).
fn k_tail(term: f64, a: f64, b: f64) -> f64 {
    let q = -(a + b);
    term * q.exp() / -q.exp_m1()
}

/// Literal summation; converges for every a ≥ 0 by the exponential decay of K_ν.
pub fn sum_k_direct(p: &KParams, opts: &EvalOptions) -> Result<EvalResult> {
    let tol = opts.tol.max(1e-16);
    let (a, b, nu) = (p.a, p.b, p.nu);
    let crude = ((1.0 + rgamma(nu + 1.0).abs()) / tol).ln() / (a + b);
    let n_min = crude.ceil().max(1.0) as usize + 10;
    let mut acc = Neumaier::new();
    let mut n = 0usize;
    let mut tail;
    loop {
        n += 1;
        let nf = n as f64;
        let t = (-a * nf).exp() * k_scaled_unchecked(nu, b * nf);
        acc.add(t);
        tail = k_tail(t, a, b);
        match opts.level {
            Some(l) if n >= l.max(1) => break,
            Some(_) => {}
            None => {
                if n >= n_min && tail < tol.min(1e-17 * acc.value().abs()).max(tol * 1e-6) {
                    break;
                }
                if n >= opts.max_terms {
                    let r = EvalResult::new(acc.value(), tail, n, MethodId::Direct);
                    return Ok(r.with_flag(RegionFlag::NotConverged));
                }
            }
        }
    }
    Ok(EvalResult::new(acc.value(), tail, n, MethodId::Direct))
}

/// (π/(2 sin πν)) {Σ_k (½b)^{2k−2ν} Li_{2ν−2k}(e^{−a})/(k!Γ(1−ν+k)) − Σ_k (½b)^{2k} Li_{−2k}(e^{−a})/(k!Γ(1+ν+k))}, a > b.
pub fn sum_k_polylog(p: &KParams, opts: &EvalOptions) -> Result<EvalResult> {
    if p.a <= p.b {
        return Err(region(
            MethodId::PolylogSeries,
            format!("requires a > b, got a = {}, b = {}", p.a, p.b),
            &[
                MethodId::Theorem3,
                MethodId::Theorem3Asymptotic,
                MethodId::Direct,
            ],
        ));
    }
    if excluded_distance(p.nu) <= NU_GUARD {
        return Err(Error::Conditioning {
            method: MethodId::PolylogSeries,
            reason: format!(
                "nu = {} lies within {NU_GUARD} of an integer or half-integer, where csc(pi nu) or Li of positive integer order breaks the series",
                p.nu
            ),
            alternatives: vec![MethodId::HalfInteger, MethodId::Direct],
        });
    }
    let (a, b, nu) = (p.a, p.b, p.nu);
    let ln_hb = (0.5 * b).ln();
    let cap = (NEG_INT_CAP as usize / 2).min(opts.max_terms);
    let n_terms = opts.level.map(|l| l.max(1).min(cap + 1));
    let mut s1 = Neumaier::new();
    let mut s2 = Neumaier::new();
    let mut abs_sum = 0.0;
    let mut quiet = 0;
    let mut last = f64::INFINITY;
    let mut used = 0;
    for k in 0..=cap {
        let kf = k as f64;
        let (lg, sg) = ln_gamma_signed(1.0 - nu + kf);
        let l1 = (2.0 * kf - 2.0 * nu) * ln_hb + polylog_ln(2.0 * nu - 2.0 * kf, a)?
            - ln_gamma(kf + 1.0)
            - lg;
        let t1 = sg * l1.exp();
        let l2 = 2.0 * kf * ln_hb + polylog_neg_int_ln(2 * k as u32, a)?
            - ln_gamma(kf + 1.0)
            - ln_gamma(1.0 + nu + kf);
        let t2 = l2.exp();
        s1.add(t1);
        s2.add(t2);
        abs_sum += t1.abs() + t2.abs();
        used = k + 1;
        last = (t1 - t2).abs();
        if let Some(l) = n_terms {
            if used >= l {
                break;
            }
            continue;
        }
        if t1.abs().max(t2.abs()) <= 1e-17 * (s1.value().abs() + s2.value().abs()) {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let pref = PI / (2.0 * sin_pi(nu));
    let value = pref * (s1.value() - s2.value());
    let err = pref.abs() * (last + 4.0 * f64::EPSILON * abs_sum);
    let mut r = EvalResult::new(value, err, used, MethodId::PolylogSeries);
    if n_terms.is_none() && quiet < 2 {
        r = r.with_flag(RegionFlag::NotConverged);
    }
    Ok(r)
}

/// θ/(b sin θ) with θ = arccos(a/b), written to stay accurate as a → b; equals 1/b at a = b.
pub fn nu0_bracket(a: f64, b: f64) -> f64 {
    if a == b {
        return 1.0 / b;
    }
    let theta = 2.0 * ((b - a) / (2.0 * b)).sqrt().asin();
    theta / (b * theta.sin())
}

/// The ν = 0 limit: Σ_{m,n} (−)^m a^m(½b)^{2n}/(m!(n!)²)·{ζ′(−2n−m) + ζ(−2n−m)(ψ(n+1) − ln ½b)} + bracket.
pub fn sum_k_nu0(a: f64, b: f64, opts: &EvalOptions) -> Result<EvalResult> {
    let p = KParams::new(a, b, 0.0)?;
    require_theorem_region(&p, MethodId::Nu0Limit)?;
    let ln_a = a.ln();
    let ln_hb = (0.5 * b).ln();
    let ln_2pi = TWO_PI.ln();
    let max_deg = opts.level.map_or(2 * MAX_DIAGONAL, |l| {
        l.saturating_sub(1).min(2 * MAX_DIAGONAL)
    });
    let mut total = Neumaier::new();
    let mut abs_sum = 0.0;
    let mut terms = 0;
    let mut quiet = 0;
    let mut last_max = 0.0;
    let mut converged = opts.level.is_some();
    for deg in 0..=max_deg {
        if a == 0.0 && deg % 2 == 1 {
            continue;
        }
        let k = deg as u32;
        let scale = ln_gamma(deg as f64 + 1.0) - deg as f64 * ln_2pi;
        let (ps, pl) = zeta_prime_neg_int_ln(k);
        let (zs, zl) = zeta_neg_int_ln(k);
        let zp = ps * (pl - scale).exp();
        let zz = if zs == 0.0 {
            0.0
        } else {
            zs * (zl - scale).exp()
        };
        let mut diag = Neumaier::new();
        let mut max_t: f64 = 0.0;
        let n_lo = if a == 0.0 { deg / 2 } else { 0 };
        for n in n_lo..=deg / 2 {
            let m = deg - 2 * n;
            let (mf, nf) = (m as f64, n as f64);
            let psi = digamma(nf + 1.0)?;
            let bracket = zp + zz * (psi - ln_hb);
            let lm = if m == 0 { 0.0 } else { mf * ln_a };
            let ln_t =
                scale + lm + 2.0 * nf * ln_hb - ln_gamma(mf + 1.0) - 2.0 * ln_gamma(nf + 1.0);
            let t = ln_t.exp() * bracket;
            let t = if m % 2 == 0 { t } else { -t };
            diag.add(t);
            max_t = max_t.max(t.abs());
            abs_sum += t.abs();
            terms += 1;
        }
        total.add(diag.value());
        last_max = max_t;
        if opts.level.is_none() {
            if max_t <= 1e-17 * total.value().abs() {
                quiet += 1;
                if quiet >= 3 {
                    converged = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
    }
    let br = nu0_bracket(a, b);
    let value = total.value() + br;
    let mut r = EvalResult::new(
        value,
        last_max + 1e-16 * abs_sum + 4.0 * f64::EPSILON * br,
        terms,
        MethodId::Nu0Limit,
    );
    if !converged {
        r = r.with_flag(RegionFlag::NotConverged);
    }
    Ok(boundary_flag(r, a, b))
}

/// Σ_{n≥1} n^{−w} e^{−αn} = ((−α)^{w−1}/Γ(w))(γ − ln α + ψ(w)) + Σ′_k (−)^k ζ(w−k) α^k/k!,
/// the prime omitting k = w − 1; valid for 0 < α < 2π.
pub fn exp_sum_int(w: u32, alpha: f64) -> Result<f64> {
    if w == 0 || w > EXP_SUM_MAX_W {
        return Err(Error::Capacity {
            what: format!("exp_sum_int order w = {w}"),
            cap: EXP_SUM_MAX_W as usize,
        });
    }
    if !(alpha > 0.0) {
        return Err(domain(format!(
            "exp_sum_int requires alpha > 0, got {alpha}"
        )));
    }
    if !(alpha < TWO_PI) {
        return Err(region(
            MethodId::HalfInteger,
            format!("the zeta series requires alpha < 2π, got alpha = {alpha}"),
            &[MethodId::Direct],
        ));
    }
    let wf = w as f64;
    let head = (-alpha).powi(w as i32 - 1) * rgamma(wf) * (EULER_GAMMA - alpha.ln() + digamma(wf)?);
    let mut acc = Neumaier::new();
    acc.add(head);
    let ln_alpha = alpha.ln();
    let mut quiet = 0;
    for k in 0..10_000usize {
        if k as u32 == w - 1 {
            continue;
        }
        let (zs, zl) = zeta_ln_signed(wf - k as f64)?;
        if zs == 0.0 {
            continue;
        }
        let sign = if k % 2 == 0 { zs } else { -zs };
        let t = sign * (zl + k as f64 * ln_alpha - ln_gamma(k as f64 + 1.0)).exp();
        acc.add(t);
        if k as u32 > w && t.abs() < 1e-17 * acc.value().abs() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(acc.value())
}

/// c_k(m) = (m+k)!/(2^k k! (m−k)!), the coefficients of the half-integer K polynomial.
pub fn half_integer_c(m: u32, k: u32) -> f64 {
    if k > m {
        return 0.0;
    }
    // Π_{j=1}^{k} (m−k+j)(m+j)/(2j), exact for small m
    let mut c = 1.0;
    for j in 1..=k {
        c *= ((m - k + j) as f64 * (m + j) as f64) / (2.0 * j as f64);
    }
    c
}

/// ν = m + ½: (2^m√π/b^{m+1}) Σ_{k=0}^m (c_k(m)/b^k) Σ_n e^{−(a+b)n}/n^{m+k+1}.
pub fn sum_k_half_integer(m: u32, a: f64, b: f64, opts: &EvalOptions) -> Result<EvalResult> {
    let _ = KParams::new(a, b, m as f64 + 0.5)?;
    let alpha = a + b;
    let mut acc = Neumaier::new();
    let mut used_direct = false;
    for k in 0..=m {
        let w = m + k + 1;
        let e = if alpha < TWO_PI && w <= EXP_SUM_MAX_W {
            exp_sum_int(w, alpha)?
        } else {
            used_direct = true;
            polylog_direct_ln(w as f64, alpha)?.exp()
        };
        acc.add(half_integer_c(m, k) * b.powi(-(k as i32)) * e);
    }
    let pref = (m as f64 * std::f64::consts::LN_2 - (m as f64 + 1.0) * b.ln()).exp() * PI.sqrt();
    let v = pref * acc.value();
    let _ = opts;
    let mut r = EvalResult::new(
        v,
        8.0 * f64::EPSILON * v.abs(),
        (m + 1) as usize,
        MethodId::HalfInteger,
    );
    if used_direct {
        r = r.with_flag(RegionFlag::FallbackUsed);
    }
    Ok(r)
}

/// Integer ν ≥ 1: Richardson-extrapolated average of the double-sum expansion at ν ± ε and ν ± 2ε,
/// cross-checked against direct summation.
pub fn sum_k_epsilon_average(p: &KParams, opts: &EvalOptions) -> Result<EvalResult> {
    require_theorem_region(p, MethodId::EpsilonAverage)?;
    let nu = p.nu;
    if !(nu >= 1.0 && nu == nu.round()) {
        return Err(Error::Routing(format!(
            "the epsilon-average applies to integer nu >= 1, got nu = {nu}"
        )));
    }
    let eval = |e: f64| -> Result<(f64, f64, usize)> {
        let (lo, _) = theorem3_core(p.a, p.b, nu - e, opts)?;
        let (hi, _) = theorem3_core(p.a, p.b, nu + e, opts)?;
        Ok((
            0.5 * (lo.value + hi.value),
            lo.est_error.max(hi.est_error),
            lo.terms_used + hi.terms_used,
        ))
    };
    let (v1, e1, n1) = eval(EPSILON_OFFSET)?;
    let (v2, e2, n2) = eval(2.0 * EPSILON_OFFSET)?;
    let value = (4.0 * v1 - v2) / 3.0;
    let check = sum_k_direct(
        p,
        &EvalOptions {
            level: None,
            ..*opts
        },
    )?;
    let resid = (value - check.value).abs();
    if resid > EPSILON_CHECK * (1.0 + check.value.abs()) {
        let mut r = check.with_flag(RegionFlag::FallbackUsed);
        r.est_error = r.est_error.max(opts.tol.min(r.est_error));
        return Ok(r);
    }
    let err = resid
        .max((v1 - v2).abs() / 3.0 * 1e-4)
        .max((4.0 * e1 + e2) / 3.0);
    let r = EvalResult::new(value, err, n1 + n2, MethodId::EpsilonAverage);
    Ok(boundary_flag(r, p.a, p.b))
}

/// Dispatches a named K method.
pub fn sum_k_by(method: MethodId, p: &KParams, opts: &EvalOptions) -> Result<EvalResult> {
    crate::params::require_kind(method, SumKind::K)?;
    match method {
        MethodId::Direct => sum_k_direct(p, opts),
        MethodId::PolylogSeries => sum_k_polylog(p, opts),
        MethodId::Theorem3 => sum_k_theorem3(p, opts),
        MethodId::Theorem3Asymptotic => sum_k_theorem3_asymptotic(p, opts),
        MethodId::Nu0Limit => {
            if p.nu != 0.0 {
                return Err(Error::Routing(format!(
                    "the nu = 0 formula needs nu = 0, got {}",
                    p.nu
                )));
            }
            sum_k_nu0(p.a, p.b, opts)
        }
        MethodId::HalfInteger => {
            let m = p.nu - 0.5;
            if !(m >= 0.0 && m == m.round()) {
                return Err(Error::Routing(format!(
                    "the half-integer reduction needs nu = m + 1/2, got {}",
                    p.nu
                )));
            }
            sum_k_half_integer(m as u32, p.a, p.b, opts)
        }
        MethodId::EpsilonAverage => sum_k_epsilon_average(p, opts),
        _ => unreachable!("require_kind filters J-only methods"),
    }
}

/// Σ (−)^{n−1} e^{−an}(½bn)^{−ν}K_ν(bn) = S(a,b) − 2S(2a,2b), both parts via `method`.
pub fn sum_k_alternating(p: &KParams, method: MethodId, opts: &EvalOptions) -> Result<EvalResult> {
    let s1 = sum_k_by(method, p, opts)?;
    let s2 = sum_k_by(method, &p.doubled(), opts).map_err(|e| match e {
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
