//! Polylogarithm Li_s(e^{-a}) for real order s and damping a > 0.
//!
//! Negative integer orders use the cosine series in the angles
//! φ_k = arctan(2πk/a) when it converges in a few dozen terms, and the
//! Eulerian-number rational form otherwise. Non-integer orders use the
//! ζ-series about a = 0, valid for a < 2π.

use std::f64::consts::PI;
use std::sync::LazyLock;

use crate::error::{domain, Error, Result};
use crate::special::{ln_gamma, ln_gamma_signed, zeta_ln_signed};

const TWO_PI: f64 = 2.0 * PI;

/// Largest negative integer order, n in Li_{-n}, served before Γ(n+1) overflows.
pub const NEG_INT_CAP: u32 = 170;

const COSINE_MAX_TERMS: f64 = 64.0;

/// One evaluated polylogarithm term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolylogTerm {
    pub order: f64,
    pub damping: f64,
    pub value: f64,
}

impl PolylogTerm {
    pub fn neg_int(n: u32, a: f64) -> Result<Self> {
        Ok(PolylogTerm {
            order: -(n as f64),
            damping: a,
            value: polylog_neg_int(n, a)?,
        })
    }
}

/// Normalised Eulerian numbers A(n, k)/n!, rows 0..=NEG_INT_CAP.
static EULERIAN: LazyLock<Vec<Vec<f64>>> = LazyLock::new(|| {
    let cap = NEG_INT_CAP as usize;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(cap + 1);
    rows.push(vec![1.0]);
    rows.push(vec![1.0]);
    for n in 2..=cap {
        let prev = &rows[n - 1];
        let nf = n as f64;
        let row: Vec<f64> = (0..n)
            .map(|k| {
                let stay = if k < prev.len() {
                    (k + 1) as f64 * prev[k]
                } else {
                    0.0
                };
                let step = if k >= 1 {
                    (n - k) as f64 * prev[k - 1]
                } else {
                    0.0
                };
                (stay + step) / nf
            })
            .collect();
        rows.push(row);
    }
    rows
});

fn check_neg_int(n: u32, a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!(
            "Li_{{-n}}(e^{{-a}}) requires a > 0, got a = {a}"
        )));
    }
    if n > NEG_INT_CAP {
        return Err(Error::Capacity {
            what: format!("polylog order -{n}"),
            cap: NEG_INT_CAP as usize,
        });
    }
    Ok(())
}

/// Cosine-series bracket 1 + 2Σ_k ρ_k^{n+1} cos((n+1)φ_k), or `None` when
/// more than a few dozen k-terms would be needed.
pub fn neg_int_cosine_bracket(n: u32, a: f64) -> Option<f64> {
    let p = n as f64 + 1.0;
    // ρ_k < a/(2πk); stop once (a/(2πK))^{n+1} < 1e-17 relative to the leading 1
    let k_needed = (a / TWO_PI) * 10f64.powf(17.0 / p);
    if k_needed > COSINE_MAX_TERMS {
        return None;
    }
    let k_max = k_needed.ceil().max(1.0) as usize;
    let mut acc = 0.0;
    for k in (1..=k_max).rev() {
        let w = TWO_PI * k as f64;
        let rho = a / a.hypot(w);
        let phi = (w / a).atan();
        acc += rho.powf(p) * (p * phi).cos();
    }
    Some(1.0 + 2.0 * acc)
}

fn neg_int_eulerian_ln_bracket(n: u32, a: f64) -> f64 {
    // bracket = (a/(1-e^{-a}))^{n+1} Σ_k E(n,k) e^{-a(k+1)}
    let row = &EULERIAN[n as usize];
    let q = (-a).exp();
    let mut s = 0.0;
    // Horner in q, highest power last
    for e in row.iter().rev() {
        s = s * q + e;
    }
    let one_minus_q = -(-a).exp_m1();
    (n as f64 + 1.0) * (a / one_minus_q).ln() + s.ln() - a
}

/// Li_{-n}(e^{-a}) · a^{n+1}/n!, which tends to 1 as a → 0 or n → ∞.
pub fn polylog_neg_int_scaled(n: u32, a: f64) -> Result<f64> {
    check_neg_int(n, a)?;
    if let Some(b) = neg_int_cosine_bracket(n, a) {
        return Ok(b);
    }
    Ok(neg_int_eulerian_ln_bracket(n, a).exp())
}

/// ln Li_{-n}(e^{-a}).
pub fn polylog_neg_int_ln(n: u32, a: f64) -> Result<f64> {
    check_neg_int(n, a)?;
    let nf = n as f64;
    let head = ln_gamma(nf + 1.0) - (nf + 1.0) * a.ln();
    let bracket = match neg_int_cosine_bracket(n, a) {
        Some(b) => b.ln(),
        None => neg_int_eulerian_ln_bracket(n, a),
    };
    Ok(head + bracket)
}

/// Li_{-n}(e^{-a}) = Σ_{j≥1} j^n e^{-aj}.
pub fn polylog_neg_int(n: u32, a: f64) -> Result<f64> {
    let ln = polylog_neg_int_ln(n, a)?;
    if ln > 709.0 {
        return Err(Error::Capacity {
            what: format!("Li_{{-{n}}}(e^{{-{a}}}) overflows double precision"),
            cap: NEG_INT_CAP as usize,
        });
    }
    Ok(ln.exp())
}

fn check_real_order(s: f64, a: f64) -> Result<()> {
    if !(a > 0.0 && a < TWO_PI) {
        return Err(domain(format!(
            "real-order polylog series requires 0 < a < 2π, got a = {a}"
        )));
    }
    if s >= 1.0 && s == s.floor() {
        return Err(Error::Routing(format!(
            "Li_s with positive integer order s = {s} belongs to the integer-order exponential sum"
        )));
    }
    if !s.is_finite() {
        return Err(domain("polylog order must be finite"));
    }
    Ok(())
}

/// ln Li_s(e^{-a}) by Γ(1-s)a^{s-1} + Σ_k ζ(s-k)(-a)^k/k!, for 0 < a < 2π.
pub fn polylog_real_order_ln(s: f64, a: f64) -> Result<f64> {
    check_real_order(s, a)?;
    if s <= 0.0 && s == s.floor() {
        return polylog_neg_int_ln((-s) as u32, a);
    }
    // scale everything by |Γ(1-s)| a^{s-1}
    let (lg, gsign) = ln_gamma_signed(1.0 - s);
    let ln_a = a.ln();
    let lead_ln = lg + (s - 1.0) * ln_a;
    let mut total = gsign;
    let mut quiet = 0;
    let mut k = 0usize;
    loop {
        let (zs, zl) = zeta_ln_signed(s - k as f64)?;
        if zs != 0.0 {
            let sign = if k.is_multiple_of(2) { zs } else { -zs };
            let t = sign * (zl + k as f64 * ln_a - ln_gamma(k as f64 + 1.0) - lead_ln).exp();
            total += t;
            if t.abs() <= 1e-17 * total.abs() && (k as f64) > 1.0 - s {
                quiet += 1;
            } else {
                quiet = 0;
            }
        } else if (k as f64) > 1.0 - s {
            quiet += 1;
        }
        if quiet >= 3 {
            break;
        }
        k += 1;
        if k > 4000 {
            break;
        }
    }
    if !(total > 0.0) {
        return Err(Error::Conditioning {
            method: crate::params::MethodId::PolylogSeries,
            reason: format!("real-order polylog series lost all precision at s = {s}, a = {a}"),
            alternatives: vec![],
        });
    }
    Ok(lead_ln + total.ln())
}

/// Li_s(e^{-a}) by the ζ-series, for 0 < a < 2π and s not a positive integer.
pub fn polylog_real_order(s: f64, a: f64) -> Result<f64> {
    polylog_real_order_ln(s, a).map(f64::exp)
}

/// ln Σ_{j≥1} j^{-s} e^{-aj} by direct summation, for any real s and a > 0.
pub fn polylog_direct_ln(s: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!(
            "direct polylog sum requires a > 0, got a = {a}"
        )));
    }
    let log_term = |j: f64| -s * j.ln() - a * j;
    let peak = if s < 0.0 { (-s / a).max(1.0) } else { 1.0 };
    let ref_ln = log_term(peak.floor().max(1.0)).max(log_term(peak.ceil()));
    let mut acc = 0.0;
    let mut j = 1.0f64;
    loop {
        let r = (log_term(j) - ref_ln).exp();
        acc += r;
        if j > peak && r < 1e-18 * acc {
            break;
        }
        j += 1.0;
        if j > 1e7 {
            break;
        }
    }
    Ok(ref_ln + acc.ln())
}

/// ln Li_s(e^{-a}) for any real s and a > 0, choosing the evaluation route.
pub fn polylog_ln(s: f64, a: f64) -> Result<f64> {
    if s <= 0.0 && s == s.floor() && -s <= NEG_INT_CAP as f64 {
        return polylog_neg_int_ln((-s) as u32, a);
    }
    if a < 2.0 && !(s >= 1.0 && s == s.floor()) {
        return polylog_real_order_ln(s, a);
    }
    polylog_direct_ln(s, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(s: f64, a: f64) -> f64 {
        // oracle: plain summation with generous length
        let mut acc = 0.0;
        let n_max = ((60.0 + s.abs() * 8.0) / a) as usize + 200;
        for j in (1..=n_max).rev() {
            let jf = j as f64;
            acc += jf.powf(-s) * (-a * jf).exp();
        }
        acc
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs()
    }

    #[test]
    fn low_orders_match_closed_forms() {
        for a in [0.01, 0.3, 1.0, 4.0, 12.0] {
            let li0 = polylog_neg_int(0, a).unwrap();
            assert!(rel(li0, 1.0 / a.exp_m1()) < 1e-14, "a = {a}");
            let q = (-a).exp();
            let li1 = polylog_neg_int(1, a).unwrap();
            assert!(rel(li1, q / (1.0 - q).powi(2)) < 1e-13, "a = {a}");
            let li2 = polylog_neg_int(2, a).unwrap();
            assert!(
                rel(li2, q * (1.0 + q) / (1.0 - q).powi(3)) < 1e-13,
                "a = {a}"
            );
            let li3 = polylog_neg_int(3, a).unwrap();
            assert!(
                rel(li3, q * (1.0 + 4.0 * q + q * q) / (1.0 - q).powi(4)) < 1e-13,
                "a = {a}"
            );
        }
    }

    #[test]
    fn large_order_tends_to_factorial_power() {
        let v = polylog_neg_int(12, 2.0).unwrap();
        let lead = (ln_gamma(13.0) - 13.0 * 2f64.ln()).exp();
        let r = v / lead;
        assert!((0.99..=1.01).contains(&r), "ratio {r}");
    }

    #[test]
    fn agrees_with_direct_sums_up_to_order_12() {
        for n in 0..=12u32 {
            for a in [0.5, 1.0, 2.0] {
                let v = polylog_neg_int(n, a).unwrap();
                let d = direct(-(n as f64), a);
                assert!(rel(v, d) < 1e-10, "n = {n}, a = {a}: {v} vs {d}");
            }
        }
    }

    #[test]
    fn decreasing_in_damping() {
        for n in [0u32, 3, 9, 25] {
            let mut prev = f64::INFINITY;
            for i in 1..60 {
                let v = polylog_neg_int(n, 0.1 * i as f64).unwrap();
                assert!(v < prev, "n = {n}");
                prev = v;
            }
        }
    }

    #[test]
    fn scaled_ratio_trends_to_one() {
        // the deviation oscillates with cos((n+1)φ_1) under a decaying envelope
        let rho = 2.0 / 2f64.hypot(TWO_PI);
        let mut first = 0.0;
        for n in 8..=20u32 {
            let dev = (polylog_neg_int_scaled(n, 2.0).unwrap() - 1.0).abs();
            assert!(dev <= 2.01 * rho.powi(n as i32 + 1), "n = {n}");
            if n == 8 {
                first = dev;
            }
            if n == 20 {
                assert!(dev < 1e-3 * first);
            }
        }
    }

    #[test]
    fn cosine_and_eulerian_routes_agree() {
        for n in [8u32, 12, 20, 40] {
            for a in [0.5, 1.0, 2.0, 5.0] {
                if let Some(c) = neg_int_cosine_bracket(n, a) {
                    let e = neg_int_eulerian_ln_bracket(n, a).exp();
                    assert!(rel(c, e) < 1e-13, "n = {n}, a = {a}: {c} vs {e}");
                }
            }
        }
    }

    #[test]
    fn neg_int_errors() {
        assert!(matches!(polylog_neg_int(2, 0.0), Err(Error::Domain(_))));
        assert!(matches!(polylog_neg_int(2, -1.0), Err(Error::Domain(_))));
        assert!(matches!(
            polylog_neg_int(171, 1.0),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn real_order_continuity_in_s() {
        let near = polylog_real_order(-1.0 + 1e-9, 0.7).unwrap();
        let exact = polylog_neg_int(1, 0.7).unwrap();
        assert!(rel(near, exact) < 1e-6);
    }

    #[test]
    fn real_order_against_direct_sums() {
        assert!((polylog_real_order(0.5, 0.1).unwrap() - direct(0.5, 0.1)).abs() < 1e-10);
        assert!((polylog_real_order(-2.5, 1.0).unwrap() - direct(-2.5, 1.0)).abs() < 1e-10);
        for (s, a) in [(1.5, 0.4), (-0.3, 2.5), (2.6, 1.2), (-11.4, 0.9)] {
            let v = polylog_real_order(s, a).unwrap();
            assert!(rel(v, direct(s, a)) < 1e-12, "s = {s}, a = {a}");
            assert!((polylog_direct_ln(s, a).unwrap() - v.ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn real_order_errors() {
        assert!(matches!(
            polylog_real_order(0.5, 7.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            polylog_real_order(0.5, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            polylog_real_order(2.0, 1.0),
            Err(Error::Routing(_))
        ));
    }

    #[test]
    fn polylog_term_is_positive() {
        let t = PolylogTerm::neg_int(5, 0.8).unwrap();
        assert!(t.value > 0.0);
        assert_eq!(t.order, -5.0);
    }
}
