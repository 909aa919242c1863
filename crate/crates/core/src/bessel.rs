//! Scaled Bessel kernels (½x)^{-ν} J_ν(x) and (½x)^{-ν} K_ν(x).

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::special::{ln_gamma, rgamma};

/// Below this the J power series is used directly.
const J_SERIES_MAX: f64 = 8.0;
/// Above this the Hankel expansion takes over from backward recurrence.
pub const J_ASYMPTOTIC_MIN: f64 = 25.0;

/// One kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBesselValue {
    pub order: f64,
    pub x: f64,
    pub value: f64,
}

impl ScaledBesselValue {
    pub fn j(nu: f64, x: f64) -> Result<Self> {
        Ok(ScaledBesselValue {
            order: nu,
            x,
            value: bessel_j_scaled(nu, x)?,
        })
    }

    pub fn k(nu: f64, x: f64) -> Result<Self> {
        Ok(ScaledBesselValue {
            order: nu,
            x,
            value: bessel_k_scaled(nu, x)?,
        })
    }
}

/// (½x)^{-ν} J_ν(x) for ν > -½, x ≥ 0.
pub fn bessel_j_scaled(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -0.5) || !nu.is_finite() {
        return Err(domain(format!(
            "scaled J kernel requires nu > -1/2, got nu = {nu}"
        )));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!(
            "scaled J kernel requires finite x >= 0, got x = {x}"
        )));
    }
    Ok(j_scaled_unchecked(nu, x))
}

pub(crate) fn j_scaled_unchecked(nu: f64, x: f64) -> f64 {
    if x <= J_SERIES_MAX {
        j_series(nu, x)
    } else if x <= J_ASYMPTOTIC_MIN.max(nu * nu) {
        j_miller(nu, x)
    } else {
        j_hankel(nu, x)
    }
}

fn j_series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut t = rgamma(nu + 1.0);
    let mut s = t;
    let mut k = 0.0;
    loop {
        k += 1.0;
        t *= q / (k * (nu + k));
        s += t;
        if t.abs() < 1e-17 * s.abs() && k > 2.0 || k > 300.0 {
            return s;
        }
    }
}

fn j_miller(nu: f64, x: f64) -> f64 {
    // backward recurrence on J_{ν+k}, normalised by
    // (x/2)^ν = Σ_k (ν+2k) Γ(ν+k)/k! J_{ν+2k}
    let start = (x + 40.0 + 8.0 * x.sqrt()).ceil() as usize;
    let start = start + start % 2;
    let mut hi = 0.0f64;
    let mut cur = 1e-300f64;
    let mut norm = 0.0f64;
    let mut order0 = 0.0;
    for k in (0..=start).rev() {
        if k % 2 == 0 {
            let j = (k / 2) as f64;
            let w = if k == 0 {
                1.0 / rgamma(nu + 1.0)
            } else {
                (nu + 2.0 * j) * (ln_gamma(nu + j) - ln_gamma(j + 1.0)).exp()
            };
            norm += w * cur;
        }
        if k == 0 {
            order0 = cur;
            break;
        }
        let lo = 2.0 * (nu + k as f64) / x * cur - hi;
        hi = cur;
        cur = lo;
        if cur.abs() > 1e250 {
            hi *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
        }
    }
    order0 / norm
}

fn j_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let z8 = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t = 1.0;
    let mut k = 1.0f64;
    let mut last = f64::INFINITY;
    loop {
        t *= (mu - (2.0 * k - 1.0).powi(2)) / (k * z8);
        if t.abs() > last || t == 0.0 {
            break;
        }
        last = t.abs();
        // odd k feed Q with sign (+,-,...), even k feed P with sign (-,+,...)
        let kk = k as i64;
        match kk % 4 {
            1 => q += t,
            2 => p -= t,
            3 => q -= t,
            _ => p += t,
        }
        if t.abs() < 1e-17 {
            break;
        }
        k += 1.0;
        if k > 60.0 {
            break;
        }
    }
    let phase = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    let j = (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi);
    j * (0.5 * x).powf(-nu)
}

/// (½x)^{-ν} K_ν(x) for x > 0; negative ν is folded through K_{-ν} = K_ν.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!(
            "scaled K kernel requires finite x > 0, got x = {x}"
        )));
    }
    if !nu.is_finite() {
        return Err(domain("scaled K kernel requires finite nu"));
    }
    Ok(k_scaled_unchecked(nu, x))
}

/// e^x K_ν(x) by the trapezoid rule on ∫_0^∞ e^{-x(cosh t - 1)} cosh(νt) dt.
pub fn bessel_k_exp_scaled(nu: f64, x: f64) -> f64 {
    let nu = nu.abs();
    let h = 0.1f64.min(0.5 / x.sqrt());
    let mut s = 0.5;
    let mut k = 1.0;
    loop {
        let t = k * h;
        let e = -x * (t.cosh() - 1.0) + nu * t;
        let f = 0.5 * (e.exp() + (e - 2.0 * nu * t).exp());
        s += f;
        if f < 1e-18 * s && x * t.sinh() > nu {
            break;
        }
        k += 1.0;
    }
    h * s
}

pub(crate) fn k_scaled_unchecked(nu: f64, x: f64) -> f64 {
    let ln_scale = -nu * (0.5 * x).ln() - x;
    bessel_k_exp_scaled(nu, x) * ln_scale.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1/Γ(1+z) by its Taylor series, for |z| ≪ 1.
    fn rgamma1p_taylor(z: f64) -> f64 {
        const C: [f64; 8] = [
            1.0,
            0.577_215_664_901_532_9,
            -0.655_878_071_520_253_8,
            -0.042_002_635_034_095_2,
            0.166_538_611_382_291_5,
            -0.042_197_734_555_544_3,
            -0.009_621_971_527_877_0,
            0.007_218_943_246_663_0,
        ];
        C.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    /// Power series for I_ν(x)/(x/2)^ν with |ν| small, summed to exhaustion.
    fn i_series_scaled(nu: f64, x: f64) -> f64 {
        let q = 0.25 * x * x;
        let mut t = rgamma1p_taylor(nu);
        let mut s = t;
        for k in 1..200 {
            let kf = k as f64;
            t *= q / (kf * (nu + kf));
            s += t;
        }
        s
    }

    /// K_ν(x) = π(I_{-ν} - I_ν)/(2 sin πν), unscaled.
    fn k_via_i(nu: f64, x: f64) -> f64 {
        let h = 0.5 * x;
        let im = i_series_scaled(-nu, x) * h.powf(-nu);
        let ip = i_series_scaled(nu, x) * h.powf(nu);
        PI * (im - ip) / (2.0 * (PI * nu).sin())
    }

    fn k_via_i_general(nu: f64, x: f64) -> f64 {
        let h = 0.5 * x;
        let i = |n: f64| {
            let mut t = crate::special::rgamma(n + 1.0);
            let mut s = t;
            for k in 1..200 {
                let kf = k as f64;
                t *= h * h / (kf * (n + kf));
                s += t;
            }
            s * h.powf(n)
        };
        PI * (i(-nu) - i(nu)) / (2.0 * (PI * nu).sin())
    }

    #[test]
    fn j_at_origin_is_reciprocal_gamma() {
        for nu in [-0.4, 0.0, 0.5, 1.0, 3.7] {
            let v = bessel_j_scaled(nu, 0.0).unwrap();
            assert_eq!(v, rgamma(nu + 1.0));
        }
    }

    #[test]
    fn half_order_closed_forms() {
        for x in [0.1, 1.0, 5.0, 12.0, 20.0, 30.0, 300.0] {
            let j = bessel_j_scaled(0.5, x).unwrap();
            let jc = 2.0 * x.sin() / (PI.sqrt() * x);
            assert!(
                (j - jc).abs() < 1e-12 * (1.0 + jc.abs()),
                "J x = {x}: {j} vs {jc}"
            );
            let k = bessel_k_scaled(0.5, x).unwrap();
            let kc = PI.sqrt() * (-x).exp() / x;
            assert!((k - kc).abs() <= 1e-12 * kc, "K x = {x}: {k} vs {kc}");
        }
        // ν = -½: (½x)^{½} J_{-½} = cos x/√π
        for x in [0.5, 9.0, 40.0] {
            let j = bessel_j_scaled(-0.5 + 1e-13, x).unwrap();
            assert!((j - x.cos() / PI.sqrt()).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn j0_of_one_matches_series_oracle() {
        let mut s = 0.0;
        let mut t = 1.0;
        for k in 1..40 {
            s += t;
            t *= -0.25 / (k * k) as f64;
        }
        assert!((bessel_j_scaled(0.0, 1.0).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn k0_of_one_matches_epsilon_limit() {
        let e1 = 1e-5;
        let k1 = k_via_i(e1, 1.0);
        let k2 = k_via_i(2.0 * e1, 1.0);
        let oracle = (4.0 * k1 - k2) / 3.0;
        let v = bessel_k_scaled(0.0, 1.0).unwrap();
        assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");
    }

    #[test]
    fn k_matches_i_combination_for_fractional_order() {
        for (nu, x) in [(0.3, 0.7), (1.25, 2.0), (2.6, 5.0)] {
            let v = bessel_k_scaled(nu, x).unwrap();
            let o = k_via_i_general(nu, x) * (0.5 * x).powf(-nu);
            assert!((v - o).abs() < 1e-11 * o, "nu = {nu}, x = {x}");
        }
    }

    #[test]
    fn k_is_even_in_order() {
        for (nu, x) in [(0.3, 0.2), (1.7, 3.0), (2.0, 40.0)] {
            let a = bessel_k_exp_scaled(nu, x);
            let b = bessel_k_exp_scaled(-nu, x);
            assert_eq!(a, b);
            assert!(a > 0.0);
        }
    }

    #[test]
    fn j_regimes_join_smoothly() {
        // both neighbouring methods evaluated at the same crossover point
        for nu in [-0.25, 0.0, 0.75, 1.3, 4.0] {
            for x in [J_SERIES_MAX, J_SERIES_MAX + 1e-6] {
                let a = j_series(nu, x);
                let b = j_miller(nu, x);
                assert!((a - b).abs() < 1e-12, "nu = {nu}, x = {x}: {a} vs {b}");
            }
            for x in [J_ASYMPTOTIC_MIN - 1e-6, J_ASYMPTOTIC_MIN + 1e-6] {
                let a = j_miller(nu, x);
                let b = j_hankel(nu, x);
                assert!((a - b).abs() < 1e-12, "nu = {nu}, x = {x}: {a} vs {b}");
            }
        }
        // the K quadrature step changes at x = 25
        let x = J_ASYMPTOTIC_MIN;
        let lo = bessel_k_scaled(1.3, x - 1e-12).unwrap();
        let hi = bessel_k_scaled(1.3, x + 1e-12).unwrap();
        assert!((lo - hi).abs() < 1e-9 * lo);
    }

    #[test]
    fn j_recurrence_holds_across_regimes() {
        // J_{ν-1} + J_{ν+1} = (2ν/x) J_ν in unscaled form
        for x in [3.0, 11.0, 24.0, 60.0] {
            let nu = 1.4;
            let f = |n: f64| bessel_j_scaled(n, x).unwrap() * (0.5 * x).powf(n);
            let lhs = f(nu - 1.0) + f(nu + 1.0);
            let rhs = 2.0 * nu / x * f(nu);
            assert!((lhs - rhs).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j_scaled(-0.5, 1.0).is_err());
        assert!(bessel_j_scaled(0.0, -1.0).is_err());
        assert!(bessel_k_scaled(0.0, 0.0).is_err());
    }
}
