//! ₂F₁(1, 1−ν; 3/2; z) for real z < 1.

use crate::error::{domain, Result};

/// Arguments of the ₂F₁ family used by the T2 closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub nu: f64,
    pub z: f64,
}

impl HypParams {
    /// The J-sum argument −a²/b².
    pub fn j_case(nu: f64, a: f64, b: f64) -> Self {
        HypParams {
            nu,
            z: -(a * a) / (b * b),
        }
    }

    /// The K-sum argument a²/b².
    pub fn k_case(nu: f64, a: f64, b: f64) -> Self {
        HypParams {
            nu,
            z: (a * a) / (b * b),
        }
    }

    /// Argument z/(z − 1) after Euler's transformation, a²/(a²+b²) in the J case.
    pub fn euler_argument(&self) -> f64 {
        self.z / (self.z - 1.0)
    }

    pub fn eval(&self) -> Result<f64> {
        hyp2f1_special(self.nu, self.z)
    }
}

/// Σ_k (1)_k (β)_k/((3/2)_k k!) z^k = Σ_k (β)_k/(3/2)_k z^k, |z| < 1.
fn series(beta: f64, z: f64) -> f64 {
    let mut t = 1.0;
    let mut s = 1.0;
    let mut k = 0.0;
    loop {
        t *= (beta + k) / (1.5 + k) * z;
        k += 1.0;
        s += t;
        if t == 0.0 || t.abs() < 1e-17 * s.abs() && k > 1.0 || k > 20_000.0 {
            return s;
        }
    }
}

fn check_disk(z: f64) -> Result<()> {
    if !(z.abs() < 1.0) {
        return Err(domain(format!(
            "power series for 2F1 requires |z| < 1, got z = {z}"
        )));
    }
    Ok(())
}

/// Plain power series of ₂F₁(1, 1−ν; 3/2; z), |z| < 1.
pub fn hyp2f1_direct(nu: f64, z: f64) -> Result<f64> {
    check_disk(z)?;
    Ok(series(1.0 - nu, z))
}

/// (1−z)^{-1} ₂F₁(1, ½+ν; 3/2; z/(z−1)), valid for z < ½.
pub fn hyp2f1_euler(nu: f64, z: f64) -> Result<f64> {
    if !(z < 0.5) || !z.is_finite() {
        return Err(domain(format!(
            "Euler-transformed 2F1 requires z < 1/2, got z = {z}"
        )));
    }
    let w = z / (z - 1.0);
    Ok(series(0.5 + nu, w) / (1.0 - z))
}

/// ₂F₁(1, 1−ν; 3/2; z) for real z < 1; arguments z < −½ go through Euler's
/// transformation onto (⅓, 1), which also covers z ≤ −1 (a ≥ b in the J-sum).
pub fn hyp2f1_special(nu: f64, z: f64) -> Result<f64> {
    if !nu.is_finite() {
        return Err(domain("2F1 parameter nu must be finite"));
    }
    if z < -0.5 {
        return hyp2f1_euler(nu, z);
    }
    check_disk(z)?;
    Ok(series(1.0 - nu, z))
}
