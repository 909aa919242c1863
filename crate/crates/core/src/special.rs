//! Double-precision scalar special functions: Γ, ln Γ, ψ, ζ and ζ′.
//!
//! Everything here is self-contained. ζ uses Euler–Maclaurin summation for
//! s > 1, the Borwein alternating-series algorithm on [0, 1) and the
//! functional equation for s < 0. ζ′ at negative integers comes from the
//! differentiated functional equation.

use std::f64::consts::{LN_2, PI};
use std::sync::LazyLock;

use crate::error::{domain, Error, Result};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const LN_PI: f64 = 1.144_729_885_849_400_2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Number of Bernoulli numbers B_2, B_4, …, B_128 held by [`ZetaCache`].
pub const BERNOULLI_CAP: usize = 64;

/// B_{2m} for m = 1..=15 as exact rationals.
const BERNOULLI_EXACT: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

/// Immutable table of Bernoulli numbers and ζ at even positive integers.
#[derive(Debug, Clone)]
pub struct ZetaCache {
    /// `bernoulli[m - 1]` = B_{2m}.
    bernoulli: Vec<f64>,
    /// `even_values[m - 1]` = ζ(2m).
    even_values: Vec<f64>,
}

impl ZetaCache {
    fn build() -> Self {
        let mut bernoulli = Vec::with_capacity(BERNOULLI_CAP);
        let mut even_values = Vec::with_capacity(BERNOULLI_CAP);
        for m in 1..=BERNOULLI_CAP {
            let two_m = (2 * m) as f64;
            // (2π)^{2m} / (2 (2m)!) in log form
            let log_scale = two_m * LN_2PI - LN_2 - ln_factorial(2 * m);
            if m <= BERNOULLI_EXACT.len() {
                let (num, den) = BERNOULLI_EXACT[m - 1];
                let b = num / den;
                bernoulli.push(b);
                even_values.push(b.abs() * log_scale.exp());
            } else {
                // ζ(2m) converges after a handful of terms for 2m > 30.
                let z: f64 = (1..=8).rev().map(|n| (n as f64).powf(-two_m)).sum();
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                even_values.push(z);
                bernoulli.push(sign * z * (-log_scale).exp());
            }
        }
        ZetaCache {
            bernoulli,
            even_values,
        }
    }

    /// The shared process-wide table.
    pub fn global() -> &'static ZetaCache {
        static CACHE: LazyLock<ZetaCache> = LazyLock::new(ZetaCache::build);
        &CACHE
    }

    /// B_{2m} for 1 ≤ m ≤ [`BERNOULLI_CAP`].
    pub fn bernoulli_2m(&self, m: usize) -> Result<f64> {
        if m == 0 || m > BERNOULLI_CAP {
            return Err(Error::Capacity {
                what: format!("Bernoulli index 2m = {}", 2 * m),
                cap: 2 * BERNOULLI_CAP,
            });
        }
        Ok(self.bernoulli[m - 1])
    }

    /// ζ(2m) for 1 ≤ m ≤ [`BERNOULLI_CAP`].
    pub fn zeta_even(&self, m: usize) -> Result<f64> {
        if m == 0 || m > BERNOULLI_CAP {
            return Err(Error::Capacity {
                what: format!("even zeta argument 2m = {}", 2 * m),
                cap: 2 * BERNOULLI_CAP,
            });
        }
        Ok(self.even_values[m - 1])
    }
}

fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // reduce to r in [-1, 1)
    let mut r = x % 2.0;
    if r >= 1.0 {
        r -= 2.0;
    } else if r < -1.0 {
        r += 2.0;
    }
    if r == 0.0 || r == -1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// cos(πx) with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    // z = x - 1
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Γ(x). Poles at 0, −1, −2, … are reported as domain errors.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("gamma of NaN"));
    }
    if is_nonpositive_integer(x) {
        return Err(domain(format!("gamma has a pole at x = {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        let s = sin_pi(x);
        return PI / (s * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // t^{z+1/2} split in two halves to stay in range near x = 170
    let half = t.powf(0.5 * (z + 0.5));
    SQRT_2PI * half * (half * (-t).exp()) * lanczos_sum(z)
}

/// 1/Γ(x), entire: zero at the nonpositive integers.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 171.0 {
        return (-ln_gamma(x)).exp();
    }
    if x < -170.0 {
        // reflection: 1/Γ(x) = Γ(1-x) sin(πx)/π
        let (lg, _) = ln_gamma_signed(1.0 - x);
        return sin_pi(x) * (lg - LN_PI).exp();
    }
    1.0 / gamma_unchecked(x)
}

const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

/// ln|Γ(x)| together with the sign of Γ(x). At poles returns (+∞, 0).
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (f64::INFINITY, 0.0);
    }
    if x >= 10.0 {
        return (ln_gamma_stirling(x), 1.0);
    }
    if x >= 0.5 {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        return (
            HALF_LN_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln(),
            1.0,
        );
    }
    let s = sin_pi(x);
    let (lg, _) = ln_gamma_signed(1.0 - x);
    (LN_PI - s.abs().ln() - lg, s.signum())
}

/// ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_signed(x).0
}

const DIGAMMA_ASYMP: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43_867.0 / 14_364.0,
    -174_611.0 / 6600.0,
];

/// ψ(x) = Γ′(x)/Γ(x).
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("digamma of NaN"));
    }
    if is_nonpositive_integer(x) {
        return Err(domain(format!("digamma has a pole at x = {x}")));
    }
    Ok(digamma_unchecked(x))
}

fn digamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // ψ(x) = ψ(1-x) - π cot(πx)
        return digamma_unchecked(1.0 - x) - PI * cos_pi(x) / sin_pi(x);
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 12.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut p = inv2;
    let mut tail = 0.0;
    for c in DIGAMMA_ASYMP {
        tail += c * p;
        p *= inv2;
    }
    acc + y.ln() - 0.5 / y - tail
}

// Euler–Maclaurin parameters for ζ(s), s > 1.
const EM_N: usize = 12;
const EM_TERMS: usize = 12;

/// Euler–Maclaurin summation for (s - 1)ζ(s).
fn zeta_em_scaled(s: f64) -> f64 {
    // (s-1) ζ(s), regular at s = 1
    let cache = ZetaCache::global();
    let n = EM_N as f64;
    let sm1 = s - 1.0;
    let mut head = 0.0;
    for k in (1..EM_N).rev() {
        head += (k as f64).powf(-s);
    }
    let n_pow = n.powf(-s);
    let mut tail = 0.5 * n_pow;
    // B_{2k}/(2k)! · s(s+1)…(s+2k-2) · N^{-s-2k+1}
    let mut rising = s; // s(s+1)…(s+2k-2) for k = 1
    let mut fact = 2.0; // (2k)!
    let mut npow = n_pow / n; // N^{-s-1}
    for k in 1..=EM_TERMS {
        let b = cache.bernoulli[k - 1];
        tail += b / fact * rising * npow;
        let kk = k as f64;
        rising *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        fact *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
        npow /= n * n;
    }
    sm1 * (head + tail) + n.powf(1.0 - s)
}

fn zeta_em(s: f64) -> f64 {
    zeta_em_scaled(s) / (s - 1.0)
}

/// ζ′(s) for s > 1 by term-differentiated Euler–Maclaurin summation.
pub fn zeta_prime(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(domain(format!(
            "zeta_prime is implemented for s > 1 only, got s = {s}"
        )));
    }
    let cache = ZetaCache::global();
    let n = EM_N as f64;
    let ln_n = n.ln();
    let mut acc = 0.0;
    for k in (2..EM_N).rev() {
        let kf = k as f64;
        acc -= kf.ln() * kf.powf(-s);
    }
    let n1 = n.powf(1.0 - s);
    let sm1 = s - 1.0;
    acc += -ln_n * n1 / sm1 - n1 / (sm1 * sm1);
    acc += -0.5 * ln_n * n.powf(-s);
    let mut rising = s;
    let mut dlog = 1.0 / s; // Σ 1/(s+j), j = 0..2k-2
    let mut fact = 2.0;
    let mut npow = n.powf(-s - 1.0);
    for k in 1..=EM_TERMS {
        let b = cache.bernoulli[k - 1];
        acc += b / fact * npow * rising * (dlog - ln_n);
        let kk = k as f64;
        let (u, v) = (s + 2.0 * kk - 1.0, s + 2.0 * kk);
        rising *= u * v;
        dlog += 1.0 / u + 1.0 / v;
        fact *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
        npow /= n * n;
    }
    Ok(acc)
}

const BORWEIN_N: usize = 40;

static BORWEIN_D: LazyLock<Vec<f64>> = LazyLock::new(|| {
    let n = BORWEIN_N;
    let nf = n as f64;
    let mut d = Vec::with_capacity(n + 1);
    let mut term = 1.0 / nf; // i = 0 term: (n-1)! 4^0 / (n! 0!) = 1/n
    let mut acc = term;
    d.push(nf * acc);
    for i in 1..=n {
        let fi = i as f64;
        // ratio of consecutive terms (n+i-1)! 4^i / ((n-i)! (2i)!)
        term *= (nf + fi - 1.0) * 4.0 * (nf - fi + 1.0) / ((2.0 * fi - 1.0) * (2.0 * fi));
        acc += term;
        d.push(nf * acc);
    }
    d
});

fn zeta_borwein(s: f64) -> f64 {
    let d = &*BORWEIN_D;
    let dn = d[BORWEIN_N];
    let mut acc = 0.0;
    for k in (0..BORWEIN_N).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * (d[k] - dn) * ((k + 1) as f64).powf(-s);
    }
    // 1 - 2^{1-s} = -expm1((1-s) ln 2)
    let denom = -((1.0 - s) * LN_2).exp_m1();
    -acc / (dn * denom)
}

/// ζ(s) for real s ≠ 1.
pub fn zeta(s: f64) -> Result<f64> {
    if s.is_nan() {
        return Err(domain("zeta of NaN"));
    }
    if s == 1.0 {
        return Err(domain("zeta has a pole at s = 1"));
    }
    Ok(zeta_unchecked(s))
}

fn zeta_unchecked(s: f64) -> f64 {
    if s == 0.0 {
        return -0.5;
    }
    if s > 1.0 {
        if s >= 60.0 {
            return 1.0 + 2f64.powf(-s) + 3f64.powf(-s);
        }
        return zeta_em(s);
    }
    if s > 0.0 {
        if s > 0.95 {
            return zeta_em(s);
        }
        return zeta_borwein(s);
    }
    let (sign, ln_abs) = zeta_ln_signed_neg(s);
    if sign == 0.0 {
        0.0
    } else {
        sign * ln_abs.exp()
    }
}

/// (s − 1)ζ(s), regular at s = 1 where it equals 1.
pub fn zeta_times_sm1(s: f64) -> f64 {
    if s == 1.0 {
        return 1.0;
    }
    if (s - 1.0).abs() < 0.5 {
        return zeta_em_scaled(s);
    }
    (s - 1.0) * zeta_unchecked(s)
}

fn zeta_ln_signed_neg(s: f64) -> (f64, f64) {
    // ζ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s) ζ(1-s)
    let sn = sin_pi(0.5 * s);
    if sn == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let t = 1.0 - s;
    let ln_abs =
        s * LN_2 + (s - 1.0) * LN_PI + sn.abs().ln() + ln_gamma(t) + zeta_unchecked(t).ln();
    (sn.signum(), ln_abs)
}

/// (sign, ln|ζ(s)|) for s ≠ 1; usable far into the negative axis where ζ overflows.
pub fn zeta_ln_signed(s: f64) -> Result<(f64, f64)> {
    if s == 1.0 || s.is_nan() {
        return Err(domain(format!("zeta has no finite value at s = {s}")));
    }
    if s < 0.0 {
        return Ok(zeta_ln_signed_neg(s));
    }
    let z = zeta_unchecked(s);
    Ok((z.signum(), z.abs().ln()))
}

/// ζ(−k) for integer k ≥ 0 (exact zero at negative even integers).
pub fn zeta_neg_int(k: u32) -> f64 {
    let (sign, ln_abs) = zeta_neg_int_ln(k);
    if sign == 0.0 {
        0.0
    } else {
        sign * ln_abs.exp()
    }
}

/// (sign, ln|ζ(−k)|) for integer k ≥ 0.
pub fn zeta_neg_int_ln(k: u32) -> (f64, f64) {
    if k == 0 {
        return (-1.0, (0.5f64).ln());
    }
    if k.is_multiple_of(2) {
        return (0.0, f64::NEG_INFINITY);
    }
    // ζ(-k) = 2 (-1)^{(k+1)/2} k! ζ(k+1) / (2π)^{k+1}
    let kf = k as f64;
    let sign = if k.div_ceil(2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let ln_abs = LN_2 + ln_gamma(kf + 1.0) - (kf + 1.0) * LN_2PI + zeta_unchecked(kf + 1.0).ln();
    (sign, ln_abs)
}

/// (sign, ln|ζ′(−k)|) for integer k ≥ 0.
pub fn zeta_prime_neg_int_ln(k: u32) -> (f64, f64) {
    if k == 0 {
        return (-1.0, (0.5 * LN_2PI).ln());
    }
    let kf = k as f64;
    if k.is_multiple_of(2) {
        // ζ′(-k) = (-1)^{k/2} k! ζ(k+1) / (2 (2π)^k)
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let ln_abs = ln_gamma(kf + 1.0) + zeta_unchecked(kf + 1.0).ln() - LN_2 - kf * LN_2PI;
        return (sign, ln_abs);
    }
    // ζ′(-k) = ζ(-k) [ln 2π - ψ(k+1) - ζ′(k+1)/ζ(k+1)]
    let (zs, zl) = zeta_neg_int_ln(k);
    let zp = zeta_prime(kf + 1.0).expect("k + 1 > 1");
    let ratio = LN_2PI - digamma_unchecked(kf + 1.0) - zp / zeta_unchecked(kf + 1.0);
    (zs * ratio.signum(), zl + ratio.abs().ln())
}

/// ζ′(−k) for integer k ≥ 0.
pub fn zeta_prime_neg_int(k: u32) -> f64 {
    let (sign, ln_abs) = zeta_prime_neg_int_ln(k);
    sign * ln_abs.exp()
}
