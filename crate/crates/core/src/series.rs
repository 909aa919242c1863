//! Summation helpers: compensated accumulation and Euler acceleration of
//! alternating tails.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Result of summing a series, with the magnitude of what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub est_error: f64,
    pub terms: usize,
    pub converged: bool,
    pub accelerated: bool,
}

/// Repeated averaging of partial sums (the Euler transformation applied to
/// the tail of an alternating series). Returns the accelerated value and the
/// difference between the last two averaging levels.
pub fn euler_average(partials: &[f64]) -> (f64, f64) {
    match partials.len() {
        0 => return (0.0, 0.0),
        1 => return (partials[0], f64::INFINITY),
        _ => {}
    }
    let mut row = partials.to_vec();
    while row.len() > 2 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
    }
    let value = 0.5 * (row[0] + row[1]);
    (value, 0.5 * (row[0] - row[1]).abs())
}

/// Tunables for [`sum_series`].
#[derive(Debug, Clone, Copy)]
pub struct SeriesControl {
    /// Relative size below which a term counts as negligible.
    pub rel_eps: f64,
    /// Consecutive negligible terms required to stop.
    pub quiet_terms: usize,
    /// Raw terms before switching to Euler acceleration (0 disables it).
    pub accel_after: usize,
    /// Terms fed to the Euler transform once acceleration kicks in.
    pub accel_terms: usize,
    /// Hard cap on terms.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_eps: 1e-17,
            quiet_terms: 2,
            accel_after: 0,
            accel_terms: 48,
            max_terms: 100_000,
        }
    }
}

impl SeriesControl {
    pub fn accelerated(accel_after: usize) -> Self {
        SeriesControl {
            accel_after,
            ..Default::default()
        }
    }

    pub fn capped(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }
}

/// Sums `term(k)` for k = 0, 1, … until terms become negligible.
///
/// If acceleration is enabled and the series is still not converged after
/// `accel_after` terms while its terms alternate in sign, the remaining
/// tail is summed with [`euler_average`] over `accel_terms` further terms.
pub fn sum_series(mut term: impl FnMut(usize) -> f64, ctl: SeriesControl) -> SeriesSum {
    let mut acc = Neumaier::new();
    let mut quiet = 0;
    let mut last = 0.0f64;
    let mut k = 0;
    while k < ctl.max_terms {
        let t = term(k);
        acc.add(t);
        k += 1;
        let s = acc.value();
        if t.abs() <= ctl.rel_eps * s.abs() || t == 0.0 && s == 0.0 {
            quiet += 1;
            if quiet >= ctl.quiet_terms {
                return SeriesSum {
                    value: s,
                    est_error: t.abs().max(last.abs() * ctl.rel_eps),
                    terms: k,
                    converged: true,
                    accelerated: false,
                };
            }
        } else {
            quiet = 0;
        }
        let prev = last;
        last = t;
        if ctl.accel_after > 0 && k == ctl.accel_after && prev * last < 0.0 {
            return euler_tail(acc.value(), k, &mut term, ctl);
        }
    }
    SeriesSum {
        value: acc.value(),
        est_error: last.abs(),
        terms: k,
        converged: false,
        accelerated: false,
    }
}

fn euler_tail(
    head: f64,
    start: usize,
    term: &mut impl FnMut(usize) -> f64,
    ctl: SeriesControl,
) -> SeriesSum {
    let n = ctl
        .accel_terms
        .min(ctl.max_terms.saturating_sub(start))
        .max(2);
    let mut partials = Vec::with_capacity(n + 1);
    let mut acc = Neumaier::new();
    acc.add(head);
    partials.push(acc.value());
    for k in start..start + n {
        acc.add(term(k));
        partials.push(acc.value());
    }
    let (value, err) = euler_average(&partials);
    let scale = value.abs().max(f64::MIN_POSITIVE);
    SeriesSum {
        value,
        est_error: err,
        terms: start + n,
        converged: err <= 1e-13 * scale,
        accelerated: true,
    }
}
