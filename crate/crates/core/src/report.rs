//! Serializable report for the command-line surface.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which
//! round-trips binary64 exactly; non-finite values become `null`.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::engine::ConvergenceRow;
use crate::params::{EvalResult, SumKind};

/// Formats a float with 17 significant digits, "." as decimal separator.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_owned()
    } else if x > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

mod f17 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            RawValue::from_string(fmt17(*x))
                .map_err(serde::ser::Error::custom)?
                .serialize(s)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

mod f17_vec {
    use super::*;

    #[derive(Serialize)]
    struct W(#[serde(with = "f17")] f64);

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|&x| W(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<Option<f64>>::deserialize(d)?
            .into_iter()
            .map(|x| x.unwrap_or(f64::NAN))
            .collect())
    }
}

/// The request, echoed back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub command: String,
    pub kind: SumKind,
    pub alternating: bool,
    #[serde(with = "f17_vec")]
    pub a: Vec<f64>,
    #[serde(with = "f17_vec")]
    pub b: Vec<f64>,
    #[serde(with = "f17")]
    pub nu: f64,
    pub method: String,
    #[serde(with = "f17")]
    pub tol: f64,
    pub max_terms: usize,
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    #[serde(with = "f17")]
    pub a: f64,
    #[serde(with = "f17")]
    pub b: f64,
    #[serde(with = "f17")]
    pub value: f64,
    #[serde(with = "f17")]
    pub est_error: f64,
    pub terms: usize,
    pub method: String,
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn from_eval(a: f64, b: f64, r: &EvalResult) -> Self {
        ResultRecord {
            a,
            b,
            value: r.value,
            est_error: r.est_error,
            terms: r.terms_used,
            method: r.method.as_str().to_owned(),
            flags: r.flags.iter().map(|f| f.as_str().to_owned()).collect(),
            error: None,
        }
    }

    pub fn failed(a: f64, b: f64, method: &str, msg: String) -> Self {
        ResultRecord {
            a,
            b,
            value: f64::NAN,
            est_error: f64::NAN,
            terms: 0,
            method: method.to_owned(),
            flags: Vec::new(),
            error: Some(msg),
        }
    }
}

/// One convergence-table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowRecord {
    pub method: String,
    pub level: usize,
    #[serde(with = "f17")]
    pub value: f64,
    #[serde(with = "f17")]
    pub abs_error: f64,
    #[serde(with = "f17")]
    pub seconds: f64,
}

impl From<&ConvergenceRow> for RowRecord {
    fn from(r: &ConvergenceRow) -> Self {
        RowRecord {
            method: r.method.as_str().to_owned(),
            level: r.level,
            value: r.value,
            abs_error: r.abs_error,
            seconds: r.seconds,
        }
    }
}

/// Outcome of one self-verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    /// All computations are deterministic; recorded for pipeline bookkeeping.
    pub seed: u64,
}

impl Default for Meta {
    fn default() -> Self {
        Meta {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub inputs: Inputs,
    pub results: Vec<ResultRecord>,
    #[serde(default)]
    pub rows: Vec<RowRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub meta: Meta,
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Report {
    pub fn new(inputs: Inputs) -> Self {
        Report {
            inputs,
            results: Vec::new(),
            rows: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            meta: Meta::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Rows as `method,level,value,abs_error,seconds` when present, else results.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.rows.is_empty() || self.inputs.command == "table" {
            out.push_str("method,level,value,abs_error,seconds\n");
            for r in &self.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.method,
                    r.level,
                    fmt17(r.value),
                    fmt17(r.abs_error),
                    fmt17(r.seconds)
                );
            }
        } else if !self.checks.is_empty() {
            out.push_str("name,passed,detail\n");
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "{},{},\"{}\"",
                    c.name,
                    c.passed,
                    c.detail.replace('"', "\"\"")
                );
            }
        } else {
            out.push_str("a,b,nu,value,est_error,terms,method,flags\n");
            for r in &self.results {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    fmt17(r.a),
                    fmt17(r.b),
                    fmt17(self.inputs.nu),
                    fmt17(r.value),
                    fmt17(r.est_error),
                    r.terms,
                    r.method,
                    r.flags.join(";")
                );
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let i = &self.inputs;
        if i.command == "verify" {
            let _ = writeln!(out, "verify suite {}", i.method);
        } else {
            let _ = writeln!(
                out,
                "{} S_{}{} nu = {} (method {}, tol {:e})",
                i.command,
                i.kind,
                if i.alternating { " alternating" } else { "" },
                i.nu,
                i.method,
                i.tol
            );
        }
        for r in &self.results {
            match &r.error {
                Some(e) => {
                    let _ = writeln!(out, "a = {}  b = {}  error: {e}", r.a, r.b);
                }
                None => {
                    let _ = writeln!(
                        out,
                        "a = {}  b = {}  value = {}  est_error = {:.3e}  terms = {}  method = {}{}",
                        r.a,
                        r.b,
                        fmt17(r.value),
                        r.est_error,
                        r.terms,
                        r.method,
                        if r.flags.is_empty() {
                            String::new()
                        } else {
                            format!("  [{}]", r.flags.join(", "))
                        }
                    );
                }
            }
        }
        if !self.rows.is_empty() {
            let _ = writeln!(
                out,
                "{:<22} {:>6} {:>24} {:>12} {:>10}",
                "method", "level", "value", "abs_error", "seconds"
            );
            for r in &self.rows {
                let _ = writeln!(
                    out,
                    "{:<22} {:>6} {:>24} {:>12.3e} {:>10.2e}",
                    r.method,
                    r.level,
                    fmt17(r.value),
                    r.abs_error,
                    r.seconds
                );
            }
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        if !self.checks.is_empty() {
            let passed = self.checks.iter().filter(|c| c.passed).count();
            let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(Inputs {
            command: "eval".into(),
            kind: SumKind::J,
            alternating: false,
            a: vec![0.1],
            b: vec![1.0 / 3.0],
            nu: 0.5,
            method: "auto".into(),
            tol: 1e-10,
            max_terms: 100,
        });
        r.results.push(ResultRecord {
            a: 0.1,
            b: 1.0 / 3.0,
            value: std::f64::consts::PI * 1e-300,
            est_error: f64::MIN_POSITIVE,
            terms: 3,
            method: "direct".into(),
            flags: vec!["near-boundary".into()],
            error: None,
        });
        r
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let r = sample();
        let s = r.to_json();
        assert!(s.contains("3.3333333333333331e-1"));
        assert_eq!(Report::from_json(&s).unwrap(), r);
    }

    #[test]
    fn non_finite_values_become_null() {
        let mut r = sample();
        r.results[0].value = f64::INFINITY;
        let s = r.to_json();
        assert!(s.contains("\"value\": null"));
        assert!(Report::from_json(&s).unwrap().results[0].value.is_nan());
    }

    #[test]
    fn csv_layouts() {
        let mut r = sample();
        assert!(r.to_csv().starts_with("a,b,nu,value"));
        r.inputs.command = "table".into();
        r.rows.push(RowRecord {
            method: "direct".into(),
            level: 1,
            value: 1.0,
            abs_error: 0.0,
            seconds: 0.0,
        });
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "method,level,value,abs_error,seconds");
        assert!(lines.iter().all(|l| l.split(',').count() == 5));
    }
}
