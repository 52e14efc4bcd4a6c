//! Machine-readable verification reports and sweep tables.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{MvError, Result};
use crate::sweep::{Direction, SweepReport};

/// What a check compares its value against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expected {
    Value(f64),
    /// A relation such as `<= 0` or `non-increasing`.
    Relation(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `None` when the computation itself failed.
    pub value: Option<f64>,
    pub expected: Expected,
    pub tol: f64,
    pub pass: bool,
    /// Quadrature error estimate attached to `value`.
    pub err: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// `|value − expected| ≤ tol`.
    pub fn close(name: impl Into<String>, value: f64, expected: f64, tol: f64, err: f64) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            expected: Expected::Value(expected),
            tol,
            pass: (value - expected).abs() <= tol,
            err,
            note: None,
        }
    }

    /// `value ≤ tol`, for residuals.
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            expected: Expected::Relation("<= tol".into()),
            tol,
            pass: value <= tol,
            err: 0.0,
            note: None,
        }
    }

    /// `value ≥ −tol`, for signed deficits.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            expected: Expected::Relation(format!(">= {bound}")),
            tol,
            pass: value >= bound - tol,
            err: 0.0,
            note: None,
        }
    }

    /// Verdict of a monotonicity sweep; the value is the worst violation.
    pub fn monotone(name: impl Into<String>, sweep: &SweepReport) -> Self {
        let relation = match sweep.direction {
            Direction::NonIncreasing => "non-increasing",
            Direction::NonDecreasing => "non-decreasing",
            Direction::Constant => "constant",
        };
        Self {
            name: name.into(),
            value: Some(sweep.worst_violation),
            expected: Expected::Relation(relation.into()),
            tol: sweep.tol,
            pass: sweep.monotone(),
            err: sweep.errors.iter().cloned().fold(0.0, f64::max),
            note: None,
        }
    }

    /// A boolean property.
    pub fn holds(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: Some(if pass { 1.0 } else { 0.0 }),
            expected: Expected::Relation("true".into()),
            tol: 0.0,
            pass,
            err: 0.0,
            note: Some(detail.into()).filter(|s: &String| !s.is_empty()),
        }
    }

    /// A check whose computation failed.
    pub fn failed(name: impl Into<String>, error: &MvError) -> Self {
        Self {
            name: name.into(),
            value: None,
            expected: Expected::Relation("computable".into()),
            tol: 0.0,
            pass: false,
            err: 0.0,
            note: Some(error.to_string()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_err(mut self, err: f64) -> Self {
        self.err = err;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub wall_ms: u64,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, checks: Vec<Check>, wall_ms: u64) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { suite: suite.into(), checks, wall_ms, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| MvError::Usage(format!("cannot serialize report: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text).map_err(|e| MvError::Usage(format!("malformed report: {e}")))?;
        let pass = report.checks.iter().all(|c| c.pass);
        if pass != report.pass {
            return Err(MvError::Usage("report pass flag disagrees with its checks".into()));
        }
        Ok(report)
    }

    /// One line per check, for terminals.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let value = c.value.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
            let expected = match &c.expected {
                Expected::Value(v) => format!("{v:.6e}"),
                Expected::Relation(s) => s.clone(),
            };
            out += &format!("{} {:<48} value={value} expected={expected} tol={:.1e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.tol);
            if let Some(note) = &c.note {
                out += &format!(" ({note})");
            }
            out.push('\n');
        }
        out += &format!("suite {}: {} ({} checks, {} ms)\n", self.suite, if self.pass { "PASS" } else { "FAIL" }, self.checks.len(), self.wall_ms);
        out
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Per-row monotonicity flag: row `i > 0` carries the verdict between rows
/// `i − 1` and `i`.
pub fn row_flags(sweep: &SweepReport) -> Vec<bool> {
    std::iter::once(true).chain(sweep.verdicts.iter().copied()).take(sweep.grid.len()).collect()
}

/// Writes `parameter,value,error_estimate,monotone_ok` rows.
pub fn write_sweep_csv<W: Write>(sweep: &SweepReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| MvError::Usage(format!("cannot write CSV: {e}"));
    w.write_record(["parameter", "value", "error_estimate", "monotone_ok"]).map_err(io)?;
    for (i, ok) in row_flags(sweep).into_iter().enumerate() {
        w.write_record([float(sweep.grid[i]), float(sweep.values[i]), float(sweep.errors[i]), ok.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| MvError::Usage(format!("cannot write CSV: {e}")))
}

pub fn sweep_json(sweep: &SweepReport) -> Result<String> {
    serde_json::to_string_pretty(sweep).map_err(|e| MvError::Usage(format!("cannot serialize sweep: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Estimate;

    #[test]
    fn report_round_trip() {
        let checks = vec![
            Check::close("a", 1.0 + 1e-9, 1.0, 1e-8, 1e-12),
            Check::monotone(
                "b",
                &SweepReport::new("q", Direction::NonIncreasing, vec![1.0, 2.0], &[Estimate::new(2.0, 0.0), Estimate::new(1.0, 0.0)], 0.0)
                    .unwrap(),
            ),
            Check::failed("c", &MvError::NoRegion("x".into())),
        ];
        let r = SuiteReport::new("s", checks, 12);
        assert!(!r.pass);
        let back = SuiteReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.failures().count(), 1);
    }

    #[test]
    fn csv_layout() {
        let s = SweepReport::new("q", Direction::Constant, vec![0.5, 1.0], &[Estimate::new(0.1, 1e-9), Estimate::new(0.3, 0.0)], 0.0)
            .unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "parameter,value,error_estimate,monotone_ok");
        assert_eq!(lines[1], "5.0000000000000000e-1,1.0000000000000001e-1,1.0000000000000001e-9,true");
        assert!(lines[2].ends_with(",false"));
    }
}
