//! Suite reports: a human text form and a JSON record with fixed field order.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use gencx::C64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
    Skipped,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
            Status::Skipped => "SKIP",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub passed: bool,
    /// Effective parameters, echoed in insertion order.
    pub parameters: serde_json::Map<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub sections: serde_json::Map<String, Value>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            passed: true,
            parameters: serde_json::Map::new(),
            checks: Vec::new(),
            sections: serde_json::Map::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.into(), value.into());
    }

    /// Records `value ≤ tolerance`.
    pub fn bound(&mut self, name: impl Into<String>, value: f64, tolerance: f64) -> bool {
        let ok = value.is_finite() && value <= tolerance;
        self.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            value: finite(value),
            tolerance: Some(tolerance),
            detail: None,
        });
        ok
    }

    /// Records `value > threshold`.
    pub fn above(&mut self, name: impl Into<String>, value: f64, threshold: f64) -> bool {
        let ok = value.is_finite() && value > threshold;
        self.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            value: finite(value),
            tolerance: Some(threshold),
            detail: Some("must exceed tolerance".into()),
        });
        ok
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64) {
        self.push(Check {
            name: name.into(),
            status: Status::Info,
            value: finite(value),
            tolerance: None,
            detail: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.push(Check {
            name: name.into(),
            status: Status::Fail,
            value: None,
            tolerance: None,
            detail: Some(detail.into()),
        });
    }

    pub fn skip(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.push(Check {
            name: name.into(),
            status: Status::Skipped,
            value: None,
            tolerance: None,
            detail: Some(detail.into()),
        });
    }

    pub fn section(&mut self, name: &str, value: Value) {
        self.sections.insert(name.into(), value);
    }

    fn push(&mut self, check: Check) {
        if check.status == Status::Fail {
            self.passed = false;
        }
        self.checks.push(check);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report is serializable");
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite: {} (schema {})", self.suite, self.schema_version);
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "  {k} = {v}");
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let value = c.value.map_or("-".to_string(), |v| format!("{v:.3e}"));
            let tol = c.tolerance.map_or(String::new(), |t| format!("  (tol {t:.1e})"));
            let detail = c.detail.as_deref().map_or(String::new(), |d| format!("  {d}"));
            let _ = writeln!(out, "{}  {:<width$}  {value}{tol}{detail}", c.status.label(), c.name);
        }
        let _ = writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

/// `(re,im)` with 17 significant digits.
pub fn complex_string(z: C64) -> String {
    format!("({:.16e},{:.16e})", z.re, z.im)
}
