//! Reports produced by monitors and suites.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::Scenario;
use super::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl BoundRow {
    pub fn new(x: f64, lhs: f64, rhs: f64) -> Self {
        Self { x, lhs, rhs, ratio: lhs / rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub scenario: Scenario,
    pub function: String,
    pub threshold: f64,
    pub rows: Vec<BoundRow>,
    pub max_ratio: f64,
    pub verdict: Verdict,
    /// Named auxiliary quantities (exponents, scales, witnesses).
    pub notes: BTreeMap<String, f64>,
    pub messages: Vec<String>,
}

impl BoundReport {
    /// Violated when some ratio exceeds the threshold; inconclusive when the
    /// largest ratio is within a factor 2 of it or there are no rows.
    pub fn new(scenario: Scenario, function: impl Into<String>, threshold: f64, rows: Vec<BoundRow>) -> Self {
        let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        let verdict = if rows.is_empty() || rows.iter().any(|r| r.ratio.is_nan()) {
            Verdict::Inconclusive
        } else if max_ratio > threshold {
            Verdict::Violated
        } else if max_ratio > threshold / 2.0 {
            Verdict::Inconclusive
        } else {
            Verdict::Consistent
        };
        Self {
            scenario,
            function: function.into(),
            threshold,
            rows,
            max_ratio: if max_ratio.is_finite() { max_ratio } else { 0.0 },
            verdict,
            notes: BTreeMap::new(),
            messages: Vec::new(),
        }
    }

    pub fn note(mut self, key: &str, value: f64) -> Self {
        self.notes.insert(key.to_string(), value);
        self
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,lhs,rhs,ratio\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", fmt_f64(r.x), fmt_f64(r.lhs), fmt_f64(r.rhs), fmt_f64(r.ratio)));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl SuiteCheck {
    /// Passes when `value <= limit`.
    pub fn at_most(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: value <= limit, value, limit, detail: detail.into() }
    }

    /// Passes when `value >= limit`.
    pub fn at_least(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: value >= limit, value, limit, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub scenario: Scenario,
    pub checks: Vec<SuiteCheck>,
    /// `(file stem, CSV body)`.
    pub tables: Vec<(String, String)>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&SuiteCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, stem: &str) -> Option<&str> {
        self.tables.iter().find(|(s, _)| s == stem).map(|(_, b)| b.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Bound(BoundReport),
    Suite(SuiteReport),
}

impl Outcome {
    pub fn scenario(&self) -> Scenario {
        match self {
            Outcome::Bound(b) => b.scenario,
            Outcome::Suite(s) => s.scenario,
        }
    }

    /// `(file name, CSV body)` for every table of the outcome.
    pub fn csv_files(&self) -> Vec<(String, String)> {
        match self {
            Outcome::Bound(b) => vec![(format!("{}.csv", b.scenario), b.to_csv())],
            Outcome::Suite(s) => s.tables.iter().map(|(stem, body)| (format!("{stem}.csv"), body.clone())).collect(),
        }
    }

    pub fn summary_line(&self) -> String {
        match self {
            Outcome::Bound(b) => format!(
                "{}: {} rows, max_ratio {:.6e}, threshold {}, verdict {:?}",
                b.scenario,
                b.rows.len(),
                b.max_ratio,
                b.threshold,
                b.verdict
            ),
            Outcome::Suite(s) => {
                let failed: Vec<&str> = s.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                if failed.is_empty() {
                    format!("{}: {} checks passed", s.scenario, s.checks.len())
                } else {
                    format!("{}: failed {}", s.scenario, failed.join(", "))
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let rows = |r: f64| vec![BoundRow::new(10.0, r, 1.0)];
        assert_eq!(BoundReport::new(Scenario::HalaszBound, "f", 50.0, rows(1.0)).verdict, Verdict::Consistent);
        assert_eq!(BoundReport::new(Scenario::HalaszBound, "f", 50.0, rows(30.0)).verdict, Verdict::Inconclusive);
        assert_eq!(BoundReport::new(Scenario::HalaszBound, "f", 50.0, rows(51.0)).verdict, Verdict::Violated);
        assert_eq!(BoundReport::new(Scenario::HalaszBound, "f", 50.0, vec![]).verdict, Verdict::Inconclusive);
    }
}
