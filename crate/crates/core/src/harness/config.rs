//! Experiment configuration: a JSON document with a `"scenario"` discriminator.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::FunctionSpec;
use crate::error::{Error, Result};

/// Largest height accepted for `T`; larger requests are capped and the
/// `1/T` floor is reported.
pub const T_CAP: f64 = 1e6;
pub const DEFAULT_THRESHOLD: f64 = 50.0;
pub const DEFAULT_T: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    HalaszBound,
    Thm12aBound,
    Thm12bZero,
    Cor15Real,
    Thm16Power,
    Example11Extremal,
    DistanceSuite,
    LambdaSuite,
    SieveSuite,
    PlancherelSuite,
    SiegelSuite,
}

impl Scenario {
    pub const ALL: [Scenario; 11] = [
        Scenario::HalaszBound,
        Scenario::Thm12aBound,
        Scenario::Thm12bZero,
        Scenario::Cor15Real,
        Scenario::Thm16Power,
        Scenario::Example11Extremal,
        Scenario::DistanceSuite,
        Scenario::LambdaSuite,
        Scenario::SieveSuite,
        Scenario::PlancherelSuite,
        Scenario::SiegelSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::HalaszBound => "halasz_bound",
            Scenario::Thm12aBound => "thm12a_bound",
            Scenario::Thm12bZero => "thm12b_zero",
            Scenario::Cor15Real => "cor15_real",
            Scenario::Thm16Power => "thm16_power",
            Scenario::Example11Extremal => "example11_extremal",
            Scenario::DistanceSuite => "distance_suite",
            Scenario::LambdaSuite => "lambda_suite",
            Scenario::SieveSuite => "sieve_suite",
            Scenario::PlancherelSuite => "plancherel_suite",
            Scenario::SiegelSuite => "siegel_suite",
        }
    }

    pub fn is_suite(self) -> bool {
        matches!(
            self,
            Scenario::DistanceSuite
                | Scenario::LambdaSuite
                | Scenario::SieveSuite
                | Scenario::PlancherelSuite
                | Scenario::SiegelSuite
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default, rename = "Q", alias = "q", skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, rename = "A", alias = "a", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Scale factor for suite workloads; 1.0 runs the documented sizes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            function: None,
            q: None,
            a: None,
            t: None,
            t0: None,
            x_grid: None,
            k: None,
            y: None,
            seed: None,
            threshold: None,
            threads: None,
            output_dir: None,
            scale: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Usage(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn threshold(&self) -> f64 {
        self.threshold.unwrap_or(DEFAULT_THRESHOLD)
    }

    /// `T`, capped at `T_CAP`.
    pub fn t_max(&self) -> f64 {
        self.t.unwrap_or(DEFAULT_T).min(T_CAP)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(20_240_601)
    }

    pub fn scale(&self) -> f64 {
        self.scale.unwrap_or(1.0)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("report"))
    }

    fn need<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| Error::Usage(format!("scenario {} requires `{name}`", self.scenario)))
    }

    pub fn function(&self) -> Result<&FunctionSpec> {
        self.function.as_ref().ok_or_else(|| Error::Usage(format!("scenario {} requires `function`", self.scenario)))
    }

    pub fn require_q(&self) -> Result<u64> {
        self.need(self.q, "Q")
    }

    pub fn require_a(&self) -> Result<f64> {
        self.need(self.a, "A")
    }

    pub fn require_t0(&self) -> Result<f64> {
        self.need(self.t0, "t0")
    }

    /// Checks scenario-specific parameter completeness and ranges.
    pub fn validate(&self) -> Result<()> {
        use Scenario::*;
        if let Some(t) = self.t {
            if !(t >= 1.0) {
                return Err(Error::Usage(format!("T = {t} must be at least 1")));
            }
        }
        if let Some(th) = self.threshold {
            if !(th > 0.0) {
                return Err(Error::Usage("threshold must be positive".into()));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Usage("threads must be at least 1".into()));
        }
        if let Some(g) = &self.x_grid {
            if g.is_empty() || g.iter().any(|&x| x < 2) {
                return Err(Error::Usage("x_grid entries must be at least 2".into()));
            }
        }
        match self.scenario {
            HalaszBound => {
                self.function()?;
            }
            Thm12aBound | Cor15Real => {
                self.function()?;
                self.require_q()?;
                let a = self.require_a()?;
                if !(a > 2.0) {
                    return Err(Error::Usage(format!("A = {a} must exceed 2")));
                }
            }
            Thm12bZero => {
                self.function()?;
                self.require_q()?;
                self.require_a()?;
                self.require_t0()?;
            }
            Thm16Power => {
                self.function()?;
                self.require_q()?;
            }
            Example11Extremal | DistanceSuite | LambdaSuite | SieveSuite | PlancherelSuite | SiegelSuite => {}
        }
        if let Some(q) = self.q {
            if q < 3 {
                return Err(Error::Usage("Q must be at least 3".into()));
            }
        }
        if let Some(f) = &self.function {
            f.rule().map_err(|e| Error::Usage(format!("bad function: {e}")))?;
        }
        Ok(())
    }
}
