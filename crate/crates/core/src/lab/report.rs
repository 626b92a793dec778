//! Experiment reports and their CSV / JSON encodings.
//!
//! CSV columns, in order: `statistic,n,y,x,eps,estimate,se,trials,seed`.
//! Cells that do not apply to a statistic are empty. JSON carries the same rows
//! plus the config echo and the trend verdicts. Wall time is kept in memory
//! only, so both encodings are byte-stable for a fixed seed.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// `E|reference - S_n|`.
    MeanAbsError,
    /// `P(|θ-sum - reference| > ε)`.
    TailProbability,
    /// `P(|S_n - reference| > ε)`, the contrast column of the θ experiments.
    PartialSumTailProbability,
    /// `P(|I(x) - I(y)| > ε)`.
    ContinuityProbability,
    /// `∫ |g|^α dt` for the integrand a bound is applied to.
    LpIntegral,
    /// Tail-bound right-hand side with `C = 1`, `ε' = 0.9 ε`.
    Lemma1Rhs,
    Lemma2Rhs,
    /// `E|∫ g dX|`.
    MeanAbsValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub statistic: Statistic,
    pub n: Option<usize>,
    pub y: Option<f64>,
    pub x: Option<f64>,
    pub eps: Option<f64>,
    pub estimate: f64,
    pub se: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    /// `None` for purely informational entries.
    pub passed: Option<bool>,
    pub value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ConvergenceReport {
    pub fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        Self {
            experiment: experiment.into(),
            config: config.clone(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    /// All pass/fail verdicts passed (informational entries are ignored).
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed != Some(false))
    }

    pub fn rows_of(&self, statistic: Statistic) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.statistic == statistic)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One line per verdict.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let tag = match v.passed {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "INFO",
            };
            out.push_str(&format!("[{tag}] {}: {}\n", v.name, v.detail));
        }
        out
    }
}
