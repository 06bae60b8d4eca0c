//! Replication-campaign reports.
//!
//! Reports carry every comparison with both an empirical and a prediction
//! standard error; verdicts are always taken on the pooled error, never on
//! raw differences. Serialization is deterministic, so identical campaign
//! configurations produce byte-identical reports.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::harness::stats::NormalityRow;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: f64,
    pub t: f64,
    /// Second time argument for covariance statistics.
    pub s: Option<f64>,
    pub statistic: String,
    pub empirical: f64,
    pub empirical_se: f64,
    pub predicted: f64,
    pub predicted_se: f64,
    pub pooled_se: f64,
    pub z: f64,
    /// Whether this row participates in the pass/fail gate (largest n only).
    pub gated: bool,
}

impl ComparisonRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: f64,
        t: f64,
        s: Option<f64>,
        statistic: &str,
        empirical: f64,
        empirical_se: f64,
        predicted: f64,
        predicted_se: f64,
        gated: bool,
    ) -> Self {
        let pooled_se = empirical_se.hypot(predicted_se);
        let diff = empirical - predicted;
        let z = if pooled_se > 0.0 {
            diff / pooled_se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY * diff.signum()
        };
        Self {
            n,
            t,
            s,
            statistic: statistic.to_string(),
            empirical,
            empirical_se,
            predicted,
            predicted_se,
            pooled_se,
            z,
            gated,
        }
    }

    pub fn within(&self, z_limit: f64) -> bool {
        self.z.abs() <= z_limit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: String,
    /// Echo of the effective configuration, enough to re-run bit-identically.
    pub config: serde_json::Value,
    pub rows: Vec<ComparisonRow>,
    pub normality: Vec<NormalityRow>,
    pub normality_pass_fraction: Option<f64>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

impl ExperimentReport {
    pub fn new(kind: &str, config: serde_json::Value) -> Self {
        Self {
            kind: kind.to_string(),
            config,
            rows: Vec::new(),
            normality: Vec::new(),
            normality_pass_fraction: None,
            verdicts: Vec::new(),
            passed: false,
        }
    }

    pub fn add_verdict(&mut self, name: &str, passed: bool, detail: String) {
        self.verdicts.push(Verdict { name: name.to_string(), passed, detail });
    }

    pub fn seal(&mut self) {
        self.passed = self.verdicts.iter().all(|v| v.passed);
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serialization");
        bytes.push(b'\n');
        bytes
    }

    /// Comparison table CSV: `n,t,s,statistic,empirical,predicted,pooled_se,z`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,t,s,statistic,empirical,predicted,pooled_se,z")?;
        for r in &self.rows {
            let s = r.s.map(|v| format!("{v}")).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.n, r.t, s, r.statistic, r.empirical, r.predicted, r.pooled_se, r.z
            )?;
        }
        Ok(())
    }
}
