//! Machine-readable run reports.
//!
//! A report is one JSON document with a top-level schema version; traces
//! (per-call oracle records, perturbation ledger rows) are emitted as
//! newline-delimited JSON so they can be streamed and diffed. Every float
//! stored here is finite (sentinels stand in for not-computable values), so
//! serialization round-trips losslessly, and two runs with the same flags,
//! seed, and precision produce identical reports up to wall-clock fields.

use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ipm::{ConditionReport, DualRunOutput, OssRunOutput, PerturbationLedger, TrajectoryRow};
use crate::ir::{IrRunOutput, OuterRow};
use crate::model::{binary_length, LOProblem};
use crate::oracle::CallRecord;
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub name: String,
    pub n: usize,
    pub m: usize,
    /// Total bit length of the instance data; absent for non-integer data.
    pub binary_length: Option<u64>,
    pub seed: Option<u64>,
}

impl InstanceInfo {
    pub fn for_problem<S: Scalar>(problem: &LOProblem<S>, seed: Option<u64>) -> Self {
        InstanceInfo {
            name: problem.name().to_string(),
            n: problem.n(),
            m: problem.m(),
            binary_length: binary_length(problem).ok(),
            seed,
        }
    }
}

/// Echo of everything that determines a run, so a report alone suffices to
/// reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub algo: String,
    pub backend: String,
    pub precision: String,
    pub theta: f64,
    pub t: u32,
    pub mu_stop: f64,
    pub zeta: Option<f64>,
    pub zeta_tilde: Option<f64>,
    pub epsilon_direction: f64,
    pub epsilon_norm: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Outcome {
    Converged,
    /// Ran to its budget without reaching the target.
    Unconverged,
    Error { kind: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub iterations: usize,
    pub outer_iterations: usize,
    pub oracle_calls: u64,
    pub queries: u64,
    pub classical_ops: u64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub instance: InstanceInfo,
    pub config: ConfigEcho,
    pub rows: Vec<TrajectoryRow>,
    /// Refinement rounds; empty for single-scale runs.
    pub outer_rows: Vec<OuterRow>,
    pub gap_certificate: f64,
    pub objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ledger: Option<PerturbationLedger>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conditions: Option<ConditionReport>,
    pub totals: Totals,
    pub outcome: Outcome,
}

fn sum_row_queries(rows: &[TrajectoryRow]) -> u64 {
    rows.iter().fold(0u64, |acc, r| acc.saturating_add(r.queries))
}

impl RunReport {
    fn base(instance: InstanceInfo, config: ConfigEcho) -> Self {
        RunReport {
            schema: SCHEMA_VERSION,
            instance,
            config,
            rows: Vec::new(),
            outer_rows: Vec::new(),
            gap_certificate: f64::MAX,
            objective: None,
            ledger: None,
            conditions: None,
            totals: Totals::default(),
            outcome: Outcome::Converged,
        }
    }

    pub fn from_dual_run<S: Scalar>(
        instance: InstanceInfo,
        config: ConfigEcho,
        out: &DualRunOutput<S>,
        objective: Option<f64>,
        wall_ms: f64,
    ) -> Self {
        let mut report = Self::base(instance, config);
        report.rows = out.trajectory.rows.clone();
        report.gap_certificate = out.gap_certificate();
        report.objective = objective;
        report.ledger = Some(out.ledger.clone());
        report.totals = Totals {
            iterations: out.trajectory.iterations(),
            outer_iterations: 0,
            oracle_calls: 0,
            queries: out.trajectory.total_queries(),
            classical_ops: 0,
            wall_ms,
        };
        report.outcome = if out.converged {
            Outcome::Converged
        } else {
            Outcome::Unconverged
        };
        report
    }

    pub fn from_oss_run<S: Scalar>(
        instance: InstanceInfo,
        config: ConfigEcho,
        out: &OssRunOutput<S>,
        objective: Option<f64>,
        wall_ms: f64,
    ) -> Self {
        let mut report = Self::base(instance, config);
        report.rows = out.trajectory.rows.clone();
        report.gap_certificate = out.gap_certificate();
        report.objective = objective;
        report.totals = Totals {
            iterations: out.trajectory.iterations(),
            outer_iterations: 0,
            oracle_calls: 0,
            queries: out.trajectory.total_queries(),
            classical_ops: 0,
            wall_ms,
        };
        report.outcome = if out.converged {
            Outcome::Converged
        } else {
            Outcome::Unconverged
        };
        report
    }

    pub fn from_ir_run<S: Scalar>(
        instance: InstanceInfo,
        config: ConfigEcho,
        out: &IrRunOutput<S>,
        objective: Option<f64>,
        wall_ms: f64,
    ) -> Self {
        let mut report = Self::base(instance, config);
        report.outer_rows = out.outer.clone();
        report.gap_certificate = out.gap_certificate();
        report.objective = objective;
        report.totals = Totals {
            iterations: out.outer.iter().map(|r| r.inner_iterations).sum(),
            outer_iterations: out.outer.len(),
            oracle_calls: 0,
            queries: out.total_queries,
            classical_ops: out.classical_ops,
            wall_ms,
        };
        report.outcome = if out.converged {
            Outcome::Converged
        } else {
            Outcome::Unconverged
        };
        report
    }

    pub fn from_error(
        instance: InstanceInfo,
        config: ConfigEcho,
        error: &crate::error::Error,
    ) -> Self {
        let mut report = Self::base(instance, config);
        report.outcome = Outcome::Error {
            kind: error.to_string(),
        };
        report
    }

    /// The accounting identities every report must satisfy: queries equal
    /// the sum over rows (trajectory rows for single-scale runs, refinement
    /// rounds otherwise) and the iteration total matches the row count.
    pub fn totals_consistent(&self) -> bool {
        let row_queries = if self.outer_rows.is_empty() {
            sum_row_queries(&self.rows)
        } else {
            self.outer_rows
                .iter()
                .fold(0u64, |acc, r| acc.saturating_add(r.queries))
        };
        let iter_ok = if self.outer_rows.is_empty() {
            matches!(self.outcome, Outcome::Error { .. })
                || self.totals.iterations + 1 == self.rows.len()
        } else {
            self.totals.outer_iterations == self.outer_rows.len()
        };
        row_queries == self.totals.queries && iter_ok
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Copy with wall-clock fields zeroed; reports of identical runs are
    /// equal under this normalization.
    pub fn without_wall_times(&self) -> Self {
        let mut r = self.clone();
        r.totals.wall_ms = 0.0;
        for row in &mut r.rows {
            row.wall_ms = 0.0;
        }
        r
    }
}

/// One trace line per oracle call, newline-delimited JSON.
pub fn calls_to_ndjson(calls: &[CallRecord]) -> Result<String> {
    let mut out = String::new();
    for call in calls {
        out.push_str(&serde_json::to_string(call)?);
        out.push('\n');
    }
    Ok(out)
}

/// One trace line per perturbation-ledger row, newline-delimited JSON.
pub fn ledger_to_ndjson(ledger: &PerturbationLedger) -> Result<String> {
    let mut out = String::new();
    for row in &ledger.rows {
        out.push_str(&serde_json::to_string(row)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_ndjson(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
