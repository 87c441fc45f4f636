//! JSON envelopes and CSV tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use endfire::performance::Drive;
use endfire::workflows::reproduce::{Check, Reproduction};
use endfire::workflows::{DesignResult, Pattern, SensitivityReport};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
    /// Wall clock of the whole command.
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub provenance: Provenance,
    pub config: RunConfig,
    pub result: T,
}

impl<T> Envelope<T> {
    pub fn new(command: &str, config: &RunConfig, runtime_s: f64, result: T) -> Self {
        Envelope {
            provenance: Provenance {
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: command.to_string(),
                seed: config.seed,
                config_sha256: config.hash(command),
                runtime_s,
            },
            config: config.clone(),
            result,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityOutput {
    pub design: DesignResult,
    pub sensitivity: SensitivityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternOutput {
    pub design: DesignResult,
    pub pattern: Pattern,
}

/// A named output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("results serialize");
    bytes.push(b'\n');
    bytes
}

/// Two-decimal value as printed in the tables; `-0` is folded to `0`.
fn round2(x: f64) -> f64 {
    let v = (x * 100.0).round() / 100.0;
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Per-element table: position, normalized current and load. Single-feed
/// designs show the current at the feed only (unit reference) and a load
/// everywhere else.
pub fn design_csv(d: &DesignResult) -> Vec<u8> {
    let rows = (0..d.n).map(|k| {
        let pos = round2(d.positions_lambda[k]).to_string();
        let (amp, phase, load) = match &d.drive {
            Drive::Parasitic { feed, loads } if *feed == k => ("1.0".to_string(), "0".to_string(), String::new()),
            Drive::Parasitic { loads, .. } => (
                String::new(),
                String::new(),
                loads[k].map(|x| round2(x).to_string()).unwrap_or_default(),
            ),
            Drive::Active { .. } => {
                let c = d.normalized_currents[k];
                (format!("{:?}", round2(c.amplitude)), round2(c.phase_deg).to_string(), String::new())
            }
        };
        vec![(k + 1).to_string(), pos, amp, phase, load]
    });
    table(&["n", "d_n_lambda", "current_abs", "current_phase_deg", "load_ohm"], rows)
}

/// One row per design with the headline figures at full precision.
pub fn summary_csv<'a>(designs: impl IntoIterator<Item = &'a DesignResult>) -> Vec<u8> {
    let rows = designs.into_iter().map(|d| {
        let r = &d.report;
        vec![
            serde_json::to_value(d.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            d.n.to_string(),
            d.feed().map(|f| (f + 1).to_string()).unwrap_or_default(),
            r.realized_gain_dbi.to_string(),
            r.gain_dbi.to_string(),
            r.directivity_dbi.to_string(),
            r.radiation_efficiency.to_string(),
            r.reflection_efficiency.to_string(),
            r.total_efficiency.to_string(),
            d.size_lambda().to_string(),
            d.runtime.total_s.to_string(),
            d.runtime.per_evaluation_s.to_string(),
        ]
    });
    table(
        &[
            "kind",
            "n",
            "feed",
            "realized_gain_dbi",
            "gain_dbi",
            "directivity_dbi",
            "radiation_efficiency",
            "reflection_efficiency",
            "total_efficiency",
            "size_lambda",
            "runtime_s",
            "per_evaluation_s",
        ],
        rows,
    )
}

pub fn sensitivity_csv(s: &SensitivityReport) -> Vec<u8> {
    let opt = |x: Option<f64>| x.map(|v| round2(v).to_string()).unwrap_or_default();
    let rows = s.rows.iter().map(|r| {
        let lo = r.values.iter().copied().reduce(f64::min);
        let hi = r.values.iter().copied().reduce(f64::max);
        vec![
            r.label.clone(),
            opt(lo),
            opt(hi),
            opt(r.range_db.map(|g| g[0])),
            opt(r.range_db.map(|g| g[1])),
            r.infeasible.to_string(),
        ]
    });
    table(
        &["parameter", "value_min", "value_max", "gain_min_db", "gain_max_db", "infeasible_samples"],
        rows,
    )
}

pub fn pattern_csv(p: &Pattern) -> Vec<u8> {
    let rows = p.samples.iter().map(|s| {
        vec![
            s.theta_deg.to_string(),
            s.phi_deg.to_string(),
            s.realized_gain_db.to_string(),
        ]
    });
    table(&["theta_deg", "phi_deg", "realized_gain_db"], rows)
}

fn describe(c: &Check) -> String {
    match c {
        Check::Within(t) => format!("within {t}"),
        Check::AtLeast(s) => format!("at least reference - {s}"),
        Check::AtMost(l) => format!("at most {l}"),
    }
}

pub fn reproduction_csv(r: &Reproduction) -> Vec<u8> {
    let rows = r.rows.iter().map(|row| {
        vec![
            row.table.clone(),
            row.quantity.clone(),
            row.n.to_string(),
            row.reference.to_string(),
            row.computed.to_string(),
            row.diff().to_string(),
            describe(&row.check),
            row.pass.to_string(),
        ]
    });
    table(
        &["table", "quantity", "n", "reference", "computed", "diff", "check", "pass"],
        rows,
    )
}

/// Writes every artifact into `dir`, or the first one to `stdout` when no
/// directory is given. Returns the written paths.
pub fn deliver(dir: Option<&Path>, artifacts: &[Artifact], stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let Some(dir) = dir else {
        if let Some(a) = artifacts.first() {
            stdout.write_all(&a.bytes).map_err(|e| CliError::io("<stdout>", e))?;
        }
        return Ok(Vec::new());
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            std::fs::write(&path, &a.bytes).map_err(|e| CliError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

/// Reads a design from a result file: a bare design, a command envelope, or
/// an envelope whose result wraps the design.
pub fn load_design(path: &Path) -> Result<DesignResult> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |reason: String| CliError::Input {
        path: path.to_path_buf(),
        reason,
    };
    let mut value: Value = serde_json::from_str(&text).map_err(|e| bad(format!("malformed JSON: {e}")))?;
    let mut prefix = String::new();
    if let Some(inner) = value.get_mut("result").map(Value::take) {
        value = inner;
        prefix.push_str("result.");
    }
    if let Some(inner) = value.get_mut("design").map(Value::take) {
        value = inner;
        prefix.push_str("design.");
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let key = e.path().to_string();
        bad(format!("at `{prefix}{key}`: {}", e.into_inner()))
    })
}
