//! End-to-end design procedures: optimized fully driven and single-feed
//! arrays, the uniform end-fire baseline, tolerance sweeps and pattern cuts.

mod active;
mod parasitic;
mod pattern;
pub mod reproduce;
mod sensitivity;
mod ula;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use active::optimize_active;
pub use parasitic::{optimize_parasitic, parasitic_candidate, FeedPolicy, ParasiticCandidate};
pub use pattern::{pattern_export, Cut, Pattern, PatternSample, PatternSpec};
pub use sensitivity::{sensitivity, Parameter, SensitivityReport, SensitivityRow, SensitivitySpec};
pub use ula::ula_baseline;

use crate::de::{DeConfig, OptimizationTrace};
use crate::error::{Error, Result};
use crate::excitation::ArrayMode;
use crate::layout::ArrayLayout;
use crate::params::{Direction, ModelParams, ModelSpec};
use crate::performance::{self, Drive, Evaluation, PerformanceReport};
use crate::Complex64;

/// Inter-element gap bounds used by the optimizers, in wavelengths.
pub const GAP_BOUNDS_LAMBDA: (f64, f64) = (0.05, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    Active,
    Parasitic,
    Ula,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedCurrent {
    /// Relative to the largest amplitude in the array.
    pub amplitude: f64,
    pub phase_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    /// Wall clock of the whole procedure.
    pub total_s: f64,
    /// `total_s` divided by the number of candidate evaluations.
    pub per_evaluation_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignResult {
    pub kind: DesignKind,
    pub n: usize,
    pub model: ModelSpec,
    pub direction: Direction,
    pub positions_m: Vec<f64>,
    pub positions_lambda: Vec<f64>,
    /// Active designs store their currents explicitly.
    pub drive: Drive,
    pub normalized_currents: Vec<NormalizedCurrent>,
    pub report: PerformanceReport,
    pub optimizer: Option<DeConfig>,
    pub trace: Option<OptimizationTrace>,
    pub runtime: Runtime,
}

impl DesignResult {
    pub fn layout(&self) -> Result<ArrayLayout> {
        ArrayLayout::new(self.positions_m.clone())
    }

    pub fn params(&self) -> Result<ModelParams> {
        self.model.build()
    }

    pub fn realized_gain_dbi(&self) -> f64 {
        self.report.realized_gain_dbi
    }

    pub fn feed(&self) -> Option<usize> {
        match &self.drive {
            Drive::Parasitic { feed, .. } => Some(*feed),
            Drive::Active { .. } => None,
        }
    }

    pub fn loads(&self) -> Option<&[Option<f64>]> {
        match &self.drive {
            Drive::Parasitic { loads, .. } => Some(loads),
            Drive::Active { .. } => None,
        }
    }

    /// Recomputes the performance from the stored parameters alone.
    pub fn reevaluate(&self) -> Result<Evaluation> {
        let p = self.params()?;
        performance::evaluate(&self.layout()?, &self.drive, &p, self.direction)
    }

    /// Total electrical length, first to last element.
    pub fn size_lambda(&self) -> f64 {
        self.positions_lambda.last().copied().unwrap_or(0.0)
    }
}

pub fn normalize_currents(currents: &[Complex64]) -> Vec<NormalizedCurrent> {
    let peak = currents.iter().map(|c| c.norm()).fold(0.0, f64::max);
    currents
        .iter()
        .map(|c| NormalizedCurrent {
            amplitude: if peak > 0.0 { c.norm() / peak } else { 0.0 },
            phase_deg: c.arg().to_degrees(),
        })
        .collect()
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("n", format!("optimized arrays need at least 2 elements, got {n}")));
    }
    Ok(())
}

/// Population size and generation count for `n` elements: linear in `n`
/// from the low end of each range at 2 elements to the high end at 7.
pub fn default_de_config(n: usize, mode: ArrayMode, seed: u64) -> DeConfig {
    let t = ((n as f64 - 2.0) / 5.0).clamp(0.0, 1.0);
    let (np_hi, it_hi) = match mode {
        ArrayMode::Active => (15.0, 150.0),
        ArrayMode::Parasitic => (13.0, 100.0),
    };
    let np = ((5.0 + t * (np_hi - 5.0)) * n as f64).round() as usize;
    let it = (20.0 + t * (it_hi - 20.0)).round() as usize;
    let dim = n.saturating_sub(1).max(1);
    DeConfig::new(vec![GAP_BOUNDS_LAMBDA; dim], np.max(4), it, seed)
}

/// Genome of gaps in wavelengths to a layout.
pub fn layout_from_gaps(gaps_lambda: &[f64], p: &ModelParams) -> Result<ArrayLayout> {
    let gaps: Vec<f64> = gaps_lambda.iter().map(|g| p.meters(*g)).collect();
    ArrayLayout::from_gaps(&gaps)
}

fn check_genome(n: usize, cfg: &DeConfig) -> Result<()> {
    check_size(n)?;
    if cfg.dimension() != n - 1 {
        return Err(Error::invalid(
            "bounds",
            format!("{n} elements need {} gap bounds, got {}", n - 1, cfg.dimension()),
        ));
    }
    if cfg.bounds.iter().any(|&(lo, _)| lo <= 0.0) {
        return Err(Error::invalid("bounds", "gaps must be strictly positive"));
    }
    cfg.validate()
}

pub(crate) struct Stopwatch(Instant);

impl Stopwatch {
    pub(crate) fn start() -> Self {
        Stopwatch(Instant::now())
    }

    pub(crate) fn runtime(&self, evaluations: usize) -> Runtime {
        let total_s = self.0.elapsed().as_secs_f64();
        Runtime {
            total_s,
            per_evaluation_s: total_s / evaluations.max(1) as f64,
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble_result(
    kind: DesignKind,
    layout: &ArrayLayout,
    p: &ModelParams,
    drive: Drive,
    report: PerformanceReport,
    optimizer: Option<DeConfig>,
    trace: Option<OptimizationTrace>,
    runtime: Runtime,
) -> DesignResult {
    DesignResult {
        kind,
        n: layout.len(),
        model: p.spec(),
        direction: report.direction,
        positions_m: layout.positions().to_vec(),
        positions_lambda: layout.positions_lambda(p),
        drive,
        normalized_currents: normalize_currents(&report.currents),
        report,
        optimizer,
        trace,
        runtime,
    }
}

/// Evaluates a fixed design. Gain-optimal currents are resolved and stored
/// explicitly; an infeasible design is a [`Error::Constraint`].
pub fn evaluate_design(kind: DesignKind, layout: &ArrayLayout, drive: &Drive, p: &ModelParams, dir: Direction) -> Result<DesignResult> {
    let clock = Stopwatch::start();
    let report = match performance::evaluate(layout, drive, p, dir)? {
        Evaluation::Feasible(r) => *r,
        Evaluation::Infeasible { reason } => return Err(Error::Constraint(reason)),
    };
    let runtime = clock.runtime(1);
    let drive = match drive {
        Drive::Active { .. } => Drive::Active {
            currents: Some(report.currents.clone()),
        },
        parasitic => parasitic.clone(),
    };
    Ok(assemble_result(kind, layout, p, drive, report, None, None, runtime))
}
