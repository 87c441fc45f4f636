use crate::de::{self, DeConfig};
use crate::error::{Error, Result};
use crate::params::{Direction, ModelParams};
use crate::performance::{self, Drive, Evaluation};

use super::{assemble_result, check_genome, layout_from_gaps, DesignKind, DesignResult, Stopwatch};

fn score(gaps: &[f64], p: &ModelParams) -> Result<Evaluation> {
    let layout = layout_from_gaps(gaps, p)?;
    performance::evaluate(&layout, &Drive::Active { currents: None }, p, Direction::END_FIRE)
}

/// Optimizes the gaps of an `n`-element fully driven array for end-fire
/// realized gain, with gain-optimal currents at every candidate layout.
pub fn optimize_active(n: usize, p: &ModelParams, cfg: &DeConfig) -> Result<DesignResult> {
    check_genome(n, cfg)?;
    let clock = Stopwatch::start();
    let trace = de::optimize(
        |g| score(g, p).ok().and_then(|e| e.realized_gain_dbi()),
        cfg,
    )?;
    let layout = layout_from_gaps(&trace.best_genome, p)?;
    let report = score(&trace.best_genome, p)?
        .into_report()
        .ok_or_else(|| Error::Numerical("optimized active layout is infeasible".into()))?;
    let runtime = clock.runtime(trace.evaluations);
    let drive = Drive::Active {
        currents: Some(report.currents.clone()),
    };
    Ok(assemble_result(
        DesignKind::Active,
        &layout,
        p,
        drive,
        report,
        Some(cfg.clone()),
        Some(trace),
        runtime,
    ))
}
