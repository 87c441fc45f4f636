use serde::{Deserialize, Serialize};

use crate::de::{self, DeConfig};
use crate::error::{Error, Result};
use crate::excitation;
use crate::layout::ArrayLayout;
use crate::network;
use crate::params::{Direction, ModelParams};
use crate::performance::{self, Drive, Evaluation, PerformanceReport};

use super::{assemble_result, check_genome, layout_from_gaps, DesignKind, DesignResult, Stopwatch};

/// Which port carries the single feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedPolicy {
    /// Try every port, keep the best (lowest index on ties).
    #[default]
    Sweep,
    /// Fixed 0-based port.
    Port(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParasiticCandidate {
    pub feed: usize,
    pub loads: Vec<Option<f64>>,
    pub report: PerformanceReport,
}

/// Converts the gain-optimal fully driven array at `layout` into a single-feed
/// array: every other port is terminated in the reactance cancelling its
/// active reactance. `Ok(None)` when no feed choice is feasible.
///
/// With `require_active` the candidate is also rejected when the driven
/// array has a port with non-positive active resistance.
pub fn parasitic_candidate(
    layout: &ArrayLayout,
    p: &ModelParams,
    policy: FeedPolicy,
    dir: Direction,
    require_active: bool,
) -> Result<Option<ParasiticCandidate>> {
    let n = layout.len();
    let feeds = match policy {
        FeedPolicy::Sweep => 0..n,
        FeedPolicy::Port(f) if f < n => f..f + 1,
        FeedPolicy::Port(f) => {
            return Err(Error::Argument(format!("feed port {f} out of range for {n} elements")))
        }
    };
    let cm = network::assemble_active(layout, p)?;
    let currents = match excitation::optimal_excitation(&cm, dir, layout, p) {
        Ok(c) => c,
        Err(Error::Constraint(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut z_act = Vec::with_capacity(n);
    for z in excitation::driving_impedances(&cm, &currents) {
        match z {
            Some(z) if z.re > 0.0 || !require_active => z_act.push(z),
            _ => return Ok(None),
        }
    }
    let mut best: Option<ParasiticCandidate> = None;
    for feed in feeds {
        let loads = excitation::loads_from_active(&z_act, feed);
        let loaded = cm.with_loads(feed, &loads, p.z0_ohm)?;
        if let Evaluation::Feasible(report) = performance::assess_parasitic(&loaded, layout, feed, p, dir)? {
            if best
                .as_ref()
                .is_none_or(|b| report.realized_gain_dbi > b.report.realized_gain_dbi)
            {
                best = Some(ParasiticCandidate {
                    feed,
                    loads,
                    report: *report,
                });
            }
        }
    }
    Ok(best)
}

/// Optimizes the gaps of an `n`-element single-feed array; loads follow from
/// the gain-optimal fully driven array at each candidate layout.
pub fn optimize_parasitic(n: usize, p: &ModelParams, cfg: &DeConfig, policy: FeedPolicy) -> Result<DesignResult> {
    check_genome(n, cfg)?;
    if let FeedPolicy::Port(f) = policy {
        if f >= n {
            return Err(Error::invalid("feed", format!("port {} out of range for {n} elements", f + 1)));
        }
    }
    let clock = Stopwatch::start();
    let candidate = |g: &[f64]| -> Result<Option<ParasiticCandidate>> {
        let layout = layout_from_gaps(g, p)?;
        parasitic_candidate(&layout, p, policy, Direction::END_FIRE, true)
    };
    let trace = de::optimize(
        |g| {
            candidate(g)
                .ok()
                .flatten()
                .map(|c| c.report.realized_gain_dbi)
        },
        cfg,
    )?;
    let layout = layout_from_gaps(&trace.best_genome, p)?;
    let best = candidate(&trace.best_genome)?
        .ok_or_else(|| Error::Numerical("optimized parasitic layout is infeasible".into()))?;
    let runtime = clock.runtime(trace.evaluations);
    let drive = Drive::Parasitic {
        feed: best.feed,
        loads: best.loads,
    };
    Ok(assemble_result(
        DesignKind::Parasitic,
        &layout,
        p,
        drive,
        best.report,
        Some(cfg.clone()),
        Some(trace),
        runtime,
    ))
}
