use crate::error::{Error, Result};
use crate::layout::ArrayLayout;
use crate::network;
use crate::params::{Direction, ModelParams};
use crate::performance::{self, Drive, Evaluation};
use crate::Complex64;

use super::{assemble_result, check_size, DesignKind, DesignResult, Stopwatch};

/// Uniform-amplitude array with spacing `spacing_lambda`, phased for end-fire:
/// `i_n = exp(+j·k·d_n)`.
pub fn ula_baseline(n: usize, spacing_lambda: f64, p: &ModelParams) -> Result<DesignResult> {
    check_size(n)?;
    if !(spacing_lambda > 0.0 && spacing_lambda.is_finite()) {
        return Err(Error::invalid("spacing", format!("must be positive, got {spacing_lambda}")));
    }
    let clock = Stopwatch::start();
    let layout = ArrayLayout::uniform(n, p.meters(spacing_lambda))?;
    let currents: Vec<Complex64> = layout
        .positions()
        .iter()
        .map(|d| Complex64::from_polar(1.0, p.wavenumber * d))
        .collect();
    let cm = network::assemble_active(&layout, p)?;
    let report = match performance::assess_active(&cm, &layout, currents.clone(), p, Direction::END_FIRE)? {
        Evaluation::Feasible(r) => *r,
        Evaluation::Infeasible { reason } => return Err(Error::Constraint(reason)),
    };
    let runtime = clock.runtime(1);
    Ok(assemble_result(
        DesignKind::Ula,
        &layout,
        p,
        Drive::Active { currents: Some(currents) },
        report,
        None,
        None,
        runtime,
    ))
}
