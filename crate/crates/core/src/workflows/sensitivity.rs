use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::ArrayLayout;
use crate::performance::{self, Drive};

use super::parasitic::{parasitic_candidate, FeedPolicy};
use super::DesignResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivitySpec {
    /// Relative half-width of every sweep, e.g. 0.05 for ±5 %.
    pub scale: f64,
    /// Grid points per sweep, endpoints included.
    pub samples: usize,
    /// Re-derive the loads from the driven array at every perturbed layout
    /// (as a fabricated design would be re-tuned), instead of keeping them.
    pub rederive_loads: bool,
}

impl Default for SensitivitySpec {
    fn default() -> Self {
        SensitivitySpec {
            scale: 0.05,
            samples: 21,
            rederive_loads: true,
        }
    }
}

impl SensitivitySpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.scale) {
            return Err(Error::invalid("scale", format!("must lie in [0, 1), got {}", self.scale)));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples", "need at least one sample"));
        }
        Ok(())
    }

    /// Relative factors, monotone from `-scale` to `+scale`.
    pub fn factors(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![0.0];
        }
        let m = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| -self.scale + 2.0 * self.scale * k as f64 / m)
            .collect()
    }
}

/// 0-based port or element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum Parameter {
    Load(usize),
    Position(usize),
}

impl Parameter {
    /// Table label with 1-based numbering, e.g. `X3` or `d2`.
    pub fn label(&self) -> String {
        match self {
            Parameter::Load(n) => format!("X{}", n + 1),
            Parameter::Position(n) => format!("d{}", n + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub parameter: Parameter,
    pub label: String,
    /// Swept parameter values: ohms for loads, wavelengths for positions.
    pub values: Vec<f64>,
    /// Realized gain per sample; `None` where the perturbed design is infeasible.
    pub gains_db: Vec<Option<f64>>,
    /// `[min, max]` over the feasible samples.
    pub range_db: Option<[f64; 2]>,
    pub infeasible: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub spec: SensitivitySpec,
    pub nominal_db: f64,
    pub rows: Vec<SensitivityRow>,
}

fn row(parameter: Parameter, values: Vec<f64>, gains_db: Vec<Option<f64>>) -> SensitivityRow {
    let feasible: Vec<f64> = gains_db.iter().flatten().copied().collect();
    let range_db = (!feasible.is_empty()).then(|| {
        let lo = feasible.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = feasible.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        [lo, hi]
    });
    SensitivityRow {
        parameter,
        label: parameter.label(),
        values,
        infeasible: gains_db.iter().filter(|g| g.is_none()).count(),
        gains_db,
        range_db,
    }
}

/// Positions with element `n` displaced by `factor` times its gap to the
/// previous element; the first element moves by `factor` times the first gap.
/// The result is translated back so the first element sits at the origin.
fn perturbed_positions(base: &[f64], n: usize, factor: f64) -> Vec<f64> {
    let mut pos = base.to_vec();
    if n == 0 {
        pos[0] = factor * (base[1] - base[0]);
    } else {
        pos[n] += factor * (base[n] - base[n - 1]);
    }
    let origin = pos[0];
    pos.iter().map(|x| x - origin).collect()
}

/// One-at-a-time tolerance sweep of a single-feed design. Each load is scaled
/// with the layout held fixed. Each element position is displaced by a
/// fraction of its gap to the previous element with every other element
/// held fixed.
pub fn sensitivity(design: &DesignResult, spec: &SensitivitySpec) -> Result<SensitivityReport> {
    spec.validate()?;
    let (feed, loads) = match &design.drive {
        Drive::Parasitic { feed, loads } => (*feed, loads.clone()),
        Drive::Active { .. } => {
            return Err(Error::Argument("sensitivity analysis needs a single-feed design".into()))
        }
    };
    let p = design.params()?;
    let dir = design.direction;
    let layout = design.layout()?;
    let factors = spec.factors();
    let score = |layout: &ArrayLayout, loads: &[Option<f64>]| -> Result<Option<f64>> {
        let drive = Drive::Parasitic {
            feed,
            loads: loads.to_vec(),
        };
        Ok(performance::evaluate(layout, &drive, &p, dir)?.realized_gain_dbi())
    };
    let nominal_db = score(&layout, &loads)?
        .ok_or_else(|| Error::Constraint("the nominal design is infeasible".into()))?;

    let mut rows = Vec::new();
    for (n, x) in loads.iter().enumerate() {
        let Some(x) = *x else { continue };
        let mut values = Vec::with_capacity(factors.len());
        let mut gains = Vec::with_capacity(factors.len());
        for f in &factors {
            let mut l = loads.clone();
            l[n] = Some(x * (1.0 + f));
            values.push(x * (1.0 + f));
            gains.push(score(&layout, &l)?);
        }
        rows.push(row(Parameter::Load(n), values, gains));
    }

    if layout.len() >= 2 {
        for n in 0..layout.len() {
            let mut values = Vec::with_capacity(factors.len());
            let mut gains = Vec::with_capacity(factors.len());
            for f in &factors {
                let base = layout.positions();
                let moved = if n == 0 { f * base[1] } else { base[n] + f * (base[n] - base[n - 1]) };
                values.push(p.lambda(moved));
                let pos = perturbed_positions(base, n, *f);
                let gain = match ArrayLayout::new(pos) {
                    Err(_) => None,
                    Ok(perturbed) if spec.rederive_loads => {
                        parasitic_candidate(&perturbed, &p, FeedPolicy::Port(feed), dir, false)?
                            .map(|c| c.report.realized_gain_dbi)
                    }
                    Ok(perturbed) => score(&perturbed, &loads)?,
                };
                gains.push(gain);
            }
            rows.push(row(Parameter::Position(n), values, gains));
        }
    }

    Ok(SensitivityReport {
        spec: *spec,
        nominal_db,
        rows,
    })
}
