use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network;
use crate::params::Direction;
use crate::performance::{self, Drive};

use super::DesignResult;

/// Floor for the dB value of pattern nulls.
pub const FLOOR_DB: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cut {
    /// θ = 90°, φ over the full circle.
    Azimuth,
    /// θ from 0° to 180°, φ over the full circle.
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternSpec {
    pub cut: Cut,
    /// Requested angular step; the grid uses the largest step not exceeding
    /// it that divides the range evenly.
    pub resolution_deg: f64,
}

impl Default for PatternSpec {
    fn default() -> Self {
        PatternSpec {
            cut: Cut::Azimuth,
            resolution_deg: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternSample {
    pub theta_deg: f64,
    pub phi_deg: f64,
    /// Linear realized gain.
    pub realized_gain: f64,
    pub realized_gain_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub spec: PatternSpec,
    /// Grid steps actually used.
    pub theta_step_deg: f64,
    pub phi_step_deg: f64,
    pub samples: Vec<PatternSample>,
}

impl Pattern {
    pub fn peak(&self) -> Option<&PatternSample> {
        self.samples
            .iter()
            .reduce(|a, b| if b.realized_gain > a.realized_gain { b } else { a })
    }
}

fn steps(range: f64, resolution: f64) -> usize {
    (range / resolution - 1e-9).ceil().max(1.0) as usize
}

/// Realized-gain pattern of a design with its currents held fixed.
pub fn pattern_export(design: &DesignResult, spec: &PatternSpec) -> Result<Pattern> {
    if !(0.1..=10.0).contains(&spec.resolution_deg) {
        return Err(Error::invalid(
            "resolution",
            format!("must lie in [0.1, 10] degrees, got {}", spec.resolution_deg),
        ));
    }
    let p = design.params()?;
    let layout = design.layout()?;
    let cm = match &design.drive {
        Drive::Active { .. } => network::assemble_active(&layout, &p)?,
        Drive::Parasitic { feed, loads } => network::assemble_parasitic(&layout, *feed, loads, &p)?,
    };
    let currents = &design.report.currents;
    let e_r = design.report.reflection_efficiency;

    let n_phi = steps(360.0, spec.resolution_deg);
    let phi_step = 360.0 / n_phi as f64;
    let phis: Vec<f64> = (0..n_phi).map(|k| -180.0 + k as f64 * phi_step).collect();
    let (thetas, theta_step) = match spec.cut {
        Cut::Azimuth => (vec![90.0], 0.0),
        Cut::Sphere => {
            let n = steps(180.0, spec.resolution_deg);
            let step = 180.0 / n as f64;
            ((0..=n).map(|k| k as f64 * step).collect(), step)
        }
    };

    let mut samples = Vec::with_capacity(thetas.len() * phis.len());
    for &theta_deg in &thetas {
        for &phi_deg in &phis {
            let dir = Direction::from_degrees(theta_deg, phi_deg)?;
            let g = e_r * performance::gain(dir, &layout, currents, &cm, &p)?;
            let g_db = if g > 0.0 { crate::db(g).max(FLOOR_DB) } else { FLOOR_DB };
            samples.push(PatternSample {
                theta_deg,
                phi_deg,
                realized_gain: g,
                realized_gain_db: g_db,
            });
        }
    }
    Ok(Pattern {
        spec: *spec,
        theta_step_deg: theta_step,
        phi_step_deg: phi_step,
        samples,
    })
}
