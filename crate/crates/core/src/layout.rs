use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Element positions along the x-axis, in meters. The first element sits at
/// the origin and positions strictly increase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ArrayLayout {
    positions: Vec<f64>,
}

impl ArrayLayout {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        let Some(&first) = positions.first() else {
            return Err(Error::Argument("layout needs at least one element".into()));
        };
        if first != 0.0 {
            return Err(Error::Argument(format!(
                "first element must sit at the origin, got {first}"
            )));
        }
        if let Some(bad) = positions.iter().find(|x| !x.is_finite()) {
            return Err(Error::Argument(format!("non-finite position {bad}")));
        }
        if let Some(w) = positions.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Argument(format!(
                "positions must strictly increase, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(ArrayLayout { positions })
    }

    /// Builds the layout from consecutive inter-element gaps.
    pub fn from_gaps(gaps: &[f64]) -> Result<Self> {
        let mut positions = Vec::with_capacity(gaps.len() + 1);
        positions.push(0.0);
        let mut x = 0.0;
        for &g in gaps {
            x += g;
            positions.push(x);
        }
        ArrayLayout::new(positions)
    }

    pub fn from_wavelengths(positions: &[f64], p: &ModelParams) -> Result<Self> {
        ArrayLayout::new(positions.iter().map(|&x| p.meters(x)).collect())
    }

    pub fn uniform(n: usize, spacing: f64) -> Result<Self> {
        ArrayLayout::new((0..n).map(|i| i as f64 * spacing).collect())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn positions_lambda(&self, p: &ModelParams) -> Vec<f64> {
        self.positions.iter().map(|&x| p.lambda(x)).collect()
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.positions.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Distance between the outermost elements.
    pub fn aperture(&self) -> f64 {
        self.positions.last().copied().unwrap_or(0.0)
    }
}

impl TryFrom<Vec<f64>> for ArrayLayout {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ArrayLayout::new(v)
    }
}

impl From<ArrayLayout> for Vec<f64> {
    fn from(l: ArrayLayout) -> Self {
        l.positions
    }
}
