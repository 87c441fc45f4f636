//! Published reference designs and results, bundled from `data/reference.toml`.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::layout::ArrayLayout;
use crate::params::ModelParams;
use crate::performance::Drive;

pub const REFERENCE_TOML: &str = include_str!("../data/reference.toml");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActiveDesign {
    pub n: usize,
    /// Wavelengths.
    pub positions: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub phase_deg: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParasiticDesign {
    pub n: usize,
    /// 1-based fed port.
    pub feed: usize,
    pub positions: Vec<f64>,
    /// Ohms; NaN at the fed port.
    pub loads: Vec<f64>,
}

impl ParasiticDesign {
    /// 0-based fed port.
    pub fn feed_index(&self) -> usize {
        self.feed - 1
    }

    pub fn load_vector(&self) -> Vec<Option<f64>> {
        self.loads.iter().map(|x| (!x.is_nan()).then_some(*x)).collect()
    }

    pub fn drive(&self) -> Drive {
        Drive::Parasitic {
            feed: self.feed_index(),
            loads: self.load_vector(),
        }
    }

    pub fn layout(&self, p: &ModelParams) -> Result<ArrayLayout> {
        ArrayLayout::from_wavelengths(&self.positions, p)
    }
}

impl ActiveDesign {
    pub fn layout(&self, p: &ModelParams) -> Result<ArrayLayout> {
        ArrayLayout::from_wavelengths(&self.positions, p)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub n: Vec<usize>,
    pub ula_gain_db: Vec<f64>,
    pub active_gain_db: Vec<f64>,
    pub parasitic_gain_db: Vec<f64>,
    pub ula_size: Vec<f64>,
    pub active_size: Vec<f64>,
    pub parasitic_size: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulatedTable {
    pub n: Vec<usize>,
    pub directivity_db: Vec<f64>,
    pub realized_gain_db: Vec<f64>,
    pub radiation_efficiency: Vec<f64>,
    pub total_efficiency: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Simulated {
    pub active: SimulatedTable,
    pub parasitic: SimulatedTable,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Runtime {
    pub n: Vec<usize>,
    pub analytical_s: Vec<f64>,
    pub simulation_s: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityRow {
    /// `X<port>` or `d<element>`, 1-based.
    pub parameter: String,
    pub values: [f64; 2],
    pub gain_db: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sensitivity {
    pub n: usize,
    pub scale: f64,
    pub rows: Vec<SensitivityRow>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceData {
    pub active: Vec<ActiveDesign>,
    pub parasitic: Vec<ParasiticDesign>,
    pub summary: Summary,
    pub simulated: Simulated,
    pub runtime: Runtime,
    pub sensitivity: Sensitivity,
}

fn lookup<T>(items: &[T], n: usize, get: impl Fn(&T) -> usize) -> Result<&T> {
    items
        .iter()
        .find(|x| get(x) == n)
        .ok_or_else(|| Error::Argument(format!("no reference design with {n} elements")))
}

fn column(ns: &[usize], values: &[f64], n: usize) -> Option<f64> {
    ns.iter().position(|&m| m == n).map(|k| values[k])
}

impl ReferenceData {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Argument(format!("reference data: {e}")))
    }

    /// The bundled data set.
    pub fn bundled() -> &'static ReferenceData {
        static DATA: OnceLock<ReferenceData> = OnceLock::new();
        DATA.get_or_init(|| Self::parse(REFERENCE_TOML).expect("bundled reference data is valid"))
    }

    pub fn active_design(&self, n: usize) -> Result<&ActiveDesign> {
        lookup(&self.active, n, |d| d.n)
    }

    pub fn parasitic_design(&self, n: usize) -> Result<&ParasiticDesign> {
        lookup(&self.parasitic, n, |d| d.n)
    }

    pub fn ula_gain_db(&self, n: usize) -> Option<f64> {
        column(&self.summary.n, &self.summary.ula_gain_db, n)
    }

    pub fn active_gain_db(&self, n: usize) -> Option<f64> {
        column(&self.summary.n, &self.summary.active_gain_db, n)
    }

    pub fn parasitic_gain_db(&self, n: usize) -> Option<f64> {
        column(&self.summary.n, &self.summary.parasitic_gain_db, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_is_consistent() {
        let r = ReferenceData::bundled();
        assert_eq!(r.active.len(), 6);
        assert_eq!(r.parasitic.len(), 6);
        for d in &r.active {
            assert_eq!(d.positions.len(), d.n);
            assert_eq!(d.amplitude.len(), d.n);
            assert_eq!(d.phase_deg.len(), d.n);
            let size = column(&r.summary.n, &r.summary.active_size, d.n).unwrap();
            assert_eq!(*d.positions.last().unwrap(), size);
        }
        for d in &r.parasitic {
            assert_eq!(d.positions.len(), d.n);
            let loads = d.load_vector();
            assert_eq!(loads.iter().filter(|x| x.is_none()).count(), 1);
            assert!(loads[d.feed_index()].is_none());
            let size = column(&r.summary.n, &r.summary.parasitic_size, d.n).unwrap();
            assert_eq!(*d.positions.last().unwrap(), size);
        }
        assert_eq!(r.parasitic_gain_db(5), Some(11.06));
        assert_eq!(r.sensitivity.rows.len(), 9);
        assert!(r.active_design(8).is_err());
    }
}
