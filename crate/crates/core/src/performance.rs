//! Gain, directivity, efficiencies and realized gain of a configured array.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::db;
use crate::em;
use crate::error::{Error, Result};
use crate::excitation::{self, ArrayMode};
use crate::layout::ArrayLayout;
use crate::network::{self, CouplingMatrices};
use crate::params::{Conventions, Direction, ModelParams, ReflectionWeighting};
use crate::quad::{self, Tolerance};

fn hermitian_form(m: &DMatrix<f64>, i: &[Complex64]) -> f64 {
    let n = i.len();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            acc += (i[r].conj() * i[c]).re * m[(r, c)];
        }
    }
    acc
}

fn check_currents(cm: &CouplingMatrices, i: &[Complex64]) -> Result<()> {
    if i.len() != cm.len() {
        return Err(Error::Argument(format!("{} currents for {} ports", i.len(), cm.len())));
    }
    if i.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::Domain("all port currents are zero".into()));
    }
    Ok(())
}

/// `½·iᴴ·Re{Z}·i` for the given impedance matrix.
pub fn power(z: &DMatrix<Complex64>, i: &[Complex64]) -> f64 {
    0.5 * hermitian_form(&z.map(|z| z.re), i)
}

/// Array gain `G = (η/π)·F(θ)²·|aᴴi|² / (iᴴ·Re{Z}·i)` (linear).
pub fn gain(
    dir: Direction,
    layout: &ArrayLayout,
    i: &[Complex64],
    cm: &CouplingMatrices,
    p: &ModelParams,
) -> Result<f64> {
    check_currents(cm, i)?;
    let accepted = hermitian_form(&cm.resistance(), i);
    if !(accepted > 0.0) {
        return Err(Error::Constraint(format!("input power {accepted} is not positive")));
    }
    let f = em::element_factor(dir.theta, p);
    let af = em::array_factor(dir, layout, i, p).norm_sqr();
    Ok(p.eta / PI * f * f * af / accepted)
}

/// `e_cd = iᴴRe{Z′}i / iᴴRe{Z}i`.
pub fn radiation_efficiency(i: &[Complex64], cm: &CouplingMatrices) -> Result<f64> {
    check_currents(cm, i)?;
    let radiated = hermitian_form(&cm.z_lossless.map(|z| z.re), i);
    let accepted = hermitian_form(&cm.resistance(), i);
    if !(accepted > 0.0) {
        return Err(Error::Constraint(format!("input power {accepted} is not positive")));
    }
    Ok(radiated / accepted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedReflection {
    /// `Γ_{n,c}` per port.
    pub coefficients: Vec<Complex64>,
    /// `1 − |Γ_{n,c}|²` per port.
    pub port_efficiency: Vec<f64>,
    /// Aggregate reflection efficiency of the array.
    pub efficiency: f64,
}

/// Combined reflection coefficients of a fully driven array,
/// `Γ_{n,c} = (1/i_n)·Σ_m S_nm·i_m`, and their weighted aggregate
/// `e_r = 1 − Σ w_n|Γ_{n,c}|² / Σ w_n`.
///
/// `S_nn` takes part in the sum only with `include_self_reflection`.
pub fn combined_reflection(
    cm: &CouplingMatrices,
    i: &[Complex64],
    conventions: &Conventions,
) -> Result<CombinedReflection> {
    check_currents(cm, i)?;
    if let Some(n) = i.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::Domain(format!("port {n} carries no current")));
    }
    let n = i.len();
    let coefficients: Vec<Complex64> = (0..n)
        .map(|r| {
            let sum: Complex64 = (0..n)
                .filter(|&c| c != r || conventions.include_self_reflection)
                .map(|c| cm.s[(r, c)] * i[c])
                .sum();
            sum / i[r]
        })
        .collect();
    let port_efficiency: Vec<f64> = coefficients.iter().map(|g| 1.0 - g.norm_sqr()).collect();
    let weights: Vec<f64> = match conventions.reflection_weighting {
        ReflectionWeighting::CurrentSquared => i.iter().map(|z| z.norm_sqr()).collect(),
        ReflectionWeighting::InputPower => excitation::port_voltages(cm, i)
            .iter()
            .zip(i)
            .map(|(v, i)| 0.5 * (v * i.conj()).re)
            .collect(),
    };
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Constraint("aggregate reflection weights are not positive".into()));
    }
    let reflected: f64 = weights.iter().zip(&coefficients).map(|(w, g)| w * g.norm_sqr()).sum();
    Ok(CombinedReflection {
        coefficients,
        port_efficiency,
        efficiency: 1.0 - reflected / total,
    })
}

/// Mismatch efficiency `1 − |(Z_in − Z0)/(Z_in + Z0)|²` of the fed element.
pub fn parasitic_reflection(z_in: Complex64, p: &ModelParams) -> Result<f64> {
    if !(z_in.re > 0.0) {
        return Err(Error::Constraint(format!("input impedance {z_in} is not passive")));
    }
    let gamma = (z_in - p.z0_ohm) / (z_in + p.z0_ohm);
    Ok(1.0 - gamma.norm_sqr())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub direction: Direction,
    pub mode: ArrayMode,
    pub feed: Option<usize>,
    pub currents: Vec<Complex64>,
    pub directivity: f64,
    pub directivity_dbi: f64,
    pub gain: f64,
    pub gain_dbi: f64,
    pub realized_gain: f64,
    pub realized_gain_dbi: f64,
    /// `e_cd`
    pub radiation_efficiency: f64,
    /// `e_r`
    pub reflection_efficiency: f64,
    /// `e_t = e_cd·e_r`
    pub total_efficiency: f64,
    /// Driving-point impedance seen at each antenna terminal, loads excluded.
    pub driving_impedances: Vec<Option<Complex64>>,
    /// Reflection coefficient per port: combined coefficients when fully
    /// driven, the feed mismatch alone when parasitic.
    pub reflection: Vec<Option<Complex64>>,
    pub p_rad: f64,
    pub p_loss: f64,
    pub p_in: f64,
}

/// Result of an evaluation: infeasible configurations are reported, not raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Evaluation {
    Feasible(Box<PerformanceReport>),
    Infeasible { reason: String },
}

impl Evaluation {
    pub fn report(&self) -> Option<&PerformanceReport> {
        match self {
            Evaluation::Feasible(r) => Some(r),
            Evaluation::Infeasible { .. } => None,
        }
    }

    pub fn into_report(self) -> Option<PerformanceReport> {
        match self {
            Evaluation::Feasible(r) => Some(*r),
            Evaluation::Infeasible { .. } => None,
        }
    }

    pub fn realized_gain_dbi(&self) -> Option<f64> {
        self.report().map(|r| r.realized_gain_dbi)
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Evaluation::Feasible(_))
    }

    fn infeasible(reason: impl Into<String>) -> Self {
        Evaluation::Infeasible {
            reason: reason.into(),
        }
    }
}

/// How the array is driven.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Drive {
    /// Every port driven; `None` selects the gain-optimal currents.
    Active { currents: Option<Vec<Complex64>> },
    /// One fed port, reactive loads elsewhere (`None` at the feed).
    Parasitic { feed: usize, loads: Vec<Option<f64>> },
}

#[allow(clippy::too_many_arguments)]
fn report(
    dir: Direction,
    mode: ArrayMode,
    feed: Option<usize>,
    layout: &ArrayLayout,
    cm: &CouplingMatrices,
    currents: Vec<Complex64>,
    reflection_efficiency: f64,
    driving_impedances: Vec<Option<Complex64>>,
    reflection: Vec<Option<Complex64>>,
    p: &ModelParams,
) -> Result<PerformanceReport> {
    let g = gain(dir, layout, &currents, cm, p)?;
    let e_cd = radiation_efficiency(&currents, cm)?;
    let p_in = power(&cm.z_total, &currents);
    let p_rad = power(&cm.z_lossless, &currents);
    let d = g / e_cd;
    let realized = reflection_efficiency * g;
    Ok(PerformanceReport {
        direction: dir,
        mode,
        feed,
        currents,
        directivity: d,
        directivity_dbi: db(d),
        gain: g,
        gain_dbi: db(g),
        realized_gain: realized,
        realized_gain_dbi: db(realized),
        radiation_efficiency: e_cd,
        reflection_efficiency,
        total_efficiency: e_cd * reflection_efficiency,
        driving_impedances,
        reflection,
        p_rad,
        p_loss: p_in - p_rad,
        p_in,
    })
}

/// Scores a fully driven array with the given currents.
pub fn assess_active(
    cm: &CouplingMatrices,
    layout: &ArrayLayout,
    currents: Vec<Complex64>,
    p: &ModelParams,
    dir: Direction,
) -> Result<Evaluation> {
    check_currents(cm, &currents)?;
    let z_act = excitation::driving_impedances(cm, &currents);
    for (n, z) in z_act.iter().enumerate() {
        match z {
            None => return Err(Error::Domain(format!("port {n} carries no current"))),
            Some(z) if !(z.re > 0.0) => {
                return Ok(Evaluation::infeasible(format!(
                    "driving impedance {z:.3} at port {n} has a non-positive real part"
                )))
            }
            _ => {}
        }
    }
    let cr = combined_reflection(cm, &currents, &p.conventions)?;
    let reflection = cr.coefficients.iter().copied().map(Some).collect();
    match report(
        dir,
        ArrayMode::Active,
        None,
        layout,
        cm,
        currents,
        cr.efficiency,
        z_act,
        reflection,
        p,
    ) {
        Ok(r) => Ok(Evaluation::Feasible(Box::new(r))),
        Err(Error::Constraint(why)) => Ok(Evaluation::infeasible(why)),
        Err(e) => Err(e),
    }
}

/// Scores a single-feed array whose matrices already carry the loads.
pub fn assess_parasitic(
    cm: &CouplingMatrices,
    layout: &ArrayLayout,
    feed: usize,
    p: &ModelParams,
    dir: Direction,
) -> Result<Evaluation> {
    let state = match excitation::parasitic_state(cm, feed) {
        Ok(s) => s,
        Err(Error::Numerical(why)) => return Ok(Evaluation::infeasible(why)),
        Err(e) => return Err(e),
    };
    let z_in = state.voltages[feed] / state.currents[feed];
    let e_r = match parasitic_reflection(z_in, p) {
        Ok(e) => e,
        Err(Error::Constraint(why)) => return Ok(Evaluation::infeasible(why)),
        Err(e) => return Err(e),
    };
    let driving = excitation::driving_impedances_with(&cm.z_antenna(), &state.currents);
    let gamma = (z_in - p.z0_ohm) / (z_in + p.z0_ohm);
    let reflection = (0..cm.len()).map(|n| (n == feed).then_some(gamma)).collect();
    match report(
        dir,
        ArrayMode::Parasitic,
        Some(feed),
        layout,
        cm,
        state.currents,
        e_r,
        driving,
        reflection,
        p,
    ) {
        Ok(r) => Ok(Evaluation::Feasible(Box::new(r))),
        Err(Error::Constraint(why)) => Ok(Evaluation::infeasible(why)),
        Err(e) => Err(e),
    }
}

/// Full analytical evaluation: matrix assembly through realized gain.
pub fn evaluate(layout: &ArrayLayout, drive: &Drive, p: &ModelParams, dir: Direction) -> Result<Evaluation> {
    match drive {
        Drive::Active { currents } => {
            let cm = network::assemble_active(layout, p)?;
            let currents = match currents {
                Some(c) => c.clone(),
                None => match excitation::optimal_excitation(&cm, dir, layout, p) {
                    Ok(c) => c,
                    Err(Error::Constraint(why)) => return Ok(Evaluation::infeasible(why)),
                    Err(e) => return Err(e),
                },
            };
            assess_active(&cm, layout, currents, p, dir)
        }
        Drive::Parasitic { feed, loads } => {
            let cm = network::assemble_parasitic(layout, *feed, loads, p)?;
            assess_parasitic(&cm, layout, *feed, p, dir)
        }
    }
}

fn intensity(d: Direction, layout: &ArrayLayout, currents: &[Complex64], p: &ModelParams) -> Result<f64> {
    // Radiation intensity r²|E|²/(2η) at r = 1.
    Ok(em::far_field(d, 1.0, layout, currents, p)?.norm_sqr() / (2.0 * p.eta))
}

/// Radiated power from numerical integration of the far-field power density
/// over the sphere, independent of the impedance matrices.
pub fn radiated_power_oracle(layout: &ArrayLayout, currents: &[Complex64], p: &ModelParams) -> Result<f64> {
    if currents.len() != layout.len() {
        return Err(Error::Argument(format!(
            "{} currents for {} elements",
            currents.len(),
            layout.len()
        )));
    }
    if currents.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::Domain("all currents are zero".into()));
    }
    let inner_tol = Tolerance {
        abs: 1e-14,
        rel: 1e-11,
        max_intervals: 4000,
    };
    let outer_tol = Tolerance {
        abs: 1e-13,
        rel: 1e-10,
        max_intervals: 4000,
    };
    let mut failure = None;
    let p_rad = quad::integrate(
        |theta| {
            if failure.is_some() {
                return 0.0;
            }
            let ring = quad::integrate(
                |phi| intensity(Direction { theta, phi }, layout, currents, p).unwrap_or(0.0),
                -PI,
                PI,
                inner_tol,
            );
            match ring {
                Ok(v) => v * theta.sin(),
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        0.0,
        PI,
        outer_tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !(p_rad > 0.0) {
        return Err(Error::Numerical("integrated radiated power is not positive".into()));
    }
    Ok(p_rad)
}

/// Directivity towards `dir` from the sphere-integrated radiated power.
pub fn directivity_oracle(
    layout: &ArrayLayout,
    currents: &[Complex64],
    p: &ModelParams,
    dir: Direction,
) -> Result<f64> {
    let p_rad = radiated_power_oracle(layout, currents, p)?;
    Ok(4.0 * PI * intensity(dir, layout, currents, p)? / p_rad)
}
