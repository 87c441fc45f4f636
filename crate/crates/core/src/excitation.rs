//! Port currents for driven and parasitic arrays.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::em;
use crate::error::{Error, Result};
use crate::layout::ArrayLayout;
use crate::network::{check_loads, CouplingMatrices};
use crate::params::{Direction, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrayMode {
    Active,
    Parasitic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcitationState {
    pub mode: ArrayMode,
    pub currents: Vec<Complex64>,
    pub voltages: Vec<Complex64>,
    pub feed: Option<usize>,
    pub loads: Option<Vec<Option<f64>>>,
}

fn to_vec(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

/// `v = Z_total·i`.
pub fn port_voltages(cm: &CouplingMatrices, currents: &[Complex64]) -> Vec<Complex64> {
    (&cm.z_total * to_vec(currents)).iter().copied().collect()
}

/// Currents maximizing the gain towards `dir` at a total input power of `N·P_t/2`:
/// `i = √(N·P_t / (aᴴ R⁻¹ a)) · R⁻¹ a` with `R = Re{Z_total}`.
pub fn optimal_excitation(
    cm: &CouplingMatrices,
    dir: Direction,
    layout: &ArrayLayout,
    p: &ModelParams,
) -> Result<Vec<Complex64>> {
    let n = layout.len();
    if cm.len() != n {
        return Err(Error::Argument(format!("{}-port matrices for {n} elements", cm.len())));
    }
    let chol = cm
        .resistance()
        .cholesky()
        .ok_or_else(|| Error::Constraint("Re{Z} is not positive definite".into()))?;
    let a = em::array_response(dir, layout, p);
    let re = chol.solve(&DVector::from_iterator(n, a.iter().map(|z| z.re)));
    let im = chol.solve(&DVector::from_iterator(n, a.iter().map(|z| z.im)));
    let w: Vec<Complex64> = re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect();
    let quad: f64 = a.iter().zip(&w).map(|(a, w)| (a.conj() * w).re).sum();
    if !(quad > 0.0) {
        return Err(Error::Constraint(format!("aᴴ·Re{{Z}}⁻¹·a = {quad} is not positive")));
    }
    let scale = (n as f64 * p.max_input_power_w / quad).sqrt();
    Ok(w.into_iter().map(|w| w * scale).collect())
}

/// `Z_act,n = (Z·i)_n / i_n` against an arbitrary impedance matrix; `None`
/// where the port current vanishes.
pub fn driving_impedances_with(z: &DMatrix<Complex64>, currents: &[Complex64]) -> Vec<Option<Complex64>> {
    let v = z * to_vec(currents);
    v.iter()
        .zip(currents)
        .map(|(v, i)| (i.norm() > 0.0).then(|| v / i))
        .collect()
}

/// Active (driving-point) impedance of every port, including mutual coupling.
pub fn driving_impedances(cm: &CouplingMatrices, currents: &[Complex64]) -> Vec<Option<Complex64>> {
    driving_impedances_with(&cm.z_total, currents)
}

/// Unit current at the feed; every loaded port sees zero terminal voltage.
pub fn solve_parasitic_currents(cm: &CouplingMatrices, feed: usize) -> Result<ExcitationState> {
    let n = cm.len();
    if feed >= n {
        return Err(Error::Argument(format!("feed port {feed} out of range for {n} elements")));
    }
    let passive: Vec<usize> = (0..n).filter(|&i| i != feed).collect();
    let mut currents = vec![Complex64::new(0.0, 0.0); n];
    currents[feed] = Complex64::new(1.0, 0.0);
    if !passive.is_empty() {
        let m = passive.len();
        let zpp = DMatrix::from_fn(m, m, |r, c| cm.z_total[(passive[r], passive[c])]);
        let zpf = DVector::from_fn(m, |r, _| -cm.z_total[(passive[r], feed)]);
        let solved = zpp
            .lu()
            .solve(&zpf)
            .ok_or_else(|| Error::Numerical("parasitic sub-matrix is singular".into()))?;
        if solved.iter().any(|z| !z.is_finite()) {
            return Err(Error::Numerical("parasitic currents are not finite".into()));
        }
        for (r, &port) in passive.iter().enumerate() {
            currents[port] = solved[r];
        }
    }
    let voltages = port_voltages(cm, &currents);
    Ok(ExcitationState {
        mode: ArrayMode::Parasitic,
        currents,
        voltages,
        feed: Some(feed),
        loads: cm.loads.clone(),
    })
}

/// Reactive loads that cancel the active reactance of every non-fed port:
/// `X_n = −Im{Z_act,n}`.
pub fn loads_from_active(z_act: &[Complex64], feed: usize) -> Vec<Option<f64>> {
    z_act
        .iter()
        .enumerate()
        .map(|(n, z)| (n != feed).then_some(-z.im))
        .collect()
}

/// Validates and bundles a parasitic configuration.
pub fn parasitic_state(
    cm: &CouplingMatrices,
    feed: usize,
) -> Result<ExcitationState> {
    let loads = cm
        .loads
        .as_ref()
        .ok_or_else(|| Error::Argument("coupling matrices carry no loads".into()))?;
    check_loads(cm.len(), feed, loads)?;
    solve_parasitic_currents(cm, feed)
}
