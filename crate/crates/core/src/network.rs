//! Impedance and scattering matrices of the coupled array.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::em;
use crate::error::{Error, Result};
use crate::layout::ArrayLayout;
use crate::params::{ModelParams, SelfReactance};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    /// Lossless mutual impedance matrix `Z′`.
    pub z_lossless: CMatrix,
    /// `Z′ + R_loss·I`, plus the load matrix for a parasitic array.
    pub z_total: CMatrix,
    /// Scattering matrix of `z_total` at the port reference impedance.
    pub s: CMatrix,
    pub r_loss: f64,
    /// Load reactances per port, `None` at the fed port (parasitic arrays only).
    pub loads: Option<Vec<Option<f64>>>,
}

impl CouplingMatrices {
    pub fn len(&self) -> usize {
        self.z_total.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Terminates every port but `feed` in the given reactances. Any loads
    /// already present are replaced.
    pub fn with_loads(&self, feed: usize, loads: &[Option<f64>], z0: f64) -> Result<Self> {
        check_loads(self.len(), feed, loads)?;
        let mut z_total = self.z_antenna();
        for (n, x) in loads.iter().enumerate() {
            if let Some(x) = x {
                z_total[(n, n)] += Complex64::new(0.0, *x);
            }
        }
        let s = z_to_s(&z_total, z0)?;
        Ok(CouplingMatrices {
            z_lossless: self.z_lossless.clone(),
            z_total,
            s,
            r_loss: self.r_loss,
            loads: Some(loads.to_vec()),
        })
    }

    /// `Re{Z_total}` as a real matrix.
    pub fn resistance(&self) -> DMatrix<f64> {
        self.z_total.map(|z| z.re)
    }

    /// `Z_total` with the load reactances removed: the impedance seen looking
    /// into the antenna terminals.
    pub fn z_antenna(&self) -> CMatrix {
        let mut z = self.z_total.clone();
        if let Some(loads) = &self.loads {
            for (n, x) in loads.iter().enumerate() {
                if let Some(x) = x {
                    z[(n, n)] -= Complex64::new(0.0, *x);
                }
            }
        }
        z
    }
}

/// Pairwise lossless impedance matrix of the layout.
pub fn lossless_matrix(layout: &ArrayLayout, p: &ModelParams) -> Result<CMatrix> {
    let n = layout.len();
    let z_self = em::self_impedance(p)?;
    let diagonal = match p.conventions.self_reactance {
        SelfReactance::Tuned => Complex64::new(z_self.re, 0.0),
        SelfReactance::InducedEmf => z_self,
    };
    let x = layout.positions();
    let mut z = CMatrix::from_element(n, n, diagonal);
    for i in 0..n {
        for j in i + 1..n {
            let zm = em::mutual_impedance(x[j] - x[i], p)?;
            z[(i, j)] = zm;
            z[(j, i)] = zm;
        }
    }
    Ok(z)
}

/// Fully driven array: `Z = Z′ + R_loss·I`.
pub fn assemble_active(layout: &ArrayLayout, p: &ModelParams) -> Result<CouplingMatrices> {
    let z_lossless = lossless_matrix(layout, p)?;
    let r_loss = em::loss_resistance(p)?;
    let mut z_total = z_lossless.clone();
    for i in 0..layout.len() {
        z_total[(i, i)] += r_loss;
    }
    let s = z_to_s(&z_total, p.z0_ohm)?;
    Ok(CouplingMatrices {
        z_lossless,
        z_total,
        s,
        r_loss,
        loads: None,
    })
}

/// Single-feed array: `Z = Z′ + X + R_loss·I` with `X = diag(jX_n)`, zero at the feed.
///
/// `loads` has one entry per port; it must be `None` exactly at `feed`.
pub fn assemble_parasitic(
    layout: &ArrayLayout,
    feed: usize,
    loads: &[Option<f64>],
    p: &ModelParams,
) -> Result<CouplingMatrices> {
    check_loads(layout.len(), feed, loads)?;
    assemble_active(layout, p)?.with_loads(feed, loads, p.z0_ohm)
}

pub(crate) fn check_loads(n: usize, feed: usize, loads: &[Option<f64>]) -> Result<()> {
    if feed >= n {
        return Err(Error::Argument(format!("feed port {feed} out of range for {n} elements")));
    }
    if loads.len() != n {
        return Err(Error::Argument(format!("{} load entries for {n} ports", loads.len())));
    }
    if loads[feed].is_some() {
        return Err(Error::Argument(format!("load given for the fed port {feed}")));
    }
    for (i, x) in loads.iter().enumerate() {
        match x {
            None if i != feed => {
                return Err(Error::Argument(format!("missing load for parasitic port {i}")))
            }
            Some(x) if !x.is_finite() => {
                return Err(Error::Argument(format!("non-finite load {x} at port {i}")))
            }
            _ => {}
        }
    }
    Ok(())
}

/// `S = (Z − Z0·I)(Z + Z0·I)⁻¹`.
pub fn z_to_s(z: &CMatrix, z0: f64) -> Result<CMatrix> {
    let n = z.nrows();
    let id = CMatrix::identity(n, n) * Complex64::new(z0, 0.0);
    let inv = (z + &id)
        .try_inverse()
        .ok_or_else(|| Error::Numerical("Z + Z0·I is singular".into()))?;
    Ok((z - &id) * inv)
}

/// `Z = Z0·(I − S)⁻¹(I + S)`.
pub fn s_to_z(s: &CMatrix, z0: f64) -> Result<CMatrix> {
    let n = s.nrows();
    let id = CMatrix::identity(n, n);
    let inv = (&id - s)
        .try_inverse()
        .ok_or_else(|| Error::Numerical("I − S is singular".into()))?;
    Ok(inv * (&id + s) * Complex64::new(z0, 0.0))
}
