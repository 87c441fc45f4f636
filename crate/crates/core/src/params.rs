//! Model constants and the observation direction.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Free-space permeability, 4π·10⁻⁷ H/m.
pub const MU_0: f64 = 4.0e-7 * PI;
pub const COPPER_CONDUCTIVITY: f64 = 5.8e7;

/// How the diagonal of the lossless impedance matrix is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SelfReactance {
    /// Elements are tuned to resonance: the diagonal keeps only the
    /// induced-EMF self-resistance.
    #[default]
    Tuned,
    /// Full induced-EMF self-impedance, radius-dependent reactance included.
    InducedEmf,
}

/// Per-port weights used to aggregate the combined reflection coefficients
/// of a fully driven array into one reflection efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReflectionWeighting {
    /// `|i_n|²`; with the self term included this is `1 − ‖S·i‖²/‖i‖²`.
    #[default]
    CurrentSquared,
    /// Port input power `½·Re{v_n·i_n*}`.
    InputPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Conventions {
    pub self_reactance: SelfReactance,
    /// Include `S_nn` in the combined reflection coefficient of port `n`.
    pub include_self_reflection: bool,
    pub reflection_weighting: ReflectionWeighting,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            self_reactance: SelfReactance::Tuned,
            include_self_reflection: true,
            reflection_weighting: ReflectionWeighting::CurrentSquared,
        }
    }
}

/// User-facing description of the model; lengths are in wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    pub frequency_hz: f64,
    pub length_lambda: f64,
    pub radius_lambda: f64,
    pub conductivity: f64,
    pub max_input_power_w: f64,
    pub z0_ohm: f64,
    pub conventions: Conventions,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            frequency_hz: 3.5e9,
            length_lambda: 0.5,
            radius_lambda: 1.0 / 200.0,
            conductivity: COPPER_CONDUCTIVITY,
            max_input_power_w: 0.5,
            z0_ohm: 73.0,
            conventions: Conventions::default(),
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<ModelParams> {
        let f = self.frequency_hz;
        if !(f.is_finite() && f > 0.0) {
            return Err(Error::invalid("frequency_hz", format!("must be positive, got {f}")));
        }
        let l = self.length_lambda;
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::invalid("length_lambda", format!("must be positive, got {l}")));
        }
        let rho = self.radius_lambda;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::invalid("radius_lambda", format!("must be positive, got {rho}")));
        }
        if rho > l / 10.0 {
            return Err(Error::invalid(
                "radius_lambda",
                format!("thin-wire model needs radius <= length/10, got {rho} vs {l}"),
            ));
        }
        if !(self.conductivity > 0.0) {
            return Err(Error::invalid(
                "conductivity",
                format!("must be positive, got {}", self.conductivity),
            ));
        }
        let pt = self.max_input_power_w;
        if !(pt.is_finite() && pt > 0.0) {
            return Err(Error::invalid("max_input_power_w", format!("must be positive, got {pt}")));
        }
        let z0 = self.z0_ohm;
        if !(z0.is_finite() && z0 > 0.0) {
            return Err(Error::invalid("z0_ohm", format!("must be positive, got {z0}")));
        }
        // Impedances are referred to the feed-point current I_m·sin(kl/2).
        let reference = (PI * l).sin();
        if reference.abs() < 1e-9 {
            return Err(Error::DegenerateReference(reference));
        }

        let wavelength = SPEED_OF_LIGHT / f;
        Ok(ModelParams {
            frequency_hz: f,
            wavelength_m: wavelength,
            wavenumber: 2.0 * PI / wavelength,
            eta: MU_0 * SPEED_OF_LIGHT,
            mu: MU_0,
            conductivity: self.conductivity,
            max_input_power_w: pt,
            length_m: l * wavelength,
            radius_m: rho * wavelength,
            z0_ohm: z0,
            conventions: self.conventions,
        })
    }
}

/// Validated, derived model constants in SI units. Build through [`ModelSpec::build`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    pub frequency_hz: f64,
    pub wavelength_m: f64,
    /// rad/m
    pub wavenumber: f64,
    /// Free-space wave impedance, Ω.
    pub eta: f64,
    pub mu: f64,
    /// S/m
    pub conductivity: f64,
    /// Per-element maximum input power `P_t`, W.
    pub max_input_power_w: f64,
    pub length_m: f64,
    pub radius_m: f64,
    /// Port reference impedance, Ω.
    pub z0_ohm: f64,
    pub conventions: Conventions,
}

impl ModelParams {
    pub fn half_length(&self) -> f64 {
        0.5 * self.length_m
    }

    pub fn lambda(&self, meters: f64) -> f64 {
        meters / self.wavelength_m
    }

    pub fn meters(&self, wavelengths: f64) -> f64 {
        wavelengths * self.wavelength_m
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            frequency_hz: self.frequency_hz,
            length_lambda: self.length_m / self.wavelength_m,
            radius_lambda: self.radius_m / self.wavelength_m,
            conductivity: self.conductivity,
            max_input_power_w: self.max_input_power_w,
            z0_ohm: self.z0_ohm,
            conventions: self.conventions,
        }
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelSpec::default().build().expect("default model is valid")
    }
}

/// Observation direction in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    /// Along the array axis (+x).
    pub const END_FIRE: Direction = Direction {
        theta: PI / 2.0,
        phi: 0.0,
    };

    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("theta must lie in [0, π], got {theta}")));
        }
        if !(-PI..=PI).contains(&phi) {
            return Err(Error::Domain(format!("phi must lie in [-π, π], got {phi}")));
        }
        Ok(Direction { theta, phi })
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Direction::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// x-component of the unit vector r̂; the array lies on the x-axis.
    pub fn axial_cosine(&self) -> f64 {
        self.theta.sin() * self.phi.cos()
    }
}
