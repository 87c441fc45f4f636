//! Thin-wire dipole primitives: induced-EMF impedances, conductor loss,
//! element factor, array response and far field.
//!
//! All dipoles are parallel to z, of equal length `l = 2h`, and carry the
//! sinusoidal standing-wave current `I(z) = I_m sin k(h − |z|)`. Impedances
//! are referred to the feed-point current `I_m sin kh`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::layout::ArrayLayout;
use crate::params::{Direction, ModelParams};
use crate::quad::{self, Tolerance};
use crate::special::exp_integral_antiderivative;

pub use crate::special::sin_cos_integrals;

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Driving-point impedance of an isolated dipole: the side-by-side coupling
/// evaluated at a separation equal to the wire radius.
pub fn self_impedance(p: &ModelParams) -> Result<Complex64> {
    coupling_closed_form(p.radius_m, p)
}

/// Mutual impedance of two parallel side-by-side dipoles `d` meters apart
/// (filamentary currents).
pub fn mutual_impedance(d: f64, p: &ModelParams) -> Result<Complex64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!(
            "mutual impedance needs a positive separation, got {d}"
        )));
    }
    coupling_closed_form(d, p)
}

/// Same quantity as [`mutual_impedance`], integrating the induced EMF
/// numerically instead of through Si/Ci.
pub fn mutual_impedance_quadrature(d: f64, p: &ModelParams) -> Result<Complex64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!(
            "mutual impedance needs a positive separation, got {d}"
        )));
    }
    let k = p.wavenumber;
    let h = p.half_length();
    let reference = (k * h).sin();
    let tol = Tolerance {
        abs: 1e-14,
        rel: 1e-12,
        max_intervals: 20_000,
    };
    // E_z on the second dipole produced by the first, times its current.
    let integrand = |z: f64| {
        let r0 = d.hypot(z);
        let r1 = d.hypot(z - h);
        let r2 = d.hypot(z + h);
        let field = (-J * k * r1).exp() / r1 + (-J * k * r2).exp() / r2
            - 2.0 * (k * h).cos() * (-J * k * r0).exp() / r0;
        field * (k * (h - z.abs())).sin()
    };
    let lower = quad::integrate_complex(integrand, -h, 0.0, tol)?;
    let upper = quad::integrate_complex(integrand, 0.0, h, tol)?;
    Ok(J * p.eta / (4.0 * PI) * (lower + upper) / (reference * reference))
}

/// `∫_{za}^{zb} e^{−jkR}/R · e^{σ·jkz} dz` with `R = √(d² + (z − s)²)` and
/// `σ = ±1`, via the substitution `w = k(R ∓ (z − s))`.
fn kernel(k: f64, d: f64, s: f64, za: f64, zb: f64, sigma: f64) -> Result<Complex64> {
    let d2 = d * d;
    // R − u and R + u without cancellation.
    let minus = |u: f64| {
        let r = d.hypot(u);
        if u > 0.0 {
            d2 / (r + u)
        } else {
            r - u
        }
    };
    let plus = |u: f64| {
        let r = d.hypot(u);
        if u < 0.0 {
            d2 / (r - u)
        } else {
            r + u
        }
    };
    let (ua, ub) = (za - s, zb - s);
    if sigma > 0.0 {
        let e = exp_integral_antiderivative(k * minus(ub))? - exp_integral_antiderivative(k * minus(ua))?;
        Ok(-(J * k * s).exp() * e)
    } else {
        let e = exp_integral_antiderivative(k * plus(ub))? - exp_integral_antiderivative(k * plus(ua))?;
        Ok((-J * k * s).exp() * e)
    }
}

fn coupling_closed_form(d: f64, p: &ModelParams) -> Result<Complex64> {
    let k = p.wavenumber;
    let h = p.half_length();
    let reference = (k * h).sin();
    if reference.abs() < 1e-9 {
        return Err(Error::DegenerateReference(reference));
    }
    let (up, down) = ((J * k * h).exp(), (-J * k * h).exp());
    // The field of the source dipole is three spherical waves centred on its
    // ends and its feed point.
    let sources = [(h, 1.0), (-h, 1.0), (0.0, -2.0 * (k * h).cos())];
    let mut total = Complex64::new(0.0, 0.0);
    for (s, weight) in sources {
        // z in [0, h]: sin k(h − z); z in [−h, 0]: sin k(h + z).
        let upper = up * kernel(k, d, s, 0.0, h, -1.0)? - down * kernel(k, d, s, 0.0, h, 1.0)?;
        let lower = up * kernel(k, d, s, -h, 0.0, 1.0)? - down * kernel(k, d, s, -h, 0.0, -1.0)?;
        total += weight * (upper + lower) / (2.0 * J);
    }
    Ok(J * p.eta / (4.0 * PI) * total / (reference * reference))
}

/// Surface resistance `√(π f μ / σ)`.
pub fn surface_resistance(p: &ModelParams) -> f64 {
    (PI * p.frequency_hz * p.mu / p.conductivity).sqrt()
}

/// Ohmic loss resistance referred to the feed current.
pub fn loss_resistance(p: &ModelParams) -> Result<f64> {
    if !(p.conductivity > 0.0) {
        return Err(Error::Domain(format!(
            "conductivity must be positive, got {}",
            p.conductivity
        )));
    }
    let k = p.wavenumber;
    let h = p.half_length();
    let reference = (k * h).sin();
    if reference.abs() < 1e-9 {
        return Err(Error::DegenerateReference(reference));
    }
    // ∫_{−h}^{h} sin² k(h − |z|) dz
    let current_norm = h - (2.0 * k * h).sin() / (2.0 * k);
    Ok(surface_resistance(p) / (2.0 * PI * p.radius_m) * current_norm / (reference * reference))
}

/// θ̂ component of the isolated element pattern.
pub fn element_factor(theta: f64, p: &ModelParams) -> f64 {
    let s = theta.sin();
    if s.abs() < 1e-9 {
        return 0.0;
    }
    let half = 0.5 * p.wavenumber * p.length_m;
    ((half * theta.cos()).cos() - half.cos()) / s
}

/// `a_n = exp(−j k d_n sinθ cosφ)`.
pub fn array_response(dir: Direction, layout: &ArrayLayout, p: &ModelParams) -> Vec<Complex64> {
    let u = p.wavenumber * dir.axial_cosine();
    layout
        .positions()
        .iter()
        .map(|&x| Complex64::from_polar(1.0, -u * x))
        .collect()
}

/// `aᴴ·i`, the array factor for the given port currents.
pub fn array_factor(dir: Direction, layout: &ArrayLayout, currents: &[Complex64], p: &ModelParams) -> Complex64 {
    array_response(dir, layout, p)
        .iter()
        .zip(currents)
        .map(|(a, i)| a.conj() * i)
        .sum()
}

/// θ̂ component of the far electric field at distance `r`, V/m.
pub fn far_field(
    dir: Direction,
    r: f64,
    layout: &ArrayLayout,
    currents: &[Complex64],
    p: &ModelParams,
) -> Result<Complex64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("far-field distance must be positive, got {r}")));
    }
    if currents.len() != layout.len() {
        return Err(Error::Argument(format!(
            "{} currents for {} elements",
            currents.len(),
            layout.len()
        )));
    }
    let k = p.wavenumber;
    let prefactor = J * p.eta * (-J * k * r).exp() / (2.0 * PI * r);
    Ok(prefactor * element_factor(dir.theta, p) * array_factor(dir, layout, currents, p))
}
