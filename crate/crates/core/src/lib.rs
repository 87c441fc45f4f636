//! Analytical model and optimizer for end-fire arrays of thin-wire dipoles,
//! either fully driven or with a single fed element and reactively loaded
//! parasitic elements.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod de;
pub mod em;
pub mod error;
pub mod exec;
pub mod excitation;
pub mod layout;
pub mod network;
pub mod params;
pub mod performance;
pub mod quad;
pub mod reference;
pub mod special;
pub mod workflows;

pub use error::{Error, Result};
pub use layout::ArrayLayout;
pub use params::{Conventions, Direction, ModelParams, ModelSpec};

/// Complex double, re-exported for downstream crates.
pub use num_complex::Complex64;

pub fn db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
