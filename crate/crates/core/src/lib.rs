//! Equilibration time scales of quantum many-body systems through dephasing.

pub mod analytic_models;
pub mod coarse_grain;
pub mod dephasing_signal;
pub mod error;
pub mod export;
pub mod grid;
pub mod lattice_model;
pub mod level_stats;
pub mod linalg;
pub mod observable_band;
pub mod quench;
pub mod spectral;

pub use error::{Error, Result};
