//! Closed-form Lorentzian example: a band of levels with an exponential
//! density of states, whose uniform-amplitude time signal is
//! `F(t) = 1 / (1 + (gamma t)^2)`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64 as C64;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::export::Csv;
use crate::grid::{simpson, SignalGrid, UniformGrid};

pub fn lorentzian_f(t: f64, gamma: f64) -> f64 {
    1.0 / (1.0 + (gamma * t).powi(2))
}

/// Gap density `(gamma c^2 / 2) exp(-|w| / gamma)` of the wide-band limit.
pub fn exp_gap_density(omega: f64, gamma: f64, c: f64) -> f64 {
    0.5 * gamma * c * c * (-omega.abs() / gamma).exp()
}

/// Gap density of a band of width `band` below the top level:
/// `gamma c^2 exp(-band/gamma) sinh((band - |w|) / gamma)`.
pub fn exp_gap_density_band(omega: f64, gamma: f64, band: f64, c: f64) -> Result<f64> {
    if omega.abs() > band {
        return Err(Error::Domain(format!("|omega| = {} exceeds the band width {band}", omega.abs())));
    }
    // e^{-B/g} sinh((B - |w|)/g) = (e^{-|w|/g} - e^{(|w| - 2B)/g}) / 2, stable for large B
    let w = omega.abs();
    Ok(0.5 * gamma * c * c * ((-w / gamma).exp() - ((w - 2.0 * band) / gamma).exp()))
}

/// Quadrature domain `|w| <= 40 gamma`, step `gamma / 200`.
fn omega_axis(gamma: f64) -> UniformGrid {
    UniformGrid { start: -40.0 * gamma, step: gamma / 200.0, len: 16_001 }
}

/// `sqrt(int w^2 rho_G^2 / int rho_G^2)` for the exponential gap density.
pub fn lorentzian_dispersion(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
    }
    let axis = omega_axis(gamma);
    let rho2: Vec<f64> = axis.points().map(|w| exp_gap_density(w, gamma, 1.0).powi(2)).collect();
    let w2rho2: Vec<f64> = axis.points().zip(&rho2).map(|(w, r)| w * w * r).collect();
    Ok((simpson(&w2rho2, axis.step) / simpson(&rho2, axis.step)).sqrt())
}

/// `T_eq = pi sqrt(2) / gamma`.
pub fn lorentzian_teq(gamma: f64) -> f64 {
    PI * SQRT_2 / gamma
}

/// Standard deviation of `t` under the weight `F(t)^2`, by quadrature in
/// `t = tan(theta) / gamma` (the weight has power-law tails in `t`).
pub fn lorentzian_time_dispersion(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
    }
    let axis = UniformGrid::symmetric(FRAC_PI_2, FRAC_PI_2 / 2000.0)?;
    // t^2 F^2 dt = sin^2 / gamma^3 dtheta, F^2 dt = cos^2 / gamma dtheta
    let num: Vec<f64> = axis.points().map(|th| th.sin().powi(2)).collect();
    let den: Vec<f64> = axis.points().map(|th| th.cos().powi(2)).collect();
    Ok((simpson(&num, axis.step) / simpson(&den, axis.step)).sqrt() / gamma)
}

/// Uniform-amplitude signal over all ordered level pairs,
/// `F(t) = sum_{i != j} exp(i (E_j - E_i) t) / (d (d - 1))`,
/// evaluated as `(|sum_k exp(i E_k t)|^2 - d) / (d (d - 1))`.
pub fn reimann_f(energies: &[f64], t_axis: UniformGrid) -> Result<SignalGrid> {
    let d = energies.len();
    let lo = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if d < 2 || !(hi > lo) {
        return Err(Error::NoDynamics("spectrum has no non-zero gaps".into()));
    }
    let norm = (d * (d - 1)) as f64;
    let values = t_axis
        .points()
        .map(|t| {
            let s: C64 = energies.iter().map(|&e| C64::from_polar(1.0, e * t)).sum();
            C64::new((s.norm_sqr() - d as f64) / norm, 0.0)
        })
        .collect();
    Ok(SignalGrid { axis: t_axis, values })
}

/// `levels` energies `E_top - y` with `y` drawn from `exp(-y / gamma)`
/// truncated to `[0, band]`.
pub fn exponential_band_levels(levels: usize, gamma: f64, band: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tail = -(-band / gamma).exp_m1();
    (0..levels)
        .map(|_| {
            let u: f64 = rng.sample(Open01);
            gamma * (-(-u * tail).ln_1p())
        })
        .collect()
}

pub fn f_curve_csv(gamma: f64, t_axis: UniformGrid) -> Csv {
    let mut csv = Csv::new(&["t", "f"]);
    for t in t_axis.points() {
        csv.row(&[t, lorentzian_f(t, gamma)]);
    }
    csv
}

pub fn gap_density_csv(gamma: f64, omega_axis: UniformGrid) -> Csv {
    let mut csv = Csv::new(&["omega", "rho_g"]);
    for w in omega_axis.points() {
        csv.row(&[w, exp_gap_density(w, gamma, 1.0)]);
    }
    csv
}
