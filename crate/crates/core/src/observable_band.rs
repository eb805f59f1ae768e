//! Observables in the energy eigenbasis: the band profile `S(omega)`, its
//! spread `sigma_A`, the exponential locality bound on off-diagonal
//! elements and the factorization of the density of relevant gaps.

use std::f64::consts::{E, PI, SQRT_2};

use serde::Serialize;

use crate::coarse_grain::{cg_frequency_signal, median_sorted, CoarseGrainConfig};
use crate::dephasing_signal::GapAmplitudeSet;
use crate::error::{Error, Result};
use crate::export::Csv;
use crate::grid::{normal_pdf, RealSignal};
use crate::lattice_model::{check_dim, OperatorMatrix};
use crate::linalg::Matrix;
use crate::spectral::Spectrum;

/// `A_ij = <E_i|A|E_j>` with the paired energies.
#[derive(Clone, Debug)]
pub struct EnergyBasisMatrix {
    pub entries: Matrix,
    pub energies: Vec<f64>,
}

impl EnergyBasisMatrix {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }
}

pub fn to_energy_basis(a: &OperatorMatrix, spectrum: &Spectrum) -> Result<EnergyBasisMatrix> {
    check_dim(spectrum.dim(), a.dim())?;
    Ok(EnergyBasisMatrix { entries: a.matrix.conjugate_by(&spectrum.vectors), energies: spectrum.energies.clone() })
}

/// Pair weighting for [`band_profile`].
#[derive(Clone, Copy, Debug, Serialize)]
pub enum ProfileWeights {
    Uniform,
    /// `N_{sigma/sqrt2}((E_i + E_j)/2 - mu)`, the energy window selected by
    /// a state with mean `mu` and width `sigma`.
    Gaussian { mu: f64, sigma: f64 },
}

/// Mean `|A_ij|^2` in bins of `|E_i - E_j|`; bin `k` covers
/// `[k w, (k+1) w)` and is reported at its centre.
#[derive(Clone, Debug, Serialize)]
pub struct BandProfile {
    pub bin_width: f64,
    pub centers: Vec<f64>,
    /// `None` for bins without pairs (or without weight).
    pub values: Vec<Option<f64>>,
    pub counts: Vec<usize>,
}

impl BandProfile {
    /// Value of the bin containing `|omega|`.
    pub fn at(&self, omega: f64) -> Option<f64> {
        let k = (omega.abs() / self.bin_width).floor() as usize;
        self.values.get(k).copied().flatten()
    }

    /// `bound` supplies the squared element bound at a bin centre, which
    /// compares directly with `S`.
    pub fn to_csv(&self, bound: Option<&dyn Fn(f64) -> Option<f64>>) -> Csv {
        let mut csv = Csv::new(&["omega", "s", "count", "bound_sq"]);
        for ((c, v), n) in self.centers.iter().zip(&self.values).zip(&self.counts) {
            let s = v.map_or("".to_string(), |v| fmt(v));
            let b = bound.and_then(|f| f(*c)).map_or("".to_string(), fmt);
            csv.row_text(&[fmt(*c), s, n.to_string(), b]);
        }
        csv
    }
}

fn fmt(v: f64) -> String {
    let mut s = String::new();
    crate::export::push_f64(&mut s, v);
    s
}

pub fn band_profile(ebm: &EnergyBasisMatrix, weights: ProfileWeights, bin_width: f64) -> Result<BandProfile> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidArgument(format!("bin width {bin_width} must be positive")));
    }
    let e = &ebm.energies;
    let d = e.len();
    let span = e[d - 1] - e[0];
    let nbins = (span / bin_width).floor() as usize + 1;
    let mut num = vec![0.0; nbins];
    let mut den = vec![0.0; nbins];
    let mut counts = vec![0usize; nbins];
    let window = match weights {
        ProfileWeights::Uniform => None,
        ProfileWeights::Gaussian { mu, sigma } => {
            if !(sigma > 0.0) {
                return Err(Error::DegenerateDensity);
            }
            Some((mu, sigma / SQRT_2))
        }
    };
    for j in 0..d {
        for i in 0..d {
            if i == j {
                continue;
            }
            let k = (((e[i] - e[j]).abs() / bin_width).floor() as usize).min(nbins - 1);
            let w = match window {
                None => 1.0,
                Some((mu, s)) => normal_pdf(0.5 * (e[i] + e[j]) - mu, s),
            };
            num[k] += w * ebm.entries.get(i, j).norm_sqr();
            den[k] += w;
            counts[k] += 1;
        }
    }
    let values = num.iter().zip(&den).map(|(n, d)| if *d > 0.0 { Some(n / d) } else { None }).collect();
    let centers = (0..nbins).map(|k| (k as f64 + 0.5) * bin_width).collect();
    Ok(BandProfile { bin_width, centers, values, counts })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BandSpread {
    pub mu: f64,
    pub sigma: f64,
}

/// First moment and standard deviation of `S(omega) rho_eps(omega)` over
/// `omega >= eps`. Bins enter as point masses at their centres, with
/// `rho_eps` interpolated linearly there.
pub fn sigma_a(profile: &BandProfile, rho: &RealSignal, epsilon: f64) -> Result<BandSpread> {
    let interp = |w: f64| -> f64 {
        let x = (w - rho.axis.start) / rho.axis.step;
        if x < 0.0 || x > (rho.axis.len - 1) as f64 {
            return 0.0;
        }
        let k = (x.floor() as usize).min(rho.axis.len.saturating_sub(2));
        let f = x - k as f64;
        if rho.axis.len == 1 {
            return rho.values[0];
        }
        rho.values[k] * (1.0 - f) + rho.values[k + 1] * f
    };
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (&c, v) in profile.centers.iter().zip(&profile.values) {
        let Some(s) = v else { continue };
        if c < epsilon {
            continue;
        }
        let w = s * interp(c);
        m0 += w;
        m1 += w * c;
        m2 += w * c * c;
    }
    if !(m0 > 0.0) {
        return Err(Error::NoBandWeight(epsilon));
    }
    let mu = m1 / m0;
    Ok(BandSpread { mu, sigma: (m2 / m0 - mu * mu).max(0.0).sqrt() })
}

/// `|A_ij| <= ||A|| (e w / (J (1 + alpha))) exp(-c w / J)` with
/// `c = ln(1 + 1/alpha)`, valid for `w / J > alpha`.
pub fn banded_bound(omega: f64, op_norm: f64, j: f64, alpha: f64) -> Result<f64> {
    if !(j > 0.0) || !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("need J > 0 and alpha > 0 (J = {j}, alpha = {alpha})")));
    }
    let ratio = omega / j;
    if !(ratio > alpha) {
        return Err(Error::OutsideValidity { ratio, alpha });
    }
    let c = (1.0 + 1.0 / alpha).ln();
    Ok(op_norm * (E * ratio / (1.0 + alpha)) * (-c * ratio).exp())
}

/// Lattice-animal constant of a one-dimensional lattice, `2 D e` with D = 1.
pub const ALPHA_CHAIN: f64 = 2.0 * E;

#[derive(Clone, Debug, Serialize)]
pub struct BoundViolation {
    pub i: usize,
    pub j: usize,
    pub omega: f64,
    pub element: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandedBoundReport {
    pub j: f64,
    pub alpha: f64,
    pub op_norm: f64,
    pub checked_pairs: usize,
    pub max_ratio: f64,
    pub violations: Vec<BoundViolation>,
}

/// Checks every pair with `(E_i - E_j) / J > alpha` against the bound.
pub fn banded_bound_check(ebm: &EnergyBasisMatrix, op_norm: f64, j: f64, alpha: f64) -> Result<BandedBoundReport> {
    let e = &ebm.energies;
    let mut report =
        BandedBoundReport { j, alpha, op_norm, checked_pairs: 0, max_ratio: 0.0, violations: Vec::new() };
    for jj in 0..e.len() {
        for i in 0..e.len() {
            let omega = e[i] - e[jj];
            if !(omega / j > alpha) {
                continue;
            }
            let bound = banded_bound(omega, op_norm, j, alpha)?;
            let element = ebm.entries.get(i, jj).norm();
            report.checked_pairs += 1;
            report.max_ratio = report.max_ratio.max(element / bound);
            if element > bound {
                report.violations.push(BoundViolation { i, j: jj, omega, element, bound });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub epsilon: f64,
    pub points: usize,
    pub median_relative_error: f64,
    pub q90_relative_error: f64,
    pub max_measured: f64,
}

/// Compares `|g~_eps(w)|^2` with `2 pi N_{sqrt2 sigma_E}(w) S(w) rho_eps(w) / Delta_A^2`
/// where the measured side exceeds 1% of its maximum and `S` is defined.
///
/// `rho` must be sampled on the configuration's frequency grid.
pub fn factorization_check(
    gas: &GapAmplitudeSet,
    profile: &BandProfile,
    rho: &RealSignal,
    sigma_e: f64,
    cfg: &CoarseGrainConfig,
) -> Result<FactorizationReport> {
    check_dim(cfg.omega_grid.len, rho.axis.len)?;
    if !(sigma_e > 0.0) {
        return Err(Error::DegenerateDensity);
    }
    let measured = cg_frequency_signal(gas, cfg)?.abs_sqr();
    let peak = measured.iter().cloned().fold(0.0, f64::max);
    let scale = 2.0 * PI / (gas.delta_a * gas.delta_a);
    let mut errs = Vec::new();
    for ((w, m), r) in cfg.omega_grid.points().zip(&measured).zip(&rho.values) {
        if peak == 0.0 || *m <= 0.01 * peak {
            continue;
        }
        let Some(s) = profile.at(w) else { continue };
        let predicted = scale * normal_pdf(w, SQRT_2 * sigma_e) * s * r;
        errs.push(((m - predicted) / m).abs());
    }
    errs.sort_by(f64::total_cmp);
    let (median, q90) = if errs.is_empty() {
        (0.0, 0.0)
    } else {
        (median_sorted(&errs), errs[((errs.len() - 1) as f64 * 0.9).round() as usize])
    };
    Ok(FactorizationReport {
        epsilon: cfg.epsilon,
        points: errs.len(),
        median_relative_error: median,
        q90_relative_error: q90,
        max_measured: peak,
    })
}
