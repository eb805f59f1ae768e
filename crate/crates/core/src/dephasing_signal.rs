//! Gap amplitudes and the time signal
//!
//! ```text
//! g(t) = sum_alpha v_alpha exp(i G_alpha t),   v_(i,j) = conj(c_j) A_ji c_i / Delta_A
//! ```
//!
//! with `G_(i,j) = E_j - E_i`, together with the quantities built on it:
//! infinite-time fluctuations, the gap dispersion `sigma_G` and the
//! dephasing time `T_eq = pi / sigma_G`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::Csv;
use crate::grid::{trapezoid, SignalGrid, UniformGrid};
use crate::lattice_model::{check_dim, OperatorMatrix};
use crate::linalg::{dot_conj, Matrix};
use crate::spectral::{Populations, Spectrum};

/// Pair amplitudes at or below this magnitude are rounding noise of the
/// eigensolver (exact zeros from symmetries) and are never enumerated.
pub const AMPLITUDE_FLOOR: f64 = 1e-15;

/// Gaps `G_alpha` (ascending) with their amplitudes `v_alpha`.
///
/// Sets built by [`gap_amplitudes`] are exactly symmetric: entry `k` and
/// entry `len - 1 - k` carry opposite gaps and conjugate amplitudes.
#[derive(Clone, Debug, Default)]
pub struct GapAmplitudeSet {
    pub gaps: Vec<f64>,
    pub amps: Vec<C64>,
    pub delta_a: f64,
    pub merge_tol: f64,
    pub truncation_threshold: f64,
}

impl GapAmplitudeSet {
    /// Symmetric set from the positive half; the negative half is mirrored
    /// with conjugated amplitudes.
    pub fn from_positive(gaps: &[f64], amps: &[C64]) -> Result<Self> {
        check_dim(gaps.len(), amps.len())?;
        let mut pairs: Vec<(f64, C64)> = gaps.iter().copied().zip(amps.iter().copied()).collect();
        if pairs.iter().any(|(g, _)| !(*g > 0.0)) {
            return Err(Error::InvalidArgument("positive half must have gaps > 0".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self::mirror(pairs, 1.0, 0.0, 0.0))
    }

    fn mirror(pos: Vec<(f64, C64)>, delta_a: f64, merge_tol: f64, truncation_threshold: f64) -> Self {
        let mut gaps = Vec::with_capacity(2 * pos.len());
        let mut amps = Vec::with_capacity(2 * pos.len());
        for &(g, v) in pos.iter().rev() {
            gaps.push(-g);
            amps.push(v.conj());
        }
        for &(g, v) in &pos {
            gaps.push(g);
            amps.push(v);
        }
        Self { gaps, amps, delta_a, merge_tol, truncation_threshold }
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// Copy without the entries whose `|v| < threshold`.
    pub fn truncated(&self, threshold: f64) -> Self {
        let (gaps, amps) = self
            .gaps
            .iter()
            .zip(&self.amps)
            .filter(|(_, v)| v.norm() >= threshold)
            .map(|(g, v)| (*g, *v))
            .unzip();
        Self { gaps, amps, truncation_threshold: threshold.max(self.truncation_threshold), ..*self }
    }

    /// Relevances `q_alpha = |v_alpha|^2 / sum |v|^2`.
    pub fn relevances(&self) -> Vec<f64> {
        let total = infinite_time_fluctuation(self);
        self.amps.iter().map(|v| v.norm_sqr() / total).collect()
    }

    /// `g(0) = sum v_alpha`.
    pub fn initial_value(&self) -> C64 {
        self.amps.iter().sum()
    }

    /// Largest `|G - G'|` between the entries at `k` and `len - 1 - k`
    /// after negation, and the matching amplitude magnitude mismatch.
    pub fn symmetry_defect(&self) -> (f64, f64) {
        let n = self.len();
        (0..n).fold((0.0, 0.0), |(dg, dv), k| {
            let m = n - 1 - k;
            (
                f64::max(dg, (self.gaps[k] + self.gaps[m]).abs()),
                f64::max(dv, (self.amps[k].norm() - self.amps[m].norm()).abs()),
            )
        })
    }

    pub fn to_csv(&self) -> Csv {
        let q = self.relevances();
        let mut csv = Csv::new(&["gap", "re_v", "im_v", "relevance"]);
        for ((g, v), q) in self.gaps.iter().zip(&self.amps).zip(q) {
            csv.row(&[*g, v.re, v.im, q]);
        }
        csv
    }
}

/// Gap amplitudes of observable `a` for the populations `pop`.
///
/// `Delta_A` is computed from the spectrum of `a`. `merge_tol` fuses gaps
/// closer than it (summing amplitudes) and drops `|G| <= merge_tol`;
/// `truncation_threshold` drops `|v| < threshold` afterwards.
pub fn gap_amplitudes(
    spectrum: &Spectrum,
    pop: &Populations,
    a: &OperatorMatrix,
    merge_tol: f64,
    truncation_threshold: f64,
) -> Result<GapAmplitudeSet> {
    let delta_a = a.spectral_range()?;
    gap_amplitudes_with_range(spectrum, pop, a, delta_a, merge_tol, truncation_threshold)
}

/// As [`gap_amplitudes`] with a known observable range.
pub fn gap_amplitudes_with_range(
    spectrum: &Spectrum,
    pop: &Populations,
    a: &OperatorMatrix,
    delta_a: f64,
    merge_tol: f64,
    truncation_threshold: f64,
) -> Result<GapAmplitudeSet> {
    check_dim(spectrum.dim(), a.dim())?;
    let b = a.matrix.conjugate_by(&spectrum.vectors);
    gap_amplitudes_in_basis(&spectrum.energies, &pop.c, &b, delta_a, merge_tol, truncation_threshold)
}

/// Core enumeration with `b = V^dag A V` already formed.
pub fn gap_amplitudes_in_basis(
    energies: &[f64],
    c: &[C64],
    b: &Matrix,
    delta_a: f64,
    merge_tol: f64,
    truncation_threshold: f64,
) -> Result<GapAmplitudeSet> {
    check_dim(energies.len(), c.len())?;
    check_dim(energies.len(), b.dim())?;
    if !(delta_a > 0.0) {
        return Err(Error::DegenerateObservable);
    }
    let d = energies.len();
    // Only G > 0 is enumerated; (j, i) is the conjugate of (i, j).
    let mut pos: Vec<(f64, C64)> = Vec::new();
    for i in 0..d {
        if c[i] == C64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..d {
            let g = energies[j] - energies[i];
            if g <= merge_tol || i == j {
                continue;
            }
            let v = c[j].conj() * b.get(j, i) * c[i] / delta_a;
            if v.norm() > AMPLITUDE_FLOOR {
                pos.push((g, v));
            }
        }
    }
    pos.sort_by(|x, y| x.0.total_cmp(&y.0));
    let merged = merge_sorted(pos, merge_tol);
    let kept = merged.into_iter().filter(|(_, v)| v.norm() >= truncation_threshold && v.norm() > 0.0).collect();
    Ok(GapAmplitudeSet::mirror(kept, delta_a, merge_tol, truncation_threshold))
}

/// Fuses chains of sorted gaps whose neighbours differ by at most `tol`.
/// The fused gap is the amplitude-weighted mean, the amplitude the sum.
fn merge_sorted(pairs: Vec<(f64, C64)>, tol: f64) -> Vec<(f64, C64)> {
    let mut out: Vec<(f64, C64)> = Vec::with_capacity(pairs.len());
    let mut cluster: Vec<(f64, C64)> = Vec::new();
    let flush = |cluster: &mut Vec<(f64, C64)>, out: &mut Vec<(f64, C64)>| {
        if cluster.is_empty() {
            return;
        }
        let v: C64 = cluster.iter().map(|p| p.1).sum();
        let w: f64 = cluster.iter().map(|p| p.1.norm()).sum();
        let g = if cluster.len() == 1 || w == 0.0 {
            cluster.iter().map(|p| p.0).sum::<f64>() / cluster.len() as f64
        } else {
            cluster.iter().map(|p| p.0 * p.1.norm()).sum::<f64>() / w
        };
        out.push((g, v));
        cluster.clear();
    };
    for p in pairs {
        if let Some(last) = cluster.last() {
            if p.0 - last.0 > tol {
                flush(&mut cluster, &mut out);
            }
        }
        cluster.push(p);
    }
    flush(&mut cluster, &mut out);
    out
}

/// Default merge tolerance, `1e-10` times the spectral range.
pub fn default_merge_tol(spectrum: &Spectrum) -> f64 {
    1e-10 * spectrum.spectral_range()
}

/// Samples `g(t)` on `t_axis`.
pub fn time_signal(gas: &GapAmplitudeSet, t_axis: UniformGrid) -> SignalGrid {
    // Phases advance by one rotation per step and are re-anchored
    // periodically so rounding does not accumulate.
    const ANCHOR: usize = 512;
    let mut out = SignalGrid::zeros(t_axis);
    for (&g, &v) in gas.gaps.iter().zip(&gas.amps) {
        let step = C64::from_polar(1.0, g * t_axis.step);
        let mut z = C64::new(0.0, 0.0);
        for (k, slot) in out.values.iter_mut().enumerate() {
            if k % ANCHOR == 0 {
                z = v * C64::from_polar(1.0, g * t_axis.point(k));
            }
            *slot += z;
            z *= step;
        }
    }
    out
}

/// `g(t)` at a single time.
pub fn signal_at(gas: &GapAmplitudeSet, t: f64) -> C64 {
    gas.gaps.iter().zip(&gas.amps).map(|(&g, &v)| v * C64::from_polar(1.0, g * t)).sum()
}

/// Direct route to `g(t)`: evolves the state in the original basis and
/// evaluates `(<psi(t)|A|psi(t)> - Tr(A omega)) / Delta_A`.
pub struct EvolutionOracle<'a> {
    spectrum: &'a Spectrum,
    c: Vec<C64>,
    a: &'a OperatorMatrix,
    equilibrium: f64,
    delta_a: f64,
}

impl<'a> EvolutionOracle<'a> {
    pub fn new(spectrum: &'a Spectrum, pop: &Populations, a: &'a OperatorMatrix, delta_a: f64) -> Result<Self> {
        check_dim(spectrum.dim(), a.dim())?;
        if !(delta_a > 0.0) {
            return Err(Error::DegenerateObservable);
        }
        let mut equilibrium = 0.0;
        for (k, ck) in pop.c.iter().enumerate() {
            let p = ck.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let e = spectrum.vector(k);
            equilibrium += p * dot_conj(&e, &a.matrix.matvec(&e)).re;
        }
        Ok(Self { spectrum, c: pop.c.clone(), a, equilibrium, delta_a })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let coeffs: Vec<C64> = self
            .c
            .iter()
            .zip(&self.spectrum.energies)
            .map(|(c, &e)| c * C64::from_polar(1.0, -e * t))
            .collect();
        let psi = self.spectrum.vectors.matvec(&coeffs);
        let expect = dot_conj(&psi, &self.a.matrix.matvec(&psi)).re;
        (expect - self.equilibrium) / self.delta_a
    }
}

pub fn oracle_evolution(spectrum: &Spectrum, pop: &Populations, a: &OperatorMatrix, t: f64) -> Result<f64> {
    let delta_a = a.spectral_range()?;
    Ok(EvolutionOracle::new(spectrum, pop, a, delta_a)?.eval(t))
}

/// `sum |v_alpha|^2`, the infinite-time average of `|g|^2`.
pub fn infinite_time_fluctuation(gas: &GapAmplitudeSet) -> f64 {
    gas.amps.iter().fold(0.0, |acc, v| acc + v.norm_sqr())
}

/// `(1/T) int_0^T |g|^2 dt` by the trapezoidal rule with step `dt`.
pub fn finite_time_average(gas: &GapAmplitudeSet, horizon: f64, dt: f64) -> Result<f64> {
    let axis = UniformGrid::spanning(0.0, horizon, dt)?;
    let s = time_signal(gas, axis);
    Ok(trapezoid(&s.abs_sqr(), dt) / axis.stop())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `sum |v|^2 <= 1 / d_eff`.
pub fn short_bound_check(gas: &GapAmplitudeSet, d_eff: f64) -> BoundCheck {
    let lhs = infinite_time_fluctuation(gas);
    let rhs = 1.0 / d_eff;
    BoundCheck { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-9) }
}

/// Relevance-weighted standard deviation of the gaps.
pub fn gap_dispersion(gas: &GapAmplitudeSet) -> Result<f64> {
    let total = infinite_time_fluctuation(gas);
    if gas.is_empty() || total == 0.0 {
        return Err(Error::NoDynamics("empty gap set".into()));
    }
    let q = gas.relevances();
    let mean: f64 = q.iter().zip(&gas.gaps).map(|(q, g)| q * g).sum();
    if mean.abs() > 1e-9 {
        return Err(Error::GapAsymmetry { mean });
    }
    let var: f64 = q.iter().zip(&gas.gaps).map(|(q, g)| q * (g - mean).powi(2)).sum();
    Ok(var.sqrt())
}

/// `T_eq = pi / sigma_G`.
pub fn equilibration_time(sigma_g: f64) -> Result<f64> {
    if !(sigma_g > 0.0) {
        return Err(Error::NoDynamics(format!("sigma_G = {sigma_g}")));
    }
    Ok(PI / sigma_g)
}

/// First sample time where `|g|^2` drops below `factor` times the
/// infinite-time fluctuation. The factor is a convention, 2 by default in
/// the CLI.
pub fn first_crossing(signal: &SignalGrid, fluctuation: f64, factor: f64) -> Option<f64> {
    signal
        .values
        .iter()
        .enumerate()
        .find(|(_, z)| z.norm_sqr() < factor * fluctuation)
        .map(|(k, _)| signal.axis.point(k))
}

/// `(|g(0)|^2 - sum |v|^2, 2 sum_{a<b} |v_a||v_b| cos(theta_a - theta_b))`,
/// the second evaluated as an explicit double sum.
pub fn dephasing_identity_check(gas: &GapAmplitudeSet) -> (f64, f64) {
    let lhs = gas.initial_value().norm_sqr() - infinite_time_fluctuation(gas);
    let mut rhs = 0.0;
    for (a, va) in gas.amps.iter().enumerate() {
        let (ra, ta) = va.to_polar();
        let mut row = 0.0;
        for vb in &gas.amps[a + 1..] {
            let (rb, tb) = vb.to_polar();
            row += rb * (ta - tb).cos();
        }
        rhs += 2.0 * ra * row;
    }
    (lhs, rhs)
}

/// Rotated amplitudes `v_alpha exp(i G_alpha t)`.
pub fn phase_cloud(gas: &GapAmplitudeSet, t: f64) -> Vec<C64> {
    gas.gaps.iter().zip(&gas.amps).map(|(&g, &v)| v * C64::from_polar(1.0, g * t)).collect()
}

pub fn signal_csv(signal: &SignalGrid) -> Csv {
    let mut csv = Csv::new(&["t", "re_g", "abs_g_sq"]);
    for (t, z) in signal.axis.points().zip(&signal.values) {
        csv.row(&[t, z.re, z.norm_sqr()]);
    }
    csv
}

pub fn phase_cloud_csv(points: &[C64]) -> Csv {
    let mut csv = Csv::new(&["re", "im"]);
    for z in points {
        csv.row(&[z.re, z.im]);
    }
    csv
}
