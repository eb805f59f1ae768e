//! Gaussian coarse-graining of the frequency and time signals.
//!
//! The window is `h_eps(w) = exp(-w^2 / 2 eps^2) / eps`, so that
//! `g~_eps(w) = sum_alpha v_alpha h_eps(w - G_alpha)` transforms back to
//! `g_eps(t) = exp(-eps^2 t^2 / 2) g(t)` under
//! `F^-1[f](t) = (2 pi)^{-1/2} int f(w) exp(i w t) dw`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dephasing_signal::GapAmplitudeSet;
use crate::error::{Error, Result};
use crate::export::Csv;
use crate::grid::{normal_pdf, trapezoid, trapezoid_complex, RealSignal, SignalGrid, UniformGrid};

/// Window contributions beyond this many widths are below 1e-21 and skipped.
const WINDOW_REACH: f64 = 10.0;

#[inline]
pub fn window(omega: f64, epsilon: f64) -> f64 {
    (-(omega * omega) / (2.0 * epsilon * epsilon)).exp() / epsilon
}

/// Width, frequency grid and amplitude cut for one coarse-graining.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoarseGrainConfig {
    pub epsilon: f64,
    pub omega_grid: UniformGrid,
    pub truncation_threshold: f64,
}

impl CoarseGrainConfig {
    pub fn new(epsilon: f64, omega_grid: UniformGrid, truncation_threshold: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
        }
        if omega_grid.step > epsilon / 5.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "grid step {} exceeds epsilon/5 = {}",
                omega_grid.step,
                epsilon / 5.0
            )));
        }
        Ok(Self { epsilon, omega_grid, truncation_threshold })
    }

    /// Symmetric grid reaching `max|G| + 6 eps`, step `eps/10`.
    pub fn for_gaps(gas: &GapAmplitudeSet, epsilon: f64, truncation_threshold: f64) -> Result<Self> {
        let reach = gas.gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let grid = UniformGrid::symmetric(reach + 6.0 * epsilon, epsilon / 10.0)?;
        Self::new(epsilon, grid, truncation_threshold)
    }

    /// Gaps whose `+-5 eps` neighbourhood leaves the grid.
    pub fn uncovered(&self, gaps: &[f64]) -> Vec<f64> {
        let (lo, hi) = (self.omega_grid.start, self.omega_grid.stop());
        gaps.iter().copied().filter(|g| g - 5.0 * self.epsilon < lo || g + 5.0 * self.epsilon > hi).collect()
    }
}

/// `g~_eps` sampled on the configured grid.
pub fn cg_frequency_signal(gas: &GapAmplitudeSet, cfg: &CoarseGrainConfig) -> Result<SignalGrid> {
    let gas = if cfg.truncation_threshold > 0.0 { gas.truncated(cfg.truncation_threshold) } else { gas.clone() };
    let uncovered = cfg.uncovered(&gas.gaps);
    if !uncovered.is_empty() {
        return Err(Error::GridCoverage { uncovered });
    }
    let grid = cfg.omega_grid;
    let mut out = SignalGrid::zeros(grid);
    let reach = WINDOW_REACH * cfg.epsilon;
    for (&g, &v) in gas.gaps.iter().zip(&gas.amps) {
        for k in grid.index_range(g - reach, g + reach) {
            out.values[k] += v * window(grid.point(k) - g, cfg.epsilon);
        }
    }
    Ok(out)
}

/// `g_eps(t) = exp(-eps^2 t^2 / 2) g(t)`.
pub fn cg_time_signal(g: &SignalGrid, epsilon: f64) -> SignalGrid {
    let values = g
        .axis
        .points()
        .zip(&g.values)
        .map(|(t, z)| z * (-0.5 * (epsilon * t).powi(2)).exp())
        .collect();
    SignalGrid { axis: g.axis, values }
}

/// Direct-quadrature inverse transform of a frequency signal onto `t_axis`.
pub fn inverse_transform(freq: &SignalGrid, t_axis: UniformGrid) -> SignalGrid {
    let norm = (2.0 * PI).sqrt().recip();
    let omega: Vec<f64> = freq.axis.to_vec();
    let mut buf = vec![C64::new(0.0, 0.0); omega.len()];
    let values = t_axis
        .points()
        .map(|t| {
            for ((b, &w), f) in buf.iter_mut().zip(&omega).zip(&freq.values) {
                *b = f * C64::from_polar(1.0, w * t);
            }
            trapezoid_complex(&buf, freq.axis.step) * norm
        })
        .collect();
    SignalGrid { axis: t_axis, values }
}

/// Max deviation between the inverse transform of the sampled `g~_eps` and
/// the damped signal `exp(-eps^2 t^2 / 2) g(t)` over `t_axis`.
pub fn inverse_ft_consistency(gas: &GapAmplitudeSet, cfg: &CoarseGrainConfig, t_axis: UniformGrid) -> Result<f64> {
    if gas.is_empty() {
        return Ok(0.0);
    }
    let freq = cg_frequency_signal(gas, cfg)?;
    let back = inverse_transform(&freq, t_axis);
    let gas = if cfg.truncation_threshold > 0.0 { gas.truncated(cfg.truncation_threshold) } else { gas.clone() };
    let exact = cg_time_signal(&crate::dephasing_signal::time_signal(&gas, t_axis), cfg.epsilon);
    Ok(back.values.iter().zip(&exact.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// Grid and closed-form values of `int |g~_eps|^2 dw`, the latter
/// `2 pi sum_{a,b} v_a conj(v_b) N_{sqrt2 eps}(G_a - G_b)`.
pub fn parseval_check(gas: &GapAmplitudeSet, cfg: &CoarseGrainConfig) -> Result<(f64, f64)> {
    let freq = cg_frequency_signal(gas, cfg)?;
    let gas = if cfg.truncation_threshold > 0.0 { gas.truncated(cfg.truncation_threshold) } else { gas.clone() };
    let s = std::f64::consts::SQRT_2 * cfg.epsilon;
    let mut closed = 0.0;
    for (ga, va) in gas.gaps.iter().zip(&gas.amps) {
        for (gb, vb) in gas.gaps.iter().zip(&gas.amps) {
            closed += (va * vb.conj()).re * normal_pdf(ga - gb, s);
        }
    }
    Ok((freq.norm_sqr(), 2.0 * PI * closed))
}

/// Coarse-grained dispersion `Delta omega_eps`, from the closed-form double
/// sum over gap pairs (no grid).
pub fn cg_dispersion(gas: &GapAmplitudeSet, epsilon: f64) -> Result<f64> {
    if gas.is_empty() {
        return Err(Error::NoDynamics("empty gap set".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    // Pairs further apart than this contribute below exp(-100) relative.
    let cutoff = 20.0 * epsilon;
    let four_e2 = 4.0 * epsilon * epsilon;
    let (mut num, mut den, mut first) = (0.0, 0.0, 0.0);
    let n = gas.len();
    for a in 0..n {
        let (ga, va) = (gas.gaps[a], gas.amps[a]);
        let p = va.norm_sqr();
        num += p * (ga * ga + 0.5 * epsilon * epsilon);
        den += p;
        first += p * ga;
        for b in a + 1..n {
            let gb = gas.gaps[b];
            let dg = gb - ga;
            if dg > cutoff {
                break;
            }
            // a<b and b<a terms together give twice the real part.
            let w = 2.0 * (va * gas.amps[b].conj()).re * (-(dg * dg) / four_e2).exp();
            let s = ga + gb;
            num += 0.25 * w * (s * s + 2.0 * epsilon * epsilon);
            den += w;
            first += 0.5 * w * s;
        }
    }
    if !(den > 0.0) {
        return Err(Error::NoDynamics("coarse-grained spectrum vanishes".into()));
    }
    let mean = first / den;
    if mean.abs() > 1e-9 {
        return Err(Error::GapAsymmetry { mean });
    }
    Ok((num / den).sqrt())
}

/// `Delta omega_eps` by quadrature of a sampled `|g~_eps|^2`.
pub fn cg_dispersion_quadrature(freq: &SignalGrid) -> f64 {
    let p = freq.abs_sqr();
    let w2: Vec<f64> = freq.axis.points().zip(&p).map(|(w, p)| w * w * p).collect();
    (trapezoid(&w2, freq.axis.step) / trapezoid(&p, freq.axis.step)).sqrt()
}

/// `rho_eps(w) = sum_alpha N_eps(w - G_alpha)`.
pub fn cg_gap_density(gaps: &[f64], epsilon: f64, grid: UniformGrid) -> RealSignal {
    let mut values = vec![0.0; grid.len];
    let reach = WINDOW_REACH * epsilon;
    for &g in gaps {
        for k in grid.index_range(g - reach, g + reach) {
            values[k] += normal_pdf(grid.point(k) - g, epsilon);
        }
    }
    RealSignal { axis: grid, values }
}

/// Gap density of all ordered pairs `E_j - E_i`, `i != j`, of a spectrum.
///
/// Pairs are first histogrammed on the grid and the histogram is then
/// smoothed, which costs `O(d^2 + len * eps / step)` instead of
/// `O(d^2 * eps / step)`. Requires `step <= eps / 5`.
pub fn all_pairs_gap_density(energies: &[f64], epsilon: f64, grid: UniformGrid) -> Result<RealSignal> {
    if grid.step > epsilon / 5.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument("grid step must be at most epsilon/5".into()));
    }
    let mut counts = vec![0.0f64; grid.len];
    for (i, &ei) in energies.iter().enumerate() {
        for (j, &ej) in energies.iter().enumerate() {
            if i == j {
                continue;
            }
            let k = ((ej - ei - grid.start) / grid.step).round();
            if k >= 0.0 && (k as usize) < grid.len {
                counts[k as usize] += 1.0;
            }
        }
    }
    let reach = (WINDOW_REACH * epsilon / grid.step).ceil() as isize;
    let kernel: Vec<f64> = (-reach..=reach).map(|m| normal_pdf(m as f64 * grid.step, epsilon)).collect();
    let mut values = vec![0.0; grid.len];
    for (k, &c) in counts.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (m, w) in kernel.iter().enumerate() {
            let idx = k as isize + m as isize - reach;
            if idx >= 0 && (idx as usize) < grid.len {
                values[idx as usize] += c * w;
            }
        }
    }
    Ok(RealSignal { axis: grid, values })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpsilonChoice {
    pub epsilon: f64,
    /// Median spacing of consecutive relevant gaps.
    pub spacing: f64,
    /// `1 / K`.
    pub upper: f64,
    pub ratio: f64,
    /// Window spans at least two orders of magnitude.
    pub valid: bool,
}

/// Geometric mean of the relevant-gap spacing and `1/K`.
///
/// Errors when `1/K` is less than four spacings, i.e. the window
/// `spacing << eps << 1/K` has no room at all.
pub fn select_epsilon(gaps: &[f64], relevances: &[f64], min_relevance: f64, k_estimate: f64) -> Result<EpsilonChoice> {
    crate::lattice_model::check_dim(gaps.len(), relevances.len())?;
    if !(k_estimate > 0.0) {
        return Err(Error::InvalidArgument(format!("K = {k_estimate} must be positive")));
    }
    let mut relevant: Vec<f64> =
        gaps.iter().zip(relevances).filter(|(_, &q)| q > min_relevance).map(|(g, _)| *g).collect();
    relevant.sort_by(f64::total_cmp);
    let mut spacings: Vec<f64> = relevant.windows(2).map(|w| w[1] - w[0]).filter(|s| *s > 0.0).collect();
    if spacings.is_empty() {
        return Err(Error::InvalidArgument("need at least two distinct relevant gaps".into()));
    }
    spacings.sort_by(f64::total_cmp);
    let spacing = median_sorted(&spacings);
    let upper = 1.0 / k_estimate;
    let ratio = upper / spacing;
    if ratio < 4.0 {
        return Err(Error::NoValidEpsilon { spacing, upper });
    }
    Ok(EpsilonChoice { epsilon: (spacing * upper).sqrt(), spacing, upper, ratio, valid: ratio >= 100.0 })
}

pub(crate) fn median_sorted(x: &[f64]) -> f64 {
    let n = x.len();
    if n % 2 == 1 {
        x[n / 2]
    } else {
        0.5 * (x[n / 2 - 1] + x[n / 2])
    }
}

/// Smooth amplitude profile plus independent complex Gaussian noise:
/// `v_alpha = v(G_alpha) + dv_alpha`, `E|dv_alpha|^2 = gamma(G_alpha)^2`.
pub struct SmoothAnsatz {
    pub v_smooth: Box<dyn Fn(f64) -> C64 + Send + Sync>,
    pub gamma: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Lipschitz bound for `|v|`, `arg v` and `gamma`.
    pub k: f64,
    pub seed: u64,
}

impl SmoothAnsatz {
    /// Largest finite-difference slope of `|v|`, `arg v` and `gamma` on a
    /// grid over `[lo, hi]`.
    pub fn measured_lipschitz(&self, lo: f64, hi: f64, step: f64) -> Result<f64> {
        let axis = UniformGrid::spanning(lo, hi, step)?;
        let mut worst = 0.0f64;
        let mut prev: Option<(f64, f64, f64)> = None;
        for w in axis.points() {
            let v = (self.v_smooth)(w);
            let cur = (v.norm(), v.arg(), (self.gamma)(w));
            if let Some(p) = prev {
                let mut darg = (cur.1 - p.1).abs();
                if darg > PI {
                    darg = 2.0 * PI - darg;
                }
                let d = (cur.0 - p.0).abs().max(darg).max((cur.2 - p.2).abs());
                worst = worst.max(d / step);
            }
            prev = Some(cur);
        }
        Ok(worst)
    }

    /// Draws the amplitudes of one trial. Trial `i` uses stream `i` of the
    /// ansatz seed, so trials are reproducible individually.
    pub fn sample(&self, gaps: &[f64], trial: u64, gamma_scale: f64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        gaps.iter()
            .map(|&g| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                let s = gamma_scale * (self.gamma)(g) * std::f64::consts::FRAC_1_SQRT_2;
                (self.v_smooth)(g) + C64::new(re * s, im * s)
            })
            .collect()
    }
}

/// Evenly spread gaps with a seeded jitter: `count` gaps on `[lo, hi]`.
pub fn synthetic_gaps(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = (hi - lo) / count as f64;
    (0..count).map(|k| lo + h * (k as f64 + rng.random::<f64>())).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Result2Report {
    pub epsilon: f64,
    pub n_gaps: usize,
    pub trials: u64,
    pub gamma_scale: f64,
    pub c1: f64,
    pub m: f64,
    pub k: f64,
    pub deviation_q10: f64,
    pub deviation_median: f64,
    pub deviation_q90: f64,
    pub deviation_max: f64,
    /// Fraction of (trial, grid point) samples inside the bound.
    pub pass_fraction: f64,
}

/// Deviations `|g~_eps - sqrt(2 pi) v rho_eps|` on the interior grid (away
/// from the gap-support edges by `6 eps`) with the matching `rho_eps`.
fn deviations(gaps: &[f64], amps: &[C64], ansatz: &SmoothAnsatz, epsilon: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let lo = gaps.iter().cloned().fold(f64::INFINITY, f64::min) + 6.0 * epsilon;
    let hi = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - 6.0 * epsilon;
    if !(hi > lo) {
        return Err(Error::InvalidArgument("gap support narrower than 12 epsilon".into()));
    }
    let grid = UniformGrid::spanning(lo, hi, epsilon / 5.0)?;
    let mut gt = vec![C64::new(0.0, 0.0); grid.len];
    let mut rho = vec![0.0; grid.len];
    let reach = WINDOW_REACH * epsilon;
    for (&g, &v) in gaps.iter().zip(amps) {
        for k in grid.index_range(g - reach, g + reach) {
            let h = window(grid.point(k) - g, epsilon);
            gt[k] += v * h;
            rho[k] += h;
        }
    }
    let root = (2.0 * PI).sqrt();
    // rho_eps = sum N_eps = sum h_eps / sqrt(2 pi)
    rho.iter_mut().for_each(|r| *r /= root);
    let dev = grid
        .points()
        .zip(&gt)
        .zip(&rho)
        .map(|((w, g), r)| (g - root * (ansatz.v_smooth)(w) * r).norm())
        .collect();
    Ok((grid.to_vec(), rho, dev))
}

/// Smallest `c1` for which the noiseless deviations stay within
/// `c1 K eps rho_eps`. Zero when `K = 0`.
pub fn calibrate_c1(ansatz: &SmoothAnsatz, gaps: &[f64], epsilon: f64) -> Result<f64> {
    if ansatz.k == 0.0 {
        return Ok(0.0);
    }
    let amps: Vec<C64> = gaps.iter().map(|&g| (ansatz.v_smooth)(g)).collect();
    let (_, rho, dev) = deviations(gaps, &amps, ansatz, epsilon)?;
    Ok(dev.iter().zip(&rho).map(|(d, r)| d / (ansatz.k * epsilon * r)).fold(0.0, f64::max))
}

/// Monte-Carlo check of the smooth-plus-noise prediction for `g~_eps`.
///
/// `c1` is taken as given (see [`calibrate_c1`]); the confidence multiplier
/// is `m = 2`. `gamma_scale` multiplies the ansatz noise strength.
pub fn result2_ensemble_check(
    ansatz: &SmoothAnsatz,
    gaps: &[f64],
    epsilon: f64,
    trials: u64,
    c1: f64,
    gamma_scale: f64,
) -> Result<Result2Report> {
    const M: f64 = 2.0;
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let quarter_pi = PI.powf(0.25);
    let mut all = Vec::new();
    let mut inside = 0usize;
    for trial in 0..trials {
        let amps = ansatz.sample(gaps, trial, gamma_scale);
        let (omega, rho, dev) = deviations(gaps, &amps, ansatz, epsilon)?;
        for ((w, r), d) in omega.iter().zip(&rho).zip(&dev) {
            let gamma = gamma_scale * (ansatz.gamma)(*w);
            let bound = r * (c1 * ansatz.k * epsilon + quarter_pi * M * gamma / (epsilon * r).sqrt());
            if *d <= bound {
                inside += 1;
            }
        }
        all.extend(dev);
    }
    all.sort_by(f64::total_cmp);
    let q = |p: f64| all[((all.len() - 1) as f64 * p).round() as usize];
    Ok(Result2Report {
        epsilon,
        n_gaps: gaps.len(),
        trials,
        gamma_scale,
        c1,
        m: M,
        k: ansatz.k,
        deviation_q10: q(0.1),
        deviation_median: median_sorted(&all),
        deviation_q90: q(0.9),
        deviation_max: all[all.len() - 1],
        pass_fraction: inside as f64 / all.len() as f64,
    })
}

pub fn frequency_csv(freq: &SignalGrid) -> Csv {
    let mut csv = Csv::new(&["omega", "re_g", "abs_g_sq"]);
    for (w, z) in freq.axis.points().zip(&freq.values) {
        csv.row(&[w, z.re, z.norm_sqr()]);
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(g: f64, v: f64) -> GapAmplitudeSet {
        GapAmplitudeSet::from_positive(&[g], &[C64::new(v, 0.0)]).unwrap()
    }

    #[test]
    fn window_values() {
        assert_eq!(window(0.0, 1.0), 1.0);
        assert!((window(0.3, 0.3) - (-0.5f64).exp() / 0.3).abs() < 1e-15);
        let g = UniformGrid::symmetric(10.0, 0.01).unwrap();
        let v: Vec<f64> = g.points().map(|w| window(w, 0.7)).collect();
        assert!((trapezoid(&v, g.step) - (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn window_self_convolution() {
        let eps = 0.5;
        let g = UniformGrid::symmetric(8.0, 0.005).unwrap();
        for x in [0.0, 0.3, 1.1] {
            let v: Vec<f64> = g.points().map(|w| window(w, eps) * window(x - w, eps)).collect();
            let want = 2.0 * PI * normal_pdf(x, std::f64::consts::SQRT_2 * eps);
            assert!((trapezoid(&v, g.step) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn config_validation() {
        let g = UniformGrid::symmetric(5.0, 0.1).unwrap();
        assert!(CoarseGrainConfig::new(0.4, g, 0.0).is_err());
        assert!(CoarseGrainConfig::new(0.5, g, 0.0).is_ok());
        let cfg = CoarseGrainConfig::new(0.5, g, 0.0).unwrap();
        match cg_frequency_signal(&pair(4.0, 0.1), &cfg) {
            Err(Error::GridCoverage { uncovered }) => assert_eq!(uncovered, vec![-4.0, 4.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_pair_bumps() {
        let gas = pair(2.0, 0.3);
        let cfg = CoarseGrainConfig::for_gaps(&gas, 0.1, 0.0).unwrap();
        let f = cg_frequency_signal(&gas, &cfg).unwrap();
        let k = (2.0 - cfg.omega_grid.start) / cfg.omega_grid.step;
        let k = k.round() as usize;
        assert!((f.values[k].re - 3.0).abs() < 1e-12);
        let peak = f.abs_sqr().iter().cloned().enumerate().fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        assert!((cfg.omega_grid.point(peak.0).abs() - 2.0).abs() <= cfg.omega_grid.step);
    }

    #[test]
    fn damping() {
        let gas = pair(1.0, 0.25);
        let axis = UniformGrid::new(0.0, 0.75, 11).unwrap();
        let g = crate::dephasing_signal::time_signal(&gas, axis);
        let d = cg_time_signal(&g, 1.0);
        assert_eq!(d.values[0], g.values[0]);
        assert!((d.values[4].re / g.values[4].re - (-4.5f64).exp()).abs() < 1e-12);
        for (a, b) in d.values.iter().zip(&g.values).skip(1) {
            assert!(a.norm() < b.norm() || b.norm() == 0.0);
        }
    }

    #[test]
    fn inverse_transform_single_pair() {
        let gas = pair(1.5, 0.2);
        let cfg = CoarseGrainConfig::for_gaps(&gas, 0.3, 0.0).unwrap();
        let err = inverse_ft_consistency(&gas, &cfg, UniformGrid::spanning(0.0, 20.0, 0.1).unwrap()).unwrap();
        assert!(err < 1e-6, "{err}");
        assert_eq!(inverse_ft_consistency(&GapAmplitudeSet::default(), &cfg, cfg.omega_grid).unwrap(), 0.0);
    }

    #[test]
    fn parseval() {
        let gas = GapAmplitudeSet::from_positive(&[0.4, 0.9, 1.0], &[C64::new(0.1, 0.02), C64::new(0.05, 0.0), C64::new(-0.03, 0.01)])
            .unwrap();
        let cfg = CoarseGrainConfig::for_gaps(&gas, 0.2, 0.0).unwrap();
        let (grid, closed) = parseval_check(&gas, &cfg).unwrap();
        assert!((grid - closed).abs() < 1e-4 * closed);
    }

    #[test]
    fn dispersion_limits() {
        let gas = GapAmplitudeSet::from_positive(&[0.5, 1.2, 2.0], &[C64::new(0.1, 0.0), C64::new(0.04, 0.03), C64::new(0.02, 0.0)])
            .unwrap();
        let sigma = crate::dephasing_signal::gap_dispersion(&gas).unwrap();
        let eps = 1e-3 * 0.7;
        assert!((cg_dispersion(&gas, eps).unwrap() - sigma).abs() < 1e-6 * sigma);
        // single pair: (G^2 + eps^2/2 + x eps^2/2) / (1 + x), x = exp(-G^2/eps^2)
        let (g, eps) = (1.0f64, 0.8f64);
        let x = (-(g * g) / (eps * eps)).exp();
        let want = (g * g + 0.5 * eps * eps + 0.5 * eps * eps * x) / (1.0 + x);
        let got = cg_dispersion(&pair(g, 0.1), eps).unwrap();
        assert!((got * got - want).abs() < 1e-14);
        // grid quadrature agrees with the closed form
        let cfg = CoarseGrainConfig::for_gaps(&gas, 0.3, 0.0).unwrap();
        let q = cg_dispersion_quadrature(&cg_frequency_signal(&gas, &cfg).unwrap());
        assert!((q - cg_dispersion(&gas, 0.3).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn gap_density_mass() {
        let grid = UniformGrid::symmetric(5.0, 0.01).unwrap();
        let one = cg_gap_density(&[0.3], 0.1, grid);
        assert!((one.integral() - 1.0).abs() < 1e-10);
        let many = cg_gap_density(&[0.3; 7], 0.1, grid);
        assert!((many.integral() - 7.0).abs() < 1e-9);
        let all = all_pairs_gap_density(&[0.0, 0.5, 1.7], 0.1, grid).unwrap();
        assert!((all.integral() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn epsilon_selection() {
        let gaps: Vec<f64> = (0..100).map(|k| k as f64 * 1e-6).collect();
        let q = vec![0.01; 100];
        let c = select_epsilon(&gaps, &q, 0.0, 1.0).unwrap();
        assert!((c.epsilon - 1e-3).abs() < 1e-12 && c.valid);
        let gaps: Vec<f64> = (0..10).map(|k| k as f64 * 0.5).collect();
        assert!(matches!(select_epsilon(&gaps, &[0.1; 10], 0.0, 1.0), Err(Error::NoValidEpsilon { .. })));
    }

    #[test]
    fn noiseless_constant_profile_is_exact() {
        let ansatz = SmoothAnsatz {
            v_smooth: Box::new(|_| C64::new(0.01, 0.0)),
            gamma: Box::new(|_| 0.0),
            k: 0.0,
            seed: 1,
        };
        let gaps = synthetic_gaps(10_000, -5.0, 5.0, 3);
        let r = result2_ensemble_check(&ansatz, &gaps, 0.1, 2, 0.0, 1.0).unwrap();
        assert!(r.deviation_max < 1e-6, "{}", r.deviation_max);
        assert_eq!(calibrate_c1(&ansatz, &gaps, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn lipschitz_measurement() {
        let ansatz = SmoothAnsatz {
            v_smooth: Box::new(|w| C64::from_polar(0.01, 0.5 * w)),
            gamma: Box::new(|_| 0.001),
            k: 0.5,
            seed: 0,
        };
        let l = ansatz.measured_lipschitz(-4.0, 4.0, 0.01).unwrap();
        assert!(l <= ansatz.k + 1e-9 && l > 0.49);
    }
}
