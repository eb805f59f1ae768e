//! Synthetic spectra with Poisson or Wigner-Dyson spacings, block
//! resampling between the two laws, and the comparison of the time signals
//! two such spectra produce when they share their gap amplitudes.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::coarse_grain::{cg_frequency_signal, window, CoarseGrainConfig};
use crate::dephasing_signal::{signal_at, GapAmplitudeSet};
use crate::error::{Error, Result};
use crate::export::Csv;
use crate::grid::{trapezoid, SignalGrid, UniformGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingLaw {
    Poisson,
    WignerDyson,
}

impl SpacingLaw {
    /// Closed-form CDF for mean spacing `mu`.
    pub fn cdf(self, s: f64, mu: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            SpacingLaw::Poisson => -(-s / mu).exp_m1(),
            SpacingLaw::WignerDyson => -(-PI * s * s / (4.0 * mu * mu)).exp_m1(),
        }
    }

    pub fn pdf(self, s: f64, mu: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        match self {
            SpacingLaw::Poisson => (-s / mu).exp() / mu,
            SpacingLaw::WignerDyson => PI * s / (2.0 * mu * mu) * (-PI * s * s / (4.0 * mu * mu)).exp(),
        }
    }

    /// Natural variance at mean `mu`: `mu^2` and `(4/pi - 1) mu^2`.
    pub fn variance(self, mu: f64) -> f64 {
        match self {
            SpacingLaw::Poisson => mu * mu,
            SpacingLaw::WignerDyson => (4.0 / PI - 1.0) * mu * mu,
        }
    }

    fn draw(self, mu: f64, rng: &mut impl Rng) -> f64 {
        let u: f64 = rng.sample(Open01);
        // inverse CDFs; -ln(1 - u) is a unit exponential
        let x = -(-u).ln_1p();
        match self {
            SpacingLaw::Poisson => mu * x,
            SpacingLaw::WignerDyson => mu * (4.0 * x / PI).sqrt(),
        }
    }
}

impl std::str::FromStr for SpacingLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(SpacingLaw::Poisson),
            "wigner_dyson" | "wigner-dyson" | "wd" => Ok(SpacingLaw::WignerDyson),
            other => Err(Error::Config(format!("unknown spacing law `{other}`"))),
        }
    }
}

/// `count` i.i.d. spacings with mean `mu`.
pub fn sample_spacings(law: SpacingLaw, mu: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 || !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("need count >= 1 and mu > 0 (count {count}, mu {mu})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| law.draw(mu, &mut rng)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SyntheticSpectrum {
    pub energies: Vec<f64>,
    pub law: Option<SpacingLaw>,
    pub mean_spacing: f64,
    pub seed: Option<u64>,
}

impl SyntheticSpectrum {
    /// `levels` levels from `e0` with i.i.d. spacings of the given law.
    pub fn generate(law: SpacingLaw, mu: f64, levels: usize, seed: u64, e0: f64) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidArgument("need at least two levels".into()));
        }
        let s = sample_spacings(law, mu, levels - 1, seed)?;
        let mut out = build_spectrum(&s, e0)?;
        out.law = Some(law);
        out.mean_spacing = mu;
        out.seed = Some(seed);
        Ok(out)
    }

    pub fn spacings(&self) -> Vec<f64> {
        self.energies.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(&["index", "energy"]);
        for (k, e) in self.energies.iter().enumerate() {
            csv.row(&[k as f64, *e]);
        }
        csv
    }
}

/// Cumulative sum of the spacings from `e0`.
pub fn build_spectrum(spacings: &[f64], e0: f64) -> Result<SyntheticSpectrum> {
    if let Some(s) = spacings.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::InvalidArgument(format!("non-positive spacing {s}")));
    }
    let mut energies = Vec::with_capacity(spacings.len() + 1);
    energies.push(e0);
    let mut e = e0;
    for s in spacings {
        e += s;
        energies.push(e);
    }
    let mean_spacing = if spacings.is_empty() { 0.0 } else { (e - e0) / spacings.len() as f64 };
    Ok(SyntheticSpectrum { energies, law: None, mean_spacing, seed: None })
}

/// Block boundaries: blocks of `l` levels sharing their end levels, so
/// block `b` spans indices `b (l-1) ..= (b+1)(l-1)`. A trailing partial
/// block keeps whatever levels remain.
pub fn block_edges(levels: usize, l: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    while start + 1 < levels {
        let end = (start + l - 1).min(levels - 1);
        out.push((start, end));
        start = end;
    }
    out
}

/// Redraws the interior of every block with spacings of `law2`, rescaled
/// so the block keeps its span. Block end levels never move.
pub fn block_resample(spec1: &SyntheticSpectrum, l: usize, law2: SpacingLaw, seed: u64) -> Result<SyntheticSpectrum> {
    let n = spec1.energies.len();
    if l < 3 {
        return Err(Error::InvalidArgument(format!("block size {l} < 3")));
    }
    if l > n {
        return Err(Error::InvalidArgument(format!("block size {l} exceeds {n} levels")));
    }
    let mu = spec1.mean_spacing;
    let mut energies = spec1.energies.clone();
    for (b, (lo, hi)) in block_edges(n, l).into_iter().enumerate() {
        if hi - lo < 2 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let s: Vec<f64> = (lo..hi).map(|_| law2.draw(mu, &mut rng)).collect();
        let total: f64 = s.iter().sum();
        let span = spec1.energies[hi] - spec1.energies[lo];
        let mut e = spec1.energies[lo];
        for (k, sk) in s.iter().enumerate().take(s.len() - 1) {
            e += sk * span / total;
            energies[lo + 1 + k] = e;
        }
    }
    Ok(SyntheticSpectrum { energies, law: Some(law2), mean_spacing: mu, seed: Some(seed) })
}

/// Spacings inside each full block, divided by that block's mean spacing.
pub fn within_block_spacings(spec: &SyntheticSpectrum, l: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for (lo, hi) in block_edges(spec.energies.len(), l) {
        if hi - lo + 1 < l {
            continue;
        }
        let mean = (spec.energies[hi] - spec.energies[lo]) / (hi - lo) as f64;
        out.extend(spec.energies[lo..=hi].windows(2).map(|w| (w[1] - w[0]) / mean));
    }
    out
}

/// Kolmogorov distance between the empirical CDF of `samples` and the law.
pub fn spacing_ks(samples: &[f64], law: SpacingLaw, mu: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = law.cdf(x, mu);
            (f - k as f64 / n).abs().max((f - (k + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

pub fn max_displacement(a: &SyntheticSpectrum, b: &SyntheticSpectrum) -> f64 {
    a.energies.iter().zip(&b.energies).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Normalized spacing histogram with the two closed-form densities.
pub fn spacing_histogram_csv(spacings: &[f64], mu: f64, bin: f64, max: f64) -> Csv {
    let nb = (max / bin).ceil() as usize;
    let mut h = vec![0.0; nb];
    for &s in spacings {
        let k = (s / bin) as usize;
        if k < nb {
            h[k] += 1.0;
        }
    }
    let norm = spacings.len() as f64 * bin;
    let mut csv = Csv::new(&["s", "density", "poisson", "wigner_dyson"]);
    for (k, c) in h.iter().enumerate() {
        let s = (k as f64 + 0.5) * bin;
        csv.row(&[s, c / norm, SpacingLaw::Poisson.pdf(s, mu), SpacingLaw::WignerDyson.pdf(s, mu)]);
    }
    csv
}

/// `int |g1 - g2| dw` on a shared grid.
pub fn one_norm_distance(g1: &SignalGrid, g2: &SignalGrid) -> Result<f64> {
    if g1.axis != g2.axis {
        return Err(Error::InvalidArgument("signals live on different grids".into()));
    }
    let d: Vec<f64> = g1.values.iter().zip(&g2.values).map(|(a, b)| (a - b).norm()).collect();
    Ok(trapezoid(&d, g1.axis.step))
}

/// `h_eps(w - G1) - h_eps(w - G2)` written through the mean gap and the
/// half difference `delta = (G1 - G2) / 2`:
/// `2 eps h_eps(w - Gbar) h_eps(delta) sinh(delta (w - Gbar) / eps^2)`.
pub fn u_delta(omega: f64, gbar: f64, delta: f64, epsilon: f64) -> f64 {
    let x = omega - gbar;
    2.0 * epsilon * window(x, epsilon) * window(delta, epsilon) * (delta * x / (epsilon * epsilon)).sinh()
}

/// Amplitudes attached to level pairs `(i, j)`, shared by two spectra.
#[derive(Clone, Debug)]
pub struct PairAmplitudes {
    /// `(i, j, v)` with `i != j`; the reverse pair carries `conj(v)`.
    pub pairs: Vec<(usize, usize, C64)>,
}

impl PairAmplitudes {
    /// Random complex amplitudes on pairs with `0 < |i - j| <= band`,
    /// normalized to `sum |v| = 1` over both orientations.
    pub fn banded_random(levels: usize, band: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for i in 0..levels {
            for j in i + 1..levels.min(i + band + 1) {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                pairs.push((i, j, C64::new(re, im)));
            }
        }
        Self::normalized(pairs)
    }

    /// Equal real amplitudes on the same banded pairs.
    pub fn banded_uniform(levels: usize, band: usize) -> Self {
        let pairs = (0..levels)
            .flat_map(|i| (i + 1..levels.min(i + band + 1)).map(move |j| (i, j, C64::new(1.0, 0.0))))
            .collect();
        Self::normalized(pairs)
    }

    fn normalized(mut pairs: Vec<(usize, usize, C64)>) -> Self {
        let total: f64 = 2.0 * pairs.iter().map(|p| p.2.norm()).sum::<f64>();
        pairs.iter_mut().for_each(|p| p.2 /= total);
        Self { pairs }
    }

    /// Gap set on `energies`: `G = E_j - E_i` with `v`, and the reverse.
    pub fn gap_set(&self, energies: &[f64]) -> Result<GapAmplitudeSet> {
        let mut pos = Vec::with_capacity(self.pairs.len());
        let mut amps = Vec::with_capacity(self.pairs.len());
        for &(i, j, v) in &self.pairs {
            if i.max(j) >= energies.len() {
                return Err(Error::DimensionMismatch { expected: i.max(j) + 1, got: energies.len() });
            }
            let g = energies[j] - energies[i];
            if g > 0.0 {
                pos.push(g);
                amps.push(v);
            } else if g < 0.0 {
                pos.push(-g);
                amps.push(v.conj());
            }
        }
        GapAmplitudeSet::from_positive(&pos, &amps)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistinguishabilityReport {
    pub epsilon: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub t_max: f64,
    pub samples: usize,
    pub max_deviation: f64,
    /// `delta1 + delta2 - max_deviation`; positive when the bound holds.
    pub margin: f64,
    pub violations: usize,
}

/// Compares the time signals of two spectra carrying the same amplitudes
/// against `|g1(t) - g2(t)| < delta1 + delta2` for `t <= sqrt(delta2)/eps`,
/// with `delta1` the one-norm distance of the coarse-grained spectra.
pub fn distinguishability_check(
    amps: &PairAmplitudes,
    spec1: &SyntheticSpectrum,
    spec2: &SyntheticSpectrum,
    epsilon: f64,
    delta2: f64,
    t_axis: UniformGrid,
) -> Result<DistinguishabilityReport> {
    if !(delta2 > 0.0 && delta2 < 2.0) {
        return Err(Error::InvalidArgument(format!("delta2 = {delta2} must lie in (0, 2)")));
    }
    let g1 = amps.gap_set(&spec1.energies)?;
    let g2 = amps.gap_set(&spec2.energies)?;
    let reach = g1.gaps.iter().chain(&g2.gaps).fold(0.0f64, |m, g| m.max(g.abs()));
    let grid = UniformGrid::symmetric(reach + 8.0 * epsilon, epsilon / 10.0)?;
    let cfg = CoarseGrainConfig::new(epsilon, grid, 0.0)?;
    let delta1 = one_norm_distance(&cg_frequency_signal(&g1, &cfg)?, &cg_frequency_signal(&g2, &cfg)?)?;
    let t_max = delta2.sqrt() / epsilon;
    let mut max_deviation = 0.0f64;
    let mut samples = 0;
    let mut violations = 0;
    for t in t_axis.points().filter(|&t| t.abs() <= t_max) {
        let d = (signal_at(&g1, t) - signal_at(&g2, t)).norm();
        max_deviation = max_deviation.max(d);
        samples += 1;
        if !(d < delta1 + delta2) {
            violations += 1;
        }
    }
    Ok(DistinguishabilityReport {
        epsilon,
        delta1,
        delta2,
        t_max,
        samples,
        max_deviation,
        margin: delta1 + delta2 - max_deviation,
        violations,
    })
}
