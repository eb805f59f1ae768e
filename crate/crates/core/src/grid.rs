//! Uniform sampling axes, sampled signals and the quadrature rules used on
//! them.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Normalized Gaussian density with standard deviation `sigma`.
#[inline]
pub fn normal_pdf(x: f64, sigma: f64) -> f64 {
    (-(x * x) / (2.0 * sigma * sigma)).exp() / ((2.0 * PI).sqrt() * sigma)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Uniform axis `start + k * step` for `k in 0..len`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || !start.is_finite() || len == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid needs a positive step and at least one point (start {start}, step {step}, len {len})"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// Grid from `start` to (at least) `stop` with the given step.
    pub fn spanning(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(stop >= start) {
            return Err(Error::InvalidArgument(format!("empty span [{start}, {stop}]")));
        }
        let len = ((stop - start) / step - 1e-9).ceil().max(0.0) as usize + 1;
        Self::new(start, step, len)
    }

    /// Grid symmetric about zero, covering [-half_width, half_width], with
    /// zero on a grid point.
    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidArgument(format!("non-positive step {step}")));
        }
        let half = (half_width / step - 1e-9).ceil().max(0.0) as usize;
        Self::new(-(half as f64) * step, step, 2 * half + 1)
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn stop(&self) -> f64 {
        self.point(self.len - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.point(k))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }

    /// Index range of grid points inside [lo, hi].
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = ((lo - self.start) / self.step).ceil().max(0.0) as usize;
        let b = (((hi - self.start) / self.step).floor() + 1.0).max(0.0) as usize;
        a.min(self.len)..b.min(self.len)
    }
}

/// Trapezoidal rule on uniform samples.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// Trapezoidal rule for complex samples.
pub fn trapezoid_complex(values: &[C64], step: f64) -> C64 {
    match values.len() {
        0 | 1 => C64::new(0.0, 0.0),
        n => (values.iter().sum::<C64>() - 0.5 * (values[0] + values[n - 1])) * step,
    }
}

/// Running trapezoidal integral, starting from zero at the first sample.
pub fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (k, &v) in values.iter().enumerate() {
        if k > 0 {
            acc += 0.5 * step * (values[k - 1] + v);
        }
        out.push(acc);
    }
    out
}

/// Composite Simpson rule; `values.len()` must be odd.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    assert!(n % 2 == 1, "simpson needs an odd number of samples");
    if n == 1 {
        return 0.0;
    }
    let mut acc = values[0] + values[n - 1];
    for (k, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * step / 3.0
}

/// Complex samples on a uniform axis (time or frequency).
#[derive(Clone, Debug)]
pub struct SignalGrid {
    pub axis: UniformGrid,
    pub values: Vec<C64>,
}

impl SignalGrid {
    pub fn zeros(axis: UniformGrid) -> Self {
        Self { axis, values: vec![C64::new(0.0, 0.0); axis.len] }
    }

    pub fn abs_sqr(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Grid 2-norm squared, by the trapezoidal rule.
    pub fn norm_sqr(&self) -> f64 {
        trapezoid(&self.abs_sqr(), self.axis.step)
    }
}

/// Real samples on a uniform axis (densities, profiles).
#[derive(Clone, Debug)]
pub struct RealSignal {
    pub axis: UniformGrid,
    pub values: Vec<f64>,
}

impl RealSignal {
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.axis.step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_grid_contains_zero() {
        let g = UniformGrid::symmetric(1.0, 0.3).unwrap();
        assert_eq!(g.len % 2, 1);
        assert!(g.point(g.len / 2).abs() < 1e-15);
        assert!(g.stop() >= 1.0);
    }

    #[test]
    fn index_range_bounds() {
        let g = UniformGrid::new(0.0, 1.0, 11).unwrap();
        assert_eq!(g.index_range(2.5, 5.0), 3..6);
        assert_eq!(g.index_range(-4.0, 0.0), 0..1);
        assert_eq!(g.index_range(20.0, 30.0), 11..11);
    }

    #[test]
    fn quadrature_rules() {
        let g = UniformGrid::symmetric(8.0, 0.01).unwrap();
        let v: Vec<f64> = g.points().map(|x| normal_pdf(x, 1.0)).collect();
        assert!((trapezoid(&v, g.step) - 1.0).abs() < 1e-10);
        assert!((simpson(&v, g.step) - 1.0).abs() < 1e-10);
        let c = cumulative_trapezoid(&v, g.step);
        assert!((c[g.len / 2] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        let v = normal_cdf(-1.0);
        assert!((v - 0.158_655_253_931_457_05).abs() < 1e-12, "{v:e}");
    }
}
