//! Eigendecomposition, energy populations and the energy density of a state.

use std::ops::Range;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::Csv;
use crate::grid::{cumulative_trapezoid, normal_cdf, normal_pdf, trapezoid, UniformGrid};
use crate::lattice_model::{check_dim, OperatorMatrix, StateVector};
use crate::linalg::{dot_conj, norm_sqr, Matrix};

/// Ascending energies with eigenvectors as matrix columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub vectors: Matrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn spectral_range(&self) -> f64 {
        match self.energies.len() {
            0 => 0.0,
            n => self.energies[n - 1] - self.energies[0],
        }
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `max |H V - V diag(E)|`.
    pub fn residual(&self, h: &OperatorMatrix) -> f64 {
        let hv = match (&h.matrix, &self.vectors) {
            (Matrix::Real(a), Matrix::Real(v)) => Matrix::Real(a * v),
            _ => Matrix::Complex(&h.matrix.to_complex() * &self.vectors.to_complex()),
        };
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let d = hv.get(i, j) - self.vectors.get(i, j) * self.energies[j];
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// `max |V^dag V - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = Matrix::identity(self.dim()).conjugate_by(&self.vectors);
        g.max_abs_diff(&Matrix::identity(self.dim()))
    }

    /// Index ranges of energies that agree within `tol` of their neighbours.
    pub fn degenerate_groups(&self, tol: f64) -> Vec<Range<usize>> {
        let mut groups = Vec::new();
        let mut start = 0;
        for k in 1..=self.energies.len() {
            if k == self.energies.len() || self.energies[k] - self.energies[k - 1] > tol {
                groups.push(start..k);
                start = k;
            }
        }
        groups
    }

    /// Default degeneracy tolerance, `1e-10` times the spectral range.
    pub fn default_tolerance(&self) -> f64 {
        1e-10 * self.spectral_range()
    }

    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(&["index", "energy"]);
        for (k, &e) in self.energies.iter().enumerate() {
            csv.row(&[k as f64, e]);
        }
        csv
    }
}

pub fn diagonalize(h: &OperatorMatrix) -> Result<Spectrum> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian { defect: h.matrix.hermiticity_defect() });
    }
    let (energies, vectors) = h.matrix.self_adjoint_eigen()?;
    Ok(Spectrum { energies, vectors })
}

/// Overlaps `c_k = <E_k|psi>` in an eigenbasis where the state touches at
/// most one vector per degenerate eigenspace.
#[derive(Clone, Debug)]
pub struct Populations {
    pub c: Vec<C64>,
    /// Degenerate groups (size > 1) that were rotated.
    pub groups: Vec<Range<usize>>,
}

impl Populations {
    pub fn weights(&self) -> Vec<f64> {
        self.c.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn total(&self) -> f64 {
        norm_sqr(&self.c)
    }

    /// `(mu_E, sigma_E)` from the populations.
    pub fn energy_moments(&self, spectrum: &Spectrum) -> (f64, f64) {
        let w = self.weights();
        let total: f64 = w.iter().sum();
        let mu = w.iter().zip(&spectrum.energies).map(|(p, e)| p * e).sum::<f64>() / total;
        let var = w.iter().zip(&spectrum.energies).map(|(p, e)| p * (e - mu).powi(2)).sum::<f64>() / total;
        (mu, var.sqrt())
    }

    pub fn to_csv(&self, spectrum: &Spectrum) -> Csv {
        let mut csv = Csv::new(&["index", "energy", "weight", "phase"]);
        for (k, z) in self.c.iter().enumerate() {
            csv.row(&[k as f64, spectrum.energies[k], z.norm_sqr(), z.arg()]);
        }
        csv
    }
}

/// Computes the populations of `psi`, rotating each degenerate eigenspace of
/// `spectrum` in place so the state overlaps one vector of it.
pub fn populations(spectrum: &mut Spectrum, psi: &StateVector, degeneracy_tol: f64) -> Result<Populations> {
    check_dim(spectrum.dim(), psi.dim())?;
    if norm_sqr(&psi.amplitudes) == 0.0 {
        return Err(Error::InvalidArgument("zero state".into()));
    }
    let mut c = spectrum.vectors.adjoint_matvec(&psi.amplitudes);
    let groups: Vec<_> = spectrum.degenerate_groups(degeneracy_tol).into_iter().filter(|g| g.len() > 1).collect();
    for g in &groups {
        let block = &c[g.clone()];
        let weight = norm_sqr(block).sqrt();
        if weight == 0.0 {
            continue;
        }
        let w = rotation_for(block, weight);
        rotate_columns(&mut spectrum.vectors, g.clone(), &w);
        c[g.start] = C64::new(weight, 0.0);
        for z in &mut c[g.start + 1..g.end] {
            *z = C64::new(0.0, 0.0);
        }
    }
    Ok(Populations { c, groups })
}

/// Unitary `m x m` matrix (column-major) whose first column is `block/weight`.
fn rotation_for(block: &[C64], weight: f64) -> Vec<Vec<C64>> {
    let m = block.len();
    let mut cols: Vec<Vec<C64>> = vec![block.iter().map(|z| z / weight).collect()];
    for k in 0..m {
        if cols.len() == m {
            break;
        }
        let mut e = vec![C64::new(0.0, 0.0); m];
        e[k] = C64::new(1.0, 0.0);
        // Twice for numerical orthogonality.
        for _ in 0..2 {
            for q in &cols {
                let p = dot_conj(q, &e);
                for (x, y) in e.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let n = norm_sqr(&e).sqrt();
        if n > 0.5 / (m as f64).sqrt() {
            cols.push(e.into_iter().map(|z| z / n).collect());
        }
    }
    cols
}

fn rotate_columns(v: &mut Matrix, g: Range<usize>, w: &[Vec<C64>]) {
    let all_real = w.iter().all(|col| col.iter().all(|z| z.im == 0.0));
    if !all_real {
        if let Matrix::Real(_) = v {
            *v = Matrix::Complex(v.to_complex());
        }
    }
    let n = v.dim();
    match v {
        Matrix::Real(m) => {
            let old: Vec<Vec<f64>> = g.clone().map(|j| m.col_as_slice(j).to_vec()).collect();
            for (b, col) in w.iter().enumerate() {
                for i in 0..n {
                    m[(i, g.start + b)] = old.iter().zip(col).map(|(o, wk)| o[i] * wk.re).sum();
                }
            }
        }
        Matrix::Complex(m) => {
            let old: Vec<Vec<C64>> = g.clone().map(|j| m.col_as_slice(j).to_vec()).collect();
            for (b, col) in w.iter().enumerate() {
                for i in 0..n {
                    m[(i, g.start + b)] = old.iter().zip(col).map(|(o, wk)| o[i] * wk).sum();
                }
            }
        }
    }
}

/// `d_eff = 1 / sum |c_k|^4`.
pub fn effective_dimension(pop: &Populations) -> f64 {
    1.0 / pop.c.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>()
}

/// `(mu_E, sigma_E)` of `psi` from `<H>` and `<H^2>`.
pub fn energy_moments(psi: &StateVector, h: &OperatorMatrix) -> Result<(f64, f64)> {
    check_dim(h.dim(), psi.dim())?;
    let hpsi = h.matrix.matvec(&psi.amplitudes);
    let mu = dot_conj(&psi.amplitudes, &hpsi).re;
    let var = norm_sqr(&hpsi) - mu * mu;
    Ok((mu, var.max(0.0).sqrt()))
}

/// Gaussian-smoothed energy distribution `f_eps(E) = sum |c_i|^2 N_eps(E - E_i)`.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyDensity {
    pub epsilon: f64,
    pub axis: UniformGrid,
    pub values: Vec<f64>,
    pub mu: f64,
    pub sigma: f64,
    /// False when the grid misses part of `[E_min - 5 eps, E_max + 5 eps]`.
    pub covers_support: bool,
}

impl EnergyDensity {
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.axis.step)
    }

    /// Mean and standard deviation of the sampled density.
    pub fn quadrature_moments(&self) -> (f64, f64) {
        let x = self.axis.to_vec();
        let mass = self.integral();
        let m1: Vec<f64> = x.iter().zip(&self.values).map(|(x, f)| x * f).collect();
        let mu = trapezoid(&m1, self.axis.step) / mass;
        let m2: Vec<f64> = x.iter().zip(&self.values).map(|(x, f)| (x - mu).powi(2) * f).collect();
        (mu, (trapezoid(&m2, self.axis.step) / mass).sqrt())
    }

    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(&["energy", "density"]);
        for (e, f) in self.axis.points().zip(&self.values) {
            csv.row(&[e, *f]);
        }
        csv
    }
}

/// Grid covering the spectrum plus `6 eps` on both sides, step `eps/10`.
pub fn default_energy_grid(spectrum: &Spectrum, epsilon: f64) -> Result<UniformGrid> {
    let lo = spectrum.energies[0] - 6.0 * epsilon;
    let hi = spectrum.energies[spectrum.dim() - 1] + 6.0 * epsilon;
    UniformGrid::spanning(lo, hi, epsilon / 10.0)
}

pub fn energy_density(pop: &Populations, spectrum: &Spectrum, epsilon: f64, grid: UniformGrid) -> Result<EnergyDensity> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    check_dim(spectrum.dim(), pop.c.len())?;
    let mut values = vec![0.0; grid.len];
    let reach = 12.0 * epsilon;
    for (w, &e) in pop.weights().iter().zip(&spectrum.energies) {
        if *w == 0.0 {
            continue;
        }
        for k in grid.index_range(e - reach, e + reach) {
            values[k] += w * normal_pdf(grid.point(k) - e, epsilon);
        }
    }
    let (mu, sigma) = pop.energy_moments(spectrum);
    let covers_support = grid.start <= spectrum.energies[0] - 5.0 * epsilon
        && grid.stop() >= spectrum.energies[spectrum.dim() - 1] + 5.0 * epsilon;
    Ok(EnergyDensity { epsilon, axis: grid, values, mu, sigma, covers_support })
}

/// Kolmogorov distance between the density's CDF and `N(mu_E, sigma_E)`.
pub fn gaussianity_distance(density: &EnergyDensity) -> Result<f64> {
    if !(density.sigma > 0.0) {
        return Err(Error::DegenerateDensity);
    }
    let cdf = cumulative_trapezoid(&density.values, density.axis.step);
    Ok(density
        .axis
        .points()
        .zip(&cdf)
        .map(|(e, f)| (f - normal_cdf((e - density.mu) / density.sigma)).abs())
        .fold(0.0, f64::max))
}
