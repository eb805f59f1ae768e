//! Dense matrix storage shared by the operator and spectrum types.
//!
//! Spin-chain Hamiltonians and most observables are real symmetric, and a
//! real eigensolve is several times cheaper than a complex one at the sizes
//! used here, so matrices stay real until an operation forces promotion.

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense square matrix, real or complex.
#[derive(Clone, Debug)]
pub enum Matrix {
    Real(Mat<f64>),
    Complex(Mat<C64>),
}

impl Matrix {
    pub fn zeros_real(dim: usize) -> Self {
        Matrix::Real(Mat::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Matrix::Real(Mat::from_fn(dim, dim, |i, j| if i == j { 1.0 } else { 0.0 }))
    }

    pub fn from_real_fn(dim: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        Matrix::Real(Mat::from_fn(dim, dim, f))
    }

    pub fn from_complex_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Matrix::Complex(Mat::from_fn(dim, dim, f))
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Matrix::Real(Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Matrix::Real(m) => m.nrows(),
            Matrix::Complex(m) => m.nrows(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Matrix::Real(_))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self {
            Matrix::Real(m) => C64::new(m[(i, j)], 0.0),
            Matrix::Complex(m) => m[(i, j)],
        }
    }

    /// Complex copy of this matrix.
    pub fn to_complex(&self) -> Mat<C64> {
        match self {
            Matrix::Real(m) => Mat::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0)),
            Matrix::Complex(m) => m.clone(),
        }
    }

    /// Converts to the real variant when every imaginary part is exactly zero.
    pub fn demote_if_real(self) -> Self {
        match self {
            Matrix::Complex(m) => {
                let n = m.nrows();
                let all_real = (0..n).all(|j| m.col_as_slice(j).iter().all(|z| z.im == 0.0));
                if all_real {
                    Matrix::Real(Mat::from_fn(n, n, |i, j| m[(i, j)].re))
                } else {
                    Matrix::Complex(m)
                }
            }
            real => real,
        }
    }

    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        let mut best = 0.0f64;
        match self {
            Matrix::Real(m) => {
                for j in 0..n {
                    for x in m.col_as_slice(j) {
                        best = best.max(x.abs());
                    }
                }
            }
            Matrix::Complex(m) => {
                for j in 0..n {
                    for z in m.col_as_slice(j) {
                        best = best.max(z.norm());
                    }
                }
            }
        }
        best
    }

    /// max |M_ij - conj(M_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        match self {
            Matrix::Real(m) => {
                for j in 0..n {
                    for i in j..n {
                        worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
                    }
                }
            }
            Matrix::Complex(m) => {
                for j in 0..n {
                    for i in j..n {
                        worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            match self {
                Matrix::Real(m) => acc += m.col_as_slice(j).iter().map(|x| x * x).sum::<f64>(),
                Matrix::Complex(m) => acc += m.col_as_slice(j).iter().map(|z| z.norm_sqr()).sum::<f64>(),
            }
        }
        acc.sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Column `j` as complex values.
    pub fn column(&self, j: usize) -> Vec<C64> {
        match self {
            Matrix::Real(m) => m.col_as_slice(j).iter().map(|&x| C64::new(x, 0.0)).collect(),
            Matrix::Complex(m) => m.col_as_slice(j).to_vec(),
        }
    }

    /// M x.
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); n];
        match self {
            Matrix::Real(m) => {
                for (j, &xj) in x.iter().enumerate() {
                    if xj == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for (o, &a) in out.iter_mut().zip(m.col_as_slice(j)) {
                        *o += xj * a;
                    }
                }
            }
            Matrix::Complex(m) => {
                for (j, &xj) in x.iter().enumerate() {
                    if xj == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for (o, &a) in out.iter_mut().zip(m.col_as_slice(j)) {
                        *o += a * xj;
                    }
                }
            }
        }
        out
    }

    /// M^dag x, i.e. the overlaps of x with every column.
    pub fn adjoint_matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|j| match self {
                Matrix::Real(m) => m.col_as_slice(j).iter().zip(x).map(|(&a, &b)| b * a).sum(),
                Matrix::Complex(m) => m.col_as_slice(j).iter().zip(x).map(|(a, &b)| a.conj() * b).sum(),
            })
            .collect()
    }

    /// Basis change U^dag M U.
    pub fn conjugate_by(&self, u: &Matrix) -> Matrix {
        match (self, u) {
            (Matrix::Real(m), Matrix::Real(u)) => {
                let mu = m * u;
                Matrix::Real(u.transpose() * &mu)
            }
            _ => {
                let m = self.to_complex();
                let u = u.to_complex();
                let mu = &m * &u;
                Matrix::Complex(u.adjoint() * &mu)
            }
        }
    }

    /// U diag(d) U^dag.
    pub fn reconstruct(u: &Matrix, d: &[f64]) -> Matrix {
        match u {
            Matrix::Real(u) => {
                let ud = Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * d[j]);
                Matrix::Real(&ud * u.transpose())
            }
            Matrix::Complex(u) => {
                let ud = Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * d[j]);
                Matrix::Complex(&ud * u.adjoint())
            }
        }
    }

    /// Entrywise difference max |A - B|.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        worst
    }

    /// Ascending eigenvalues and the matching eigenvector columns.
    pub fn self_adjoint_eigen(&self) -> Result<(Vec<f64>, Matrix)> {
        match self {
            Matrix::Real(m) => {
                let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
                let s = evd.S().column_vector();
                let energies = (0..m.nrows()).map(|i| s[i]).collect();
                Ok((energies, Matrix::Real(evd.U().to_owned())))
            }
            Matrix::Complex(m) => {
                let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
                let s = evd.S().column_vector();
                let energies = (0..m.nrows()).map(|i| s[i].re).collect();
                Ok((energies, Matrix::Complex(evd.U().to_owned())))
            }
        }
    }

    /// Ascending eigenvalues only.
    pub fn self_adjoint_eigenvalues(&self) -> Result<Vec<f64>> {
        match self {
            Matrix::Real(m) => m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::Eigensolver),
            Matrix::Complex(m) => m
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|_| Error::Eigensolver),
        }
    }
}

pub(crate) fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}
