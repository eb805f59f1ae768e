//! The standard quench pipeline: build the chain, diagonalize, project the
//! initial state and enumerate the gap amplitudes of an observable.

use serde::Serialize;

use crate::dephasing_signal::{
    default_merge_tol, equilibration_time, gap_amplitudes_with_range, gap_dispersion, GapAmplitudeSet,
};
use crate::error::{Error, Result};
use crate::lattice_model::{
    build_hamiltonian, build_magnetization_x, build_x_polarized_state, HamiltonianSpec, OperatorMatrix, StateVector,
};
use crate::spectral::{diagonalize, effective_dimension, populations, Populations, Spectrum};

pub struct Quench {
    pub spec: HamiltonianSpec,
    pub hamiltonian: OperatorMatrix,
    pub spectrum: Spectrum,
    pub populations: Populations,
    pub d_eff: f64,
}

impl Quench {
    pub fn new(spec: &HamiltonianSpec, psi: &StateVector) -> Result<Self> {
        spec.validate()?;
        let hamiltonian = build_hamiltonian(spec)?;
        let spectrum = diagonalize(&hamiltonian)?;
        Self::finish(spec, hamiltonian, spectrum, psi)
    }

    /// Starts from the `k`-th eigenvector (ascending energy), so nothing moves.
    pub fn eigenstate(spec: &HamiltonianSpec, k: usize) -> Result<Self> {
        spec.validate()?;
        let hamiltonian = build_hamiltonian(spec)?;
        let spectrum = diagonalize(&hamiltonian)?;
        if k >= spectrum.dim() {
            return Err(Error::InvalidArgument(format!("eigenstate {k} out of range for dimension {}", spectrum.dim())));
        }
        let psi = StateVector::normalized(spectrum.vector(k))?;
        Self::finish(spec, hamiltonian, spectrum, &psi)
    }

    fn finish(spec: &HamiltonianSpec, hamiltonian: OperatorMatrix, mut spectrum: Spectrum, psi: &StateVector) -> Result<Self> {
        let tol = spectrum.default_tolerance();
        let populations = populations(&mut spectrum, psi, tol)?;
        let d_eff = effective_dimension(&populations);
        Ok(Self { spec: *spec, hamiltonian, spectrum, populations, d_eff })
    }

    /// Quench from the state with every spin along +x.
    pub fn x_polarized(spec: &HamiltonianSpec) -> Result<Self> {
        Self::new(spec, &build_x_polarized_state(spec.n_sites)?)
    }

    /// Untruncated gap amplitudes of `a`, whose range is `delta_a`.
    pub fn gaps(&self, a: &OperatorMatrix, delta_a: f64) -> Result<GapAmplitudeSet> {
        let tol = default_merge_tol(&self.spectrum);
        gap_amplitudes_with_range(&self.spectrum, &self.populations, a, delta_a, tol, 0.0)
    }

    /// Gap amplitudes of `M^x` (range 1).
    pub fn magnetization_gaps(&self) -> Result<GapAmplitudeSet> {
        self.gaps(&build_magnetization_x(self.spec.n_sites)?, 1.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TimescaleRow {
    pub n_sites: usize,
    pub boundary: String,
    pub d_eff: f64,
    pub n_gaps: usize,
    pub sigma_g: f64,
    pub t_eq: f64,
}

/// `sigma_G` and `T_eq = pi / sigma_G` of `M^x` after the x-polarized quench.
pub fn magnetization_timescale(spec: &HamiltonianSpec) -> Result<TimescaleRow> {
    let q = Quench::x_polarized(spec)?;
    let gas = q.magnetization_gaps()?;
    let sigma_g = gap_dispersion(&gas)?;
    Ok(TimescaleRow {
        n_sites: spec.n_sites,
        boundary: spec.boundary.to_string(),
        d_eff: q.d_eff,
        n_gaps: gas.len(),
        sigma_g,
        t_eq: equilibration_time(sigma_g)?,
    })
}
