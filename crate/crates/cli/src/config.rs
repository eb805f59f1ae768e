//! Run configuration: a flat TOML file, overridden by command-line flags.
//!
//! ```toml
//! n = [10]              # chain sizes; single-size commands use the first
//! boundary = "open"     # omit to run table1 with both boundaries
//! J = 1.0
//! delta = 0.5
//! j2 = 1.0
//! hz = 0.2
//! observable = "magnetization_x"   # or "site"
//! site = 0
//! axis = "x"
//! state = "x_polarized"            # or "eigenstate"
//! eigen_index = 0
//! t_max = 100.0
//! dt = 0.05
//! epsilon = [0.4, 0.02]
//! truncation = 0.0
//! snapshots = [0.0, 4.0, 8.0, 12.0, 16.0, 20.0]
//! bin = 0.05
//! gamma = 1.0
//! levels = 1000
//! block = 20
//! law = "poisson"
//! resample_law = "wigner_dyson"
//! pair_band = 3
//! delta2 = 0.04
//! pairs = 20
//! trials = 100
//! seed = 0
//! out = "out"
//! ```

use std::path::{Path, PathBuf};

use eqtime::lattice_model::{Axis, Boundary, HamiltonianSpec};
use eqtime::level_stats::SpacingLaw;
use eqtime::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    MagnetizationX,
    Site,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    XPolarized,
    Eigenstate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n: Option<Vec<usize>>,
    pub boundary: Option<Boundary>,
    #[serde(rename = "J")]
    pub j: f64,
    pub delta: f64,
    pub j2: f64,
    pub hz: f64,
    pub observable: Observable,
    pub site: usize,
    pub axis: Axis,
    pub state: InitialState,
    pub eigen_index: usize,
    pub t_max: f64,
    pub dt: f64,
    pub epsilon: Option<Vec<f64>>,
    pub truncation: f64,
    pub snapshots: Vec<f64>,
    pub bin: f64,
    pub gamma: f64,
    pub levels: usize,
    pub block: usize,
    pub law: SpacingLaw,
    pub resample_law: SpacingLaw,
    pub pair_band: usize,
    pub delta2: f64,
    pub pairs: u64,
    pub trials: u64,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: None,
            boundary: None,
            j: 1.0,
            delta: 0.5,
            j2: 1.0,
            hz: 0.2,
            observable: Observable::MagnetizationX,
            site: 0,
            axis: Axis::X,
            state: InitialState::XPolarized,
            eigen_index: 0,
            t_max: 100.0,
            dt: 0.05,
            epsilon: None,
            truncation: 0.0,
            snapshots: vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0],
            bin: 0.05,
            gamma: 1.0,
            levels: 1000,
            block: 20,
            law: SpacingLaw::Poisson,
            resample_law: SpacingLaw::WignerDyson,
            pair_band: 3,
            delta2: 0.04,
            pairs: 20,
            trials: 100,
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n: Option<Vec<usize>>,
    pub epsilon: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub boundary: Option<Boundary>,
    pub gamma: Option<f64>,
    pub t_max: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, over: Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => toml::from_str(&std::fs::read_to_string(p)?).map_err(|e| Error::Config(e.to_string()))?,
            None => RunConfig::default(),
        };
        if over.n.is_some() {
            cfg.n = over.n;
        }
        if over.epsilon.is_some() {
            cfg.epsilon = over.epsilon;
        }
        if over.boundary.is_some() {
            cfg.boundary = over.boundary;
        }
        cfg.seed = over.seed.unwrap_or(cfg.seed);
        cfg.out = over.out.unwrap_or(cfg.out);
        cfg.gamma = over.gamma.unwrap_or(cfg.gamma);
        cfg.t_max = over.t_max.unwrap_or(cfg.t_max);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if let Some(ns) = &self.n {
            if ns.is_empty() {
                return bad("n is empty".into());
            }
            if let Some(n) = ns.iter().find(|&&n| !(2..=14).contains(&n)) {
                return bad(format!("n = {n} outside 2..=14"));
            }
        }
        for (name, v) in [("J", self.j), ("delta", self.delta), ("j2", self.j2), ("hz", self.hz)] {
            if !v.is_finite() {
                return bad(format!("{name} is not finite"));
            }
        }
        if !(self.dt > 0.0 && self.t_max > 0.0) {
            return bad(format!("need dt > 0 and t_max > 0 (dt = {}, t_max = {})", self.dt, self.t_max));
        }
        if let Some(eps) = &self.epsilon {
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) {
                return bad("epsilon values must be positive".into());
            }
        }
        if !(self.truncation >= 0.0) || !(self.bin > 0.0) || !(self.gamma > 0.0) {
            return bad("truncation must be >= 0, bin and gamma > 0".into());
        }
        if self.trials == 0 || self.pairs == 0 {
            return bad("trials and pairs must be positive".into());
        }
        Ok(())
    }

    pub fn sizes(&self, default: &[usize]) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn size(&self, default: usize) -> usize {
        self.n.as_ref().map_or(default, |v| v[0])
    }

    pub fn epsilons(&self, default: &[f64]) -> Vec<f64> {
        self.epsilon.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn boundaries(&self) -> Vec<Boundary> {
        self.boundary.map_or(vec![Boundary::Open, Boundary::Periodic], |b| vec![b])
    }

    pub fn chain(&self, n_sites: usize, boundary: Boundary) -> HamiltonianSpec {
        HamiltonianSpec { n_sites, j: self.j, delta: self.delta, j2: self.j2, hz: self.hz, boundary }
    }
}
