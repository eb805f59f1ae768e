use std::path::PathBuf;

use eqtime::analytic_models::{
    exponential_band_levels, f_curve_csv, gap_density_csv, lorentzian_dispersion, lorentzian_f, lorentzian_teq,
    lorentzian_time_dispersion, reimann_f,
};
use eqtime::coarse_grain::{
    calibrate_c1, cg_dispersion, cg_dispersion_quadrature, cg_frequency_signal, cg_time_signal, frequency_csv,
    inverse_ft_consistency, result2_ensemble_check, synthetic_gaps, CoarseGrainConfig, SmoothAnsatz,
};
use eqtime::dephasing_signal::{
    equilibration_time, gap_dispersion, infinite_time_fluctuation, phase_cloud, phase_cloud_csv, time_signal,
    GapAmplitudeSet,
};
use eqtime::export::{write_json, Csv};
use eqtime::grid::UniformGrid;
use eqtime::lattice_model::{
    build_local_observable, build_magnetization_x, max_local_term_norm, Boundary, OperatorMatrix,
};
use eqtime::level_stats::{
    block_resample, distinguishability_check, max_displacement, spacing_histogram_csv, spacing_ks,
    within_block_spacings, PairAmplitudes, SyntheticSpectrum,
};
use eqtime::observable_band::{band_profile, banded_bound, banded_bound_check, to_energy_basis, ProfileWeights, ALPHA_CHAIN};
use eqtime::quench::{magnetization_timescale, Quench};
use eqtime::Result;
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{InitialState, Observable, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output directory plus the provenance header stamped on every file.
pub struct Sink {
    cfg: RunConfig,
    command: &'static str,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(cfg: &RunConfig, command: &'static str) -> Result<Self> {
        std::fs::create_dir_all(&cfg.out)?;
        Ok(Self { cfg: cfg.clone(), command, written: Vec::new() })
    }

    fn config_json(&self) -> Value {
        serde_json::to_value(&self.cfg).expect("config serializes")
    }

    pub fn csv(&mut self, name: &str, mut csv: Csv) -> Result<()> {
        csv.prepend_comment(&format!("eqtime {VERSION} {}\nconfig {}", self.command, self.config_json()));
        let path = self.cfg.out.join(format!("{name}.csv"));
        csv.write(&path)?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<()> {
        let path = self.cfg.out.join(format!("{name}.json"));
        let doc = json!({
            "eqtime": VERSION,
            "command": self.command,
            "config": self.config_json(),
            "report": report,
        });
        write_json(&path, &doc)?;
        self.written.push(path);
        Ok(())
    }

    pub fn summary(&self, extra: Value) -> Value {
        json!({
            "command": self.command,
            "files": self.written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "summary": extra,
        })
    }
}

fn observable(cfg: &RunConfig, n: usize) -> Result<OperatorMatrix> {
    match cfg.observable {
        Observable::MagnetizationX => build_magnetization_x(n),
        Observable::Site => build_local_observable(cfg.site, cfg.axis, n),
    }
}

/// Quench plus the gap set of the configured observable (every supported
/// observable has range 1).
fn quench_gaps(cfg: &RunConfig, n: usize, boundary: Boundary) -> Result<(Quench, GapAmplitudeSet)> {
    let spec = cfg.chain(n, boundary);
    let q = match cfg.state {
        InitialState::XPolarized => Quench::x_polarized(&spec)?,
        InitialState::Eigenstate => Quench::eigenstate(&spec, cfg.eigen_index)?,
    };
    let gas = q.gaps(&observable(cfg, n)?, 1.0)?;
    let gas = if cfg.truncation > 0.0 { gas.truncated(cfg.truncation) } else { gas };
    Ok((q, gas))
}

fn tag(n: usize, b: Boundary) -> String {
    format!("n{n}_{b}")
}

pub fn table1(cfg: &RunConfig) -> Result<Value> {
    let mut sink = Sink::new(cfg, "table1")?;
    let mut rows = Vec::new();
    for b in cfg.boundaries() {
        for n in cfg.sizes(&[2, 4, 6, 8, 10, 12]) {
            rows.push(magnetization_timescale(&cfg.chain(n, b))?);
        }
    }
    let mut csv = Csv::new(&["n", "boundary", "d_eff", "n_gaps", "sigma_g", "t_eq"]);
    for r in &rows {
        let cells = [r.n_sites.to_string(), r.boundary.clone(), r.d_eff.to_string(), r.n_gaps.to_string()];
        let nums = [r.sigma_g.to_string(), r.t_eq.to_string()];
        csv.row_text(&[&cells[..], &nums[..]].concat());
    }
    sink.csv("table1", csv)?;
    sink.json("table1", &rows)?;
    Ok(sink.summary(serde_json::to_value(&rows)?))
}

pub fn signal(cfg: &RunConfig) -> Result<Value> {
    let mut sink = Sink::new(cfg, "signal")?;
    let n = cfg.size(10);
    let b = cfg.boundary.unwrap_or_default();
    let (q, gas) = quench_gaps(cfg, n, b)?;
    let axis = UniformGrid::spanning(0.0, cfg.t_max, cfg.dt)?;
    let g = time_signal(&gas, axis);
    let epsilons = cfg.epsilon.clone().unwrap_or_default();
    let smoothed: Vec<_> = epsilons.iter().map(|&e| cg_time_signal(&g, e)).collect();
    let mut header = vec!["t".to_string(), "abs_g_sq".to_string()];
    header.extend(epsilons.iter().map(|e| format!("abs_g_sq_eps{e}")));
    let mut csv = Csv::new(&header);
    for (k, t) in axis.points().enumerate() {
        let mut row = vec![t, g.values[k].norm_sqr()];
        row.extend(smoothed.iter().map(|s| s.values[k].norm_sqr()));
        csv.row(&row);
    }
    let fluct = infinite_time_fluctuation(&gas);
    let abs = g.abs_sqr();
    // Largest late-time value, where recurrences show up.
    let (t_peak, peak) = axis
        .points()
        .zip(&abs)
        .filter(|(t, _)| *t >= 40.0)
        .fold((f64::NAN, 0.0f64), |acc, (t, &v)| if v > acc.1 { (t, v) } else { acc });
    let sigma_g = gap_dispersion(&gas).ok();
    let report = json!({
        "n_sites": n,
        "boundary": b.to_string(),
        "d_eff": q.d_eff,
        "n_gaps": gas.len(),
        "infinite_time_fluctuation": fluct,
        "late_peak_time": if peak > 0.0 { Some(t_peak) } else { None },
        "late_peak_value": peak,
        "sigma_g": sigma_g,
        "t_eq": sigma_g.map(|s| equilibration_time(s)).transpose()?,
    });
    let name = format!("signal_{}", tag(n, b));
    sink.csv(&name, csv)?;
    sink.json(&name, &report)?;
    Ok(sink.summary(report))
}

pub fn phase_cloud_cmd(cfg: &RunConfig) -> Result<Value> {
    let mut sink = Sink::new(cfg, "phase-cloud")?;
    let n = cfg.size(10);
    let b = cfg.boundary.unwrap_or_default();
    let (_, gas) = quench_gaps(cfg, n, b)?;
    for &t in &cfg.snapshots {
        let pts = phase_cloud(&gas, t);
        let sum: C64 = pts.iter().sum();
        let mut csv = phase_cloud_csv(&pts);
        csv.push_comment(&format!("t = {t}, g(t) = {} {:+}i", sum.re, sum.im));
        sink.csv(&format!("phase_cloud_{}_t{t}", tag(n, b)), csv)?;
    }
    Ok(sink.summary(json!({ "n_gaps": gas.len(), "snapshots": cfg.snapshots })))
}

/// Above this many gaps the closed-form dispersion uses the `|v| >= 1e-4`
/// subset; the grid quadrature always uses the full set.
const CLOSED_FORM_LIMIT: usize = 50_000;

pub fn coarse_grain(cfg: &RunConfig) -> Result<Value> {
    let mut sink = Sink::new(cfg, "coarse-grain")?;
    let n = cfg.size(12);
    let b = cfg.boundary.unwrap_or_default();
    let (_, gas) = quench_gaps(cfg, n, b)?;
    let sigma_g = gap_dispersion(&gas)?;
    let mut reports = Vec::new();
    for eps in cfg.epsilons(&[0.4]) {
        let cgc = CoarseGrainConfig::for_gaps(&gas, eps, 0.0)?;
        let freq = cg_frequency_signal(&gas, &cgc)?;
        let (subset, threshold) =
            if gas.len() > CLOSED_FORM_LIMIT { (gas.truncated(1e-4), 1e-4) } else { (gas.clone(), 0.0) };
        let dw = cg_dispersion(&subset, eps)?;
        let t_axis = UniformGrid::spanning(0.0, 40.0, 0.5)?;
        let report = json!({
            "epsilon": eps,
            "sigma_g": sigma_g,
            "delta_omega_eps": dw,
            "closed_form_truncation": threshold,
            "delta_omega_eps_quadrature": cg_dispersion_quadrature(&freq),
            "relative_difference": (dw - sigma_g).abs() / sigma_g,
            "inverse_transform_max_error": inverse_ft_consistency(&gas, &cgc, t_axis)?,
        });
        sink.csv(&format!("coarse_grain_{}_eps{eps}", tag(n, b)), frequency_csv(&freq))?;
        reports.push(report);
    }
    sink.json(&format!("coarse_grain_{}", tag(n, b)), &reports)?;
    Ok(sink.summary(json!(reports)))
}

pub fn band(cfg: &RunConfig) -> Result<Value> {
    let mut sink = Sink::new(cfg, "band")?;
    let n = cfg.size(10);
    let b = cfg.boundary.unwrap_or_default();
    let spec = cfg.chain(n, b);
    let q = Quench::x_polarized(&spec)?;
    let a = build_local_observable(cfg.site, cfg.axis, n)?;
    let ebm = to_energy_basis(&a, &q.spectrum)?;
    let (mu, sigma) = q.populations.energy_moments(&q.spectrum);
    let profile = band_profile(&ebm, ProfileWeights::Gaussian { mu, sigma }, cfg.bin)?;
    let j = max_local_term_norm(&spec)?;
    // single-site spin operators have norm 1/2
    let check = banded_bound_check(&ebm, 0.5, j, ALPHA_CHAIN)?;
    let bound = |w: f64| banded_bound(w, 0.5, j, ALPHA_CHAIN).ok().map(|x| x * x);
    let name = format!("band_{}_site{}{:?}", tag(n, b), cfg.site, cfg.axis).to_lowercase();
    sink.csv(&name, profile.to_csv(Some(&bound)))?;
    let report = json!({
        "j": j,
        "alpha": ALPHA_CHAIN,
        "mu_e": mu,
        "sigma_e": sigma,
        "checked_pairs": check.checked_pairs,
        "max_ratio": check.max_ratio,
        "violations": check.violations.len(),
    });
    sink.json(&name, &json!({ "summary": report, "violations": check.violations }))?;
    Ok(sink.summary(report))
}

pub fn levelstats(cfg: &RunConfig) -> Result<Value> {
    let mut sink = Sink::new(cfg, "levelstats")?;
    let eps = cfg.epsilons(&[2.0])[0];
    let mut reports = Vec::new();
    for pair in 0..cfg.pairs {
        let seed = cfg.seed.wrapping_add(pair);
        let s1 = SyntheticSpectrum::generate(cfg.law, 1.0, cfg.levels, seed, 0.0)?;
        let s2 = block_resample(&s1, cfg.block, cfg.resample_law, seed)?;
        let amps = PairAmplitudes::banded_random(cfg.levels, cfg.pair_band, seed);
        let t_max = cfg.delta2.sqrt() / eps;
        let t_axis = UniformGrid::new(0.0, t_max / 100.0, 101)?;
        let d = distinguishability_check(&amps, &s1, &s2, eps, cfg.delta2, t_axis)?;
        if pair == 0 {
            sink.csv("levels_original", s1.to_csv())?;
            sink.csv("levels_resampled", s2.to_csv())?;
            sink.csv("spacings_original", spacing_histogram_csv(&s1.spacings(), 1.0, 0.1, 5.0))?;
            sink.csv("spacings_resampled", spacing_histogram_csv(&within_block_spacings(&s2, cfg.block), 1.0, 0.1, 5.0))?;
        }
        reports.push(json!({
            "seed": seed,
            "ks_original": spacing_ks(&s1.spacings(), cfg.law, 1.0),
            "ks_resampled_raw": spacing_ks(&s2.spacings(), cfg.resample_law, 1.0),
            "ks_resampled_within_block": spacing_ks(&within_block_spacings(&s2, cfg.block), cfg.resample_law, 1.0),
            "max_displacement": max_displacement(&s1, &s2),
            "distinguishability": d,
        }));
    }
    let violations: usize = reports.iter().map(|r| r["distinguishability"]["violations"].as_u64().unwrap_or(0) as usize).sum();
    sink.json("levelstats", &reports)?;
    Ok(sink.summary(json!({ "pairs": cfg.pairs, "epsilon": eps, "violations": violations })))
}

pub fn analytic(cfg: &RunConfig) -> Result<Value> {
    let mut sink = Sink::new(cfg, "analytic")?;
    let g = cfg.gamma;
    let t_eq = lorentzian_teq(g);
    let dw = lorentzian_dispersion(g)?;
    let dt = lorentzian_time_dispersion(g)?;
    let t_axis = UniformGrid::spanning(0.0, 20.0 / g, 0.01 / g)?;
    let mut f = f_curve_csv(g, t_axis);
    f.push_comment(&format!("t_eq = {t_eq}"));
    sink.csv(&format!("analytic_f_gamma{g}"), f)?;
    sink.csv(&format!("analytic_rho_gamma{g}"), gap_density_csv(g, UniformGrid::symmetric(10.0 * g, 0.01 * g)?))?;
    // sampled band of levels against the closed form
    let levels = exponential_band_levels(cfg.levels, g, 40.0 * g, cfg.seed);
    let coarse = UniformGrid::spanning(0.0, 10.0 / g, 0.05 / g)?;
    let sampled = reimann_f(&levels, coarse)?;
    let mut cmp = Csv::new(&["t", "f_sampled", "f_lorentzian"]);
    for (t, z) in coarse.points().zip(&sampled.values) {
        cmp.row(&[t, z.re, lorentzian_f(t, g)]);
    }
    sink.csv(&format!("analytic_sampled_gamma{g}"), cmp)?;
    let report = json!({
        "gamma": g,
        "delta_omega": dw,
        "t_eq": t_eq,
        "f_at_t_eq": lorentzian_f(t_eq, g),
        "delta_t": dt,
        "uncertainty_product": dt * dw,
    });
    sink.json(&format!("analytic_gamma{g}"), &report)?;
    Ok(sink.summary(report))
}

/// Smooth profile `0.01 (1 + 0.1 cos(w/2))` with flat noise `gamma0`.
pub fn near_constant_ansatz(gamma0: f64, seed: u64) -> SmoothAnsatz {
    SmoothAnsatz {
        v_smooth: Box::new(|w: f64| C64::new(0.01 * (1.0 + 0.1 * (0.5 * w).cos()), 0.0)),
        gamma: Box::new(move |_| gamma0),
        k: 5e-4,
        seed,
    }
}

pub fn result2_check(cfg: &RunConfig) -> Result<Value> {
    let mut sink = Sink::new(cfg, "result2-check")?;
    let gaps = synthetic_gaps(10_000, -5.0, 5.0, cfg.seed);
    let ansatz = near_constant_ansatz(0.01, cfg.seed);
    let mut reports = Vec::new();
    for eps in cfg.epsilons(&[0.05, 0.2]) {
        let c1 = calibrate_c1(&ansatz, &gaps, eps)?;
        for scale in [1.0, 0.5] {
            reports.push(result2_ensemble_check(&ansatz, &gaps, eps, cfg.trials, c1, scale)?);
        }
    }
    sink.json("result2_check", &reports)?;
    Ok(sink.summary(serde_json::to_value(&reports)?))
}
