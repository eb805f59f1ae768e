//! `eqtime`: runs the dephasing experiments on the XXZ chain and writes
//! plot-ready CSV curves and JSON reports.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eqtime::lattice_model::Boundary;
use serde_json::json;

use crate::config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "eqtime", version, about = "Equilibration time scales from dephasing in spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gap dispersion and T_eq of M^x for a list of chain sizes.
    Table1(Common),
    /// |g(t)|^2 with optional coarse-grained overlays.
    Signal(Common),
    /// Snapshots of the terms v e^{iGt} in the complex plane.
    PhaseCloud(Common),
    /// Coarse-grained frequency signal and its dispersion.
    CoarseGrain(Common),
    /// Band profile of a site-local observable and the locality bound.
    Band(Common),
    /// Synthetic spectra, block resampling and the distinguishability check.
    Levelstats(Common),
    /// Lorentzian example in closed form.
    Analytic(Common),
    /// Monte-Carlo check of the smooth-plus-noise amplitude model.
    Result2Check(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Chain sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Coarse-graining widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    boundary: Option<Boundary>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
}

impl Common {
    fn resolve(self) -> eqtime::Result<RunConfig> {
        let over = Overrides {
            n: self.n,
            epsilon: self.epsilon,
            seed: self.seed,
            out: self.out,
            boundary: self.boundary,
            gamma: self.gamma,
            t_max: self.t_max,
        };
        RunConfig::load(self.config.as_deref(), over)
    }
}

fn run(command: Command) -> eqtime::Result<serde_json::Value> {
    match command {
        Command::Table1(c) => commands::table1(&c.resolve()?),
        Command::Signal(c) => commands::signal(&c.resolve()?),
        Command::PhaseCloud(c) => commands::phase_cloud_cmd(&c.resolve()?),
        Command::CoarseGrain(c) => commands::coarse_grain(&c.resolve()?),
        Command::Band(c) => commands::band(&c.resolve()?),
        Command::Levelstats(c) => commands::levelstats(&c.resolve()?),
        Command::Analytic(c) => commands::analytic(&c.resolve()?),
        Command::Result2Check(c) => commands::result2_check(&c.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": "usage", "message": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(summary) => {
            // A closed pipe on stdout is not an error of the run.
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
