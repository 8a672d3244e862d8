//! Command-line front end: configured runs, stationary-state reports,
//! parameter scans, master-equation comparisons and figure presets.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<trapcool::params::ParamError> for CliError {
    fn from(e: trapcool::params::ParamError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<trapcool::rate_eqs::RateEqError> for CliError {
    fn from(e: trapcool::rate_eqs::RateEqError) -> Self {
        match e {
            trapcool::rate_eqs::RateEqError::Param(p) => CliError::Config(p.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<trapcool::analytic::AnalyticError> for CliError {
    fn from(e: trapcool::analytic::AnalyticError) -> Self {
        match e {
            trapcool::analytic::AnalyticError::Param(p) => CliError::Config(p.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<trapcool::lindblad::OracleError> for CliError {
    fn from(e: trapcool::lindblad::OracleError) -> Self {
        match e {
            trapcool::lindblad::OracleError::Param(p) => CliError::Config(p.to_string()),
            trapcool::lindblad::OracleError::CutoffTooLow(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

/// Physical and run parameters; every flag mirrors a configuration key.
#[derive(Debug, clap::Args)]
struct KeyFlags {
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    nu: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    omega: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    d3: Option<f64>,
    #[arg(long, global = true)]
    unit: Option<String>,
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true)]
    t_end: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    sampler: Option<String>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    init: Option<String>,
    #[arg(long, global = true)]
    m0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta_re: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta_im: Option<f64>,
    #[arg(long, global = true)]
    eta_order: Option<u8>,
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    #[arg(long, global = true)]
    quad_order: Option<usize>,
    #[arg(long, global = true)]
    leak_tol: Option<f64>,
    #[arg(long, global = true)]
    quantity: Option<String>,
    #[arg(long, global = true)]
    omega_min: Option<f64>,
    #[arg(long, global = true)]
    omega_max: Option<f64>,
    #[arg(long, global = true)]
    omega_points: Option<usize>,
    #[arg(long, global = true)]
    omega_spacing: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    #[arg(long, global = true)]
    delta_points: Option<usize>,
    #[arg(long, global = true)]
    delta_spacing: Option<String>,
}

#[derive(Parser, Debug)]
#[command(name = "trapcool", version, about = "Sideband-cooling simulator for a single trapped two-level particle")]
struct Cli {
    /// Key-value configuration file applied before the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(flatten)]
    keys: KeyFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one of the models (full23, reduced5, strong1, oracle).
    Evolve,
    /// Stationary phonon number three ways with pairwise differences.
    Steady,
    /// Dense log10 grid of m_ss or gamma_c over (omega, delta).
    Scan,
    /// Master equation vs the 23-equation model, deviation report.
    OracleCompare,
    /// Reduced-matrix spectra at eta orders 0, 1, 2.
    Stability,
    /// Preset runs (1, 2a-2c, 3a-3c, 4, 5a-5c, 6, 7).
    Figure {
        #[arg(long)]
        id: String,
    },
}

fn apply_flags(cfg: &mut RunConfig, k: &KeyFlags) -> Result<(), CliError> {
    macro_rules! put {
        ($field:ident, $key:literal) => {
            if let Some(v) = &k.$field {
                cfg.set($key, &v.to_string())?;
            }
        };
    }
    put!(eta, "eta");
    put!(nu, "nu");
    put!(gamma, "gamma");
    put!(omega, "omega");
    put!(delta, "delta");
    put!(d3, "d3");
    put!(unit, "unit");
    put!(model, "model");
    put!(t_end, "t_end");
    put!(dt, "dt");
    put!(sampler, "sampler");
    put!(rel_tol, "rel_tol");
    put!(samples, "samples");
    put!(init, "init");
    put!(m0, "m0");
    put!(beta_re, "beta_re");
    put!(beta_im, "beta_im");
    put!(eta_order, "eta_order");
    put!(cutoff, "cutoff");
    put!(quad_order, "quad_order");
    put!(leak_tol, "leak_tol");
    put!(quantity, "quantity");
    put!(omega_min, "omega_min");
    put!(omega_max, "omega_max");
    put!(omega_points, "omega_points");
    put!(omega_spacing, "omega_spacing");
    put!(delta_min, "delta_min");
    put!(delta_max, "delta_max");
    put!(delta_points, "delta_points");
    put!(delta_spacing, "delta_spacing");
    Ok(())
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    apply_flags(&mut cfg, &cli.keys)?;
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    match &cli.command {
        Command::Evolve => commands::cmd_evolve(&cfg),
        Command::Steady => commands::cmd_steady(&cfg),
        Command::Scan => commands::cmd_scan(&cfg),
        Command::OracleCompare => commands::cmd_oracle_compare(&cfg),
        Command::Stability => commands::cmd_stability(&cfg),
        Command::Figure { id } => commands::cmd_figure(&cfg, id),
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                CliError::Config(_) => 2,
                CliError::Numerical(_) => 3,
            };
            std::process::exit(code);
        }
    }
}
