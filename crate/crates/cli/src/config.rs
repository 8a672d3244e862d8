//! Flat key-value run configuration: file first, then CLI flags on top.
//!
//! Recognised keys (one `key = value` per line, `#` comments):
//! physical — eta, nu, gamma, omega, delta, d3, unit;
//! run — model, t_end, dt, sampler, rel_tol, samples, init, m0, beta_re,
//! beta_im, eta_order, cutoff, quad_order, leak_tol, out;
//! scan — quantity, omega_min, omega_max, omega_points, omega_spacing,
//! delta_min, delta_max, delta_points, delta_spacing.

use crate::CliError;
use std::path::{Path, PathBuf};
use trapcool::params::{PhysParams, RateUnit};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: PhysParams,
    pub out: PathBuf,
    pub model: String,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub sampler: String,
    pub rel_tol: f64,
    pub samples: usize,
    pub init: String,
    pub m0: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub eta_order: u8,
    pub cutoff: usize,
    pub quad_order: usize,
    pub leak_tol: f64,
    pub quantity: String,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub omega_spacing: String,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    pub delta_spacing: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: PhysParams::in_gamma_units(0.1, 0.01, 0.01, 0.5, 0.0),
            out: PathBuf::from("out"),
            model: "full23".into(),
            t_end: None,
            dt: None,
            sampler: "rk4".into(),
            rel_tol: 1e-8,
            samples: 201,
            init: "fock".into(),
            m0: 1.0,
            beta_re: 1.0,
            beta_im: 0.0,
            eta_order: 2,
            cutoff: 30,
            quad_order: 16,
            leak_tol: 1e-8,
            quantity: "m-ss".into(),
            omega_min: 1e-3,
            omega_max: 1.0,
            omega_points: 40,
            omega_spacing: "log".into(),
            delta_min: 1e-2,
            delta_max: 3.0,
            delta_points: 40,
            delta_spacing: "log".into(),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>().map_err(|e| CliError::Config(format!("key `{key}`: bad float `{v}`: {e}")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize, CliError> {
    v.parse::<usize>().map_err(|e| CliError::Config(format!("key `{key}`: bad integer `{v}`: {e}")))
}

impl RunConfig {
    /// Applies one key/value pair; unknown keys are errors naming the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "eta" => self.params.eta = parse_f64(key, value)?,
            "nu" => self.params.nu = parse_f64(key, value)?,
            "gamma" => self.params.gamma = parse_f64(key, value)?,
            "omega" => self.params.omega = parse_f64(key, value)?,
            "delta" => self.params.delta = parse_f64(key, value)?,
            "d3" => self.params.d3 = parse_f64(key, value)?,
            "unit" => {
                self.params.unit = value
                    .parse::<RateUnit>()
                    .map_err(|e| CliError::Config(format!("key `unit`: {e}")))?;
            }
            "out" => self.out = PathBuf::from(value),
            "model" => self.model = value.into(),
            "t_end" => self.t_end = Some(parse_f64(key, value)?),
            "dt" => self.dt = Some(parse_f64(key, value)?),
            "sampler" => self.sampler = value.into(),
            "rel_tol" => self.rel_tol = parse_f64(key, value)?,
            "samples" => self.samples = parse_usize(key, value)?,
            "init" => self.init = value.into(),
            "m0" => self.m0 = parse_f64(key, value)?,
            "beta_re" => self.beta_re = parse_f64(key, value)?,
            "beta_im" => self.beta_im = parse_f64(key, value)?,
            "eta_order" => self.eta_order = parse_usize(key, value)? as u8,
            "cutoff" => self.cutoff = parse_usize(key, value)?,
            "quad_order" => self.quad_order = parse_usize(key, value)?,
            "leak_tol" => self.leak_tol = parse_f64(key, value)?,
            "quantity" => self.quantity = value.into(),
            "omega_min" => self.omega_min = parse_f64(key, value)?,
            "omega_max" => self.omega_max = parse_f64(key, value)?,
            "omega_points" => self.omega_points = parse_usize(key, value)?,
            "omega_spacing" => self.omega_spacing = value.into(),
            "delta_min" => self.delta_min = parse_f64(key, value)?,
            "delta_max" => self.delta_max = parse_f64(key, value)?,
            "delta_points" => self.delta_points = parse_usize(key, value)?,
            "delta_spacing" => self.delta_spacing = value.into(),
            other => {
                return Err(CliError::Config(format!("unknown configuration key `{other}`")));
            }
        }
        Ok(())
    }

    /// Loads `key = value` lines from a file.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                CliError::Config(msg) => {
                    CliError::Config(format!("{}:{}: {msg}", path.display(), lineno + 1))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Validates physical parameters, printing any warnings to stderr.
    /// Parameter violations are configuration errors (exit code 2).
    pub fn validated_params(&self) -> Result<PhysParams, CliError> {
        let warnings = self
            .params
            .validate()
            .map_err(|e| CliError::Config(format!("invalid parameters: {e}")))?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        Ok(self.params)
    }
}
