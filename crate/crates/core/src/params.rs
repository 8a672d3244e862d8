//! Physical parameter set of the laser-cooled trapped particle, its
//! validation, regime classification and the geometric dipole factor θ.
//!
//! All rates (ν, Γ, Ω, Δ) are stored as dimensionless multiples of a declared
//! reference rate; conversion between the Γ = 1 and ν = 1 conventions is
//! explicit via [`PhysParams::to_unit`], never implicit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which rate plays the role of the unit in the stored numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateUnit {
    /// Rates are multiples of the spontaneous decay rate Γ.
    Gamma,
    /// Rates are multiples of the phonon frequency ν.
    Nu,
}

impl std::fmt::Display for RateUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateUnit::Gamma => write!(f, "gamma"),
            RateUnit::Nu => write!(f, "nu"),
        }
    }
}

impl std::str::FromStr for RateUnit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gamma" | "Γ" => Ok(RateUnit::Gamma),
            "nu" | "ν" => Ok(RateUnit::Nu),
            other => Err(format!("unknown rate unit `{other}` (expected `gamma` or `nu`)")),
        }
    }
}

/// Dimensionless parameter set consumed by every formula in this crate.
///
/// `delta > 0` is red detuning in the sign convention used throughout; the
/// dipole component `d3` is the magnitude of the z-component of the
/// normalised dipole vector, along the cooling laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Lamb-Dicke parameter η ≥ 0.
    pub eta: f64,
    /// Phonon frequency ν > 0.
    pub nu: f64,
    /// Spontaneous decay rate Γ > 0.
    pub gamma: f64,
    /// Laser Rabi frequency Ω ≥ 0.
    pub omega: f64,
    /// Laser detuning Δ (signed).
    pub delta: f64,
    /// |d₃| ∈ [0, 1], dipole component along the laser axis.
    pub d3: f64,
    /// Declared reference rate of the stored numbers.
    pub unit: RateUnit,
}

/// Non-fatal validation findings.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamWarning {
    /// η > 0.3: the η-expansions behind every reduced model assume η ≪ 1.
    LambDickeLarge { eta: f64 },
}

impl std::fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamWarning::LambDickeLarge { eta } => write!(
                f,
                "eta = {eta} exceeds 0.3; expansions assume eta << 1, results are extrapolations"
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("rate `{name}` must be strictly positive, got {value}")]
    NonPositiveRate { name: &'static str, value: f64 },
    #[error("`{name}` = {value} outside [{lo}, {hi}]")]
    OutOfRange { name: &'static str, value: f64, lo: f64, hi: f64 },
}

/// Geometric dipole factor θ ≡ (7 − |d₃|²)/5, monotone decreasing on [0, 1].
pub fn theta(d3: f64) -> Result<f64, ParamError> {
    if !(0.0..=1.0).contains(&d3) || d3.is_nan() {
        return Err(ParamError::OutOfRange { name: "d3", value: d3, lo: 0.0, hi: 1.0 });
    }
    Ok((7.0 - d3 * d3) / 5.0)
}

/// The angular factor α of the older literature, reconstructed from
/// θ = 1 + α − |d₃|²/5. Identically 2/5 for dipole emission.
pub fn dipole_alpha(d3: f64) -> Result<f64, ParamError> {
    Ok(theta(d3)? - 1.0 + d3 * d3 / 5.0)
}

/// Regime classification tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTag {
    Weak,
    Strong,
    Intermediate,
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeTag::Weak => write!(f, "weak"),
            RegimeTag::Strong => write!(f, "strong"),
            RegimeTag::Intermediate => write!(f, "intermediate"),
        }
    }
}

/// Classification result together with the diagnostic ratios it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    /// ν/Γ.
    pub nu_over_gamma: f64,
    /// max(Ω, Γ) / min(ν, |Δ|).
    pub drive_over_confinement: f64,
}

/// Classification thresholds. There is no sharp physical boundary between
/// the regimes; the defaults reflect where the reduced models stay accurate
/// (drives up to about 0.3 of the reference rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// Weak when ν/Γ ≤ this.
    pub weak_nu_over_gamma: f64,
    /// Strong needs Γ/ν ≤ this ...
    pub strong_gamma_over_nu: f64,
    /// ... and Ω/ν ≤ this.
    pub strong_omega_over_nu: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self { weak_nu_over_gamma: 0.1, strong_gamma_over_nu: 0.1, strong_omega_over_nu: 0.3 }
    }
}

impl PhysParams {
    /// Convenient constructor in the Γ = 1 convention.
    pub fn in_gamma_units(eta: f64, nu: f64, omega: f64, delta: f64, d3: f64) -> Self {
        Self { eta, nu, gamma: 1.0, omega, delta, d3, unit: RateUnit::Gamma }
    }

    /// Convenient constructor in the ν = 1 convention.
    pub fn in_nu_units(eta: f64, gamma: f64, omega: f64, delta: f64, d3: f64) -> Self {
        Self { eta, nu: 1.0, gamma, omega, delta, d3, unit: RateUnit::Nu }
    }

    /// Checks all invariants. Returns the list of non-fatal warnings on
    /// success; hard violations are errors.
    pub fn validate(&self) -> Result<Vec<ParamWarning>, ParamError> {
        if !(self.gamma > 0.0) {
            return Err(ParamError::NonPositiveRate { name: "gamma", value: self.gamma });
        }
        if !(self.nu > 0.0) {
            return Err(ParamError::NonPositiveRate { name: "nu", value: self.nu });
        }
        if self.eta < 0.0 || self.eta.is_nan() {
            return Err(ParamError::OutOfRange {
                name: "eta",
                value: self.eta,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        if self.omega < 0.0 || self.omega.is_nan() {
            return Err(ParamError::OutOfRange {
                name: "omega",
                value: self.omega,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        if self.delta.is_nan() {
            return Err(ParamError::OutOfRange {
                name: "delta",
                value: self.delta,
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            });
        }
        theta(self.d3)?;
        let mut warnings = Vec::new();
        if self.eta > 0.3 {
            warnings.push(ParamWarning::LambDickeLarge { eta: self.eta });
        }
        Ok(warnings)
    }

    /// θ for these parameters.
    pub fn theta(&self) -> Result<f64, ParamError> {
        theta(self.d3)
    }

    /// μ² ≡ 2Ω² + Γ² + 4Δ², the power-broadened linewidth square.
    pub fn mu_squared(&self) -> f64 {
        2.0 * self.omega * self.omega + self.gamma * self.gamma + 4.0 * self.delta * self.delta
    }

    /// Re-expresses all rates as multiples of the requested reference rate.
    /// η and d₃ are dimensionless and unchanged.
    pub fn to_unit(&self, unit: RateUnit) -> Result<PhysParams, ParamError> {
        if self.unit == unit {
            return Ok(*self);
        }
        let scale = match unit {
            RateUnit::Gamma => self.gamma,
            RateUnit::Nu => self.nu,
        };
        if !(scale > 0.0) {
            return Err(ParamError::NonPositiveRate {
                name: if unit == RateUnit::Gamma { "gamma" } else { "nu" },
                value: scale,
            });
        }
        Ok(PhysParams {
            eta: self.eta,
            nu: self.nu / scale,
            gamma: self.gamma / scale,
            omega: self.omega / scale,
            delta: self.delta / scale,
            d3: self.d3,
            unit,
        })
    }

    /// Deterministic regime tag from the confinement ratios.
    pub fn classify_regime(&self, thresholds: &RegimeThresholds) -> Regime {
        let nu_over_gamma = self.nu / self.gamma;
        let confinement = self.nu.min(self.delta.abs());
        let drive_over_confinement = if confinement > 0.0 {
            self.omega.max(self.gamma) / confinement
        } else {
            f64::INFINITY
        };
        let tag = if nu_over_gamma <= thresholds.weak_nu_over_gamma {
            RegimeTag::Weak
        } else if self.gamma / self.nu <= thresholds.strong_gamma_over_nu
            && self.omega / self.nu <= thresholds.strong_omega_over_nu
        {
            RegimeTag::Strong
        } else {
            RegimeTag::Intermediate
        };
        Regime { tag, nu_over_gamma, drive_over_confinement }
    }

    /// Largest rate scale, used for default integrator steps.
    pub fn max_rate(&self) -> f64 {
        self.gamma.max(self.nu).max(self.delta.abs()).max(self.omega)
    }
}
