//! Simulation and analysis of laser sideband cooling of a single trapped
//! two-level particle: the closed 23-equation expectation-value model, its
//! weak- and strong-confinement reductions, closed-form stationary phonon
//! numbers and cooling rates, and a truncated-Fock-space master-equation
//! solver that cross-validates all of them.

pub mod analytic;
pub mod linalg;
pub mod lindblad;
pub mod params;
pub mod presets;
pub mod rate_eqs;
pub mod stability;
pub mod timeseries;

pub use analytic::{gamma_c_full, m_ss_full, CoolingSummary};
pub use params::{PhysParams, RateUnit, Regime, RegimeTag, RegimeThresholds};
pub use rate_eqs::{assemble_generator, mean_phonon, LinearGenerator, RateState};
pub use timeseries::TimeSeries;
