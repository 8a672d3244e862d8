//! Closed-form stationary phonon numbers, cooling rates and their regime
//! limits, plus the exponential mean-phonon trajectory they imply.
//!
//! The full expressions ([`m_ss_full`], [`gamma_c_full`]) hold in zeroth
//! resp. second order in η without further approximation; the weak / strong /
//! sideband variants are the printed regime reductions. Negative stationary
//! phonon numbers are returned as-is: they flag heating, not an error.

use crate::params::{ParamError, PhysParams, RegimeTag};
use serde::Serialize;
use thiserror::Error;

/// Absolute distance (in the declared unit rate) from Δ = ±ν at which the
/// strong-confinement pair is considered to sit on the sideband pole.
pub const SIDEBAND_POLE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("division by zero: {what}")]
    DivisionByZero { what: &'static str },
    #[error("strong-confinement elimination has a pole at delta = ±nu (delta = {delta}, nu = {nu}); use gamma_c_full near the sideband")]
    PoleAtSideband { delta: f64, nu: f64 },
    #[error("no closed-form optimal detuning in the {regime} regime; grid-search m_ss_full instead")]
    NoClosedForm { regime: RegimeTag },
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// The three frequency polynomials ξ₁⁴, ξ₂⁶, ξ₃⁶ entering m_ss and γ_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiFrequencies {
    pub xi1_4: f64,
    pub xi2_6: f64,
    pub xi3_6: f64,
}

/// Evaluates ξ₁⁴, ξ₂⁶, ξ₃⁶ as polynomials in Ω² (Horner ordering in Ω²).
pub fn xi_frequencies(p: &PhysParams) -> XiFrequencies {
    let g2 = p.gamma * p.gamma;
    let n = p.nu;
    let n2 = n * n;
    let d = p.delta;
    let d2 = d * d;
    let w = p.omega * p.omega;

    let xi1_4 = (4.0 * d2 + g2) * (g2 + n2) + w * (2.0 * (g2 + 3.0 * n2));

    let c0 = (g2 + n2)
        * ((g2 + 4.0 * d2) * (g2 + 4.0 * d2) + 8.0 * (g2 - 4.0 * d2) * n2 + 16.0 * n2 * n2);
    let c1 = 4.0 * ((g2 + 2.0 * n2) * (g2 + 4.0 * d2) - 8.0 * n2 * n2);
    let c2 = 4.0 * (g2 + 4.0 * n2);
    let xi2_6 = c0 + w * (c1 + w * c2);

    let e0 = 2.0 * (2.0 * d + n) * (g2 + n2) * (g2 + 4.0 * (d - n) * (d - n)) * n;
    let e1 = 3.0 * g2 * g2 - (4.0 * d2 - 8.0 * d * n - 7.0 * n2) * g2
        - 4.0 * (d2 - 6.0 * d * n + 5.0 * n2) * n2;
    let xi3_6 = e0 + w * e1;

    XiFrequencies { xi1_4, xi2_6, xi3_6 }
}

/// Stationary mean phonon number from the full stationary solve,
/// m_ss = [ξ₂⁶ θ − 2ξ₃⁶] / (16 ν Δ ξ₁⁴). Exact in zeroth order in η.
pub fn m_ss_full(p: &PhysParams) -> Result<f64, AnalyticError> {
    if p.delta == 0.0 {
        return Err(AnalyticError::DivisionByZero { what: "m_ss_full with delta = 0" });
    }
    if p.nu == 0.0 {
        return Err(AnalyticError::DivisionByZero { what: "m_ss_full with nu = 0" });
    }
    let th = p.theta()?;
    let xi = xi_frequencies(p);
    Ok((xi.xi2_6 * th - 2.0 * xi.xi3_6) / (16.0 * p.nu * p.delta * xi.xi1_4))
}

/// The Ω → 0 reduction of [`m_ss_full`]; independent of Ω.
pub fn m_ss_small_omega(p: &PhysParams) -> Result<f64, AnalyticError> {
    if p.delta == 0.0 {
        return Err(AnalyticError::DivisionByZero { what: "m_ss_small_omega with delta = 0" });
    }
    if p.nu == 0.0 {
        return Err(AnalyticError::DivisionByZero { what: "m_ss_small_omega with nu = 0" });
    }
    let th = p.theta()?;
    let g2 = p.gamma * p.gamma;
    let d = p.delta;
    let d2 = d * d;
    let n = p.nu;
    let n2 = n * n;
    let lw = g2 + 4.0 * d2;
    let num = g2 * g2 + 8.0 * g2 * (d2 + n2) + 16.0 * (d2 - n2) * (d2 - n2);
    Ok(num * th / (16.0 * n * d * lw)
        - (2.0 * d + n) * (g2 + 4.0 * (d - n) * (d - n)) / (4.0 * d * lw))
}

/// Weak-confinement stationary phonon number,
/// m_ss = μ²θ/(16Δν) − (3Γ² − 4Δ²)Ω²/(8μ²νΔ).
pub fn m_ss_weak(p: &PhysParams) -> Result<f64, AnalyticError> {
    if p.delta == 0.0 || p.nu == 0.0 {
        return Err(AnalyticError::DivisionByZero { what: "m_ss_weak with delta = 0 or nu = 0" });
    }
    let th = p.theta()?;
    let mu2 = p.mu_squared();
    let w = p.omega * p.omega;
    Ok(mu2 * th / (16.0 * p.delta * p.nu)
        - (3.0 * p.gamma * p.gamma - 4.0 * p.delta * p.delta) * w
            / (8.0 * mu2 * p.nu * p.delta))
}

/// Weak-confinement optimum (Δ = Γ/2, Ω → 0): m_ss = θΓ/4ν.
pub fn m_ss_weak_optimal(p: &PhysParams) -> Result<f64, AnalyticError> {
    if p.nu == 0.0 {
        return Err(AnalyticError::DivisionByZero { what: "m_ss_weak_optimal with nu = 0" });
    }
    Ok(p.theta()? * p.gamma / (4.0 * p.nu))
}

/// Strong-confinement stationary phonon number,
/// m_ss = (Δ−ν)²/(4νΔ³)·[(Δ+ν)²θ − (2Δ+ν)ν]. Vanishes at Δ = ν.
pub fn m_ss_strong(p: &PhysParams) -> Result<f64, AnalyticError> {
    if p.delta == 0.0 || p.nu == 0.0 {
        return Err(AnalyticError::DivisionByZero { what: "m_ss_strong with delta = 0 or nu = 0" });
    }
    let th = p.theta()?;
    let d = p.delta;
    let n = p.nu;
    let dm = d - n;
    let dp = d + n;
    Ok(dm * dm / (4.0 * n * d * d * d) * (dp * dp * th - (2.0 * d + n) * n))
}

/// Sideband limit (Δ = ν, Γ ≪ ν): m_ss = (Γ²/16ν²)(4θ − 3).
pub fn m_ss_sideband(p: &PhysParams) -> Result<f64, AnalyticError> {
    if p.nu == 0.0 {
        return Err(AnalyticError::DivisionByZero { what: "m_ss_sideband with nu = 0" });
    }
    let th = p.theta()?;
    let r = p.gamma / p.nu;
    Ok(r * r / 16.0 * (4.0 * th - 3.0))
}

/// Effective cooling rate γ_c = (16η²νΔΓΩ²/μ²)·(ξ₁⁴/ξ₂⁶), second order in η.
/// Odd in Δ: positive for red detuning (cooling), negative for blue (heating).
pub fn gamma_c_full(p: &PhysParams) -> f64 {
    let xi = xi_frequencies(p);
    16.0 * p.eta * p.eta * p.nu * p.delta * p.gamma * p.omega * p.omega / p.mu_squared()
        * (xi.xi1_4 / xi.xi2_6)
}

/// Small-Ω cooling rate as the explicit sideband difference,
/// η²ΓΩ²/[Γ²+4(Δ−ν)²] − η²ΓΩ²/[Γ²+4(Δ+ν)²].
pub fn gamma_c_small_omega(p: &PhysParams) -> f64 {
    let a = p.eta * p.eta * p.gamma * p.omega * p.omega;
    let g2 = p.gamma * p.gamma;
    let dm = p.delta - p.nu;
    let dp = p.delta + p.nu;
    a / (g2 + 4.0 * dm * dm) - a / (g2 + 4.0 * dp * dp)
}

/// Strong-confinement pair (γ_c, c) of the scalar cooling equation
/// ṅ₂ = −γ_c n₂ + c. Fails on the sideband poles Δ = ±ν.
pub fn gamma_c_strong_pair(p: &PhysParams) -> Result<(f64, f64), AnalyticError> {
    if p.delta == 0.0 {
        return Err(AnalyticError::DivisionByZero { what: "gamma_c_strong_pair with delta = 0" });
    }
    let dm = p.delta - p.nu;
    let dp = p.delta + p.nu;
    if dm.abs() < SIDEBAND_POLE_TOL || dp.abs() < SIDEBAND_POLE_TOL {
        return Err(AnalyticError::PoleAtSideband { delta: p.delta, nu: p.nu });
    }
    let th = p.theta()?;
    let a = p.eta * p.eta * p.gamma * p.omega * p.omega;
    let gc = a / (4.0 * dm * dm) - a / (4.0 * dp * dp);
    let c = a / (4.0 * p.delta * p.delta) * (th + p.delta * p.delta / (dp * dp) - 1.0);
    Ok((gc, c))
}

/// m(t) = [m(0) − m_ss] e^{−γ_c t} + m_ss.
pub fn mean_phonon_trajectory(m0: f64, m_ss: f64, gamma_c: f64, t: f64) -> f64 {
    (m0 - m_ss) * (-gamma_c * t).exp() + m_ss
}

/// Stationary phonon number and cooling rate bundled per parameter point.
///
/// Built from the full formulas, `c` is the implied drive m_ss·γ_c; built
/// from the strong pair, m_ss is c/γ_c. A negative `m_ss` flags heating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoolingSummary {
    pub m_ss: f64,
    pub gamma_c: f64,
    pub c: f64,
    pub heating: bool,
}

impl CoolingSummary {
    /// From the full zeroth-order-η formulas.
    pub fn from_full(p: &PhysParams) -> Result<Self, AnalyticError> {
        let m_ss = m_ss_full(p)?;
        let gamma_c = gamma_c_full(p);
        Ok(Self { m_ss, gamma_c, c: m_ss * gamma_c, heating: m_ss < 0.0 || gamma_c < 0.0 })
    }

    /// From the strong-confinement pair; m_ss = c/γ_c.
    pub fn from_strong_pair(p: &PhysParams) -> Result<Self, AnalyticError> {
        let (gamma_c, c) = gamma_c_strong_pair(p)?;
        if gamma_c == 0.0 {
            return Err(AnalyticError::DivisionByZero { what: "m_ss = c/gamma_c with gamma_c = 0" });
        }
        let m_ss = c / gamma_c;
        Ok(Self { m_ss, gamma_c, c, heating: m_ss < 0.0 || gamma_c < 0.0 })
    }
}

/// Closed-form optimal detuning: Γ/2 (weak) or ν (strong). The intermediate
/// regime has no closed form; use [`optimal_detuning_scan`].
pub fn optimal_detuning(regime: RegimeTag, p: &PhysParams) -> Result<f64, AnalyticError> {
    match regime {
        RegimeTag::Weak => Ok(0.5 * p.gamma),
        RegimeTag::Strong => Ok(p.nu),
        RegimeTag::Intermediate => Err(AnalyticError::NoClosedForm { regime }),
    }
}

/// Grid-search minimiser of [`m_ss_full`] over Δ ∈ [lo, hi]; returns
/// (Δ*, m_ss(Δ*)). Intended fallback for the intermediate regime.
pub fn optimal_detuning_scan(
    p: &PhysParams,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<(f64, f64), AnalyticError> {
    assert!(points >= 2 && hi > lo);
    let mut best = (lo, f64::INFINITY);
    for i in 0..points {
        let d = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        if d == 0.0 {
            continue;
        }
        let q = PhysParams { delta: d, ..*p };
        let m = m_ss_full(&q)?;
        if m >= 0.0 && m < best.1 {
            best = (d, m);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PhysParams;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p_gamma(eta: f64, nu: f64, omega: f64, delta: f64, d3: f64) -> PhysParams {
        PhysParams::in_gamma_units(eta, nu, omega, delta, d3)
    }

    #[test]
    fn xi_direct_substitutions() {
        // nu = 0 degenerate corner exercises only the polynomial, not m_ss.
        let p = PhysParams { nu: 0.0, ..p_gamma(0.0, 1.0, 0.0, 0.5, 0.0) };
        assert_relative_eq!(xi_frequencies(&p).xi1_4, 2.0);
        let p = p_gamma(0.0, 1.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(xi_frequencies(&p).xi2_6, 50.0);
    }

    #[test]
    fn xi_match_exact_rational_fixture() {
        // (Omega, Delta, nu, Gamma) = (1/100, 1/2, 1/10, 1); exact values
        // 1010103/500000, 1263259913/312500000, 72931/200000.
        let p = p_gamma(0.0, 0.1, 0.01, 0.5, 0.0);
        let xi = xi_frequencies(&p);
        assert_relative_eq!(xi.xi1_4, 2.0202059999999999, max_relative = 1e-15);
        assert_relative_eq!(xi.xi2_6, 4.0424317215999999, max_relative = 1e-15);
        assert_relative_eq!(xi.xi3_6, 0.36465500000000001, max_relative = 1e-15);
    }

    #[test]
    fn m_ss_full_matches_small_omega_in_limit() {
        let p = p_gamma(0.0, 0.07, 1e-8, 0.4, 0.3);
        let full = m_ss_full(&p).unwrap();
        let small = m_ss_small_omega(&p).unwrap();
        assert_relative_eq!(full, small, max_relative = 1e-9);
    }

    #[test]
    fn m_ss_full_weak_point_value() {
        // Exact rational value 77022701242591/25250025750000; about 13% below
        // the idealised theta*Gamma/(4 nu) = 3.5 because the recoil term of
        // m_ss enters at first order in nu/Gamma.
        let p = p_gamma(0.0, 0.1, 1e-3, 0.5, 0.0);
        let m = m_ss_full(&p).unwrap();
        assert_relative_eq!(m, 3.0504008988026872, max_relative = 1e-13);
        assert!((m / 3.5 - 1.0).abs() < 1.5 * 0.1);
        assert!(m_ss_full(&p_gamma(0.0, 0.1, 1e-3, 0.0, 0.0)).is_err());
    }

    #[test]
    fn m_ss_full_strong_point_value() {
        let p = PhysParams::in_nu_units(0.0, 0.01, 1e-3, 1.0, 0.0);
        let m = m_ss_full(&p).unwrap();
        assert_relative_eq!(m, 1.6249806604848729e-5, max_relative = 1e-13);
        let target = 0.01f64.powi(2) / 16.0 * (4.0 * 1.4 - 3.0);
        assert_relative_eq!(m, target, max_relative = 2e-5);
    }

    #[test]
    fn m_ss_small_omega_leading_weak_term() {
        let p = p_gamma(0.0, 1e-4, 0.0, 0.5, 0.0);
        let m = m_ss_small_omega(&p).unwrap();
        let lead = 1.4 / (4.0 * 1e-4);
        assert!((m - lead).abs() < 1.0); // theta*Gamma/4nu dominates; O(1) recoil offset
        // (Delta - nu)^2 prefactor of the Gamma -> 0 value vanishes at Delta = nu.
        let p = PhysParams::in_nu_units(0.0, 1e-9, 0.0, 1.0, 0.0);
        let m = m_ss_small_omega(&p).unwrap();
        let sideband = m_ss_sideband(&p).unwrap();
        assert!((m - sideband).abs() / sideband < 1e-3);
    }

    #[test]
    fn m_ss_weak_reductions() {
        let p = p_gamma(0.0, 0.1, 1e-9, 0.5, 0.0);
        assert_relative_eq!(m_ss_weak(&p).unwrap(), 3.5, max_relative = 1e-12);
        assert_relative_eq!(m_ss_weak_optimal(&p).unwrap(), 3.5);
        let p = p_gamma(0.0, 0.1, 1e-9, 0.5, 1.0);
        assert_relative_eq!(m_ss_weak(&p).unwrap(), 3.0, max_relative = 1e-12);
        let p = p_gamma(0.0, 0.01, 0.1, 0.5, 0.0);
        assert_relative_eq!(m_ss_weak(&p).unwrap(), 35.102475247524751, max_relative = 1e-13);
    }

    #[test]
    fn m_ss_strong_values() {
        let p = PhysParams::in_nu_units(0.0, 0.01, 0.0, 1.0, 0.0);
        assert_eq!(m_ss_strong(&p).unwrap(), 0.0); // (Delta - nu)^2 = 0
        assert_relative_eq!(m_ss_sideband(&p).unwrap(), 1.625e-5, max_relative = 1e-14);
        // Gamma -> 0 limit of the small-Omega formula lands on m_ss_strong.
        let p = PhysParams::in_nu_units(0.0, 1e-6, 0.0, 2.0, 0.0);
        let strong = m_ss_strong(&p).unwrap();
        assert_relative_eq!(strong, 0.2375, max_relative = 1e-14); // (1/32)(9*1.4 - 5)
        assert_relative_eq!(m_ss_small_omega(&p).unwrap(), strong, max_relative = 1e-6);
    }

    #[test]
    fn gamma_c_small_omega_limit_agreement() {
        let p = p_gamma(0.05, 0.3, 1e-6, 0.7, 0.0);
        assert_relative_eq!(gamma_c_full(&p), gamma_c_small_omega(&p), max_relative = 1e-6);
    }

    #[test]
    fn gamma_c_weak_and_strong_limits() {
        // Delta = Gamma/2, weak driving: gamma_c -> 2 eta^2 nu Omega^2 / Gamma^2.
        let p = p_gamma(0.1, 0.01, 1e-5, 0.5, 0.0);
        let target = 2.0 * 0.01 * 0.01 * 1e-10;
        assert_relative_eq!(gamma_c_full(&p), target, max_relative = 1e-6);
        // Delta = nu, strong confinement: gamma_c -> eta^2 Omega^2 / Gamma.
        let p = PhysParams::in_nu_units(0.01, 1e-3, 1e-3, 1.0, 0.0);
        let target = 1e-4 * 1e-6 / 1e-3;
        assert_relative_eq!(gamma_c_full(&p), target, max_relative = 1e-4);
    }

    #[test]
    fn strong_pair_matches_m_ss_strong_identically() {
        let p = PhysParams::in_nu_units(0.01, 0.01, 0.01, 1.5, 0.0);
        let (gc, c) = gamma_c_strong_pair(&p).unwrap();
        assert!(gc > 0.0 && c > 0.0);
        // c/gamma_c is algebraically identical to m_ss_strong.
        assert_relative_eq!(c / gc, m_ss_strong(&p).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(c / gc, 19.0 / 216.0, max_relative = 1e-12);
        let s = CoolingSummary::from_strong_pair(&p).unwrap();
        assert_relative_eq!(s.m_ss * s.gamma_c, s.c, max_relative = 1e-12);
    }

    #[test]
    fn strong_pair_pole_and_asymptotics() {
        let p = PhysParams::in_nu_units(0.01, 0.01, 0.01, 1.0, 0.0);
        assert!(matches!(gamma_c_strong_pair(&p), Err(AnalyticError::PoleAtSideband { .. })));
        let p = PhysParams::in_nu_units(0.01, 0.01, 0.01, 1e9, 0.0);
        let (gc, c) = gamma_c_strong_pair(&p).unwrap();
        assert!(gc.abs() < 1e-30 && c.abs() < 1e-22);
        // The bracket theta - 1 + Delta^2/(Delta+nu)^2 is bounded below by
        // theta - 1 >= 0.2, so c cannot change sign for physical d3.
        for &d3 in &[0.0, 0.5, 1.0] {
            for &delta in &[0.2, 0.7, 1.3, 5.0] {
                let p = PhysParams::in_nu_units(0.01, 0.01, 0.01, delta, d3);
                let (_, c) = gamma_c_strong_pair(&p).unwrap();
                let floor = 0.2 * 0.01f64.powi(2) * 0.01 * 0.01f64.powi(2)
                    / (4.0 * delta * delta);
                assert!(c >= floor, "c = {c} at delta = {delta}, d3 = {d3}");
            }
        }
    }

    #[test]
    fn trajectory_fixed_points() {
        assert_relative_eq!(mean_phonon_trajectory(2.0, 0.5, 1.0, 0.0), 2.0);
        assert_relative_eq!(mean_phonon_trajectory(0.5, 0.5, 1.0, 7.3), 0.5);
        let t_half = std::f64::consts::LN_2;
        assert_relative_eq!(mean_phonon_trajectory(1.0, 0.0, 1.0, t_half), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn optimal_detuning_by_regime() {
        let p = p_gamma(0.1, 0.01, 1e-3, 0.5, 0.0);
        assert_relative_eq!(optimal_detuning(RegimeTag::Weak, &p).unwrap(), 0.5);
        let q = PhysParams::in_nu_units(0.1, 0.01, 1e-3, 1.0, 0.0);
        assert_relative_eq!(optimal_detuning(RegimeTag::Strong, &q).unwrap(), 1.0);
        assert!(matches!(
            optimal_detuning(RegimeTag::Intermediate, &p),
            Err(AnalyticError::NoClosedForm { .. })
        ));
        // Intermediate fallback: at Gamma = nu the grid minimum sits near nu.
        let inter = PhysParams::in_gamma_units(0.1, 1.0, 1e-3, 0.5, 0.0);
        let (dstar, _) = optimal_detuning_scan(&inter, 0.05, 3.0, 3000).unwrap();
        assert!((dstar - 1.0).abs() < 0.25, "dstar = {dstar}");
    }

    #[test]
    fn strong_minimum_sits_exactly_at_the_sideband() {
        let base = PhysParams::in_nu_units(0.0, 0.01, 1e-3, 1.0, 0.3);
        let mut best = (0.0, f64::INFINITY);
        let n = 6000;
        for i in 1..=n {
            let d = 3.0 * i as f64 / n as f64;
            let m = m_ss_strong(&PhysParams { delta: d, ..base }).unwrap();
            if m < best.1 {
                best = (d, m);
            }
        }
        assert_eq!(best.0, 1.0, "grid contains delta = nu and the zero there is exact");
        assert_eq!(best.1, 0.0);
    }

    #[test]
    fn weak_minimum_sits_at_half_gamma() {
        let p = p_gamma(0.0, 0.01, 1e-3, 0.5, 0.0);
        let mut best = (0.0, f64::INFINITY);
        let n = 8000;
        for i in 1..=n {
            let d = 2.0 * i as f64 / n as f64;
            let m = m_ss_small_omega(&PhysParams { delta: d, ..p }).unwrap();
            if m < best.1 {
                best = (d, m);
            }
        }
        assert!((best.0 - 0.5).abs() / 0.5 < 0.02, "argmin = {}", best.0);
    }

    proptest! {
        #[test]
        fn gamma_c_full_is_odd_in_delta(
            eta in 1e-3f64..0.3, nu in 1e-2f64..1e2, gamma in 1e-2f64..1e2,
            omega in 1e-3f64..1e1, delta in 1e-2f64..1e2,
        ) {
            let p = PhysParams { eta, nu, gamma, omega, delta, d3: 0.0, unit: crate::params::RateUnit::Gamma };
            let q = PhysParams { delta: -delta, ..p };
            let a = gamma_c_full(&p);
            let b = gamma_c_full(&q);
            prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(b.abs()));
        }

        #[test]
        fn limit_coherence_small_omega(
            nu in 1e-2f64..1e2, gamma in 1e-2f64..1e2, dmag in 1e-2f64..1e2, d3 in 0.0f64..=1.0,
        ) {
            let p = PhysParams { eta: 0.0, nu, gamma, omega: 1e-8, delta: dmag, d3, unit: crate::params::RateUnit::Gamma };
            let full = m_ss_full(&p).unwrap();
            let small = m_ss_small_omega(&p).unwrap();
            prop_assert!((full - small).abs() <= 1e-6 * small.abs().max(1e-300));
        }
    }
}
