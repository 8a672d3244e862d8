//! Eigenvalue analysis of the reduced weak-confinement matrix at successive
//! orders in η: marginal rotations at orders 0 and 1, uniform damping once
//! the second-order elements enter.

use crate::params::PhysParams;
use crate::rate_eqs::ReducedWeakSystem;
use crate::timeseries::TimeSeries;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("eigenvalue solver failed to converge within {max_iter} iterations")]
    ConvergenceFailure { max_iter: usize },
    #[error("truncation order must be 0, 1 or 2, got {0}")]
    BadOrder(u8),
}

/// Damping classification of the reduced spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StabilityClass {
    /// Largest real part within ±tol of zero: oscillations persist.
    Marginal,
    /// All real parts negative: every tilde variable decays.
    Damped,
    /// Some real part positive beyond tol.
    Unstable,
}

/// Spectrum of the (possibly order-truncated) reduced matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub order_eta: u8,
    /// Eigenvalues sorted by (Re, Im).
    pub eigenvalues: Vec<(f64, f64)>,
    pub classification: StabilityClass,
    /// Distance of each closed-form eigenvalue to its nearest numeric one.
    pub closed_form_residuals: Vec<f64>,
    /// Largest eigen-residual ‖Mv − λv‖₂ over the five pairs.
    pub max_eigen_residual: f64,
    pub max_real_part: f64,
    /// Marginality tolerance actually used (1e-12 ν).
    pub tol: f64,
}

/// α₁₁⁽²⁾ = −16η²νΔΓΩ²/μ⁴, the uniform second-order damping element.
pub fn alpha11_2(p: &PhysParams) -> f64 {
    let mu2 = p.mu_squared();
    -16.0 * p.eta * p.eta * p.nu * p.delta * p.gamma * p.omega * p.omega / (mu2 * mu2)
}

/// Closed-form eigenvalues of the truncated reduced matrix.
/// Exact at every order because the k₇/k₈ pair closes on itself, leaving M
/// block-triangular.
pub fn closed_form_eigenvalues(p: &PhysParams, order_eta: u8) -> Result<Vec<C64>, StabilityError> {
    let nu = p.nu;
    match order_eta {
        0 | 1 => Ok(vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -nu),
            C64::new(0.0, nu),
            C64::new(0.0, -2.0 * nu),
            C64::new(0.0, 2.0 * nu),
        ]),
        2 => {
            let a = alpha11_2(p);
            let mu2 = p.mu_squared();
            let a14 = 8.0 * p.eta * p.eta * p.nu * p.delta * p.gamma * p.omega * p.omega / (mu2 * mu2);
            let a41 = 4.0 * a14;
            let w23 = (4.0 * nu * nu - a * a).sqrt();
            let w45 = (4.0 * nu * nu - a14 * a41).sqrt();
            Ok(vec![
                C64::new(a, 0.0),
                C64::new(0.5 * a, -0.5 * w23),
                C64::new(0.5 * a, 0.5 * w23),
                C64::new(a, -w45),
                C64::new(a, w45),
            ])
        }
        other => Err(StabilityError::BadOrder(other)),
    }
}

const EIGEN_MAX_ITER: usize = 200;

/// Eigen-spectrum of the reduced matrix truncated at the given η order, with
/// residual verification and damping classification.
pub fn spectrum(sys: &ReducedWeakSystem, order_eta: u8) -> Result<SpectrumReport, StabilityError> {
    if order_eta > 2 {
        return Err(StabilityError::BadOrder(order_eta));
    }
    let truncated = sys.truncate_order(order_eta);
    let m = &truncated.m;
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(StabilityError::ConvergenceFailure { max_iter: EIGEN_MAX_ITER })?;
    let mut eig: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());

    let max_eigen_residual = eig.iter().map(|l| eigen_residual(m, *l)).fold(0.0, f64::max);

    let closed = closed_form_eigenvalues(&sys.params, order_eta)?;
    let closed_form_residuals = closed
        .iter()
        .map(|c| eig.iter().map(|e| (e - c).norm()).fold(f64::INFINITY, f64::min))
        .collect();

    let max_real_part = eig.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * sys.params.nu;
    let classification = if max_real_part > tol {
        StabilityClass::Unstable
    } else if max_real_part >= -tol {
        StabilityClass::Marginal
    } else {
        StabilityClass::Damped
    };
    Ok(SpectrumReport {
        order_eta,
        eigenvalues: eig.iter().map(|l| (l.re, l.im)).collect(),
        classification,
        closed_form_residuals,
        max_eigen_residual,
        max_real_part,
        tol,
    })
}

/// ‖Mv − λv‖₂ for the eigenvector recovered by two inverse-iteration steps.
fn eigen_residual(m: &DMatrix<f64>, lambda: C64) -> f64 {
    let n = m.nrows();
    let mc = m.map(|v| C64::new(v, 0.0));
    let shift = lambda + C64::new(m.amax() * 1e-13 + f64::MIN_POSITIVE, 0.0);
    let shifted = &mc - DMatrix::<C64>::identity(n, n) * shift;
    let lu = shifted.lu();
    let mut v = DVector::<C64>::from_element(n, C64::new(1.0, 0.3));
    v /= C64::new(v.norm(), 0.0);
    for _ in 0..2 {
        if let Some(next) = lu.solve(&v) {
            let norm = next.norm();
            if norm.is_finite() && norm > 0.0 {
                v = next / C64::new(norm, 0.0);
            }
        }
    }
    (&mc * &v - &v * lambda).norm()
}

/// Conservation report of an order-0 reduced trajectory: ñ₂ and both
/// coherence radii stay constant while the phases advance at ν and 2ν.
#[derive(Debug, Clone, Serialize)]
pub struct RotationReport {
    pub n2_drift: f64,
    pub radius7_drift: f64,
    pub radius9_drift: f64,
    /// |phase rate| of (k7, k8); None when the radius is numerically zero.
    pub rate7: Option<f64>,
    /// |phase rate| of (k9, k10).
    pub rate9: Option<f64>,
    pub pass: bool,
}

const DRIFT_TOL: f64 = 1e-8;
const RATE_TOL: f64 = 1e-3;

/// Verifies the η = 0 rotation structure on a reduced trajectory.
pub fn rotation_check(ts: &TimeSeries) -> RotationReport {
    assert_eq!(ts.labels.len(), 5, "rotation_check expects a reduced trajectory");
    let nu = ts.params.nu;
    let col = |j: usize| ts.states.iter().map(move |s| s[j]);

    let rel_drift = |vals: Vec<f64>| -> f64 {
        let first = vals[0];
        let scale = first.abs().max(1e-30);
        vals.iter().map(|v| (v - first).abs()).fold(0.0, f64::max) / scale
    };
    let n2_drift = rel_drift(col(0).collect());
    let r7: Vec<f64> = ts.states.iter().map(|s| s[1] * s[1] + s[2] * s[2]).collect();
    let r9: Vec<f64> = ts.states.iter().map(|s| s[3] * s[3] + s[4] * s[4]).collect();
    let zero7 = r7[0] < 1e-24;
    let zero9 = r9[0] < 1e-24;
    let radius7_drift = if zero7 { r7.iter().fold(0.0f64, |m, v| m.max(*v)) } else { rel_drift(r7) };
    let radius9_drift = if zero9 { r9.iter().fold(0.0f64, |m, v| m.max(*v)) } else { rel_drift(r9) };

    let rate7 = if zero7 { None } else { Some(phase_rate(&ts.times, col(1).collect(), col(2).collect())) };
    let rate9 = if zero9 { None } else { Some(phase_rate(&ts.times, col(3).collect(), col(4).collect())) };

    let mut pass = n2_drift <= DRIFT_TOL && radius7_drift <= DRIFT_TOL && radius9_drift <= DRIFT_TOL;
    if let Some(r) = rate7 {
        pass &= (r / nu - 1.0).abs() <= RATE_TOL;
    }
    if let Some(r) = rate9 {
        pass &= (r / (2.0 * nu) - 1.0).abs() <= RATE_TOL;
    }
    RotationReport { n2_drift, radius7_drift, radius9_drift, rate7, rate9, pass }
}

/// Least-squares slope of the unwrapped phase atan2(y, x) over time.
fn phase_rate(times: &[f64], x: Vec<f64>, y: Vec<f64>) -> f64 {
    let mut phases = Vec::with_capacity(times.len());
    let mut prev = y[0].atan2(x[0]);
    let mut acc = prev;
    phases.push(acc);
    for i in 1..times.len() {
        let raw = y[i].atan2(x[i]);
        let mut d = raw - prev;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        acc += d;
        prev = raw;
        phases.push(acc);
    }
    linear_slope(times, &phases).abs()
}

fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Least-squares decay rate of log |values| (used for envelope fits).
pub fn fit_decay_rate(times: &[f64], values: &[f64]) -> f64 {
    let pts: (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(_, v)| v.abs() > 0.0)
        .map(|(t, v)| (*t, v.abs().ln()))
        .unzip();
    -linear_slope(&pts.0, &pts.1)
}
