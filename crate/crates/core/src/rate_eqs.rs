//! The closed set of 23 linear cooling equations, its reduced 5-variable
//! weak-confinement form and the scalar strong-confinement equation, with
//! time integration and stationary solves.
//!
//! The generator merges the zeroth- and first-order-in-η equation blocks
//! additively into one linear system ṡ = A s + b; the drive vector b has a
//! single entry, +Ω in the k₂ row. State ordering is fixed (see
//! [`STATE_NAMES`]) and is part of the file-format contract.

use crate::analytic::{self, AnalyticError};
use crate::params::{ParamError, PhysParams};
use crate::timeseries::{IntegratorInfo, TimeSeries};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub const STATE_DIM: usize = 23;

/// Component names in storage order.
pub const STATE_NAMES: [&str; STATE_DIM] = [
    "n1", "n2", "n4", "k1", "k2", "k7", "k8", "k9", "k10", "k11", "k12", "k13", "k14", "k15",
    "k16", "k17", "k18", "k19", "k20", "k21", "k22", "k23", "k24",
];

/// Index constants into [`RateState`].
pub mod idx {
    pub const N1: usize = 0;
    pub const N2: usize = 1;
    pub const N4: usize = 2;
    pub const K1: usize = 3;
    pub const K2: usize = 4;
    pub const K7: usize = 5;
    pub const K8: usize = 6;
    pub const K9: usize = 7;
    pub const K10: usize = 8;
    pub const K11: usize = 9;
    pub const K12: usize = 10;
    pub const K13: usize = 11;
    pub const K14: usize = 12;
    pub const K15: usize = 13;
    pub const K16: usize = 14;
    pub const K17: usize = 15;
    pub const K18: usize = 16;
    pub const K19: usize = 17;
    pub const K20: usize = 18;
    pub const K21: usize = 19;
    pub const K22: usize = 20;
    pub const K23: usize = 21;
    pub const K24: usize = 22;
}

/// Component order of the reduced weak-confinement system.
pub const REDUCED_NAMES: [&str; 5] = ["n2", "k7", "k8", "k9", "k10"];

/// The 23 real expectation values, in the fixed storage order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateState(pub [f64; STATE_DIM]);

impl RateState {
    pub fn zeros() -> Self {
        Self([0.0; STATE_DIM])
    }

    pub fn n1(&self) -> f64 {
        self.0[idx::N1]
    }
    pub fn n2(&self) -> f64 {
        self.0[idx::N2]
    }
    pub fn k11(&self) -> f64 {
        self.0[idx::K11]
    }
    pub fn k12(&self) -> f64 {
        self.0[idx::K12]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for RateState {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Error)]
pub enum RateEqError {
    #[error("integration became unstable at t = {t}: max |component| = {max_abs:.3e} exceeds 1e12 (reduce dt; stiffness ratio gamma/nu may be large)")]
    StepUnstable { t: f64, max_abs: f64 },
    #[error("generator is singular (pivot {pivot:.3e} below threshold); with omega = 0 no drive fixes the phonon sector")]
    SingularGenerator { pivot: f64 },
    #[error("stationary solve residual {residual:.3e} exceeds bound {bound:.3e}")]
    ResidualTooLarge { residual: f64, bound: f64 },
    #[error("sample times must be non-negative and strictly increasing")]
    BadSampleTimes,
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// The assembled linear system ṡ = A s + b.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGenerator {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub params: PhysParams,
    /// Highest power of η retained per equation block (the printed system
    /// carries the η² heating terms in the n₂/k₉ rows).
    pub order_eta: u8,
}

/// Builds the full 23×23 generator by merging the printed equation blocks.
pub fn assemble_generator(p: &PhysParams) -> Result<LinearGenerator, ParamError> {
    use idx::*;
    let th = p.theta()?;
    let (eta, nu, g, om, de) = (p.eta, p.nu, p.gamma, p.omega, p.delta);
    let mut a = DMatrix::<f64>::zeros(STATE_DIM, STATE_DIM);
    let mut b = DVector::<f64>::zeros(STATE_DIM);
    let mut s = |r: usize, c: usize, v: f64| a[(r, c)] += v;

    // x-operator block, zeroth order plus the eta*nu recoil drives.
    s(N1, K2, 0.5 * om);
    s(N1, N1, -g);
    s(K1, K15, -eta * nu);
    s(K1, K2, -de);
    s(K1, K1, -0.5 * g);
    s(K2, N1, -2.0 * om);
    s(K2, K16, -eta * nu);
    s(K2, K1, de);
    s(K2, K2, -0.5 * g);
    b[K2] = om;

    // y-operator block: the five slow equations.
    s(N2, K11, eta * nu);
    s(N2, K12, -eta * g);
    s(N2, N1, eta * eta * th * g);
    s(K7, N1, 2.0 * eta * nu);
    s(K7, K8, -nu);
    s(K8, K7, nu);
    s(K8, N1, -2.0 * eta * g);
    s(K9, K10, -2.0 * nu);
    s(K9, K11, 2.0 * eta * nu);
    s(K9, K12, 2.0 * eta * g);
    s(K9, N1, -2.0 * eta * eta * th * g);
    s(K10, K9, 2.0 * nu);
    s(K10, K12, 2.0 * eta * nu);
    s(K10, K11, -2.0 * eta * g);

    // Mixed first-moment coherences.
    s(K11, K18, 0.5 * om);
    s(K11, K12, -nu);
    s(K11, N1, 2.0 * eta * nu);
    s(K11, K11, -g);
    s(K12, K15, -0.5 * om);
    s(K12, K11, nu);
    s(K12, K12, -g);
    s(K15, K8, -om);
    s(K15, K12, 2.0 * om);
    s(K15, K16, -de);
    s(K15, K18, -nu);
    s(K15, K1, eta * nu);
    s(K15, K13, 2.0 * eta * nu);
    s(K15, K21, -eta * nu);
    s(K15, K15, -0.5 * g);
    s(K16, K15, de);
    s(K16, K17, nu);
    s(K16, K2, eta * nu);
    s(K16, K14, 2.0 * eta * nu);
    s(K16, K22, -eta * nu);
    s(K16, K16, -0.5 * g);
    s(K17, K18, -de);
    s(K17, K16, -nu);
    s(K17, K1, eta * nu);
    s(K17, K19, -eta * nu);
    s(K17, K17, -0.5 * g);
    s(K18, K7, om);
    s(K18, K11, -2.0 * om);
    s(K18, K17, de);
    s(K18, K15, nu);
    s(K18, K2, eta * nu);
    s(K18, K20, -eta * nu);
    s(K18, K18, -0.5 * g);

    // Phonon-number-weighted coherences.
    s(N4, K14, 0.5 * om);
    s(N4, N4, -g);
    s(K13, K14, -de);
    s(K13, K13, -0.5 * g);
    s(K14, N2, om);
    s(K14, N4, -2.0 * om);
    s(K14, K13, de);
    s(K14, K14, -0.5 * g);

    // Squared-phonon coherences.
    s(K19, K10, -om);
    s(K19, K24, 2.0 * om);
    s(K19, K20, -de);
    s(K19, K22, -2.0 * nu);
    s(K19, K19, -0.5 * g);
    s(K20, K19, de);
    s(K20, K21, 2.0 * nu);
    s(K20, K20, -0.5 * g);
    s(K21, K22, -de);
    s(K21, K20, -2.0 * nu);
    s(K21, K21, -0.5 * g);
    s(K22, K9, om);
    s(K22, K23, -2.0 * om);
    s(K22, K21, de);
    s(K22, K19, 2.0 * nu);
    s(K22, K22, -0.5 * g);
    s(K23, K22, 0.5 * om);
    s(K23, K24, -2.0 * nu);
    s(K23, K23, -g);
    s(K24, K19, -0.5 * om);
    s(K24, K23, 2.0 * nu);
    s(K24, K24, -g);

    Ok(LinearGenerator { a, b, params: *p, order_eta: 2 })
}

/// m = n₂ − η k₁₂ + η² n₁ (exact operator identity).
pub fn mean_phonon(s: &RateState, eta: f64) -> f64 {
    s.0[idx::N2] - eta * s.0[idx::K12] + eta * eta * s.0[idx::N1]
}

/// Factorised initial conditions with the atom in its ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Fock (or any diagonal) phonon state with mean phonon number m₀.
    GroundAtomFock { m0: f64 },
    /// Coherent phonon state with amplitude β.
    GroundAtomCoherent { beta_re: f64, beta_im: f64 },
    /// Thermal phonon state with mean m₀ (same first moments as Fock here).
    GroundAtomThermal { m0: f64 },
}

/// Expectation-value vector of a factorised `atom ground ⊗ phonon` state.
pub fn initial_state(kind: InitialState) -> Result<RateState, RateEqError> {
    let mut s = RateState::zeros();
    match kind {
        InitialState::GroundAtomFock { m0 } | InitialState::GroundAtomThermal { m0 } => {
            if m0 < 0.0 || m0.is_nan() {
                return Err(ParamError::OutOfRange { name: "m0", value: m0, lo: 0.0, hi: f64::INFINITY }.into());
            }
            s.0[idx::N2] = m0;
        }
        InitialState::GroundAtomCoherent { beta_re, beta_im } => {
            s.0[idx::N2] = beta_re * beta_re + beta_im * beta_im;
            s.0[idx::K7] = 2.0 * beta_re;
            s.0[idx::K8] = -2.0 * beta_im;
            // beta^2 moments of y^2.
            s.0[idx::K9] = 2.0 * (beta_re * beta_re - beta_im * beta_im);
            s.0[idx::K10] = -2.0 * (2.0 * beta_re * beta_im);
        }
    }
    Ok(s)
}

/// Explicit stepping method for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical RK4 with fixed step (default dt = 0.01 / max rate).
    FixedRk4 { dt: f64 },
    /// Step-doubling adaptive RK4 with per-step relative tolerance.
    Adaptive { rel_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub method: Method,
    /// Samples are thinned so at most this many survive.
    pub max_samples: usize,
}

impl IntegrateOptions {
    pub fn rk4_default(p: &PhysParams) -> Self {
        Self { method: Method::FixedRk4 { dt: default_dt(p) }, max_samples: 2001 }
    }

    pub fn adaptive_default() -> Self {
        Self { method: Method::Adaptive { rel_tol: 1e-8 }, max_samples: 2001 }
    }
}

/// Default fixed step 0.01 / max(Γ, ν, |Δ|, Ω).
pub fn default_dt(p: &PhysParams) -> f64 {
    0.01 / p.max_rate()
}

const BLOWUP_LIMIT: f64 = 1e12;

fn rhs(a: &DMatrix<f64>, b: &DVector<f64>, s: &DVector<f64>, out: &mut DVector<f64>) {
    out.copy_from(b);
    out.gemv(1.0, a, s, 1.0);
}

fn rk4_step(a: &DMatrix<f64>, b: &DVector<f64>, s: &DVector<f64>, dt: f64, scratch: &mut [DVector<f64>; 5]) -> DVector<f64> {
    let [k1, k2, k3, k4, tmp] = scratch;
    rhs(a, b, s, k1);
    *tmp = s + &*k1 * (dt / 2.0);
    rhs(a, b, tmp, k2);
    *tmp = s + &*k2 * (dt / 2.0);
    rhs(a, b, tmp, k3);
    *tmp = s + &*k3 * dt;
    rhs(a, b, tmp, k4);
    s + (&*k1 + &*k2 * 2.0 + &*k3 * 2.0 + &*k4) * (dt / 6.0)
}

fn generic_integrate(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    labels: &[&str],
    params: &PhysParams,
    eta_for_m: f64,
    s0: DVector<f64>,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<TimeSeries, RateEqError> {
    assert!(t_end > 0.0, "t_end must be positive");
    let mut scratch = [
        DVector::zeros(a.nrows()),
        DVector::zeros(a.nrows()),
        DVector::zeros(a.nrows()),
        DVector::zeros(a.nrows()),
        DVector::zeros(a.nrows()),
    ];
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut steps: u64 = 0;
    let n2_like = mean_fn(labels, eta_for_m);
    let (method_name, dt_info, rel_tol) = match opts.method {
        Method::FixedRk4 { dt } => {
            assert!(dt > 0.0);
            let n_steps = (t_end / dt).ceil().max(1.0) as u64;
            let dt = t_end / n_steps as f64;
            let stride = (n_steps / opts.max_samples.max(2) as u64).max(1);
            let mut s = s0;
            times.push(0.0);
            states.push(s.iter().copied().collect::<Vec<_>>());
            for i in 0..n_steps {
                s = rk4_step(a, b, &s, dt, &mut scratch);
                steps += 1;
                let t = (i + 1) as f64 * dt;
                let max_abs = s.amax();
                if !max_abs.is_finite() || max_abs > BLOWUP_LIMIT {
                    return Err(RateEqError::StepUnstable { t, max_abs });
                }
                if ((i + 1) % stride == 0 || i + 1 == n_steps) && *times.last().unwrap() < t {
                    times.push(t);
                    states.push(s.iter().copied().collect());
                }
            }
            ("rk4".to_string(), dt, None)
        }
        Method::Adaptive { rel_tol } => {
            let mut dt = default_dt(params);
            let mut t = 0.0;
            let mut s = s0;
            times.push(0.0);
            states.push(s.iter().copied().collect::<Vec<_>>());
            while t < t_end {
                let dt_try = dt.min(t_end - t);
                let full = rk4_step(a, b, &s, dt_try, &mut scratch);
                let half = rk4_step(a, b, &s, dt_try / 2.0, &mut scratch);
                let two_half = rk4_step(a, b, &half, dt_try / 2.0, &mut scratch);
                let scale = two_half.amax().max(1e-300);
                let mut err = (&full - &two_half).amax() / 15.0 / scale;
                if !err.is_finite() {
                    err = f64::MAX;
                }
                if err <= rel_tol {
                    t += dt_try;
                    s = two_half;
                    steps += 1;
                    let max_abs = s.amax();
                    if !max_abs.is_finite() || max_abs > BLOWUP_LIMIT {
                        return Err(RateEqError::StepUnstable { t, max_abs });
                    }
                    times.push(t);
                    states.push(s.iter().copied().collect());
                }
                let grow = if err > 0.0 { 0.9 * (rel_tol / err).powf(0.2) } else { 5.0 };
                dt *= grow.clamp(0.2, 5.0);
            }
            // Thin to max_samples keeping first and last.
            if times.len() > opts.max_samples {
                let keep_stride = (times.len() - 1).div_ceil(opts.max_samples - 1);
                let (mut tt, mut ss) = (Vec::new(), Vec::new());
                for i in (0..times.len()).step_by(keep_stride) {
                    tt.push(times[i]);
                    ss.push(states[i].clone());
                }
                if *tt.last().unwrap() < *times.last().unwrap() {
                    tt.push(*times.last().unwrap());
                    ss.push(states.last().unwrap().clone());
                }
                times = tt;
                states = ss;
            }
            ("rk4-step-doubling".to_string(), dt, Some(rel_tol))
        }
    };
    let phonon = states.iter().map(|s| n2_like(s)).collect();
    let ts = TimeSeries {
        labels: labels.iter().map(|s| s.to_string()).collect(),
        times,
        states,
        phonon,
        monitors: None,
        params: *params,
        integrator: IntegratorInfo { method: method_name, dt: dt_info, rel_tol, steps },
    };
    debug_assert!(ts.validate().is_ok());
    Ok(ts)
}

/// How `m` is derived from a state row for the different model widths.
fn mean_fn(labels: &[&str], eta: f64) -> impl Fn(&[f64]) -> f64 {
    let full = labels.len() == STATE_DIM;
    move |s: &[f64]| {
        if full {
            s[idx::N2] - eta * s[idx::K12] + eta * eta * s[idx::N1]
        } else {
            // Reduced/scalar models track m through n2 (zeroth order in eta).
            s[0]
        }
    }
}

/// Integrates the 23-equation system from `s0` to `t_end`.
pub fn integrate(
    g: &LinearGenerator,
    s0: &RateState,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<TimeSeries, RateEqError> {
    generic_integrate(
        &g.a,
        &g.b,
        &STATE_NAMES,
        &g.params,
        g.params.eta,
        DVector::from_row_slice(&s0.0),
        t_end,
        opts,
    )
}

/// Exact sampling of the linear flow at the given instants through the
/// augmented-matrix exponential exp([[A, b], [0, 0]] Δt); valid for singular
/// A (η = 0, Ω = 0) and arbitrary horizons, so long cooling tails do not
/// need explicit stepping.
pub fn sample_at(
    g: &LinearGenerator,
    s0: &RateState,
    times: &[f64],
) -> Result<TimeSeries, RateEqError> {
    sample_generic(
        &g.a,
        &g.b,
        &STATE_NAMES,
        &g.params,
        g.params.eta,
        DVector::from_row_slice(&s0.0),
        times,
    )
}

fn sample_generic(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    labels: &[&str],
    params: &PhysParams,
    eta_for_m: f64,
    s0: DVector<f64>,
    times: &[f64],
) -> Result<TimeSeries, RateEqError> {
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RateEqError::BadSampleTimes);
    }
    let n = a.nrows();
    let mut aug = DMatrix::<f64>::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(a);
    aug.view_mut((0, n), (n, 1)).copy_from(b);
    let mut v = DVector::<f64>::zeros(n + 1);
    v.rows_mut(0, n).copy_from(&s0);
    v[n] = 1.0;

    let mut out_times = Vec::with_capacity(times.len());
    let mut out_states = Vec::with_capacity(times.len());
    let mut prev_t = 0.0;
    let mut cached: Option<(f64, DMatrix<f64>)> = None;
    for &t in times {
        let dt = t - prev_t;
        if dt > 0.0 {
            let prop = match &cached {
                Some((cdt, p)) if (*cdt - dt).abs() <= 1e-12 * dt.abs() => p.clone(),
                _ => {
                    let p = (&aug * dt).exp();
                    cached = Some((dt, p.clone()));
                    p
                }
            };
            v = &prop * v;
        }
        prev_t = t;
        out_times.push(t);
        out_states.push(v.rows(0, n).iter().copied().collect::<Vec<_>>());
    }
    let n2_like = mean_fn(labels, eta_for_m);
    let phonon = out_states.iter().map(|s| n2_like(s)).collect();
    Ok(TimeSeries {
        labels: labels.iter().map(|s| s.to_string()).collect(),
        times: out_times,
        states: out_states,
        phonon,
        monitors: None,
        params: *params,
        integrator: IntegratorInfo {
            method: "matrix-exponential".into(),
            dt: 0.0,
            rel_tol: None,
            steps: times.len() as u64,
        },
    })
}

const PIVOT_TOL: f64 = 1e-14;
const RESIDUAL_TOL: f64 = 1e-10;

fn lu_solve_checked(a: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>, RateEqError> {
    let a_norm = a.amax();
    let lu = a.clone().lu();
    let min_pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_pivot < PIVOT_TOL * a_norm {
        return Err(RateEqError::SingularGenerator { pivot: min_pivot });
    }
    let mut x = lu.solve(rhs).ok_or(RateEqError::SingularGenerator { pivot: min_pivot })?;
    // One iterative refinement pass tightens the residual well below the
    // contract bound.
    let r = a * &x - rhs;
    if let Some(corr) = lu.solve(&r) {
        x -= corr;
    }
    Ok(x)
}

/// Solves A s = −b by LU with partial pivoting; the residual must satisfy
/// ‖As + b‖∞ < 1e-10 ‖b‖∞.
pub fn stationary_state(g: &LinearGenerator) -> Result<RateState, RateEqError> {
    let rhs = -&g.b;
    let x = lu_solve_checked(&g.a, &rhs)?;
    let residual = (&g.a * &x + &g.b).amax();
    let bound = RESIDUAL_TOL * g.b.amax();
    if residual >= bound {
        return Err(RateEqError::ResidualTooLarge { residual, bound });
    }
    let mut s = RateState::zeros();
    s.0.copy_from_slice(x.as_slice());
    Ok(s)
}

/// The adiabatically reduced weak-confinement system
/// (ṅ₂, k̇₇, k̇₈, k̇₉, k̇₁₀)ᵀ = M (…)ᵀ + β.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedWeakSystem {
    pub m: DMatrix<f64>,
    pub beta: DVector<f64>,
    pub params: PhysParams,
}

/// Builds M and β with the printed first- and second-order matrix elements.
pub fn reduced_weak_system(p: &PhysParams) -> Result<ReducedWeakSystem, ParamError> {
    let th = p.theta()?;
    let (eta, nu, g, om, de) = (p.eta, p.nu, p.gamma, p.omega, p.delta);
    let mu2 = p.mu_squared();
    let mu4 = mu2 * mu2;
    let om2 = om * om;

    let a12 = -2.0 * eta * nu * om2 / mu4 * (g * g - 4.0 * de * de - om2);
    let a13 = -eta * g * om2 / mu2;
    let a42 = 4.0 * eta * nu * om2 / mu4 * (om2 + 2.0 * g * g);
    let a43 = 2.0 * eta * g * om2 / mu2;
    let a52 = -a43;
    let a53 = a42;
    let a2 = -16.0 * eta * eta * nu * de * g * om2 / mu4;
    let a14 = 8.0 * eta * eta * nu * de * g * om2 / mu4;
    let a41 = 32.0 * eta * eta * nu * de * g * om2 / mu4;

    let m = DMatrix::from_row_slice(
        5,
        5,
        &[
            a2, a12, a13, a14, 0.0, //
            0.0, 0.0, -nu, 0.0, 0.0, //
            0.0, nu, a2, 0.0, 0.0, //
            a41, a42, a43, a2, -2.0 * nu, //
            0.0, a52, a53, 2.0 * nu, a2,
        ],
    );
    let beta = DVector::from_row_slice(&[
        eta * eta * g * om2 / mu2 * th,
        2.0 * eta * nu * om2 / mu2,
        -2.0 * eta * g * om2 / mu2,
        0.0,
        0.0,
    ]);
    Ok(ReducedWeakSystem { m, beta, params: *p })
}

impl ReducedWeakSystem {
    /// Zeroes matrix and drive entries above the requested η order
    /// (0: rotations only; 1: adds α⁽¹⁾ and β⁽¹⁾; 2: full).
    pub fn truncate_order(&self, order_eta: u8) -> ReducedWeakSystem {
        let mut m = self.m.clone();
        let mut beta = self.beta.clone();
        if order_eta < 2 {
            for (i, j) in [(0, 0), (2, 2), (3, 3), (4, 4), (0, 3), (3, 0)] {
                m[(i, j)] = 0.0;
            }
            beta[0] = 0.0;
        }
        if order_eta < 1 {
            for (i, j) in [(0, 1), (0, 2), (3, 1), (3, 2), (4, 1), (4, 2)] {
                m[(i, j)] = 0.0;
            }
            beta[1] = 0.0;
            beta[2] = 0.0;
        }
        ReducedWeakSystem { m, beta, params: self.params }
    }

    /// The stationary shift M⁻¹β; fails when M is singular (η = 0 or Ω = 0).
    pub fn shift(&self) -> Result<DVector<f64>, RateEqError> {
        lu_solve_checked(&self.m, &self.beta)
    }

    /// Stationary state −M⁻¹β of the reduced system.
    pub fn stationary(&self) -> Result<DVector<f64>, RateEqError> {
        Ok(-self.shift()?)
    }
}

/// Raw and shifted trajectories of the reduced system.
#[derive(Debug, Clone)]
pub struct ReducedRun {
    pub raw: TimeSeries,
    /// M⁻¹β when M is invertible.
    pub shift: Option<Vec<f64>>,
    /// Shifted (tilde) trajectory, raw + shift per sample.
    pub tilde: Option<TimeSeries>,
}

/// Integrates the reduced system; the shifted homogeneous trajectory is
/// included whenever the shift exists (λ₁ = 0 at η = 0 leaves it undefined;
/// raw integration still proceeds).
pub fn integrate_reduced(
    sys: &ReducedWeakSystem,
    s0: &[f64; 5],
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<ReducedRun, RateEqError> {
    let raw = generic_integrate(
        &sys.m,
        &sys.beta,
        &REDUCED_NAMES,
        &sys.params,
        sys.params.eta,
        DVector::from_row_slice(s0),
        t_end,
        opts,
    )?;
    let shift = sys.shift().ok();
    let tilde = shift.as_ref().map(|sh| {
        let mut t = raw.clone();
        for row in &mut t.states {
            for (v, s) in row.iter_mut().zip(sh.iter()) {
                *v += *s;
            }
        }
        t.phonon = t.states.iter().map(|r| r[0]).collect();
        t
    });
    Ok(ReducedRun { raw, shift: shift.map(|s| s.iter().copied().collect()), tilde })
}

/// Exact sampling of the reduced flow (see [`sample_at`]).
pub fn sample_reduced_at(
    sys: &ReducedWeakSystem,
    s0: &[f64; 5],
    times: &[f64],
) -> Result<TimeSeries, RateEqError> {
    sample_generic(
        &sys.m,
        &sys.beta,
        &REDUCED_NAMES,
        &sys.params,
        sys.params.eta,
        DVector::from_row_slice(s0),
        times,
    )
}

/// Scalar strong-confinement right-hand side ṅ₂ = −γ_c n₂ + c.
pub fn strong_rhs(p: &PhysParams, n2: f64) -> Result<f64, AnalyticError> {
    let (gc, c) = analytic::gamma_c_strong_pair(p)?;
    Ok(-gc * n2 + c)
}

/// Integrates the scalar strong-confinement equation with RK4.
pub fn integrate_strong(
    p: &PhysParams,
    n2_0: f64,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<TimeSeries, RateEqError> {
    let (gc, c) = analytic::gamma_c_strong_pair(p)?;
    let a = DMatrix::from_element(1, 1, -gc);
    let b = DVector::from_element(1, c);
    generic_integrate(&a, &b, &["n2"], p, p.eta, DVector::from_element(1, n2_0), t_end, opts)
}
