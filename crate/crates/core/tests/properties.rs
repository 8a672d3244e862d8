//! Cross-module invariants on random parameter draws and the regime presets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trapcool::analytic;
use trapcool::params::PhysParams;
use trapcool::presets;
use trapcool::rate_eqs::{self, assemble_generator, idx, initial_state, InitialState};
use trapcool::stability::fit_decay_rate;

/// Stationary solve of the 23-equation system against the closed-form m_ss
/// across 100 draws in both regimes (η = 1e-3, η-dependent output terms
/// dropped from the extraction).
#[test]
fn stationary_solve_matches_closed_form_across_regimes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut worst_p = None;
    for i in 0..100 {
        let weak = i % 2 == 0;
        let p = if weak {
            PhysParams::in_gamma_units(
                1e-3,
                10f64.powf(rng.gen_range(-2.5..-1.0)),
                10f64.powf(rng.gen_range(-3.0..-0.7)),
                10f64.powf(rng.gen_range(-0.7..0.3)),
                rng.gen_range(0.0..1.0),
            )
        } else {
            PhysParams::in_nu_units(
                1e-3,
                10f64.powf(rng.gen_range(-2.5..-1.0)),
                10f64.powf(rng.gen_range(-3.0..-0.7)),
                10f64.powf(rng.gen_range(-0.3..0.5)),
                rng.gen_range(0.0..1.0),
            )
        };
        let g = assemble_generator(&p).unwrap();
        let s = rate_eqs::stationary_state(&g).unwrap();
        let closed = analytic::m_ss_full(&p).unwrap();
        let rel = (s[idx::N2] - closed).abs() / closed.abs();
        if rel > worst {
            worst = rel;
            worst_p = Some(p);
        }
    }
    assert!(worst < 1e-4, "worst rel deviation {worst:.3e} at {worst_p:?}");
}

/// Weak regime: n2(t) from the 23-equation system and the reduced 5-equation
/// system agree within 5% after the transient, over three cooling e-folds.
#[test]
fn reduced_model_tracks_full_system() {
    let p = PhysParams::in_gamma_units(0.1, 0.01, 0.01, 0.5, 0.0);
    let g = assemble_generator(&p).unwrap();
    let sys = rate_eqs::reduced_weak_system(&p).unwrap();
    let m0 = 50.0;
    let s0 = initial_state(InitialState::GroundAtomFock { m0 }).unwrap();
    let gc = analytic::gamma_c_full(&p);
    let t0 = 10.0;
    let t1 = 3.0 / gc;
    let times: Vec<f64> = (0..60).map(|i| t0 + (t1 - t0) * i as f64 / 59.0).collect();
    let full = rate_eqs::sample_at(&g, &s0, &times).unwrap();
    let reduced = rate_eqs::sample_reduced_at(&sys, &[m0, 0.0, 0.0, 0.0, 0.0], &times).unwrap();
    let mut worst = 0.0f64;
    for i in 0..times.len() {
        let a = full.states[i][idx::N2];
        let b = reduced.states[i][0];
        worst = worst.max((a - b).abs() / a.abs());
    }
    assert!(worst < 0.05, "max rel n2 deviation {worst:.3e}");
}

/// log m(t) is linear after the transient and its slope matches −γ_c within
/// 10% at each regime preset.
#[test]
fn cooling_slopes_match_gamma_c_at_presets() {
    for preset in presets::fig5() {
        let p = preset.params;
        let g = assemble_generator(&p).unwrap();
        let s0 = initial_state(InitialState::GroundAtomFock { m0: preset.m0 }).unwrap();
        let gc = analytic::gamma_c_full(&p);
        let stat = rate_eqs::stationary_state(&g).unwrap();
        let m_ss = rate_eqs::mean_phonon(&stat, p.eta);
        let t0 = 10.0 / p.gamma;
        let t1 = t0 + 3.0 / gc;
        let times: Vec<f64> = (0..80).map(|i| t0 + (t1 - t0) * i as f64 / 79.0).collect();
        let ts = rate_eqs::sample_at(&g, &s0, &times).unwrap();
        let devs: Vec<f64> = ts.phonon.iter().map(|m| m - m_ss).collect();
        let fitted = fit_decay_rate(&ts.times, &devs);
        let rel = (fitted - gc).abs() / gc;
        assert!(rel < 0.10, "{}: fitted {fitted:.4e} vs gamma_c {gc:.4e} ({rel:.3e})", preset.label);
    }
}

/// The strong-confinement scalar model reproduces the closed-form
/// exponential exactly, and its fixed point equals c/γ_c.
#[test]
fn strong_scalar_model_consistency() {
    let p = PhysParams::in_nu_units(0.01, 0.01, 0.05, 1.4, 0.3);
    let (gc, c) = analytic::gamma_c_strong_pair(&p).unwrap();
    let summary = analytic::CoolingSummary::from_strong_pair(&p).unwrap();
    assert!((summary.m_ss - c / gc).abs() < 1e-15);
    assert!((summary.m_ss - analytic::m_ss_strong(&p).unwrap()).abs() / summary.m_ss < 1e-12);
}
