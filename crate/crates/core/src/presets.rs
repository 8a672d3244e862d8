//! Parameter presets behind the figure reproductions and the comparison
//! suites. Axis ranges and initial phonon numbers that are this project's
//! own choices are marked approximate in the CLI output.

use crate::lindblad::FockConfig;
use crate::params::PhysParams;

/// A cooling trajectory preset: parameters plus initial mean phonon number.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPreset {
    pub label: &'static str,
    pub params: PhysParams,
    pub m0: f64,
}

/// Reduced-model stability illustration (coherent start, orders 0/1/2).
pub fn fig1() -> TrajectoryPreset {
    TrajectoryPreset {
        label: "fig1",
        params: PhysParams::in_gamma_units(0.1, 0.1, 0.01, 0.5, 0.0),
        m0: 1.0,
    }
}

/// Coherent amplitude used by the fig1 runs.
pub const FIG1_BETA: (f64, f64) = (1.0, 0.0);

/// Stationary-phonon-number scan baselines: weak, medium, strong.
pub fn fig2() -> [TrajectoryPreset; 3] {
    [
        TrajectoryPreset { label: "fig2a", params: PhysParams::in_gamma_units(0.1, 0.01, 0.1, 0.5, 0.0), m0: 1.0 },
        TrajectoryPreset { label: "fig2b", params: PhysParams::in_gamma_units(0.1, 1.0, 0.1, 1.0, 0.0), m0: 1.0 },
        TrajectoryPreset { label: "fig2c", params: PhysParams::in_nu_units(0.1, 0.01, 0.1, 1.0, 0.0), m0: 1.0 },
    ]
}

/// Cooling-rate scan baselines with their Lamb-Dicke parameters.
pub fn fig3() -> [TrajectoryPreset; 3] {
    [
        TrajectoryPreset { label: "fig3a", params: PhysParams::in_gamma_units(0.01, 0.01, 0.1, 0.5, 0.0), m0: 1.0 },
        TrajectoryPreset { label: "fig3b", params: PhysParams::in_gamma_units(0.1, 1.0, 0.1, 1.0, 0.0), m0: 1.0 },
        TrajectoryPreset { label: "fig3c", params: PhysParams::in_nu_units(0.1, 0.01, 0.1, 1.0, 0.0), m0: 1.0 },
    ]
}

/// Cooling trajectories in the strong, medium and weak regimes.
pub fn fig5() -> [TrajectoryPreset; 3] {
    [
        TrajectoryPreset {
            label: "fig5a-strong",
            params: PhysParams::in_nu_units(0.01, 0.01, 0.1, 1.0, 0.0),
            m0: 1.0,
        },
        TrajectoryPreset {
            label: "fig5b-medium",
            params: PhysParams::in_gamma_units(0.1, 1.0, 0.1, 1.0, 0.0),
            m0: 1.0,
        },
        TrajectoryPreset {
            label: "fig5c-weak",
            params: PhysParams::in_gamma_units(0.1, 0.01, 0.1, 0.5, 0.0),
            m0: 1000.0,
        },
    ]
}

/// Master-equation vs rate-equation comparison preset.
#[derive(Debug, Clone, Copy)]
pub struct OracleComparePreset {
    pub label: &'static str,
    pub params: PhysParams,
    pub fock: FockConfig,
    pub m0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub samples: usize,
}

/// Weak-confinement comparison (transient of the mixed coherences).
pub fn fig6() -> OracleComparePreset {
    OracleComparePreset {
        label: "fig6",
        params: PhysParams::in_gamma_units(0.1, 0.01, 0.01, 0.5, 0.0),
        fock: FockConfig { cutoff: 30, leak_tol: 1e-8 },
        m0: 1.0,
        t_end: 20.0,
        dt: 0.01,
        samples: 101,
    }
}

/// Strong-confinement comparison.
pub fn fig7() -> OracleComparePreset {
    OracleComparePreset {
        label: "fig7",
        params: PhysParams::in_nu_units(0.01, 0.01, 0.01, 1.0, 0.0),
        fock: FockConfig { cutoff: 12, leak_tol: 1e-8 },
        m0: 1.0,
        t_end: 500.0,
        dt: 0.02,
        samples: 101,
    }
}
