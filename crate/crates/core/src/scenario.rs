//! Fully resolved simulation scenarios in atomic units, plus the named
//! surrogate presets used for validation and reporting.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::eigen::{bound_states, EigenError};
use crate::grid::{GridError, SpatialGrid, TwoChannelState, WaveFunction};
use crate::nonmarkov::Guards;
use crate::potential::{PotentialCurve, PotentialError};
use crate::pulse::{CouplingSpec, PulseEnvelope, RampShape};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario field {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("initial eigenstate leaks past the grid edge (amplitude {amplitude:e} > 1e-6)")]
    GridTooSmall { amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Ground,
    Excited,
}

/// Initial-condition specification.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// A single vibrational eigenstate of one channel's potential.
    Eigenstate { channel: Channel, index: usize },
    /// A Gaussian packet on one channel.
    Gaussian {
        channel: Channel,
        center: f64,
        width: f64,
        momentum: f64,
    },
    /// One vibrational eigenstate of the chosen channel's potential copied
    /// onto both channels with the given amplitudes (validation scenarios).
    SharedEigenstate {
        of_channel: Channel,
        index: usize,
        weight_g: f64,
        weight_e: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepMethod {
    SplitOperator,
    Chebyshev {
        order: usize,
        energy_bounds: Option<(f64, f64)>,
    },
}

impl StepMethod {
    pub fn name(&self) -> &'static str {
        match self {
            StepMethod::SplitOperator => "split-operator",
            StepMethod::Chebyshev { .. } => "chebyshev",
        }
    }
}

/// A fully resolved scenario; every field is in atomic units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub grid: Arc<SpatialGrid>,
    pub mass: f64,
    pub v_g: PotentialCurve,
    pub v_e: PotentialCurve,
    pub coupling: CouplingSpec,
    pub initial: InitialState,
    pub method: StepMethod,
    pub dt: f64,
    pub t_final: f64,
    pub sample_stride: usize,
    pub guards: Guards,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail =
            |field: &'static str, reason: String| Err(ScenarioError::Invalid { field, reason });
        if self.mass <= 0.0 || self.mass.is_nan() {
            return fail(
                "system.mass",
                format!("must be positive, got {}", self.mass),
            );
        }
        if self.dt <= 0.0 || self.dt.is_nan() {
            return fail(
                "integrator.dt",
                format!("must be positive, got {}", self.dt),
            );
        }
        if self.t_final <= 0.0 || self.t_final.is_nan() {
            return fail(
                "integrator.t_final",
                format!("must be positive, got {}", self.t_final),
            );
        }
        if self.sample_stride < 1 {
            return fail("integrator.sample_stride", "must be at least 1".into());
        }
        let eps_ok = |e: f64| e > 0.0 && e <= 1e-2;
        if !eps_ok(self.guards.eps_pop) || !eps_ok(self.guards.eps_overlap) {
            return fail("guards", "thresholds must lie in (0, 1e-2]".into());
        }
        if let StepMethod::Chebyshev { order, .. } = self.method {
            if order < 4 {
                return fail(
                    "integrator.chebyshev_order",
                    format!("must be ≥ 4, got {order}"),
                );
            }
        }
        // potentials must evaluate on the whole grid
        self.v_g.sample(&self.grid)?;
        self.v_e.sample(&self.grid)?;
        Ok(())
    }

    /// Conservative spectral-range estimate: kinetic cutoff plus potential
    /// range plus the peak coupling.
    pub fn energy_bounds_estimate(&self) -> Result<(f64, f64), ScenarioError> {
        let k_max = self
            .grid
            .k_values()
            .iter()
            .fold(0.0f64, |m, k| m.max(k.abs()));
        let kin_max = k_max * k_max / (2.0 * self.mass);
        let v_lo = self
            .v_g
            .min_on_grid(&self.grid)?
            .min(self.v_e.min_on_grid(&self.grid)?);
        let v_hi = self
            .v_g
            .max_on_grid(&self.grid)?
            .max(self.v_e.max_on_grid(&self.grid)?);
        let w = self.coupling.strength.abs();
        Ok((v_lo - w, v_hi + kin_max + w))
    }

    /// Default time step: the plateau Rabi period divided by 2000, or the
    /// kinetic-limit bound 0.5/E_max, whichever is smaller.
    pub fn default_dt(&self) -> Result<f64, ScenarioError> {
        let (lo, hi) = self.energy_bounds_estimate()?;
        let kinetic_limit = 0.5 / hi.abs().max(lo.abs()).max(1e-300);
        let w = self.coupling.strength.abs();
        if w > 0.0 {
            let rabi_period = std::f64::consts::PI / w;
            Ok(kinetic_limit.min(rabi_period / 2000.0))
        } else {
            Ok(kinetic_limit)
        }
    }

    /// Build the initial two-channel state (unit total norm).
    pub fn initial_state(&self) -> Result<TwoChannelState, ScenarioError> {
        let make_eigen = |channel: Channel, index: usize| -> Result<WaveFunction, ScenarioError> {
            let pot = match channel {
                Channel::Ground => &self.v_g,
                Channel::Excited => &self.v_e,
            };
            let solved = bound_states(pot, &self.grid, self.mass, index + 1)?;
            if !solved.grid_adequate() {
                return Err(ScenarioError::GridTooSmall {
                    amplitude: solved.edge_amplitude,
                });
            }
            Ok(solved.states[index].wave.clone())
        };

        let (psi_g, psi_e) = match &self.initial {
            InitialState::Eigenstate { channel, index } => {
                let wave = make_eigen(*channel, *index)?;
                match channel {
                    Channel::Ground => (wave, WaveFunction::zero(self.grid.clone())),
                    Channel::Excited => (WaveFunction::zero(self.grid.clone()), wave),
                }
            }
            InitialState::Gaussian {
                channel,
                center,
                width,
                momentum,
            } => {
                let wave = WaveFunction::gaussian(self.grid.clone(), *center, *width, *momentum)?;
                match channel {
                    Channel::Ground => (wave, WaveFunction::zero(self.grid.clone())),
                    Channel::Excited => (WaveFunction::zero(self.grid.clone()), wave),
                }
            }
            InitialState::SharedEigenstate {
                of_channel,
                index,
                weight_g,
                weight_e,
            } => {
                let wave = make_eigen(*of_channel, *index)?;
                let norm = (weight_g * weight_g + weight_e * weight_e).sqrt();
                if norm == 0.0 {
                    return Err(ScenarioError::Invalid {
                        field: "initial.weights",
                        reason: "both channel weights are zero".into(),
                    });
                }
                let mut g = wave.clone();
                g.scale(Complex64::new(weight_g / norm, 0.0));
                let mut e = wave;
                e.scale(Complex64::new(weight_e / norm, 0.0));
                (g, e)
            }
        };
        Ok(TwoChannelState::new(psi_g, psi_e, 0.0)?)
    }
}

/// Parameters of the two-Morse surrogate: a deep lower well and a shallow
/// displaced upper well whose curves cross inside the grid near the inner
/// turning point of the initial vibrational eigenstate, so the driven
/// packet exchanges population at the crossing while vibrating. The pulse
/// is short against the lower well's vibration period, which keeps the
/// transferred packet phase-coherent and lets the after-pulse overlap
/// sweep through pronounced minima.
pub mod presets {
    use super::*;

    /// Peak coupling strength of the 1x morse-pair preset (hartree).
    pub const MORSE_PAIR_W1: f64 = 1.5e-4;

    pub fn morse_pair(coupling_scale: f64) -> Scenario {
        let grid = SpatialGrid::new(5.0, 37.0, 1024).expect("preset grid");
        Scenario {
            name: format!("morse-pair-{}x", coupling_scale as usize),
            grid,
            mass: 4000.0,
            v_g: PotentialCurve::morse(0.06, 0.5, 7.0, 0.0),
            v_e: PotentialCurve::morse(0.025, 0.35, 11.0, 0.030),
            coupling: CouplingSpec::new(
                MORSE_PAIR_W1 * coupling_scale,
                PulseEnvelope::new(300.0, 400.0, 500.0, 400.0, RampShape::SineSquared)
                    .expect("preset envelope"),
            ),
            initial: InitialState::Eigenstate {
                channel: Channel::Excited,
                index: 4,
            },
            method: StepMethod::SplitOperator,
            dt: 0.15,
            t_final: 40_000.0,
            sample_stride: 16,
            guards: Guards::default(),
        }
    }

    /// Flat equal potentials with a constant coupling: the analytic
    /// resonant two-level limit. The spatial packet factors out.
    pub fn rabi_flat() -> Scenario {
        let grid = SpatialGrid::new(0.0, 40.0, 256).expect("preset grid");
        let t_final = 3200.0;
        Scenario {
            name: "rabi-flat".into(),
            grid,
            mass: 2000.0,
            v_g: PotentialCurve::flat(0.0),
            v_e: PotentialCurve::flat(0.0),
            coupling: CouplingSpec::new(2e-3, PulseEnvelope::constant_on(0.0, t_final + 1.0)),
            initial: InitialState::Gaussian {
                channel: Channel::Excited,
                center: 20.0,
                width: 1.5,
                momentum: 0.0,
            },
            method: StepMethod::SplitOperator,
            dt: 0.5,
            t_final,
            sample_stride: 4,
            guards: Guards::default(),
        }
    }

    /// Free dispersion of a single Gaussian packet; probes the kinetic
    /// operator alone.
    pub fn free_gaussian() -> Scenario {
        let grid = SpatialGrid::new(0.0, 60.0, 512).expect("preset grid");
        Scenario {
            name: "free-gaussian".into(),
            grid,
            mass: 2000.0,
            v_g: PotentialCurve::flat(0.0),
            v_e: PotentialCurve::flat(0.0),
            coupling: CouplingSpec::off(),
            initial: InitialState::Gaussian {
                channel: Channel::Ground,
                center: 15.0,
                width: 1.0,
                momentum: 0.3,
            },
            method: StepMethod::SplitOperator,
            dt: 0.5,
            t_final: 7000.0,
            sample_stride: 8,
            guards: Guards::default(),
        }
    }

    /// Two identical harmonic wells displaced by `displacement`, no
    /// coupling, the lower well's ground state copied onto both channels:
    /// the after-pulse oracle with a closed-form overlap.
    pub fn displaced_harmonic(displacement: f64, level_offset: f64) -> Scenario {
        let omega = 1.5e-3;
        let mass = 2000.0;
        let center = 15.0;
        let grid = SpatialGrid::new(5.0, 25.0, 512).expect("preset grid");
        let period = std::f64::consts::TAU / omega;
        Scenario {
            name: "displaced-harmonic".into(),
            grid,
            mass,
            v_g: PotentialCurve::harmonic_from_omega(omega, mass, center, 0.0),
            v_e: PotentialCurve::harmonic_from_omega(
                omega,
                mass,
                center + displacement,
                level_offset,
            ),
            coupling: CouplingSpec::off(),
            initial: InitialState::SharedEigenstate {
                of_channel: Channel::Ground,
                index: 0,
                weight_g: std::f64::consts::FRAC_1_SQRT_2,
                weight_e: std::f64::consts::FRAC_1_SQRT_2,
            },
            method: StepMethod::SplitOperator,
            dt: 0.25,
            t_final: (2.05 * period / 0.25).round() * 0.25,
            sample_stride: 4,
            guards: Guards::default(),
        }
    }

    pub const DISPLACED_HARMONIC_OMEGA: f64 = 1.5e-3;
    pub const DISPLACED_HARMONIC_MASS: f64 = 2000.0;

    /// Resolve a preset by name.
    pub fn by_name(name: &str) -> Option<Scenario> {
        match name {
            "morse-pair" | "morse-pair-1x" => Some(morse_pair(1.0)),
            "morse-pair-2x" => Some(morse_pair(2.0)),
            "morse-pair-4x" => Some(morse_pair(4.0)),
            "rabi-flat" => Some(rabi_flat()),
            "free-gaussian" => Some(free_gaussian()),
            "displaced-harmonic" => Some(displaced_harmonic(0.8, 0.0)),
            _ => None,
        }
    }

    pub const PRESET_NAMES: &[&str] = &[
        "morse-pair",
        "morse-pair-1x",
        "morse-pair-2x",
        "morse-pair-4x",
        "rabi-flat",
        "free-gaussian",
        "displaced-harmonic",
    ];
}
