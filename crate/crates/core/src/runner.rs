//! Scenario execution: propagate, sample the full diagnostics row at the
//! configured stride, and collect run statistics for the manifest.

use thiserror::Error;

use crate::grid::TwoChannelState;
use crate::nonmarkov::{nonmarkov_factor, CanonicalRates, NonMarkovPoint};
use crate::observables::{correlation_scalars, DensityError, ReducedDensity};
use crate::propagate::{PropagationError, Propagator};
use crate::scenario::{Scenario, ScenarioError};
use crate::trajectory::{DiagnosticsSample, RateBlock, RunMeta, Trajectory};

/// Dead band on rate-like quantities below which signs are not classified.
pub const RATE_DEAD_BAND: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error("density invariant broken at t = {t}: {source}")]
    Density { t: f64, source: DensityError },
}

/// Wall-clock and guard statistics of one run, embedded in the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub wall_seconds: f64,
    pub steps: usize,
    pub samples: usize,
    pub valid_samples: usize,
    pub longest_gap: usize,
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Propagate a scenario to t_final, emitting one diagnostics row at t = 0
/// and every `sample_stride` steps thereafter.
pub fn run_scenario(scenario: &Scenario) -> Result<(Trajectory, RunStats), RunError> {
    let started_unix_s = unix_now();
    let clock = std::time::Instant::now();

    let mut propagator = Propagator::new(scenario)?;
    let mut state = scenario.initial_state()?;
    let steps = (scenario.t_final / scenario.dt).round() as usize;

    let mut samples = Vec::with_capacity(steps / scenario.sample_stride + 2);
    samples.push(sample_diagnostics(&propagator, &state)?);
    for step_index in 1..=steps {
        propagator.step(&mut state)?;
        if step_index % scenario.sample_stride == 0 || step_index == steps {
            samples.push(sample_diagnostics(&propagator, &state)?);
        }
    }

    let meta = RunMeta {
        scenario_name: scenario.name.clone(),
        method: scenario.method.name().to_string(),
        dt: scenario.dt,
        sample_stride: scenario.sample_stride,
        t_final: scenario.t_final,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let trajectory = Trajectory { meta, samples };
    let stats = RunStats {
        started_unix_s,
        finished_unix_s: unix_now(),
        wall_seconds: clock.elapsed().as_secs_f64(),
        steps,
        samples: trajectory.samples.len(),
        valid_samples: trajectory.valid_count(),
        longest_gap: trajectory.longest_gap(),
    };
    Ok((trajectory, stats))
}

/// Assemble the full diagnostics row for the current state.
pub fn sample_diagnostics(
    propagator: &Propagator,
    state: &TwoChannelState,
) -> Result<DiagnosticsSample, RunError> {
    let scenario = propagator.scenario();
    let rho = ReducedDensity::from_state(state).map_err(|source| RunError::Density {
        t: state.time,
        source,
    })?;
    let deriv = propagator.derivatives(state, state.time);
    let nm_factor = nonmarkov_factor(&rho, &deriv);
    let scalars = correlation_scalars(&rho);

    let (rates, guard) = match CanonicalRates::evaluate(&rho, &deriv, scenario.guards) {
        Ok(r) => {
            let point = NonMarkovPoint::from_rates(&r, nm_factor, deriv.dpg_dt(), RATE_DEAD_BAND);
            (
                Some(RateBlock {
                    gamma: r.as_array(),
                    rate_sum: point.rate_sum,
                    f: point.f,
                    n_index: point.n_index,
                    bloch_log_derivative: point.bloch_log_derivative,
                }),
                None,
            )
        }
        Err(e) => (None, Some(e.trip)),
    };

    let case = crate::nonmarkov::DynamicsCase::classify(nm_factor, deriv.dpg_dt(), RATE_DEAD_BAND);
    Ok(DiagnosticsSample {
        time: state.time,
        p_g: rho.p_g,
        p_e: rho.p_e,
        overlap: rho.overlap,
        dpg_dt: deriv.dpg_dt(),
        abs_overlap_rate: deriv.abs_overlap_rate(),
        overlap_rate: deriv.overlap_rate(),
        nm_factor,
        case,
        scalars,
        rates,
        guard,
    })
}
