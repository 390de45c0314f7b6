//! Canonical description of the reduced electronic dynamics: decoherence
//! matrix, canonical rates and channels, non-Markovianity measures, trend
//! classification, Bloch-volume witness, and trace-distance diagnostics.
//!
//! The rate formulas divide by the electronic populations and by the
//! vibrational overlap, so every entry point takes a [`Guards`] threshold
//! pair; samples that fail a guard are flagged and excluded from
//! integrals rather than extrapolated.

mod channels;
mod correlations;
mod effective;
mod measures;
mod rates;
mod sample;
mod tracedist;

pub use channels::{CanonicalChannels, ChannelError, DecoherenceOp};
pub use correlations::{
    classify_trends, rates_from_entropies, TrendError, TrendInputs, TrendReport, TrendRow,
};
pub use effective::effective_hamiltonian;
pub use measures::{
    after_pulse_measure, after_pulse_measure_complex_route, bloch_volume_ratio,
    total_nonmarkovianity, AfterPulsePoint, GapReport, MeasureError,
};
pub use rates::{nonmarkov_factor, rate_sum_closed_form, CanonicalRates, DecoherenceMatrix};
pub use sample::{DynamicsCase, NonMarkovPoint};
pub use tracedist::{trace_distance, trace_distance_series, DensitySample, TraceDistancePoint};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::observables::ReducedDensity;

/// Which singular-set threshold a sample failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GuardTrip {
    PopulationG,
    PopulationE,
    Overlap,
    Coherence,
}

impl std::fmt::Display for GuardTrip {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GuardTrip::PopulationG => "population-g",
            GuardTrip::PopulationE => "population-e",
            GuardTrip::Overlap => "overlap",
            GuardTrip::Coherence => "coherence",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("guard tripped: {trip} below threshold")]
pub struct GuardError {
    pub trip: GuardTrip,
}

/// Thresholds below which the rate formulas are treated as singular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Guards {
    pub eps_pop: f64,
    pub eps_overlap: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            eps_pop: 1e-6,
            eps_overlap: 1e-6,
        }
    }
}

impl Guards {
    pub fn new(eps_pop: f64, eps_overlap: f64) -> Option<Self> {
        let ok = |e: f64| e > 0.0 && e <= 1e-2;
        (ok(eps_pop) && ok(eps_overlap)).then_some(Self {
            eps_pop,
            eps_overlap,
        })
    }

    /// Check the density against both population guards and the overlap guard.
    pub fn check(&self, rho: &ReducedDensity) -> Result<(), GuardError> {
        if rho.p_g <= self.eps_pop {
            return Err(GuardError {
                trip: GuardTrip::PopulationG,
            });
        }
        if rho.p_e <= self.eps_pop {
            return Err(GuardError {
                trip: GuardTrip::PopulationE,
            });
        }
        if rho.overlap.norm() <= self.eps_overlap {
            return Err(GuardError {
                trip: GuardTrip::Overlap,
            });
        }
        Ok(())
    }
}
