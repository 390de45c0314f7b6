//! Per-sample non-Markovianity diagnostics built from the canonical rates.

use serde::{Deserialize, Serialize};

use super::rates::CanonicalRates;

/// Dynamical regime of one sample, drawn from the sign pattern of the
/// non-Markovianity factor d(P_gP_e)/dt.
///
/// * `OneNegativeRate` ("i"): the factor is negative; only γ₂ < 0 and the
///   Bloch volume shrinks.
/// * `TwoNegativeRates` ("ii"): the factor is positive; γ₂ and γ₃ are both
///   negative, the rate sum is negative, and the Bloch volume grows —
///   enhanced non-Markovian behavior.
/// * `BalancedPopulations` ("iii"): P_g = P_e, so γ₃ = 0 and γ₂ = -γ₁.
/// * `StationaryPopulations` ("iv"): dP_g/dt = 0 (population extrema or the
///   after-pulse regime), γ₃ = 0 and γ₂ = -γ₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DynamicsCase {
    OneNegativeRate,
    TwoNegativeRates,
    BalancedPopulations,
    StationaryPopulations,
}

impl DynamicsCase {
    /// Classify from the factor and its ingredients; `dead_band` is the
    /// rate magnitude below which signs are not trusted.
    pub fn classify(nm_factor: f64, dpg_dt: f64, dead_band: f64) -> Self {
        if nm_factor.abs() <= dead_band {
            if dpg_dt.abs() <= dead_band {
                DynamicsCase::StationaryPopulations
            } else {
                DynamicsCase::BalancedPopulations
            }
        } else if nm_factor > 0.0 {
            DynamicsCase::TwoNegativeRates
        } else {
            DynamicsCase::OneNegativeRate
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DynamicsCase::OneNegativeRate => "i",
            DynamicsCase::TwoNegativeRates => "ii",
            DynamicsCase::BalancedPopulations => "iii",
            DynamicsCase::StationaryPopulations => "iv",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "i" => Some(DynamicsCase::OneNegativeRate),
            "ii" => Some(DynamicsCase::TwoNegativeRates),
            "iii" => Some(DynamicsCase::BalancedPopulations),
            "iv" => Some(DynamicsCase::StationaryPopulations),
            _ => None,
        }
    }
}

impl std::fmt::Display for DynamicsCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One time slice of the canonical non-Markovianity diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonMarkovPoint {
    /// Canonical measure f = Σ max(0, -γ_k), units 1/time.
    pub f: f64,
    /// Per-channel contributions max(0, -γ_k).
    pub f_channels: [f64; 3],
    /// Number of strictly negative rates (dimension of non-Markovian evolution).
    pub n_index: u8,
    pub rate_sum: f64,
    pub nm_factor: f64,
    /// d ln V/dt of the Bloch volume, -2·rate_sum for a qubit.
    pub bloch_log_derivative: f64,
    pub case: DynamicsCase,
}

impl NonMarkovPoint {
    pub fn from_rates(rates: &CanonicalRates, nm_factor: f64, dpg_dt: f64, dead_band: f64) -> Self {
        let gammas = rates.as_array();
        let f_channels = gammas.map(|g| (-g).max(0.0));
        let rate_sum = rates.rate_sum();
        Self {
            f: f_channels.iter().sum(),
            f_channels,
            n_index: gammas.iter().filter(|g| **g < 0.0).count() as u8,
            rate_sum,
            nm_factor,
            bloch_log_derivative: -2.0 * rate_sum,
            case: DynamicsCase::classify(nm_factor, dpg_dt, dead_band),
        }
    }
}
