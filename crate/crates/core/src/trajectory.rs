//! Sampled diagnostics along one propagation run: the row type, the
//! trajectory container, and the series extractions the interval measures
//! consume.

use num_complex::Complex64;

use crate::nonmarkov::{DynamicsCase, GuardTrip};
use crate::observables::CorrelationScalars;

/// Guard-dependent part of one sample; absent when a guard tripped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBlock {
    pub gamma: [f64; 3],
    pub rate_sum: f64,
    pub f: f64,
    pub n_index: u8,
    pub bloch_log_derivative: f64,
}

/// One time slice of every diagnostic the run emits.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSample {
    pub time: f64,
    pub p_g: f64,
    pub p_e: f64,
    /// ⟨ψ_g|ψ_e⟩.
    pub overlap: Complex64,
    pub dpg_dt: f64,
    /// |d⟨ψ_g|ψ_e⟩/dt|.
    pub abs_overlap_rate: f64,
    /// d⟨ψ_g|ψ_e⟩/dt (not serialized; kept for derivative-based checks).
    pub overlap_rate: Complex64,
    pub nm_factor: f64,
    pub case: DynamicsCase,
    pub scalars: CorrelationScalars,
    pub rates: Option<RateBlock>,
    pub guard: Option<GuardTrip>,
}

impl DiagnosticsSample {
    pub fn is_valid(&self) -> bool {
        self.rates.is_some()
    }
}

/// Run metadata carried alongside the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub scenario_name: String,
    pub method: String,
    pub dt: f64,
    pub sample_stride: usize,
    pub t_final: f64,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub meta: RunMeta,
    pub samples: Vec<DiagnosticsSample>,
}

impl Trajectory {
    pub fn span(&self) -> Option<(f64, f64)> {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => Some((a.time, b.time)),
            _ => None,
        }
    }

    pub fn valid_count(&self) -> usize {
        self.samples.iter().filter(|s| s.is_valid()).count()
    }

    /// (time, f) series with invalid samples as None.
    pub fn f_series(&self) -> Vec<(f64, Option<f64>)> {
        self.samples
            .iter()
            .map(|s| (s.time, s.rates.map(|r| r.f)))
            .collect()
    }

    /// (time, Σγ) series with invalid samples as None.
    pub fn rate_sum_series(&self) -> Vec<(f64, Option<f64>)> {
        self.samples
            .iter()
            .map(|s| (s.time, s.rates.map(|r| r.rate_sum)))
            .collect()
    }

    /// Mean n-index over valid samples in [t1, t2].
    pub fn mean_n_index(&self, t1: f64, t2: f64) -> Option<f64> {
        let mut count = 0usize;
        let mut total = 0usize;
        for s in &self.samples {
            if s.time >= t1 && s.time <= t2 {
                if let Some(r) = &s.rates {
                    count += 1;
                    total += r.n_index as usize;
                }
            }
        }
        (count > 0).then(|| total as f64 / count as f64)
    }

    /// Longest stretch of consecutive guard-invalid samples.
    pub fn longest_gap(&self) -> usize {
        let mut longest = 0;
        let mut run = 0;
        for s in &self.samples {
            if s.is_valid() {
                run = 0;
            } else {
                run += 1;
                longest = longest.max(run);
            }
        }
        longest
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64, valid: bool) -> DiagnosticsSample {
        DiagnosticsSample {
            time: t,
            p_g: 0.4,
            p_e: 0.6,
            overlap: Complex64::new(0.1, 0.0),
            dpg_dt: 0.0,
            abs_overlap_rate: 0.0,
            overlap_rate: Complex64::ZERO,
            nm_factor: 0.0,
            case: DynamicsCase::StationaryPopulations,
            scalars: crate::observables::correlation_scalars(
                &crate::observables::ReducedDensity::new(0.4, 0.6, Complex64::new(0.1, 0.0))
                    .unwrap(),
            ),
            rates: valid.then_some(RateBlock {
                gamma: [0.1, -0.1, 0.0],
                rate_sum: 0.0,
                f: 0.1,
                n_index: 1,
                bloch_log_derivative: 0.0,
            }),
            guard: (!valid).then_some(GuardTrip::Overlap),
        }
    }

    #[test]
    fn gap_and_counts() {
        let meta = RunMeta {
            scenario_name: "t".into(),
            method: "split-operator".into(),
            dt: 0.1,
            sample_stride: 1,
            t_final: 1.0,
            code_version: "0".into(),
        };
        let samples = vec![
            sample(0.0, true),
            sample(0.1, false),
            sample(0.2, false),
            sample(0.3, true),
            sample(0.4, false),
        ];
        let traj = Trajectory { meta, samples };
        assert_eq!(traj.valid_count(), 2);
        assert_eq!(traj.longest_gap(), 2);
        assert_eq!(traj.span(), Some((0.0, 0.4)));
        assert_eq!(traj.mean_n_index(0.0, 0.4), Some(1.0));
    }
}
