//! Pulse envelopes and the laser coupling between the electronic channels.
//!
//! The coupling is W(R,t) = W_L · e(t): R-independent strength times a
//! trapezoid-like envelope with linear or sine-squared ramps. e(t) is 0
//! outside its support, 1 on the plateau, and continuous.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PulseError {
    #[error("envelope durations must be finite and nonnegative")]
    InvalidDurations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RampShape {
    Linear,
    SineSquared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseEnvelope {
    pub t_start: f64,
    pub t_rise: f64,
    pub t_plateau: f64,
    pub t_fall: f64,
    pub shape: RampShape,
}

impl PulseEnvelope {
    pub fn new(
        t_start: f64,
        t_rise: f64,
        t_plateau: f64,
        t_fall: f64,
        shape: RampShape,
    ) -> Result<Self, PulseError> {
        let ok = t_start.is_finite()
            && [t_rise, t_plateau, t_fall]
                .iter()
                .all(|d| d.is_finite() && *d >= 0.0);
        if !ok {
            return Err(PulseError::InvalidDurations);
        }
        Ok(Self {
            t_start,
            t_rise,
            t_plateau,
            t_fall,
            shape,
        })
    }

    /// Envelope that is simply on over [t_start, t_start + duration].
    pub fn constant_on(t_start: f64, duration: f64) -> Self {
        Self {
            t_start,
            t_rise: 0.0,
            t_plateau: duration,
            t_fall: 0.0,
            shape: RampShape::Linear,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (
            self.t_start,
            self.t_start + self.t_rise + self.t_plateau + self.t_fall,
        )
    }

    fn ramp(&self, s: f64) -> f64 {
        match self.shape {
            RampShape::Linear => s,
            RampShape::SineSquared => {
                let x = (std::f64::consts::FRAC_PI_2 * s).sin();
                x * x
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let u = t - self.t_start;
        let total = self.t_rise + self.t_plateau + self.t_fall;
        if u <= 0.0 || u >= total {
            // zero-length ramps make the support edges part of the plateau
            if u == 0.0 && self.t_rise == 0.0 && total > 0.0 {
                return 1.0;
            }
            if u == total && self.t_fall == 0.0 && total > 0.0 {
                return 1.0;
            }
            return 0.0;
        }
        if u < self.t_rise {
            return self.ramp(u / self.t_rise);
        }
        if u <= self.t_rise + self.t_plateau {
            return 1.0;
        }
        self.ramp((total - u) / self.t_fall)
    }
}

/// R-independent coupling W_L·e(t) between the two electronic channels.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    /// Peak strength W_L in hartree.
    pub strength: f64,
    pub envelope: PulseEnvelope,
}

impl CouplingSpec {
    pub fn new(strength: f64, envelope: PulseEnvelope) -> Self {
        Self { strength, envelope }
    }

    pub fn off() -> Self {
        Self {
            strength: 0.0,
            envelope: PulseEnvelope::constant_on(0.0, 0.0),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.strength * self.envelope.value(t)
    }
}
