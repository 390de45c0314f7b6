//! Spectral application of the kinetic-energy operator.
//!
//! T = -1/(2m) d²/dR² is diagonal in the momentum grid: forward transform,
//! multiply by k²/(2m), inverse transform. The transform pair here is
//! normalized so that a round trip is the identity.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{GridError, SpatialGrid, WaveFunction};

/// FFT plans bound to one grid, reused across many applications.
pub struct SpectralOp {
    grid: Arc<SpatialGrid>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralOp {
    pub fn new(grid: Arc<SpatialGrid>) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n_points);
        let inverse = planner.plan_fft_inverse(grid.n_points);
        Self {
            grid,
            forward,
            inverse,
        }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse transform including the 1/n normalization, in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let s = 1.0 / data.len() as f64;
        for z in data.iter_mut() {
            *z *= s;
        }
    }

    /// Inverse transform without the 1/n factor, for callers that fold the
    /// normalization into their momentum-space multipliers.
    pub fn inverse_unnormalized(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
    }

    /// Kinetic energies k²/(2m) in transform ordering.
    pub fn kinetic_energies(&self, mass: f64) -> Result<Vec<f64>, GridError> {
        if mass <= 0.0 || mass.is_nan() {
            return Err(GridError::InvalidMass { mass });
        }
        Ok(self
            .grid
            .k_values()
            .iter()
            .map(|k| k * k / (2.0 * mass))
            .collect())
    }

    /// Apply T to a wave function on this grid.
    pub fn apply_kinetic(&self, psi: &WaveFunction, mass: f64) -> Result<WaveFunction, GridError> {
        if *psi.grid() != self.grid {
            return Err(GridError::GridMismatch);
        }
        let kin = self.kinetic_energies(mass)?;
        let mut buf = psi.amplitudes().to_vec();
        self.forward(&mut buf);
        for (z, e) in buf.iter_mut().zip(&kin) {
            *z *= *e;
        }
        self.inverse(&mut buf);
        WaveFunction::new(self.grid.clone(), buf)
    }
}

/// One-shot convenience wrapper around [`SpectralOp::apply_kinetic`].
pub fn apply_kinetic(psi: &WaveFunction, mass: f64) -> Result<WaveFunction, GridError> {
    SpectralOp::new(psi.grid().clone()).apply_kinetic(psi, mass)
}
