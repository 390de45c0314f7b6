//! Reduced electronic density matrix and the entanglement/coherence
//! scalars derived from it.
//!
//! For the pure two-channel molecular state the reduced electronic density
//! in the ordered basis (g, e) is fully determined by the channel
//! populations and the vibrational overlap c = ⟨ψ_g|ψ_e⟩; the matrix
//! element ⟨g|ρ|e⟩ is c*.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::TwoChannelState;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("populations must sum to 1 within 1e-10, got p_g + p_e = {total}")]
    NotNormalized { total: f64 },
    #[error("population out of [0,1]: p_g = {p_g}, p_e = {p_e}")]
    NegativePopulation { p_g: f64, p_e: f64 },
    #[error("positivity violated: |c|² - p_g·p_e = {excess} > 1e-8 (propagation bug?)")]
    PositivityViolation { excess: f64 },
}

/// Reduced electronic density of the two-channel pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensity {
    pub p_g: f64,
    pub p_e: f64,
    /// Vibrational overlap c = ⟨ψ_g|ψ_e⟩ (so ⟨g|ρ|e⟩ = c*).
    pub overlap: Complex64,
}

impl ReducedDensity {
    pub fn new(p_g: f64, p_e: f64, overlap: Complex64) -> Result<Self, DensityError> {
        let total = p_g + p_e;
        if (total - 1.0).abs() > 1e-10 {
            return Err(DensityError::NotNormalized { total });
        }
        if p_g < -1e-12 || p_e < -1e-12 {
            return Err(DensityError::NegativePopulation { p_g, p_e });
        }
        let excess = overlap.norm_sqr() - p_g * p_e;
        if excess > 1e-8 {
            return Err(DensityError::PositivityViolation { excess });
        }
        Ok(Self { p_g, p_e, overlap })
    }

    /// Reduce a propagated state. The propagator conserves the total norm
    /// only to integrator tolerance, so the trace is renormalized here;
    /// drift beyond 1e-8 is treated as a propagation bug.
    pub fn from_state(state: &TwoChannelState) -> Result<Self, DensityError> {
        let p_g = state.population_g();
        let p_e = state.population_e();
        let total = p_g + p_e;
        if (total - 1.0).abs() > 1e-8 {
            return Err(DensityError::NotNormalized { total });
        }
        Self::new(p_g / total, p_e / total, state.overlap() / total)
    }

    /// Explicit 2×2 matrix in the ordered basis (g, e).
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.p_g, 0.0), self.overlap.conj()],
            [self.overlap, Complex64::new(self.p_e, 0.0)],
        ]
    }

    /// Tr ρ² computed from the closed form.
    pub fn purity(&self) -> f64 {
        self.p_g * self.p_g + self.p_e * self.p_e + 2.0 * self.overlap.norm_sqr()
    }

    /// Tr ρ² computed by explicit 2×2 matrix multiplication; a second route
    /// for cross-checking the closed form.
    pub fn purity_by_matrix(&self) -> f64 {
        let m = self.matrix();
        let mut tr = Complex64::ZERO;
        for (i, row) in m.iter().enumerate() {
            for (k, entry) in row.iter().enumerate() {
                tr += entry * m[k][i];
            }
        }
        tr.re
    }

    pub fn population_product(&self) -> f64 {
        self.p_g * self.p_e
    }
}

/// Entanglement and coherence scalars of one electronic density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationScalars {
    /// Linear entropy L = 1 - Tr ρ² = 2 p_g p_e - 2|c|².
    pub linear_entropy: f64,
    /// Von Neumann entropy in bits.
    pub von_neumann: f64,
    /// l1-norm coherence, 2|c| for two channels.
    pub l1_coherence: f64,
    /// Time factor of the skew information, |c|²/(1 + √(2L)).
    pub skew_factor: f64,
    /// Population product p_g·p_e.
    pub population_product: f64,
}

fn xlog2(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

pub fn correlation_scalars(rho: &ReducedDensity) -> CorrelationScalars {
    let pgpe = rho.population_product();
    let ov2 = rho.overlap.norm_sqr();
    // round-off can push the analytic value 2(p_g p_e - |c|²) ≥ 0 slightly
    // below zero for separable states
    let linear_entropy = (2.0 * pgpe - 2.0 * ov2).max(0.0);
    CorrelationScalars {
        linear_entropy,
        von_neumann: -xlog2(rho.p_g) - xlog2(rho.p_e),
        l1_coherence: 2.0 * rho.overlap.norm(),
        skew_factor: ov2 / (1.0 + (2.0 * linear_entropy).sqrt()),
        population_product: pgpe,
    }
}

/// The time-dependent factor p_g·p_e of the electronic-energy uncertainty;
/// the (V_g - V_e)² profile multiplies it pointwise in R.
pub fn energy_uncertainty_factor(rho: &ReducedDensity) -> f64 {
    rho.population_product()
}
