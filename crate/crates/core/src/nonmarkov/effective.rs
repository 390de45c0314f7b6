//! Hermitian generator of the unitary part of the electronic master
//! equation, expressed through the coupling matrix element and the
//! vibrational overlap.

use num_complex::Complex64;

use super::{GuardError, GuardTrip};
use crate::observables::ReducedDensity;

/// Effective electronic Hamiltonian H(t) in the ordered basis (g, e):
/// diagonal -P_{g,e}·Re(w_ge)/|c|², off-diagonal -w_ge/c, where
/// w_ge = ⟨ψ_g|W|ψ_e⟩ and c = ⟨ψ_g|ψ_e⟩.
pub fn effective_hamiltonian(
    rho: &ReducedDensity,
    w_ge: Complex64,
    eps_overlap: f64,
) -> Result<[[Complex64; 2]; 2], GuardError> {
    let c = rho.overlap;
    if c.norm() <= eps_overlap {
        return Err(GuardError {
            trip: GuardTrip::Overlap,
        });
    }
    let c_sq = c.norm_sqr();
    let h11 = Complex64::new(-rho.p_g * w_ge.re / c_sq, 0.0);
    let h22 = Complex64::new(-rho.p_e * w_ge.re / c_sq, 0.0);
    let h12 = -w_ge / c;
    Ok([[h11, h12], [h12.conj(), h22]])
}
