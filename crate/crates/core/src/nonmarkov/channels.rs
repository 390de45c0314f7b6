//! Canonical decoherence channels: the unitary eigenvector matrix of the
//! decoherence matrix and the traceless decoherence operators it defines.

use num_complex::Complex64;
use thiserror::Error;

use super::rates::{CanonicalRates, DecoherenceMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("γ₁ and γ₂ are degenerate (|Δ| = {gap:e}); eigenvectors are not unique")]
    DegenerateRates { gap: f64 },
    #[error("rates are flagged invalid")]
    InvalidRates,
}

/// One decoherence operator as coefficients over the Pauli set:
/// L = c₁σ₁ + c₂σ₂ + c₃σ₃ (traceless by construction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceOp {
    pub sigma1: Complex64,
    pub sigma2: Complex64,
    pub sigma3: Complex64,
}

impl DecoherenceOp {
    /// Explicit 2×2 matrix over the ordered basis (g, e), with
    /// σ₁ = |e⟩⟨g|+|g⟩⟨e|, σ₂ = -i|e⟩⟨g|+i|g⟩⟨e|, σ₃ = |e⟩⟨e|-|g⟩⟨g|.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let i = Complex64::i();
        [
            [-self.sigma3, self.sigma1 + i * self.sigma2],
            [self.sigma1 - i * self.sigma2, self.sigma3],
        ]
    }

    /// Hilbert-Schmidt inner product Tr[self† other].
    pub fn hs_inner(&self, other: &DecoherenceOp) -> Complex64 {
        2.0 * (self.sigma1.conj() * other.sigma1
            + self.sigma2.conj() * other.sigma2
            + self.sigma3.conj() * other.sigma3)
    }
}

/// Eigenvector matrix of the decoherence matrix plus the decoherence
/// operators of the canonical master-equation form.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalChannels {
    pub u: [[Complex64; 3]; 3],
    pub n1: f64,
    pub n2: f64,
    pub ops: [DecoherenceOp; 3],
}

impl CanonicalChannels {
    pub fn from_matrix(
        matrix: &DecoherenceMatrix,
        rates: &CanonicalRates,
    ) -> Result<Self, ChannelError> {
        if !rates.valid {
            return Err(ChannelError::InvalidRates);
        }
        let gap = (rates.gamma1 - rates.gamma2).abs();
        if gap < 1e-12 {
            return Err(ChannelError::DegenerateRates { gap });
        }
        let d11 = matrix.entry(0, 0).re;
        let d22 = matrix.entry(1, 1).re;
        let d12 = matrix.entry(0, 1);
        let denom = rates.gamma1 - rates.gamma2;
        let n1 = ((rates.gamma1 - d22) / denom).max(0.0).sqrt();
        let n2 = ((d22 - rates.gamma2) / denom).max(0.0).sqrt();

        // Second eigenvector components; an exactly diagonal block needs the
        // 0/0 ratio resolved by hand.
        let (r1, r2) = if d12 == Complex64::ZERO {
            if d11 >= d22 {
                (Complex64::ZERO, Complex64::ONE)
            } else {
                (Complex64::ONE, Complex64::ZERO)
            }
        } else {
            ((rates.gamma1 - d11) / d12, (rates.gamma2 - d11) / d12)
        };

        let z = Complex64::ZERO;
        let one = Complex64::ONE;
        let u = [[n1 * one, n2 * one, z], [n1 * r1, n2 * r2, z], [z, z, one]];

        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let ops = [0, 1, 2].map(|k| DecoherenceOp {
            sigma1: u[0][k] * inv_sqrt2,
            sigma2: u[1][k] * inv_sqrt2,
            sigma3: u[2][k] * inv_sqrt2,
        });

        Ok(Self { u, n1, n2, ops })
    }

    /// Rebuild U diag(γ) U† for reconstruction checks.
    pub fn reconstruct(&self, rates: &CanonicalRates) -> [[Complex64; 3]; 3] {
        let g = rates.as_array();
        let mut out = [[Complex64::ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for (k, gk) in g.iter().enumerate() {
                    *cell += self.u[i][k] * *gk * self.u[j][k].conj();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonmarkov::Guards;
    use crate::observables::ReducedDensity;
    use crate::propagate::DerivativePair;

    fn channels_for(
        pg: f64,
        c: Complex64,
        p: f64,
        b: Complex64,
    ) -> (DecoherenceMatrix, CanonicalRates, CanonicalChannels) {
        let rho = ReducedDensity::new(pg, 1.0 - pg, c).unwrap();
        let dv = DerivativePair {
            a: Complex64::new(0.0, p),
            b,
        };
        let d = DecoherenceMatrix::from_density(&rho, &dv, Guards::default()).unwrap();
        let r = CanonicalRates::evaluate(&rho, &dv, Guards::default()).unwrap();
        let ch = CanonicalChannels::from_matrix(&d, &r).unwrap();
        (d, r, ch)
    }

    #[test]
    fn normalization_and_orthonormal_operators() {
        let (_, _, ch) = channels_for(
            0.75,
            Complex64::new(0.21, -0.18),
            -0.1,
            Complex64::new(0.05, 0.033),
        );
        assert!((ch.n1 * ch.n1 + ch.n2 * ch.n2 - 1.0).abs() < 1e-12);
        for j in 0..3 {
            for k in 0..3 {
                let ip = ch.ops[j].hs_inner(&ch.ops[k]);
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (ip - expect).norm() < 1e-10,
                    "Tr[L{j}† L{k}] = {ip}, want {expect}"
                );
            }
        }
        // L₃ = σ₃/√2 exactly
        assert_eq!(ch.ops[2].sigma1, Complex64::ZERO);
        assert_eq!(ch.ops[2].sigma2, Complex64::ZERO);
        assert!((ch.ops[2].sigma3.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        // and each operator is traceless as a matrix
        for op in &ch.ops {
            let m = op.matrix();
            assert!((m[0][0] + m[1][1]).norm() < 1e-15);
        }
    }

    #[test]
    fn reconstruction_recovers_the_matrix() {
        let (d, r, ch) = channels_for(
            0.75,
            Complex64::new(0.3, 0.0),
            -0.1,
            Complex64::new(0.0, 0.06),
        );
        assert!((r.gamma1 - 0.2).abs() < 1e-12);
        let rec = ch.reconstruct(&r);
        for (i, row) in rec.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                assert!(
                    (entry - d.entry(i, j)).norm() < 1e-10,
                    "mismatch at ({i},{j}): {} vs {}",
                    entry,
                    d.entry(i, j)
                );
            }
        }
    }

    #[test]
    fn near_diagonal_block_approaches_identity_columns() {
        // d12 -> 0 with d11 > d22: U block tends to the identity.
        let (_, _, ch) = channels_for(
            0.4,
            Complex64::new(0.25, 0.0),
            2e-6,
            Complex64::new(1e-9, 2.4e-4),
        );
        assert!(ch.u[0][0].norm() > 0.999, "u00 = {}", ch.u[0][0]);
        assert!(ch.u[1][1].norm() > 0.999, "u11 = {}", ch.u[1][1]);
    }

    #[test]
    fn degenerate_rates_are_flagged_not_fabricated() {
        let rho = ReducedDensity::new(0.5, 0.5, Complex64::new(0.2, 0.0)).unwrap();
        let dv = DerivativePair {
            a: Complex64::ZERO,
            b: Complex64::ZERO,
        };
        let d = DecoherenceMatrix::from_density(&rho, &dv, Guards::default()).unwrap();
        let r = CanonicalRates::evaluate(&rho, &dv, Guards::default()).unwrap();
        assert!(matches!(
            CanonicalChannels::from_matrix(&d, &r),
            Err(ChannelError::DegenerateRates { .. })
        ));
    }
}
