//! Decoherence matrix of the time-local electronic master equation and the
//! canonical decoherence rates obtained as its eigenvalues.
//!
//! In the Pauli basis (σ₁, σ₂, σ₃) over the ordered electronic basis
//! (g, e), the matrix is block diagonal: a 2×2 Hermitian block over
//! (σ₁, σ₂) plus a decoupled σ₃ entry, with D₁₃ = D₂₃ = 0 exactly. The
//! rates have a closed form; the numeric eigendecomposition of the
//! constructed matrix is kept as an independent cross-check route.

use nalgebra::{Matrix6, SymmetricEigen};
use num_complex::Complex64;

use super::{GuardError, Guards};
use crate::observables::ReducedDensity;
use crate::propagate::DerivativePair;

/// 3×3 Hermitian decoherence matrix in units of 1/time.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceMatrix {
    m: [[Complex64; 3]; 3],
}

impl DecoherenceMatrix {
    /// Assemble the matrix from one density sample and its analytic
    /// derivative pair (ħ = 1).
    pub fn from_density(
        rho: &ReducedDensity,
        deriv: &DerivativePair,
        guards: Guards,
    ) -> Result<Self, GuardError> {
        guards.check(rho)?;
        let p = deriv.dpg_dt();
        let (pg, pe) = (rho.p_g, rho.p_e);
        let c = rho.overlap;
        let b_over_c = deriv.b / c;

        // Diagonal entries are real by the structure of the master
        // equation; assembling them as reals keeps D Hermitian to the bit.
        let pop_rate = 0.5 * p * (1.0 / pe - 1.0 / pg);
        let d11 = pop_rate + b_over_c.im;
        let d22 = pop_rate - b_over_c.im;
        let d12 = Complex64::new(-b_over_c.re, 0.5 * p * (1.0 / pe + 1.0 / pg));
        let d33 = 0.5 * p * (pg - pe) * (1.0 / c.norm_sqr() - 1.0 / (pg * pe));

        let z = Complex64::ZERO;
        Ok(Self {
            m: [
                [Complex64::new(d11, 0.0), d12, z],
                [d12.conj(), Complex64::new(d22, 0.0), z],
                [z, z, Complex64::new(d33, 0.0)],
            ],
        })
    }

    pub fn entries(&self) -> &[[Complex64; 3]; 3] {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }

    pub fn trace(&self) -> f64 {
        (self.m[0][0] + self.m[1][1] + self.m[2][2]).re
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues by a dense numeric route, ascending.
    ///
    /// The Hermitian matrix X + iY is embedded as the real symmetric 6×6
    /// [[X, -Y], [Y, X]], whose spectrum is the doubled spectrum of the
    /// original; this keeps the check independent of the closed-form rates.
    pub fn numeric_eigenvalues(&self) -> [f64; 3] {
        let mut e = Matrix6::<f64>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let z = self.m[i][j];
                e[(i, j)] = z.re;
                e[(i + 3, j + 3)] = z.re;
                e[(i, j + 3)] = -z.im;
                e[(i + 3, j)] = z.im;
            }
        }
        let eig = SymmetricEigen::new(e);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        [vals[0], vals[2], vals[4]]
    }
}

/// Canonical decoherence rates, eigenvalues of the decoherence matrix.
///
/// γ₁ is always positive and γ₂ always negative on guard-valid samples;
/// the sign of γ₃ is opposite to the non-Markovianity factor d(P_gP_e)/dt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalRates {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub valid: bool,
    pub guard_report: Option<super::GuardTrip>,
    r_squared: Option<f64>,
}

impl CanonicalRates {
    /// Closed-form evaluation from one density sample and its derivatives.
    pub fn evaluate(
        rho: &ReducedDensity,
        deriv: &DerivativePair,
        guards: Guards,
    ) -> Result<Self, GuardError> {
        guards.check(rho)?;
        let p = deriv.dpg_dt();
        let (pg, pe) = (rho.p_g, rho.p_e);
        let c_sq = rho.overlap.norm_sqr();
        let dc_sq = deriv.b.norm_sqr(); // |d⟨ψ_g|ψ_e⟩/dt|² = |B|² at ħ = 1

        let half_inv = 0.5 * p / (pg * pe);
        let first = half_inv * (pg - pe);
        let disc = (half_inv * half_inv + dc_sq / c_sq).sqrt();
        let gamma3 = 0.5 * p * (pg - pe) * (1.0 / c_sq - 1.0 / (pg * pe));

        let r_squared = (p != 0.0).then(|| 4.0 * pg * pg * pe * pe * dc_sq / (p * p * c_sq));

        Ok(Self {
            gamma1: first + disc,
            gamma2: first - disc,
            gamma3,
            valid: true,
            guard_report: None,
            r_squared,
        })
    }

    /// Placeholder for a guard-failed sample.
    pub fn invalid(trip: super::GuardTrip) -> Self {
        Self {
            gamma1: f64::NAN,
            gamma2: f64::NAN,
            gamma3: f64::NAN,
            valid: false,
            guard_report: Some(trip),
            r_squared: None,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.gamma1, self.gamma2, self.gamma3]
    }

    pub fn rate_sum(&self) -> f64 {
        self.gamma1 + self.gamma2 + self.gamma3
    }

    /// The dimensionless ratio entering the rate discriminant,
    /// 4 P_g²P_e² |dc/dt|² / ((dP_g/dt)² |c|²); undefined when dP_g/dt = 0.
    pub fn r_squared(&self) -> Option<f64> {
        self.r_squared
    }

    pub fn sorted_ascending(&self) -> [f64; 3] {
        let mut v = self.as_array();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Trace of the decoherence matrix in closed form,
/// ½ (dP_g/dt)(P_g-P_e)[1/(P_gP_e) + 1/|c|²].
pub fn rate_sum_closed_form(rho: &ReducedDensity, deriv: &DerivativePair) -> f64 {
    let p = deriv.dpg_dt();
    0.5 * p * (rho.p_g - rho.p_e) * (1.0 / (rho.p_g * rho.p_e) + 1.0 / rho.overlap.norm_sqr())
}

/// The non-Markovianity factor d(P_gP_e)/dt = -(dP_g/dt)(P_g-P_e).
///
/// A positive value marks enhanced non-Markovian behavior: two negative
/// canonical rates and a growing Bloch volume.
pub fn nonmarkov_factor(rho: &ReducedDensity, deriv: &DerivativePair) -> f64 {
    -deriv.dpg_dt() * (rho.p_g - rho.p_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonmarkov::GuardTrip;
    use proptest::prelude::*;

    fn density(pg: f64, c: Complex64) -> ReducedDensity {
        ReducedDensity::new(pg, 1.0 - pg, c).unwrap()
    }

    fn derivs(dpg_dt: f64, b: Complex64) -> DerivativePair {
        DerivativePair {
            a: Complex64::new(0.0, dpg_dt),
            b,
        }
    }

    /// The worked sample used across this module:
    /// p_g = 3/4, p_e = 1/4, dP_g/dt = -0.1, |c| = 0.3, |dc/dt| = 0.06.
    fn worked_case() -> (ReducedDensity, DerivativePair) {
        (
            density(0.75, Complex64::new(0.3, 0.0)),
            derivs(-0.1, Complex64::new(0.0, 0.06)),
        )
    }

    #[test]
    fn closed_form_rates_match_hand_values() {
        let (rho, dv) = worked_case();
        let r = CanonicalRates::evaluate(&rho, &dv, Guards::default()).unwrap();
        assert!((r.gamma1 - 0.2).abs() < 1e-12);
        assert!((r.gamma2 - (-7.0 / 15.0)).abs() < 1e-12);
        assert!((r.gamma3 - (-13.0 / 90.0)).abs() < 1e-12);
        assert!((r.rate_sum() - (-37.0 / 90.0)).abs() < 1e-12);
        assert!((rate_sum_closed_form(&rho, &dv) - (-37.0 / 90.0)).abs() < 1e-12);
    }

    #[test]
    fn population_growth_flips_signs() {
        let rho = density(0.75, Complex64::new(0.3, 0.0));
        let dv = derivs(0.1, Complex64::new(0.06, 0.0));
        let r = CanonicalRates::evaluate(&rho, &dv, Guards::default()).unwrap();
        assert!((r.gamma1 - 7.0 / 15.0).abs() < 1e-12);
        assert!((r.gamma2 - (-0.2)).abs() < 1e-12);
        assert!((r.gamma3 - 13.0 / 90.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_populations_limit() {
        // dP_g/dt = 0: γ₁,₂ = ±|dc/dt|/|c| and γ₃ = 0.
        let rho = density(0.5, Complex64::new(0.4, 0.0));
        let dv = derivs(0.0, Complex64::new(0.0, 0.2));
        let r = CanonicalRates::evaluate(&rho, &dv, Guards::default()).unwrap();
        assert!((r.gamma1 - 0.5).abs() < 1e-12);
        assert!((r.gamma2 + 0.5).abs() < 1e-12);
        assert_eq!(r.gamma3, 0.0);
        assert_eq!(r.r_squared(), None);
    }

    #[test]
    fn matrix_entry_d33_hand_value() {
        let (rho, dv) = worked_case();
        let d = DecoherenceMatrix::from_density(&rho, &dv, Guards::default()).unwrap();
        assert!((d.entry(2, 2).re - (-13.0 / 90.0)).abs() < 1e-12);
    }

    #[test]
    fn static_state_gives_zero_matrix() {
        let rho = density(0.6, Complex64::new(0.2, 0.1));
        let dv = derivs(0.0, Complex64::ZERO);
        let d = DecoherenceMatrix::from_density(&rho, &dv, Guards::default()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d.entry(i, j), Complex64::ZERO);
            }
        }
    }

    #[test]
    fn matrix_matches_raw_complex_assembly() {
        // Assemble the entries from the unreduced complex expressions with
        // A = i dP_g/dt and compare against the real-form construction.
        let (rho, dv) = worked_case();
        let dv = DerivativePair {
            a: dv.a,
            b: Complex64::new(0.031, -0.051),
        };
        let d = DecoherenceMatrix::from_density(&rho, &dv, Guards::default()).unwrap();

        let a = dv.a;
        let b = dv.b;
        let c = rho.overlap;
        let two_i = Complex64::new(0.0, 2.0);
        let raw11 = (a / rho.p_e - a / rho.p_g + b / c - b.conj() / c.conj()) / two_i;
        let raw12 = (a / rho.p_e + a / rho.p_g - b / c - b.conj() / c.conj()) / 2.0;
        let raw22 = (a / rho.p_e - a / rho.p_g - b / c + b.conj() / c.conj()) / two_i;
        let raw33 = -Complex64::i() * a / 2.0
            * (rho.p_g - rho.p_e)
            * (1.0 / c.norm_sqr() - 1.0 / (rho.p_g * rho.p_e));

        assert!((d.entry(0, 0) - raw11).norm() < 1e-14);
        assert!((d.entry(0, 1) - raw12).norm() < 1e-14);
        assert!((d.entry(1, 1) - raw22).norm() < 1e-14);
        assert!((d.entry(2, 2) - raw33).norm() < 1e-14);
        assert_eq!(d.entry(0, 2), Complex64::ZERO);
        assert_eq!(d.entry(1, 2), Complex64::ZERO);
    }

    #[test]
    fn guard_failures_name_the_threshold() {
        let g = Guards::default();
        let dv = derivs(0.0, Complex64::ZERO);
        let rho = density(1e-9, Complex64::ZERO);
        assert_eq!(
            DecoherenceMatrix::from_density(&rho, &dv, g)
                .unwrap_err()
                .trip,
            GuardTrip::PopulationG
        );
        let rho = density(1.0 - 1e-9, Complex64::ZERO);
        assert_eq!(
            CanonicalRates::evaluate(&rho, &dv, g).unwrap_err().trip,
            GuardTrip::PopulationE
        );
        let rho = density(0.5, Complex64::new(1e-8, 0.0));
        assert_eq!(
            CanonicalRates::evaluate(&rho, &dv, g).unwrap_err().trip,
            GuardTrip::Overlap
        );
    }

    #[test]
    fn balanced_populations_limit() {
        // P_g = P_e: γ₃ = 0, γ₂ = -γ₁, Σγ = 0
        for imbalance in [0.0, 5e-10, -1e-9] {
            let rho = density(0.5 + imbalance, Complex64::new(0.11, -0.09));
            let dv = derivs(0.07, Complex64::new(0.02, 0.01));
            let r = CanonicalRates::evaluate(&rho, &dv, Guards::default()).unwrap();
            assert!((r.gamma2 + r.gamma1).abs() <= 1e-6 * r.gamma1.abs());
            assert!(r.gamma3.abs() <= 1e-6 * r.gamma1.abs());
            assert!(r.rate_sum().abs() <= 1e-8);
        }
    }

    /// The per-case closed forms written through the discriminant ratio
    /// r²: one negative rate gives f = |γ₂| with
    /// f = |p|/(2P_gP_e)·[√(1+r²) - |P_g-P_e|]; two negative rates add
    /// |γ₃| = (d(P_gP_e)/dt)·L/C² / (P_gP_e) on top of the mirrored form.
    #[test]
    fn case_formulas_match_the_measure() {
        use crate::nonmarkov::sample::NonMarkovPoint;
        use crate::observables::correlation_scalars;

        let cases = [
            (0.75, 0.3, -0.1, 0.06), // factor > 0: two negative rates
            (0.75, 0.3, 0.1, 0.06),  // factor < 0: one negative rate
            (0.35, 0.22, -0.04, 0.015),
        ];
        for (pg, c_mag, p, dc) in cases {
            let rho = density(pg, Complex64::new(c_mag, 0.0));
            let dv = derivs(p, Complex64::new(0.0, dc));
            let r = CanonicalRates::evaluate(&rho, &dv, Guards::default()).unwrap();
            let nm = nonmarkov_factor(&rho, &dv);
            let point = NonMarkovPoint::from_rates(&r, nm, p, 1e-12);

            let pgpe = pg * (1.0 - pg);
            let root = (1.0 + r.r_squared().unwrap()).sqrt();
            let pop_gap = (2.0 * pg - 1.0f64).abs();
            let prefactor = p.abs() / (2.0 * pgpe);
            let closed = if nm > 0.0 {
                let scalars = correlation_scalars(&rho);
                prefactor * (pop_gap + root)
                    + nm / pgpe * scalars.linear_entropy
                        / (scalars.l1_coherence * scalars.l1_coherence)
            } else {
                prefactor * (root - pop_gap)
            };
            assert!(
                (point.f - closed).abs() <= 1e-8 * closed,
                "pg={pg}: measure {} vs closed form {closed}",
                point.f
            );
        }
    }

    proptest! {
        /// Over random guard-valid samples: Hermiticity, sign laws, trace
        /// identity, and closed-form vs numeric eigenvalue agreement.
        #[test]
        fn rate_laws_on_random_samples(
            pg in 0.02f64..0.98,
            s in 0.05f64..0.95,
            phase in 0.0f64..std::f64::consts::TAU,
            p in -0.5f64..0.5,
            bre in -0.3f64..0.3,
            bim in -0.3f64..0.3,
        ) {
            let pe = 1.0 - pg;
            let c = Complex64::from_polar(s * (pg * pe).sqrt(), phase);
            let rho = ReducedDensity::new(pg, pe, c).unwrap();
            let dv = derivs(p, Complex64::new(bre, bim));
            let guards = Guards::default();

            let d = DecoherenceMatrix::from_density(&rho, &dv, guards).unwrap();
            prop_assert!(d.max_hermiticity_defect() <= 1e-12);

            let r = CanonicalRates::evaluate(&rho, &dv, guards).unwrap();
            let scale = r.as_array().iter().fold(1.0f64, |m, g| m.max(g.abs()));
            // trace identity between the matrix and the closed-form rates
            prop_assert!((d.trace() - r.rate_sum()).abs() <= 1e-10 * scale.max(1.0));
            prop_assert!(
                (rate_sum_closed_form(&rho, &dv) - r.rate_sum()).abs() <= 1e-10 * scale.max(1.0)
            );

            // sign laws
            if dv.b.norm() > 0.0 {
                prop_assert!(r.gamma1 > 0.0);
                prop_assert!(r.gamma2 < 0.0);
            }
            let nm = nonmarkov_factor(&rho, &dv);
            if nm.abs() > 1e-12 {
                prop_assert!(r.gamma3 * nm <= 0.0);
            }

            // closed form vs dense numeric eigenvalues
            let numeric = d.numeric_eigenvalues();
            let closed = r.sorted_ascending();
            for (n, c) in numeric.iter().zip(closed) {
                prop_assert!(
                    (n - c).abs() <= 1e-8 * scale.max(1e-12),
                    "numeric {} vs closed {}", n, c
                );
            }
        }
    }
}
