//! Decoherence rates expressed through the entanglement and coherence
//! scalars, and the sign classifier linking entanglement trends, the
//! non-Markovianity factor, and the two electronic coherences.

use thiserror::Error;

use super::{GuardError, GuardTrip};
use crate::observables::CorrelationScalars;

/// Rate sum and γ₃ from the correlation scalars and d ln(P_gP_e)/dt:
/// Σγ = -d ln(P_gP_e)/dt · (L + C²)/C², γ₃ = -d ln(P_gP_e)/dt · L/C².
pub fn rates_from_entropies(
    scalars: &CorrelationScalars,
    d_ln_pgpe_dt: f64,
    eps_coherence: f64,
) -> Result<(f64, f64), GuardError> {
    let c = scalars.l1_coherence;
    if c <= eps_coherence {
        return Err(GuardError {
            trip: GuardTrip::Coherence,
        });
    }
    let c_sq = c * c;
    let l = scalars.linear_entropy;
    let rate_sum = -d_ln_pgpe_dt * (l + c_sq) / c_sq;
    let gamma3 = -d_ln_pgpe_dt * l / c_sq;
    Ok((rate_sum, gamma3))
}

/// Row of the sign table relating entanglement and non-Markovianity trends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendRow {
    /// dL/dt > 0, d(P_gP_e)/dt < 0: both coherences must fall.
    EntanglementUpNmDown,
    /// dL/dt > 0, d(P_gP_e)/dt > 0: conditional signs.
    BothUp,
    /// dL/dt < 0, d(P_gP_e)/dt > 0: both coherences must grow.
    EntanglementDownNmUp,
    /// dL/dt < 0, d(P_gP_e)/dt < 0: conditional signs.
    BothDown,
}

impl TrendRow {
    pub fn index(&self) -> u8 {
        match self {
            TrendRow::EntanglementUpNmDown => 1,
            TrendRow::BothUp => 2,
            TrendRow::EntanglementDownNmUp => 3,
            TrendRow::BothDown => 4,
        }
    }
}

/// Measured derivatives entering the classifier (finite differences at the
/// sampling stride).
#[derive(Debug, Clone, Copy)]
pub struct TrendInputs {
    pub d_linear_entropy: f64,
    pub d_population_product: f64,
    pub d_l1_coherence: f64,
    pub d_skew_factor: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrendError {
    #[error("derivative {which} below the noise floor; label indeterminate")]
    Indeterminate { which: &'static str },
    #[error("scalars out of the classifier domain: {what}")]
    OutOfDomain { what: &'static str },
}

/// Classifier verdict: the row, the signs it implies for the two
/// coherences, the margins of the threshold inequalities, and whether the
/// measured signs agree.
#[derive(Debug, Clone, Copy)]
pub struct TrendReport {
    pub row: TrendRow,
    /// Implied sign of dC_l1/dt (true = increasing).
    pub predicted_l1_up: bool,
    /// Implied sign of ∂I_S/∂t (true = increasing).
    pub predicted_skew_up: bool,
    /// d(P_gP_e)/dt - ½ dL/dt; its sign decides the l1 trend.
    pub l1_margin: f64,
    /// d(P_gP_e)/dt/(√(2L)+L+2P_gP_e) - dL/dt/(2√(2L)(1+√(2L))); its sign
    /// decides the skew-information trend.
    pub skew_margin: f64,
    pub l1_consistent: bool,
    pub skew_consistent: bool,
}

impl TrendReport {
    pub fn consistent(&self) -> bool {
        self.l1_consistent && self.skew_consistent
    }
}

/// Assign the sign-table row for one sample and verify the implied
/// coherence trends against the measured ones.
pub fn classify_trends(
    inputs: &TrendInputs,
    scalars: &CorrelationScalars,
    noise_floor: f64,
) -> Result<TrendReport, TrendError> {
    let checks = [
        (inputs.d_linear_entropy, "dL/dt"),
        (inputs.d_population_product, "d(PgPe)/dt"),
        (inputs.d_l1_coherence, "dC_l1/dt"),
        (inputs.d_skew_factor, "dI_S/dt"),
    ];
    for (v, name) in checks {
        if v.abs() < noise_floor {
            return Err(TrendError::Indeterminate { which: name });
        }
    }
    let l = scalars.linear_entropy;
    if l <= 0.0 {
        return Err(TrendError::OutOfDomain {
            what: "linear entropy is zero",
        });
    }

    let row = match (
        inputs.d_linear_entropy > 0.0,
        inputs.d_population_product > 0.0,
    ) {
        (true, false) => TrendRow::EntanglementUpNmDown,
        (true, true) => TrendRow::BothUp,
        (false, true) => TrendRow::EntanglementDownNmUp,
        (false, false) => TrendRow::BothDown,
    };

    // sign(dC_l1/dt) = sign(d(PgPe)/dt - ½ dL/dt): the derivative identity
    // d(PgPe)/dt = ½ dL/dt + ¼ d(C²)/dt resolved for the coherence term.
    let l1_margin = inputs.d_population_product - 0.5 * inputs.d_linear_entropy;

    // sign(dI_S/dt) from the corresponding threshold on d(PgPe)/dt.
    let sqrt2l = (2.0 * l).sqrt();
    let skew_margin = inputs.d_population_product / (sqrt2l + l + 2.0 * scalars.population_product)
        - inputs.d_linear_entropy / (2.0 * sqrt2l * (1.0 + sqrt2l));

    let predicted_l1_up = l1_margin > 0.0;
    let predicted_skew_up = skew_margin > 0.0;
    Ok(TrendReport {
        row,
        predicted_l1_up,
        predicted_skew_up,
        l1_margin,
        skew_margin,
        l1_consistent: predicted_l1_up == (inputs.d_l1_coherence > 0.0),
        skew_consistent: predicted_skew_up == (inputs.d_skew_factor > 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{correlation_scalars, ReducedDensity};
    use num_complex::Complex64;

    fn scalars(pg: f64, c_mag: f64) -> CorrelationScalars {
        let rho = ReducedDensity::new(pg, 1.0 - pg, Complex64::new(c_mag, 0.0)).unwrap();
        correlation_scalars(&rho)
    }

    #[test]
    fn entropy_form_matches_worked_rates() {
        // p_g = 0.75, |c| = 0.3, dP_g/dt = -0.1 gives
        // d ln(PgPe)/dt = 0.05/0.1875 and γ₃ = -13/90, Σγ = -37/90.
        let s = scalars(0.75, 0.3);
        let d_ln = 0.05 / 0.1875;
        let (rate_sum, gamma3) = rates_from_entropies(&s, d_ln, 1e-9).unwrap();
        assert!((gamma3 - (-13.0 / 90.0)).abs() < 1e-12, "gamma3 = {gamma3}");
        assert!(
            (rate_sum - (-37.0 / 90.0)).abs() < 1e-12,
            "rate_sum = {rate_sum}"
        );
    }

    #[test]
    fn separable_state_has_zero_gamma3() {
        // L = 0 when the overlap saturates Cauchy-Schwarz
        let pg: f64 = 0.6;
        let s = scalars(pg, (pg * (1.0 - pg)).sqrt());
        assert!(s.linear_entropy < 1e-14);
        let (_, gamma3) = rates_from_entropies(&s, 0.3, 1e-9).unwrap();
        assert!(gamma3.abs() < 1e-13);
    }

    #[test]
    fn stationary_product_gives_zero_sum() {
        let s = scalars(0.7, 0.2);
        let (rate_sum, gamma3) = rates_from_entropies(&s, 0.0, 1e-9).unwrap();
        assert_eq!(rate_sum, 0.0);
        assert_eq!(gamma3, 0.0);
    }

    #[test]
    fn coherence_guard_trips() {
        let s = scalars(0.5, 1e-8);
        assert_eq!(
            rates_from_entropies(&s, 0.1, 1e-6).unwrap_err().trip,
            GuardTrip::Coherence
        );
    }

    #[test]
    fn row1_predicts_falling_coherences() {
        let s = scalars(0.7, 0.2);
        let inputs = TrendInputs {
            d_linear_entropy: 0.2,
            d_population_product: -0.1,
            d_l1_coherence: -0.3,
            d_skew_factor: -0.05,
        };
        let rep = classify_trends(&inputs, &s, 1e-8).unwrap();
        assert_eq!(rep.row, TrendRow::EntanglementUpNmDown);
        assert!(!rep.predicted_l1_up && !rep.predicted_skew_up);
        assert!(rep.consistent());
    }

    #[test]
    fn row3_predicts_rising_coherences() {
        let s = scalars(0.7, 0.2);
        let inputs = TrendInputs {
            d_linear_entropy: -0.2,
            d_population_product: 0.1,
            d_l1_coherence: 0.3,
            d_skew_factor: 0.05,
        };
        let rep = classify_trends(&inputs, &s, 1e-8).unwrap();
        assert_eq!(rep.row, TrendRow::EntanglementDownNmUp);
        assert!(rep.predicted_l1_up && rep.predicted_skew_up);
        assert!(rep.consistent());
    }

    #[test]
    fn row2_threshold_decides_l1_sign() {
        let s = scalars(0.7, 0.2);
        // d(PgPe)/dt = 0.3 > ½·0.2 = 0.1 ⇒ dC_l1/dt predicted positive
        let inputs = TrendInputs {
            d_linear_entropy: 0.2,
            d_population_product: 0.3,
            d_l1_coherence: 0.4,
            d_skew_factor: 0.2,
        };
        let rep = classify_trends(&inputs, &s, 1e-8).unwrap();
        assert_eq!(rep.row, TrendRow::BothUp);
        assert!(rep.predicted_l1_up);
        assert!((rep.l1_margin - 0.2).abs() < 1e-15);
        assert!(rep.l1_consistent);
    }

    #[test]
    fn noise_floor_gives_indeterminate() {
        let s = scalars(0.7, 0.2);
        let inputs = TrendInputs {
            d_linear_entropy: 1e-12,
            d_population_product: 0.3,
            d_l1_coherence: 0.4,
            d_skew_factor: 0.2,
        };
        assert!(matches!(
            classify_trends(&inputs, &s, 1e-8),
            Err(TrendError::Indeterminate { which: "dL/dt" })
        ));
    }
}
