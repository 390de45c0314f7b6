//! Trace distance between two reduced electronic states and the
//! term-decomposed rate of change along a trajectory.
//!
//! For 2×2 densities with equal traces the trace distance has the closed
//! form D = √[(ΔP_g)² + |ΔC|²] with C the complex overlap; D·dD/dt splits
//! into a population term, a coherence-magnitude term, and two phase
//! cross terms with the reference state.

use num_complex::Complex64;

use crate::observables::ReducedDensity;

/// Distinguishability of two reduced electronic states, in [0, 1].
pub fn trace_distance(a: &ReducedDensity, b: &ReducedDensity) -> f64 {
    let dp = a.p_g - b.p_g;
    let dc = a.overlap - b.overlap;
    (dp * dp + dc.norm_sqr()).sqrt()
}

/// One trajectory sample carrying the analytic derivatives needed for the
/// rate-of-change decomposition.
#[derive(Debug, Clone, Copy)]
pub struct DensitySample {
    pub time: f64,
    pub rho: ReducedDensity,
    /// dP_g/dt at this sample.
    pub dpg_dt: f64,
    /// d⟨ψ_g|ψ_e⟩/dt at this sample.
    pub overlap_rate: Complex64,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceDistancePoint {
    pub time: f64,
    pub distance: f64,
    /// dD/dt; None where D = 0 (the derivative is not defined there).
    pub ddt: Option<f64>,
    /// The four terms of D·dD/dt: population, coherence magnitude, and the
    /// two reference cross terms. None where the local phase is undefined.
    pub terms: Option<[f64; 4]>,
    /// Overlap phase, unwrapped along the series.
    pub alpha: f64,
}

/// Trace distance from a fixed reference state along a series, with the
/// rate of change decomposed term by term.
pub fn trace_distance_series(
    reference: &ReducedDensity,
    series: &[DensitySample],
) -> Vec<TraceDistancePoint> {
    let c0 = reference.overlap;
    let c0_mag = c0.norm();
    let alpha0 = if c0_mag > 0.0 { c0.arg() } else { 0.0 };

    let mut alpha_prev: Option<f64> = None;
    series
        .iter()
        .map(|s| {
            let c = s.rho.overlap;
            let c_mag = c.norm();
            let alpha = match (c_mag > 0.0, alpha_prev) {
                (true, None) => c.arg(),
                (true, Some(prev)) => prev + wrap_angle(c.arg() - prev),
                (false, Some(prev)) => prev,
                (false, None) => 0.0,
            };
            alpha_prev = Some(alpha);

            let distance = trace_distance(&s.rho, reference);
            // Stable form: D dD/dt = ΔP_g·dP_g/dt + Re[(C-C0)* dC/dt].
            let d_ddt =
                (s.rho.p_g - reference.p_g) * s.dpg_dt + ((c - c0).conj() * s.overlap_rate).re;
            let ddt = (distance > 0.0).then(|| d_ddt / distance);

            let terms = (c_mag > 1e-300).then(|| {
                let dmag = (c.conj() * s.overlap_rate).re / c_mag;
                let dalpha = (c.conj() * s.overlap_rate).im / (c_mag * c_mag);
                let rel = alpha0 - alpha;
                [
                    (s.rho.p_g - reference.p_g) * s.dpg_dt,
                    c_mag * dmag,
                    -c0_mag * dmag * rel.cos(),
                    -c0_mag * c_mag * rel.sin() * dalpha,
                ]
            });

            TraceDistancePoint {
                time: s.time,
                distance,
                ddt,
                terms,
                alpha,
            }
        })
        .collect()
}

/// Wrap an angle difference to (-π, π].
pub(crate) fn wrap_angle(d: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut x = d % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}
