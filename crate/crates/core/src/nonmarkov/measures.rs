//! Interval measures over a sampled trajectory: the integrated amount of
//! non-Markovianity, the Bloch-volume ratio, and the after-pulse measure
//! built from the overlap magnitude and phase.
//!
//! Integrals use the trapezoidal rule at the sampling stride. Samples that
//! failed a guard carry no rates; the segments touching them are skipped
//! and accounted for as gaps.

use num_complex::Complex64;
use thiserror::Error;

use super::tracedist::wrap_angle;
use crate::observables::ReducedDensity;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("interval [{t1}, {t2}] is empty")]
    EmptyInterval { t1: f64, t2: f64 },
    #[error("interval [{t1}, {t2}] leaves the trajectory span [{lo}, {hi}]")]
    OutOfSpan { t1: f64, t2: f64, lo: f64, hi: f64 },
    #[error("guard-invalid samples cover {fraction:.2}% of the interval (limit 1%)")]
    TooManyGaps { fraction: f64 },
    #[error("need at least {need} samples, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("populations vary by {drift:e} over the series; not an after-pulse regime")]
    PopulationsNotConstant { drift: f64 },
    #[error("overlap phase jumps by {jump:.3} rad between samples; stride too coarse")]
    PhaseStride { jump: f64 },
}

/// Accounting of guard-invalid stretches inside an integration window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub invalid_samples: usize,
    /// Total span of skipped segments inside the window.
    pub skipped_span: f64,
    pub window_span: f64,
}

impl GapReport {
    pub fn skipped_fraction(&self) -> f64 {
        if self.window_span > 0.0 {
            self.skipped_span / self.window_span
        } else {
            0.0
        }
    }
}

/// Trapezoidal integral of a per-sample quantity over [t1, t2], skipping
/// segments with a guard-invalid endpoint.
pub fn integrate_valid(
    points: &[(f64, Option<f64>)],
    t1: f64,
    t2: f64,
) -> Result<(f64, GapReport), MeasureError> {
    if t2 <= t1 || t1.is_nan() || t2.is_nan() {
        return Err(MeasureError::EmptyInterval { t1, t2 });
    }
    if points.len() < 2 {
        return Err(MeasureError::TooShort {
            need: 2,
            got: points.len(),
        });
    }
    let lo = points[0].0;
    let hi = points[points.len() - 1].0;
    let slack = 1e-9 * (hi - lo).abs().max(1.0);
    if t1 < lo - slack || t2 > hi + slack {
        return Err(MeasureError::OutOfSpan { t1, t2, lo, hi });
    }

    let mut integral = 0.0;
    let mut skipped_span = 0.0;
    let mut invalid_samples = 0;
    for w in points.windows(2) {
        let (ta, fa) = w[0];
        let (tb, fb) = w[1];
        let seg_lo = ta.max(t1);
        let seg_hi = tb.min(t2);
        if seg_hi <= seg_lo {
            continue;
        }
        match (fa, fb) {
            (Some(fa), Some(fb)) => {
                // clip the segment, interpolating f linearly to the cut points
                let lerp = |t: f64| fa + (fb - fa) * (t - ta) / (tb - ta);
                integral += 0.5 * (lerp(seg_lo) + lerp(seg_hi)) * (seg_hi - seg_lo);
            }
            _ => skipped_span += seg_hi - seg_lo,
        }
    }
    for (t, f) in points {
        if *t >= t1 - slack && *t <= t2 + slack && f.is_none() {
            invalid_samples += 1;
        }
    }
    Ok((
        integral,
        GapReport {
            invalid_samples,
            skipped_span,
            window_span: t2 - t1,
        },
    ))
}

/// Total amount of non-Markovianity F(t1, t2) = ∫ f dt over valid samples.
pub fn total_nonmarkovianity(
    points: &[(f64, Option<f64>)],
    t1: f64,
    t2: f64,
) -> Result<(f64, GapReport), MeasureError> {
    integrate_valid(points, t1, t2)
}

/// Bloch-volume ratio V(t)/V(t0) = exp(-2 ∫ Σγ ds) for the qubit.
///
/// `points` carries (time, rate_sum) with invalid samples as None. Errors
/// out when gaps exceed 1% of the interval.
pub fn bloch_volume_ratio(
    points: &[(f64, Option<f64>)],
    t0: f64,
    t: f64,
) -> Result<f64, MeasureError> {
    let (integral, gaps) = integrate_valid(points, t0, t)?;
    if gaps.skipped_fraction() > 0.01 {
        return Err(MeasureError::TooManyGaps {
            fraction: 100.0 * gaps.skipped_fraction(),
        });
    }
    Ok((-2.0 * integral).exp())
}

/// After-pulse non-Markovianity measure at one interior sample.
#[derive(Debug, Clone, Copy)]
pub struct AfterPulsePoint {
    pub time: f64,
    /// √[(d|c|/dt / |c|)² + (dα/dt)²].
    pub f: f64,
    /// |d|c|/dt| / |c| component.
    pub magnitude_term: f64,
    /// |dα/dt| component.
    pub phase_term: f64,
    /// True where |c| fell below the overlap guard; the ratio is then
    /// evaluated at the guard floor and the sample should not enter
    /// integrals.
    pub capped: bool,
}

/// Evaluate the constant-population measure along a sampled series of
/// densities (uniformly spaced); derivatives are central differences.
pub fn after_pulse_measure(
    series: &[(f64, ReducedDensity)],
    eps_overlap: f64,
) -> Result<Vec<AfterPulsePoint>, MeasureError> {
    if series.len() < 3 {
        return Err(MeasureError::TooShort {
            need: 3,
            got: series.len(),
        });
    }
    let p0 = series[0].1.p_g;
    let drift = series
        .iter()
        .map(|(_, r)| (r.p_g - p0).abs())
        .fold(0.0f64, f64::max);
    if drift > 1e-6 {
        return Err(MeasureError::PopulationsNotConstant { drift });
    }

    // unwrap the overlap phase along the series
    let mut alphas = Vec::with_capacity(series.len());
    let mut prev: Option<f64> = None;
    for (_, rho) in series {
        let c = rho.overlap;
        let alpha = match prev {
            None => c.arg(),
            Some(p) => {
                let step = wrap_angle(c.arg() - p);
                if step.abs() > 0.9 * std::f64::consts::PI {
                    return Err(MeasureError::PhaseStride { jump: step });
                }
                p + step
            }
        };
        alphas.push(alpha);
        prev = Some(alpha);
    }

    let mut out = Vec::with_capacity(series.len().saturating_sub(2));
    for i in 1..series.len() - 1 {
        let (t_prev, ref r_prev) = series[i - 1];
        let (t, ref r) = series[i];
        let (t_next, ref r_next) = series[i + 1];
        let span = t_next - t_prev;
        let dmag = (r_next.overlap.norm() - r_prev.overlap.norm()) / span;
        let dalpha = (alphas[i + 1] - alphas[i - 1]) / span;
        let mag = r.overlap.norm();
        let capped = mag < eps_overlap;
        let denom = mag.max(eps_overlap);
        let magnitude_term = (dmag / denom).abs();
        let phase_term = dalpha.abs();
        out.push(AfterPulsePoint {
            time: t,
            f: (magnitude_term * magnitude_term + phase_term * phase_term).sqrt(),
            magnitude_term,
            phase_term,
            capped,
        });
    }
    Ok(out)
}

/// Central-difference |dc/dt|/|c| cross-check route for the after-pulse
/// measure (identical to `f` for exact derivatives).
pub fn after_pulse_measure_complex_route(
    series: &[(f64, ReducedDensity)],
    eps_overlap: f64,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..series.len().saturating_sub(1) {
        let (t_prev, ref r_prev) = series[i - 1];
        let (t, ref r) = series[i];
        let (t_next, ref r_next) = series[i + 1];
        let dc: Complex64 = (r_next.overlap - r_prev.overlap) / (t_next - t_prev);
        let denom = r.overlap.norm().max(eps_overlap);
        out.push((t, dc.norm() / denom));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_points(f: f64, n: usize, dt: f64) -> Vec<(f64, Option<f64>)> {
        (0..n).map(|i| (i as f64 * dt, Some(f))).collect()
    }

    #[test]
    fn zero_integrand_zero_integral() {
        let pts = flat_points(0.0, 11, 0.1);
        let (v, gaps) = total_nonmarkovianity(&pts, 0.0, 1.0).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(gaps.invalid_samples, 0);
    }

    #[test]
    fn constant_integrand() {
        // f = 0.5 over [0, 2] integrates to 1
        let pts = flat_points(0.5, 21, 0.1);
        let (v, _) = total_nonmarkovianity(&pts, 0.0, 2.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn piecewise_linear_ramp() {
        // f from (0,0) to (1,1): trapezoid gives 1/2 exactly
        let pts: Vec<(f64, Option<f64>)> = (0..=10)
            .map(|i| (i as f64 * 0.1, Some(i as f64 * 0.1)))
            .collect();
        let (v, _) = total_nonmarkovianity(&pts, 0.0, 1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn adjacent_intervals_are_additive() {
        let pts: Vec<(f64, Option<f64>)> = (0..=40)
            .map(|i| (i as f64 * 0.05, Some((i as f64 * 0.37).sin().abs())))
            .collect();
        let (whole, _) = total_nonmarkovianity(&pts, 0.0, 2.0).unwrap();
        let (a, _) = total_nonmarkovianity(&pts, 0.0, 0.85).unwrap();
        let (b, _) = total_nonmarkovianity(&pts, 0.85, 2.0).unwrap();
        assert!((whole - (a + b)).abs() < 1e-12);
    }

    #[test]
    fn gaps_are_skipped_and_reported() {
        let mut pts = flat_points(1.0, 21, 0.1);
        pts[10].1 = None; // one invalid sample kills two segments
        let (v, gaps) = total_nonmarkovianity(&pts, 0.0, 2.0).unwrap();
        assert!((v - 1.8).abs() < 1e-12);
        assert_eq!(gaps.invalid_samples, 1);
        assert!((gaps.skipped_span - 0.2).abs() < 1e-12);
    }

    #[test]
    fn interval_errors() {
        let pts = flat_points(1.0, 11, 0.1);
        assert!(matches!(
            total_nonmarkovianity(&pts, 0.5, 0.5),
            Err(MeasureError::EmptyInterval { .. })
        ));
        assert!(matches!(
            total_nonmarkovianity(&pts, 0.0, 5.0),
            Err(MeasureError::OutOfSpan { .. })
        ));
    }

    #[test]
    fn bloch_ratio_constant_zero_rate_sum() {
        let pts = flat_points(0.0, 11, 0.1);
        let r = bloch_volume_ratio(&pts, 0.0, 1.0).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bloch_ratio_of_negative_rate_sum() {
        // rate sum -37/90 over one time unit: ratio = exp(74/90) ≈ 2.2756
        let pts = flat_points(-37.0 / 90.0, 101, 0.01);
        let r = bloch_volume_ratio(&pts, 0.0, 1.0).unwrap();
        assert!((r - (74.0f64 / 90.0).exp()).abs() < 1e-10);
        assert!((r - 2.2756).abs() < 1e-4);
    }

    #[test]
    fn bloch_ratio_rejects_gappy_windows() {
        let mut pts = flat_points(0.3, 101, 0.01);
        for p in pts.iter_mut().skip(40).take(5) {
            p.1 = None;
        }
        assert!(matches!(
            bloch_volume_ratio(&pts, 0.0, 1.0),
            Err(MeasureError::TooManyGaps { .. })
        ));
    }

    #[test]
    fn after_pulse_pure_phase_rotation() {
        // |c| constant, α = ωt: f = ω with zero magnitude term
        let omega = 0.1;
        let dt = 0.01; // (ω dt)²/6 ≈ 1.7e-7 keeps both routes within 1e-6
        let series: Vec<(f64, ReducedDensity)> = (0..500)
            .map(|i| {
                let t = i as f64 * dt;
                let c = Complex64::from_polar(0.3, omega * t);
                (t, ReducedDensity::new(0.5, 0.5, c).unwrap())
            })
            .collect();
        let pts = after_pulse_measure(&series, 1e-6).unwrap();
        for p in &pts {
            assert!(
                (p.f - omega).abs() < 1e-6 * omega,
                "f = {} at t = {}",
                p.f,
                p.time
            );
            assert!(p.magnitude_term < 1e-9);
            assert!(!p.capped);
        }
        // complex central-difference route agrees
        for ((_, f_complex), p) in after_pulse_measure_complex_route(&series, 1e-6)
            .iter()
            .zip(&pts)
        {
            let rel = (f_complex - p.f).abs() / p.f;
            assert!(rel < 1e-6, "routes differ by {rel}");
        }
    }

    #[test]
    fn after_pulse_rejects_population_drift() {
        let series: Vec<(f64, ReducedDensity)> = (0..10)
            .map(|i| {
                let t = i as f64 * 0.1;
                let pg = 0.5 + 1e-3 * t;
                (
                    t,
                    ReducedDensity::new(pg, 1.0 - pg, Complex64::new(0.1, 0.0)).unwrap(),
                )
            })
            .collect();
        assert!(matches!(
            after_pulse_measure(&series, 1e-6),
            Err(MeasureError::PopulationsNotConstant { .. })
        ));
    }

    #[test]
    fn coherence_extremum_leaves_only_phase_term() {
        // |c|(t) = 0.3 + 0.1 cos(νt) has extrema where d|c|/dt = 0; there
        // f reduces to |dα/dt|
        let nu = 0.5;
        let omega = 0.4;
        let series: Vec<(f64, ReducedDensity)> = (0..400)
            .map(|i| {
                let t = i as f64 * 0.05;
                let c = Complex64::from_polar(0.3 + 0.1 * (nu * t).cos(), omega * t);
                (t, ReducedDensity::new(0.5, 0.5, c).unwrap())
            })
            .collect();
        let pts = after_pulse_measure(&series, 1e-6).unwrap();
        // extremum of |c| at t = π/ν ≈ 6.28, inside the series
        let t_ext = std::f64::consts::PI / nu;
        let nearest = pts
            .iter()
            .min_by(|a, b| (a.time - t_ext).abs().total_cmp(&(b.time - t_ext).abs()))
            .unwrap();
        assert!(
            (nearest.f - omega).abs() < 1e-3,
            "f = {} ≉ |dα/dt| = {omega}",
            nearest.f
        );
    }
}
