//! Bessel functions of the first kind for the Chebyshev expansion
//! coefficients of exp(-i x τ).
//!
//! J_0..J_n are generated together by Miller's downward recurrence,
//! normalized with J_0(τ) + 2 Σ J_2k(τ) = 1. This is stable for the
//! moderate arguments the propagator uses (τ = scale·dt of order 1).

/// J_k(x) for k = 0..=n_max.
pub fn bessel_j_sequence(x: f64, n_max: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    // start the downward recurrence well above both n_max and |x|
    let start = (n_max + 16).max((1.4 * ax) as usize + 20);
    let mut out = vec![0.0; n_max + 1];
    let mut j_next = 0.0f64; // J_{k+2}
    let mut j_cur = 1e-300f64; // J_{k+1}, seeded at order `start`
    let mut norm = 0.0f64;
    for k in (0..start).rev() {
        // J_k = (2(k+1)/x) J_{k+1} - J_{k+2}
        let j = 2.0 * (k as f64 + 1.0) / ax * j_cur - j_next;
        j_next = j_cur;
        j_cur = j;
        if k <= n_max {
            out[k] = j;
        }
        if k > 0 && k % 2 == 0 {
            norm += 2.0 * j;
        }
        // keep the recurrence from overflowing
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += j_cur; // J_0
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from standard tables.
    const J0_1: f64 = 0.765_197_686_557_966_6;
    const J1_1: f64 = 0.440_050_585_744_933_5;

    /// Independent reference: the ascending power series
    /// J_k(x) = Σ_m (-1)^m (x/2)^{2m+k} / (m! (m+k)!), accurate to
    /// ~1e-13 for the small arguments used here.
    fn bessel_series(k: usize, x: f64) -> f64 {
        let half = 0.5 * x;
        let mut term = half.powi(k as i32);
        for j in 1..=k {
            term /= j as f64;
        }
        let mut total = term;
        for m in 1..60 {
            term *= -(half * half) / (m as f64 * (m + k) as f64);
            total += term;
            if term.abs() < 1e-20 * total.abs().max(1e-30) {
                break;
            }
        }
        total
    }

    #[test]
    fn tabled_values() {
        let seq = bessel_j_sequence(1.0, 4);
        assert!((seq[0] - J0_1).abs() < 1e-14, "J0(1) = {}", seq[0]);
        assert!((seq[1] - J1_1).abs() < 1e-14, "J1(1) = {}", seq[1]);
    }

    #[test]
    fn matches_power_series() {
        for &x in &[0.2, 1.0, 2.5, 6.0, 10.0] {
            let seq = bessel_j_sequence(x, 14);
            for (k, value) in seq.iter().enumerate() {
                let expect = bessel_series(k, x);
                assert!(
                    (value - expect).abs() < 1e-12,
                    "J{k}({x}) = {value} vs series {expect}"
                );
            }
        }
    }

    #[test]
    fn zero_argument() {
        let seq = bessel_j_sequence(0.0, 5);
        assert_eq!(seq[0], 1.0);
        assert!(seq[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn negative_argument_parity() {
        let pos = bessel_j_sequence(1.7, 5);
        let neg = bessel_j_sequence(-1.7, 5);
        for k in 0..=5 {
            let expect = if k % 2 == 1 { -pos[k] } else { pos[k] };
            assert!((neg[k] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn series_sums_to_one() {
        // J0 + 2 Σ J_2k = 1 for any argument
        for &x in &[0.3, 1.0, 4.2, 9.7] {
            let seq = bessel_j_sequence(x, 40);
            let mut total = seq[0];
            for k in (2..=40).step_by(2) {
                total += 2.0 * seq[k];
            }
            assert!((total - 1.0).abs() < 1e-12, "x = {x}: sum = {total}");
        }
    }
}
