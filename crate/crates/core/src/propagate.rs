//! Time-stepping of the coupled two-channel Schrödinger equation
//!
//!   i ∂_t (ψ_g, ψ_e) = [[T + V_g, W(t)], [W(t), T + V_e]] (ψ_g, ψ_e)
//!
//! and the analytic per-sample derivatives that feed the decoherence-rate
//! formulas. Two steppers are provided: a Strang split-operator scheme
//! (default; the potential+coupling half-steps use the closed-form 2×2
//! matrix exponential pointwise in R) and a Chebyshev expansion of the
//! short-time evolution operator as a cross-check. The envelope is
//! evaluated at the step midpoint in both.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{GridError, TwoChannelState, WaveFunction};
use crate::scenario::{Scenario, ScenarioError, StepMethod};
use crate::spectral::SpectralOp;

mod chebyshev;
pub use chebyshev::bessel_j_sequence;

#[derive(Debug, Error)]
pub enum PropagationError {
    #[error(
        "time step too large: dt·E_max = {product:.3} exceeds 0.5 (dt = {dt}, E_max = {e_max:.3})"
    )]
    StepTooLarge { dt: f64, e_max: f64, product: f64 },
    #[error("norm drifted by {drift:e} in one step at t = {t}")]
    NormDrift { t: f64, drift: f64 },
    #[error("Ritz value {ritz:.6} outside the Chebyshev energy bounds [{lo:.6}, {hi:.6}]")]
    EnergyBounds { ritz: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Potential(#[from] crate::potential::PotentialError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Analytic time derivatives of the reduced-density ingredients:
/// `a` = i·dP_g/dt and `b` = i·d⟨ψ_e|ψ_g⟩/dt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativePair {
    pub a: Complex64,
    pub b: Complex64,
}

impl DerivativePair {
    /// dP_g/dt (`a` is purely imaginary by construction).
    pub fn dpg_dt(&self) -> f64 {
        self.a.im
    }

    /// d⟨ψ_g|ψ_e⟩/dt, the rate of the overlap stored in the density.
    pub fn overlap_rate(&self) -> Complex64 {
        Complex64::i() * self.b.conj()
    }

    /// |d⟨ψ_g|ψ_e⟩/dt|.
    pub fn abs_overlap_rate(&self) -> f64 {
        self.b.norm()
    }
}

enum Stepper {
    SplitOperator {
        /// exp(-i k²/(2m) dt) with the inverse-transform 1/n folded in.
        kinetic_phase: Vec<Complex64>,
    },
    Chebyshev {
        order: usize,
        /// Half-width and center of the energy interval mapped onto [-1, 1].
        scale: f64,
        shift: f64,
        bounds: (f64, f64),
        /// (2 - δ_k0) J_k(scale·dt), k = 0..=order.
        coeffs: Vec<f64>,
    },
}

/// Reusable stepping engine for one scenario.
pub struct Propagator {
    scenario: Scenario,
    op: SpectralOp,
    v_g: Vec<f64>,
    v_e: Vec<f64>,
    /// (V_g+V_e)/2 and (V_g-V_e)/2, precomputed for the 2×2 exponential.
    v_mean: Vec<f64>,
    v_half_gap: Vec<f64>,
    kinetic_energy: Vec<f64>,
    stepper: Stepper,
    buf_g: Vec<Complex64>,
    buf_e: Vec<Complex64>,
}

impl Propagator {
    pub fn new(scenario: &Scenario) -> Result<Self, PropagationError> {
        scenario.validate()?;
        let (e_lo, e_hi) = scenario.energy_bounds_estimate()?;
        let e_max = e_hi.abs().max(e_lo.abs());
        let product = scenario.dt * e_max;
        if product > 0.5 {
            return Err(PropagationError::StepTooLarge {
                dt: scenario.dt,
                e_max,
                product,
            });
        }

        let grid = scenario.grid.clone();
        let op = SpectralOp::new(grid.clone());
        let v_g = scenario.v_g.sample(&grid)?;
        let v_e = scenario.v_e.sample(&grid)?;
        let v_mean = v_g.iter().zip(&v_e).map(|(a, b)| 0.5 * (a + b)).collect();
        let v_half_gap = v_g.iter().zip(&v_e).map(|(a, b)| 0.5 * (a - b)).collect();
        let kinetic_energy = op.kinetic_energies(scenario.mass)?;

        let stepper = match &scenario.method {
            StepMethod::SplitOperator => Stepper::SplitOperator {
                kinetic_phase: kinetic_phase(&kinetic_energy, scenario.dt),
            },
            StepMethod::Chebyshev {
                order,
                energy_bounds,
            } => {
                let bounds = energy_bounds.unwrap_or((e_lo, e_hi));
                // widen slightly so the spectrum stays strictly inside [-1, 1]
                let pad = 1e-3 * (bounds.1 - bounds.0).max(1e-12);
                let bounds = (bounds.0 - pad, bounds.1 + pad);
                let scale = 0.5 * (bounds.1 - bounds.0);
                let shift = 0.5 * (bounds.1 + bounds.0);
                let mut coeffs = bessel_j_sequence(scale * scenario.dt, *order);
                for c in coeffs.iter_mut().skip(1) {
                    *c *= 2.0;
                }
                Stepper::Chebyshev {
                    order: *order,
                    scale,
                    shift,
                    bounds,
                    coeffs,
                }
            }
        };

        let n = grid.n_points;
        Ok(Self {
            scenario: scenario.clone(),
            op,
            v_g,
            v_e,
            v_mean,
            v_half_gap,
            kinetic_energy,
            stepper,
            buf_g: vec![Complex64::ZERO; n],
            buf_e: vec![Complex64::ZERO; n],
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Advance the state by one step of the scenario's dt, checking norm
    /// conservation.
    pub fn step(&mut self, state: &mut TwoChannelState) -> Result<(), PropagationError> {
        let w = self
            .scenario
            .coupling
            .value(state.time + 0.5 * self.scenario.dt);
        let norm_before = state.total_norm_sq();
        self.step_with_coupling(state, w, self.scenario.dt)?;
        let drift = (state.total_norm_sq() - norm_before).abs();
        if drift > 1e-8 {
            return Err(PropagationError::NormDrift {
                t: state.time,
                drift,
            });
        }
        Ok(())
    }

    /// One step with a frozen coupling value and a signed dt; the
    /// time-reversal checks drive this directly.
    pub fn step_with_coupling(
        &mut self,
        state: &mut TwoChannelState,
        w: f64,
        dt: f64,
    ) -> Result<(), PropagationError> {
        match &self.stepper {
            Stepper::SplitOperator { .. } => self.split_step(state, w, dt),
            Stepper::Chebyshev { .. } => self.chebyshev_step(state, w, dt)?,
        }
        state.time += dt;
        Ok(())
    }

    /// Strang splitting: half potential+coupling, full kinetic, half
    /// potential+coupling. Each factor is an exact unitary.
    fn split_step(&mut self, state: &mut TwoChannelState, w: f64, dt: f64) {
        self.buf_g.copy_from_slice(state.psi_g.amplitudes());
        self.buf_e.copy_from_slice(state.psi_e.amplitudes());

        self.potential_half_step(w, 0.5 * dt);

        if dt == self.scenario.dt {
            if let Stepper::SplitOperator { kinetic_phase } = &self.stepper {
                for buf in [&mut self.buf_g, &mut self.buf_e] {
                    self.op.forward(buf);
                    for (z, p) in buf.iter_mut().zip(kinetic_phase) {
                        *z *= *p;
                    }
                    self.op.inverse_unnormalized(buf);
                }
            }
        } else {
            // test paths step with other dt values (e.g. reversed sign)
            let phase = kinetic_phase(&self.kinetic_energy, dt);
            for buf in [&mut self.buf_g, &mut self.buf_e] {
                self.op.forward(buf);
                for (z, p) in buf.iter_mut().zip(&phase) {
                    *z *= *p;
                }
                self.op.inverse_unnormalized(buf);
            }
        }

        self.potential_half_step(w, 0.5 * dt);

        state.psi_g.amplitudes_mut().copy_from_slice(&self.buf_g);
        state.psi_e.amplitudes_mut().copy_from_slice(&self.buf_e);
    }

    /// Pointwise exp(-iθ [[V_g, w], [w, V_e]]): with M = m̄·I + Δ,
    /// Δ traceless Hermitian and Ω² = δ² + w², the exponential is
    /// e^(-iθm̄)[cos(θΩ)·I - i sin(θΩ)/Ω · Δ].
    fn potential_half_step(&mut self, w: f64, theta: f64) {
        for i in 0..self.buf_g.len() {
            let delta = self.v_half_gap[i];
            let omega = (delta * delta + w * w).sqrt();
            let (sin_t, cos_t) = (theta * omega).sin_cos();
            let sinc = if omega > 0.0 { sin_t / omega } else { theta };
            let mean_phase = Complex64::from_polar(1.0, -theta * self.v_mean[i]);
            let diag = Complex64::new(cos_t, -sinc * delta);
            let cross = Complex64::new(0.0, -sinc * w);
            let g = self.buf_g[i];
            let e = self.buf_e[i];
            self.buf_g[i] = mean_phase * (diag * g + cross * e);
            self.buf_e[i] = mean_phase * (cross * g + diag.conj() * e);
        }
    }

    /// Chebyshev expansion of exp(-i H dt) with the scaled-and-shifted
    /// Hamiltonian; fails if the state's Ritz value leaves the bounds.
    fn chebyshev_step(
        &mut self,
        state: &mut TwoChannelState,
        w: f64,
        dt: f64,
    ) -> Result<(), PropagationError> {
        let Stepper::Chebyshev {
            order,
            scale,
            shift,
            bounds,
            ref coeffs,
        } = self.stepper
        else {
            unreachable!("chebyshev_step on a split-operator propagator");
        };
        let coeffs = coeffs.clone();
        let n = self.scenario.grid.n_points;
        let dr = self.scenario.grid.dr;

        let mut prev = [
            state.psi_g.amplitudes().to_vec(),
            state.psi_e.amplitudes().to_vec(),
        ];
        let (mut hbuf_g, mut hbuf_e) = (vec![Complex64::ZERO; n], vec![Complex64::ZERO; n]);

        self.apply_h_raw(w, &prev[0], &prev[1], &mut hbuf_g, &mut hbuf_e);
        let mut ritz = Complex64::ZERO;
        for i in 0..n {
            ritz += prev[0][i].conj() * hbuf_g[i] + prev[1][i].conj() * hbuf_e[i];
        }
        let ritz = ritz.re * dr;
        if ritz < bounds.0 || ritz > bounds.1 {
            return Err(PropagationError::EnergyBounds {
                ritz,
                lo: bounds.0,
                hi: bounds.1,
            });
        }

        // φ₀ = ψ, φ₁ = -i H_s ψ; recurrence φ_{k+1} = -2i H_s φ_k + φ_{k-1}
        let minus_i = Complex64::new(0.0, -1.0);
        let mut cur = [vec![Complex64::ZERO; n], vec![Complex64::ZERO; n]];
        for (ch, hbuf) in [&hbuf_g, &hbuf_e].into_iter().enumerate() {
            for i in 0..n {
                cur[ch][i] = minus_i * (hbuf[i] - shift * prev[ch][i]) / scale;
            }
        }

        let mut acc = [vec![Complex64::ZERO; n], vec![Complex64::ZERO; n]];
        for ch in 0..2 {
            for i in 0..n {
                acc[ch][i] = coeffs[0] * prev[ch][i] + coeffs[1] * cur[ch][i];
            }
        }

        let minus_two_i = Complex64::new(0.0, -2.0);
        for c_k in coeffs.iter().take(order + 1).skip(2) {
            self.apply_h_raw(w, &cur[0], &cur[1], &mut hbuf_g, &mut hbuf_e);
            for (ch, hbuf) in [&hbuf_g, &hbuf_e].into_iter().enumerate() {
                for i in 0..n {
                    let hs = (hbuf[i] - shift * cur[ch][i]) / scale;
                    prev[ch][i] = minus_two_i * hs + prev[ch][i];
                }
            }
            for ch in 0..2 {
                std::mem::swap(&mut prev[ch], &mut cur[ch]);
            }
            for ch in 0..2 {
                for i in 0..n {
                    acc[ch][i] += *c_k * cur[ch][i];
                }
            }
        }

        // global phase from the spectral shift
        let phase = Complex64::from_polar(1.0, -shift * dt);
        for (dst, src) in state.psi_g.amplitudes_mut().iter_mut().zip(&acc[0]) {
            *dst = phase * src;
        }
        for (dst, src) in state.psi_e.amplitudes_mut().iter_mut().zip(&acc[1]) {
            *dst = phase * src;
        }
        Ok(())
    }

    /// H applied to raw channel buffers with a fixed coupling value.
    fn apply_h_raw(
        &self,
        w: f64,
        psi_g: &[Complex64],
        psi_e: &[Complex64],
        out_g: &mut [Complex64],
        out_e: &mut [Complex64],
    ) {
        let n = psi_g.len() as f64;
        out_g.copy_from_slice(psi_g);
        out_e.copy_from_slice(psi_e);
        for buf in [&mut *out_g, &mut *out_e] {
            self.op.forward(buf);
            for (z, e) in buf.iter_mut().zip(&self.kinetic_energy) {
                *z *= *e / n;
            }
            self.op.inverse_unnormalized(buf);
        }
        for i in 0..psi_g.len() {
            out_g[i] += self.v_g[i] * psi_g[i] + w * psi_e[i];
            out_e[i] += self.v_e[i] * psi_e[i] + w * psi_g[i];
        }
    }

    /// Ĥ applied to a state, with the envelope evaluated at time t.
    pub fn apply_hamiltonian(
        &self,
        state: &TwoChannelState,
        t: f64,
    ) -> Result<TwoChannelState, PropagationError> {
        if state.grid() != &self.scenario.grid {
            return Err(GridError::GridMismatch.into());
        }
        let w = self.scenario.coupling.value(t);
        let n = self.scenario.grid.n_points;
        let mut hg = vec![Complex64::ZERO; n];
        let mut he = vec![Complex64::ZERO; n];
        self.apply_h_raw(
            w,
            state.psi_g.amplitudes(),
            state.psi_e.amplitudes(),
            &mut hg,
            &mut he,
        );
        let g = WaveFunction::new(self.scenario.grid.clone(), hg)?;
        let e = WaveFunction::new(self.scenario.grid.clone(), he)?;
        Ok(TwoChannelState::new(g, e, state.time)?)
    }

    /// Analytic derivative pair at time t. The kinetic contributions
    /// cancel, so this needs no transforms:
    /// dP_g/dt = 2 W(t) Im⟨ψ_g|ψ_e⟩ and
    /// b = ⟨ψ_e|(V_g-V_e)|ψ_g⟩ + W(t)(P_e - P_g).
    pub fn derivatives(&self, state: &TwoChannelState, t: f64) -> DerivativePair {
        derivative_pair(state, &self.v_g, &self.v_e, self.scenario.coupling.value(t))
    }
}

fn kinetic_phase(kinetic_energy: &[f64], dt: f64) -> Vec<Complex64> {
    let n = kinetic_energy.len() as f64;
    kinetic_energy
        .iter()
        .map(|e| Complex64::from_polar(1.0 / n, -e * dt))
        .collect()
}

/// Derivative pair from sampled potentials and a coupling value.
pub fn derivative_pair(
    state: &TwoChannelState,
    v_g: &[f64],
    v_e: &[f64],
    w: f64,
) -> DerivativePair {
    let dr = state.grid().dr;
    let g = state.psi_g.amplitudes();
    let e = state.psi_e.amplitudes();
    let mut overlap = Complex64::ZERO;
    let mut gap_overlap = Complex64::ZERO;
    let mut pg = 0.0;
    let mut pe = 0.0;
    for i in 0..g.len() {
        overlap += g[i].conj() * e[i];
        gap_overlap += e[i].conj() * g[i] * (v_g[i] - v_e[i]);
        pg += g[i].norm_sqr();
        pe += e[i].norm_sqr();
    }
    overlap *= dr;
    gap_overlap *= dr;
    pg *= dr;
    pe *= dr;

    let dpg_dt = 2.0 * w * overlap.im;
    let b = gap_overlap + w * (pe - pg);
    DerivativePair {
        a: Complex64::new(0.0, dpg_dt),
        b,
    }
}

/// Spec-level convenience: Ĥ applied through a throwaway propagator.
pub fn apply_hamiltonian(
    state: &TwoChannelState,
    scenario: &Scenario,
    t: f64,
) -> Result<TwoChannelState, PropagationError> {
    Propagator::new(scenario)?.apply_hamiltonian(state, t)
}

/// Spec-level convenience: derivative pair from a scenario.
pub fn compute_derivatives(
    state: &TwoChannelState,
    scenario: &Scenario,
    t: f64,
) -> Result<DerivativePair, PropagationError> {
    let v_g = scenario.v_g.sample(&scenario.grid)?;
    let v_e = scenario.v_e.sample(&scenario.grid)?;
    Ok(derivative_pair(
        state,
        &v_g,
        &v_e,
        scenario.coupling.value(t),
    ))
}
