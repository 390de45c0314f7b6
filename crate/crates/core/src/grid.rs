//! Uniform radial grid, complex wave functions on it, and the coupled
//! two-channel state they form.
//!
//! The grid is periodic with points r_i = r_min + i·dr, i = 0..n-1, and a
//! conjugate momentum grid in standard discrete-transform ordering. All
//! quadrature is a plain Riemann sum with weight dr, which is the natural
//! inner product of the periodic spectral representation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("invalid grid bounds: r_min = {r_min} must be below r_max = {r_max}")]
    InvalidBounds { r_min: f64, r_max: f64 },
    #[error("grid needs at least 8 points, got {n}")]
    TooFewPoints { n: usize },
    #[error("wave functions live on different grids")]
    GridMismatch,
    #[error("amplitude array has {got} entries, grid has {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("non-finite amplitude at index {index}")]
    NonFinite { index: usize },
    #[error("mass must be positive, got {mass}")]
    InvalidMass { mass: f64 },
}

/// Uniform spatial grid with its conjugate momentum grid.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
    pub dr: f64,
    k_values: Vec<f64>,
}

impl PartialEq for SpatialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.r_min == other.r_min && self.r_max == other.r_max && self.n_points == other.n_points
    }
}

impl SpatialGrid {
    pub fn new(r_min: f64, r_max: f64, n_points: usize) -> Result<Arc<Self>, GridError> {
        if r_max <= r_min || !r_min.is_finite() || !r_max.is_finite() {
            return Err(GridError::InvalidBounds { r_min, r_max });
        }
        if n_points < 8 {
            return Err(GridError::TooFewPoints { n: n_points });
        }
        let dr = (r_max - r_min) / n_points as f64;
        let dk = 2.0 * PI / (n_points as f64 * dr);
        let half = n_points.div_ceil(2);
        let k_values = (0..n_points)
            .map(|j| {
                let m = if j < half {
                    j as isize
                } else {
                    j as isize - n_points as isize
                };
                m as f64 * dk
            })
            .collect();
        Ok(Arc::new(Self {
            r_min,
            r_max,
            n_points,
            dr,
            k_values,
        }))
    }

    /// Position of the i-th grid point.
    pub fn r(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.dr
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.r(i))
    }

    /// Angular wavenumbers in discrete-transform ordering.
    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    /// Momentum-grid spacing 2π/(n·dr).
    pub fn dk(&self) -> f64 {
        2.0 * PI / (self.n_points as f64 * self.dr)
    }
}

/// Complex wave function sampled on a [`SpatialGrid`], units bohr^(-1/2).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Arc<SpatialGrid>,
    amp: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Arc<SpatialGrid>, amp: Vec<Complex64>) -> Result<Self, GridError> {
        if amp.len() != grid.n_points {
            return Err(GridError::LengthMismatch {
                got: amp.len(),
                expected: grid.n_points,
            });
        }
        if let Some(index) = amp
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(GridError::NonFinite { index });
        }
        Ok(Self { grid, amp })
    }

    pub fn zero(grid: Arc<SpatialGrid>) -> Self {
        let n = grid.n_points;
        Self {
            grid,
            amp: vec![Complex64::ZERO; n],
        }
    }

    pub fn from_fn(
        grid: Arc<SpatialGrid>,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self, GridError> {
        let amp = grid.positions().map(f).collect();
        Self::new(grid, amp)
    }

    /// Gaussian packet exp(-(r-center)²/(4 width²) + i k₀ r), unit norm on the grid.
    pub fn gaussian(
        grid: Arc<SpatialGrid>,
        center: f64,
        width: f64,
        momentum: f64,
    ) -> Result<Self, GridError> {
        let mut psi = Self::from_fn(grid, |r| {
            let x = (r - center) / (2.0 * width);
            Complex64::from_polar((-x * x).exp(), momentum * r)
        })?;
        psi.normalize();
        Ok(psi)
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    /// Squared norm Σ|ψ_i|² dr.
    pub fn norm_sq(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dr
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            let s = 1.0 / n;
            for z in &mut self.amp {
                *z *= s;
            }
        }
    }

    pub fn scale(&mut self, s: Complex64) {
        for z in &mut self.amp {
            *z *= s;
        }
    }

    /// Mean and variance of position over |ψ|² (assumes nonzero norm).
    pub fn position_moments(&self) -> (f64, f64) {
        let mut w0 = 0.0;
        let mut w1 = 0.0;
        let mut w2 = 0.0;
        for (i, z) in self.amp.iter().enumerate() {
            let p = z.norm_sqr();
            let r = self.grid.r(i);
            w0 += p;
            w1 += p * r;
            w2 += p * r * r;
        }
        let mean = w1 / w0;
        (mean, w2 / w0 - mean * mean)
    }
}

/// ⟨a|b⟩ = Σ a_i* b_i dr; conjugate-linear in the first argument.
pub fn inner_product(a: &WaveFunction, b: &WaveFunction) -> Result<Complex64, GridError> {
    if a.grid != b.grid {
        return Err(GridError::GridMismatch);
    }
    let mut acc = Complex64::ZERO;
    for (x, y) in a.amp.iter().zip(&b.amp) {
        acc += x.conj() * y;
    }
    Ok(acc * a.grid.dr)
}

/// ⟨a|w|b⟩ for a real multiplicative operator w sampled on the grid.
pub fn weighted_inner_product(
    a: &WaveFunction,
    weights: &[f64],
    b: &WaveFunction,
) -> Result<Complex64, GridError> {
    if a.grid != b.grid {
        return Err(GridError::GridMismatch);
    }
    if weights.len() != a.grid.n_points {
        return Err(GridError::LengthMismatch {
            got: weights.len(),
            expected: a.grid.n_points,
        });
    }
    let mut acc = Complex64::ZERO;
    for ((x, w), y) in a.amp.iter().zip(weights).zip(&b.amp) {
        acc += x.conj() * y * *w;
    }
    Ok(acc * a.grid.dr)
}

/// Pure two-channel molecular state: vibrational amplitudes on the ground
/// and excited electronic channels at a common time stamp.
#[derive(Debug, Clone)]
pub struct TwoChannelState {
    pub psi_g: WaveFunction,
    pub psi_e: WaveFunction,
    pub time: f64,
}

impl TwoChannelState {
    pub fn new(psi_g: WaveFunction, psi_e: WaveFunction, time: f64) -> Result<Self, GridError> {
        if psi_g.grid != psi_e.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(Self { psi_g, psi_e, time })
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        self.psi_g.grid()
    }

    pub fn population_g(&self) -> f64 {
        self.psi_g.norm_sq()
    }

    pub fn population_e(&self) -> f64 {
        self.psi_e.norm_sq()
    }

    pub fn total_norm_sq(&self) -> f64 {
        self.population_g() + self.population_e()
    }

    /// Channel overlap ⟨ψ_g|ψ_e⟩.
    pub fn overlap(&self) -> Complex64 {
        inner_product(&self.psi_g, &self.psi_e).expect("channels share a grid by construction")
    }
}
