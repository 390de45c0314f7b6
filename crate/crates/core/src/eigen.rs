//! Bound vibrational eigenstates of a single-channel grid Hamiltonian.
//!
//! The Hamiltonian is assembled as a dense real symmetric matrix: the
//! kinetic block is the circulant matrix of the spectral operator (exact on
//! the periodic grid), the potential sits on the diagonal. Eigenpairs come
//! from a dense symmetric solver, sorted ascending, unit-normalized with
//! the grid quadrature weight, and sign-fixed so the first antinode of each
//! eigenfunction is real-positive.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{GridError, SpatialGrid, WaveFunction};
use crate::potential::{PotentialCurve, PotentialError};
use crate::spectral::SpectralOp;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("requested {count} states but the grid has only {max} points")]
    TooManyStates { count: usize, max: usize },
    #[error("count must be at least 1")]
    ZeroCount,
    #[error("eigensolver failed to converge")]
    Convergence,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

#[derive(Debug, Clone)]
pub struct BoundState {
    pub energy: f64,
    pub wave: WaveFunction,
}

#[derive(Debug, Clone)]
pub struct BoundStates {
    pub states: Vec<BoundState>,
    /// Largest |ψ| over the first/last grid point among the returned states.
    pub edge_amplitude: f64,
}

impl BoundStates {
    /// False when the highest requested state leaks past the grid edges;
    /// callers should warn that the grid is too small.
    pub fn grid_adequate(&self) -> bool {
        self.edge_amplitude <= 1e-6
    }
}

/// Lowest `count` eigenpairs of T + V on the grid.
pub fn bound_states(
    potential: &PotentialCurve,
    grid: &Arc<SpatialGrid>,
    mass: f64,
    count: usize,
) -> Result<BoundStates, EigenError> {
    if count == 0 {
        return Err(EigenError::ZeroCount);
    }
    let n = grid.n_points;
    if count > n {
        return Err(EigenError::TooManyStates { count, max: n });
    }

    let op = SpectralOp::new(grid.clone());
    let kinetic = op.kinetic_energies(mass)?;

    // First row of the circulant kinetic matrix: inverse transform of the
    // momentum-space kinetic energies. The result is real and symmetric in
    // the index because k² is even in k.
    let mut row: Vec<Complex64> = kinetic.iter().map(|&e| Complex64::new(e, 0.0)).collect();
    op.inverse(&mut row);

    let v = potential.sample(grid)?;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = (i + n - j) % n;
            h[(i, j)] = row[d].re;
        }
        h[(i, i)] += v[i];
    }

    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0).ok_or(EigenError::Convergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let norm = 1.0 / grid.dr.sqrt();
    let mut states = Vec::with_capacity(count);
    let mut edge_amplitude = 0.0f64;
    for &idx in order.iter().take(count) {
        let col = eig.eigenvectors.column(idx);
        let mut amp: Vec<f64> = col.iter().map(|&x| x * norm).collect();
        fix_sign(&mut amp);
        edge_amplitude = edge_amplitude.max(amp[0].abs()).max(amp[n - 1].abs());
        let wave = WaveFunction::new(
            grid.clone(),
            amp.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )?;
        states.push(BoundState {
            energy: eig.eigenvalues[idx],
            wave,
        });
    }
    Ok(BoundStates {
        states,
        edge_amplitude,
    })
}

/// Flip the global sign so the first antinode (first local maximum of |ψ|
/// above 5% of the peak) is positive.
fn fix_sign(amp: &mut [f64]) {
    let peak = amp.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if peak == 0.0 {
        return;
    }
    let floor = 0.05 * peak;
    let n = amp.len();
    for i in 0..n {
        let a = amp[i].abs();
        if a < floor {
            continue;
        }
        let prev = if i > 0 { amp[i - 1].abs() } else { 0.0 };
        let next = if i + 1 < n { amp[i + 1].abs() } else { 0.0 };
        if a >= prev && a >= next {
            if amp[i] < 0.0 {
                for x in amp.iter_mut() {
                    *x = -*x;
                }
            }
            return;
        }
    }
}
