//! Simulator and diagnostics toolkit for the reduced dynamics of a driven
//! two-level electronic subsystem coupled to its vibrational environment
//! in a diatomic molecule.
//!
//! The crate propagates coupled vibrational wave packets on a radial grid
//! and evaluates, along the trajectory, the canonical decoherence rates of
//! the time-local electronic master equation, non-Markovianity measures
//! and the Bloch-volume witness, entanglement entropies, electronic
//! coherences, and trace-distance diagnostics. Everything internal is in
//! Hartree atomic units; conversions live in [`units`].

pub mod config;
pub mod eigen;
pub mod grid;
pub mod io;
pub mod nonmarkov;
pub mod observables;
pub mod oracles;
pub mod potential;
pub mod propagate;
pub mod pulse;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod spectral;
pub mod trajectory;
pub mod units;

pub use grid::{inner_product, SpatialGrid, TwoChannelState, WaveFunction};
pub use observables::{correlation_scalars, CorrelationScalars, ReducedDensity};
pub use scenario::{Scenario, StepMethod};
pub use trajectory::{DiagnosticsSample, Trajectory};
