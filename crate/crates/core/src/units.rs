//! Unit conversions at the configuration and reporting boundary.
//!
//! Everything inside this crate is expressed in Hartree atomic units
//! (ħ = m_e = e = a₀ = 1); energies are hartree, times are atomic time
//! units, lengths are bohr, masses are electron masses. Config files and
//! CLI flags may use spectroscopic units instead, and the conversion
//! constants live here and nowhere else.

use thiserror::Error;

/// Wavenumbers per hartree, E_h/(hc) in cm⁻¹ (CODATA 2018).
pub const CM1_PER_HARTREE: f64 = 219_474.631_363_2;

/// One atomic time unit, ħ/E_h, in seconds (CODATA 2018).
pub const ATOMIC_TIME_S: f64 = 2.418_884_326_585_7e-17;

/// Atomic time units per picosecond.
pub const AU_TIME_PER_PS: f64 = 1e-12 / ATOMIC_TIME_S;

/// Bohr radius in ångström (CODATA 2018).
pub const ANGSTROM_PER_BOHR: f64 = 0.529_177_210_903;

/// Electron masses per unified atomic mass unit (CODATA 2018).
pub const ME_PER_AMU: f64 = 1_822.888_486_209;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    InverseCm,
    Hartree,
    Picosecond,
    AtomicTime,
    Angstrom,
    Bohr,
    Amu,
    ElectronMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Energy,
    Time,
    Length,
    Mass,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        match self {
            Unit::InverseCm | Unit::Hartree => Dimension::Energy,
            Unit::Picosecond | Unit::AtomicTime => Dimension::Time,
            Unit::Angstrom | Unit::Bohr => Dimension::Length,
            Unit::Amu | Unit::ElectronMass => Dimension::Mass,
        }
    }

    /// Multiplier taking a value in this unit to atomic units.
    fn to_au_factor(self) -> f64 {
        match self {
            Unit::InverseCm => 1.0 / CM1_PER_HARTREE,
            Unit::Hartree => 1.0,
            Unit::Picosecond => AU_TIME_PER_PS,
            Unit::AtomicTime => 1.0,
            Unit::Angstrom => 1.0 / ANGSTROM_PER_BOHR,
            Unit::Bohr => 1.0,
            Unit::Amu => ME_PER_AMU,
            Unit::ElectronMass => 1.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnitError {
    #[error("cannot convert {from:?} to {to:?}: incompatible dimensions")]
    Unsupported { from: Unit, to: Unit },
}

/// Convert `value` between two units of the same dimension.
pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64, UnitError> {
    if from.dimension() != to.dimension() {
        return Err(UnitError::Unsupported { from, to });
    }
    Ok(value * from.to_au_factor() / to.to_au_factor())
}

/// Shorthand: value in `unit` expressed in atomic units.
pub fn to_au(value: f64, unit: Unit) -> f64 {
    value * unit.to_au_factor()
}

/// Shorthand: value in atomic units expressed in `unit`.
pub fn from_au(value: f64, unit: Unit) -> f64 {
    value / unit.to_au_factor()
}
