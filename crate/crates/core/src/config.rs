//! Scenario configuration files.
//!
//! Configs are TOML with unit-suffixed keys: every dimensioned quantity is
//! written with exactly one of its accepted units (`dt_ps` or `dt_au`,
//! `strength_cm1` or `strength_hartree`, `r_min_bohr` or
//! `r_min_angstrom`, `mass_amu` or `mass_me`). A file may name a `preset`
//! and override whole sections; without a preset all sections except
//! `[guards]` are required. Parsing resolves everything to atomic units;
//! `scenario_echo` writes the resolved scenario back out as a config that
//! parses to the same scenario.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::grid::SpatialGrid;
use crate::nonmarkov::Guards;
use crate::potential::{PotentialCurve, PotentialError};
use crate::pulse::{CouplingSpec, PulseEnvelope, RampShape};
use crate::scenario::{presets, Channel, InitialState, Scenario, StepMethod};
use crate::units::{to_au, Unit};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config field {path}: {reason}")]
    Field { path: String, reason: String },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("unknown preset {0:?} (known: {1})")]
    UnknownPreset(String, String),
    #[error("config field {path}: {source}")]
    Potential {
        path: String,
        source: PotentialError,
    },
    #[error("cannot read config: {0}")]
    Io(String),
    #[error(transparent)]
    Scenario(#[from] crate::scenario::ScenarioError),
}

fn field_err(path: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        path: path.into(),
        reason: reason.into(),
    }
}

/// Pick the single provided unit variant and convert to atomic units.
fn one_unit(path: &str, variants: &[(Option<f64>, Unit, &str)]) -> Result<f64, ConfigError> {
    let given: Vec<_> = variants.iter().filter(|(v, _, _)| v.is_some()).collect();
    match given.as_slice() {
        [(Some(v), unit, _)] => Ok(to_au(*v, *unit)),
        [] => {
            let names: Vec<&str> = variants.iter().map(|(_, _, n)| *n).collect();
            Err(field_err(
                path,
                format!("missing; provide one of {}", names.join(", ")),
            ))
        }
        _ => {
            let names: Vec<&str> = given.iter().map(|(_, _, n)| *n).collect();
            Err(field_err(
                path,
                format!("give only one unit variant, got {}", names.join(" and ")),
            ))
        }
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    name: Option<String>,
    grid: Option<RawGrid>,
    system: Option<RawSystem>,
    potential: Option<RawPotentials>,
    coupling: Option<RawCoupling>,
    initial: Option<RawInitial>,
    integrator: Option<RawIntegrator>,
    guards: Option<RawGuards>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    r_min_bohr: Option<f64>,
    r_min_angstrom: Option<f64>,
    r_max_bohr: Option<f64>,
    r_max_angstrom: Option<f64>,
    n_points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    mass_amu: Option<f64>,
    mass_me: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotentials {
    g: Option<RawPotential>,
    e: Option<RawPotential>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    kind: String,
    offset_cm1: Option<f64>,
    offset_hartree: Option<f64>,
    // morse
    depth_cm1: Option<f64>,
    depth_hartree: Option<f64>,
    steepness_inv_bohr: Option<f64>,
    // morse + harmonic
    center_bohr: Option<f64>,
    center_angstrom: Option<f64>,
    // harmonic: either ω (uses the system mass) or the force constant
    omega_cm1: Option<f64>,
    omega_hartree: Option<f64>,
    force_au: Option<f64>,
    // tabulated
    path: Option<String>,
    r_bohr: Option<Vec<f64>>,
    v_hartree: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    strength_cm1: Option<f64>,
    strength_hartree: Option<f64>,
    envelope: Option<RawEnvelope>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvelope {
    shape: RampShape,
    t_start_ps: Option<f64>,
    t_start_au: Option<f64>,
    t_rise_ps: Option<f64>,
    t_rise_au: Option<f64>,
    t_plateau_ps: Option<f64>,
    t_plateau_au: Option<f64>,
    t_fall_ps: Option<f64>,
    t_fall_au: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    channel: String,
    kind: String,
    index: Option<usize>,
    center_bohr: Option<f64>,
    center_angstrom: Option<f64>,
    width_bohr: Option<f64>,
    width_angstrom: Option<f64>,
    momentum_inv_bohr: Option<f64>,
    weight_g: Option<f64>,
    weight_e: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    method: Option<String>,
    dt_ps: Option<f64>,
    dt_au: Option<f64>,
    t_final_ps: Option<f64>,
    t_final_au: Option<f64>,
    sample_stride: Option<usize>,
    chebyshev_order: Option<usize>,
    energy_min_hartree: Option<f64>,
    energy_max_hartree: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGuards {
    eps_pop: f64,
    eps_overlap: f64,
}

/// Parse a config from TOML text; `base_dir` anchors relative table paths.
pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<Scenario, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;

    let mut scenario = match &raw.preset {
        Some(name) => presets::by_name(name).ok_or_else(|| {
            ConfigError::UnknownPreset(name.clone(), presets::PRESET_NAMES.join(", "))
        })?,
        None => {
            // a preset-free config must spell out every section
            let missing: Vec<&str> = [
                ("grid", raw.grid.is_none()),
                ("system", raw.system.is_none()),
                ("potential", raw.potential.is_none()),
                ("coupling", raw.coupling.is_none()),
                ("initial", raw.initial.is_none()),
                ("integrator", raw.integrator.is_none()),
            ]
            .iter()
            .filter_map(|(n, m)| m.then_some(*n))
            .collect();
            if !missing.is_empty() {
                return Err(field_err(
                    missing[0],
                    "section required when no preset is named",
                ));
            }
            // placeholder filled below
            presets::rabi_flat()
        }
    };

    if let Some(name) = &raw.name {
        scenario.name = name.clone();
    } else if raw.preset.is_none() {
        scenario.name = "custom".into();
    }

    if let Some(grid) = &raw.grid {
        let r_min = one_unit(
            "grid.r_min",
            &[
                (grid.r_min_bohr, Unit::Bohr, "r_min_bohr"),
                (grid.r_min_angstrom, Unit::Angstrom, "r_min_angstrom"),
            ],
        )?;
        let r_max = one_unit(
            "grid.r_max",
            &[
                (grid.r_max_bohr, Unit::Bohr, "r_max_bohr"),
                (grid.r_max_angstrom, Unit::Angstrom, "r_max_angstrom"),
            ],
        )?;
        scenario.grid = SpatialGrid::new(r_min, r_max, grid.n_points)
            .map_err(|e| field_err("grid", e.to_string()))?;
    }

    if let Some(system) = &raw.system {
        scenario.mass = one_unit(
            "system.mass",
            &[
                (system.mass_amu, Unit::Amu, "mass_amu"),
                (system.mass_me, Unit::ElectronMass, "mass_me"),
            ],
        )?;
    }

    if let Some(pots) = &raw.potential {
        if let Some(g) = &pots.g {
            scenario.v_g = resolve_potential("potential.g", g, base_dir, scenario.mass)?;
        }
        if let Some(e) = &pots.e {
            scenario.v_e = resolve_potential("potential.e", e, base_dir, scenario.mass)?;
        }
    }

    if let Some(c) = &raw.coupling {
        let strength = one_unit(
            "coupling.strength",
            &[
                (c.strength_cm1, Unit::InverseCm, "strength_cm1"),
                (c.strength_hartree, Unit::Hartree, "strength_hartree"),
            ],
        )?;
        let envelope = match &c.envelope {
            Some(env) => resolve_envelope(env)?,
            None => scenario.coupling.envelope.clone(),
        };
        scenario.coupling = CouplingSpec::new(strength, envelope);
    }

    if let Some(init) = &raw.initial {
        scenario.initial = resolve_initial(init)?;
    }

    if let Some(integ) = &raw.integrator {
        let method_name = integ.method.as_deref().unwrap_or("split-operator");
        scenario.method = match method_name {
            "split-operator" => StepMethod::SplitOperator,
            "chebyshev" => {
                let order = integ.chebyshev_order.ok_or_else(|| {
                    field_err(
                        "integrator.chebyshev_order",
                        "required for method = \"chebyshev\"",
                    )
                })?;
                let energy_bounds = match (integ.energy_min_hartree, integ.energy_max_hartree) {
                    (Some(lo), Some(hi)) if hi > lo => Some((lo, hi)),
                    (Some(_), Some(_)) => {
                        return Err(field_err(
                            "integrator.energy_max_hartree",
                            "must exceed energy_min_hartree",
                        ))
                    }
                    (None, None) => None,
                    _ => {
                        return Err(field_err(
                            "integrator.energy_min_hartree",
                            "provide both bounds or neither",
                        ))
                    }
                };
                StepMethod::Chebyshev {
                    order,
                    energy_bounds,
                }
            }
            other => {
                return Err(field_err(
                    "integrator.method",
                    format!("unknown method {other:?} (split-operator | chebyshev)"),
                ))
            }
        };
        scenario.dt = one_unit(
            "integrator.dt",
            &[
                (integ.dt_ps, Unit::Picosecond, "dt_ps"),
                (integ.dt_au, Unit::AtomicTime, "dt_au"),
            ],
        )?;
        if scenario.dt <= 0.0 {
            return Err(field_err("integrator.dt", "must be positive"));
        }
        scenario.t_final = one_unit(
            "integrator.t_final",
            &[
                (integ.t_final_ps, Unit::Picosecond, "t_final_ps"),
                (integ.t_final_au, Unit::AtomicTime, "t_final_au"),
            ],
        )?;
        if scenario.t_final <= 0.0 {
            return Err(field_err("integrator.t_final", "must be positive"));
        }
        if let Some(stride) = integ.sample_stride {
            scenario.sample_stride = stride;
        }
    }

    if let Some(g) = &raw.guards {
        scenario.guards = Guards::new(g.eps_pop, g.eps_overlap)
            .ok_or_else(|| field_err("guards", "thresholds must lie in (0, 1e-2]"))?;
    }

    scenario.validate()?;
    Ok(scenario)
}

pub fn parse_config_file(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config_str(&text, base)
}

fn resolve_potential(
    path: &str,
    raw: &RawPotential,
    base_dir: &Path,
    mass: f64,
) -> Result<PotentialCurve, ConfigError> {
    let offset = match (raw.offset_cm1, raw.offset_hartree) {
        (None, None) => 0.0,
        pair => one_unit(
            &format!("{path}.offset"),
            &[
                (pair.0, Unit::InverseCm, "offset_cm1"),
                (pair.1, Unit::Hartree, "offset_hartree"),
            ],
        )?,
    };
    let center = |require: bool| -> Result<f64, ConfigError> {
        match (raw.center_bohr, raw.center_angstrom, require) {
            (None, None, false) => Ok(0.0),
            pair => one_unit(
                &format!("{path}.center"),
                &[
                    (pair.0, Unit::Bohr, "center_bohr"),
                    (pair.1, Unit::Angstrom, "center_angstrom"),
                ],
            ),
        }
    };
    match raw.kind.as_str() {
        "flat" => Ok(PotentialCurve::flat(offset)),
        "harmonic" => {
            let force_constant = match (raw.force_au, raw.omega_cm1, raw.omega_hartree) {
                (Some(k), None, None) => k,
                (None, cm1, hartree) => {
                    let omega = one_unit(
                        &format!("{path}.omega"),
                        &[
                            (cm1, Unit::InverseCm, "omega_cm1"),
                            (hartree, Unit::Hartree, "omega_hartree"),
                        ],
                    )?;
                    mass * omega * omega
                }
                _ => {
                    return Err(field_err(
                        path,
                        "give either force_au or one omega variant, not both",
                    ))
                }
            };
            Ok(PotentialCurve::Harmonic {
                force_constant,
                center: center(true)?,
                offset,
            })
        }
        "morse" => {
            let depth = one_unit(
                &format!("{path}.depth"),
                &[
                    (raw.depth_cm1, Unit::InverseCm, "depth_cm1"),
                    (raw.depth_hartree, Unit::Hartree, "depth_hartree"),
                ],
            )?;
            let steepness = raw.steepness_inv_bohr.ok_or_else(|| {
                field_err(format!("{path}.steepness_inv_bohr"), "required for morse")
            })?;
            Ok(PotentialCurve::morse(
                depth,
                steepness,
                center(true)?,
                offset,
            ))
        }
        "tabulated" => {
            match (&raw.path, &raw.r_bohr, &raw.v_hartree) {
                (Some(file), None, None) => PotentialCurve::from_table_file(&base_dir.join(file))
                    .map_err(|source| ConfigError::Potential {
                        path: format!("{path}.path"),
                        source,
                    }),
                (None, Some(r), Some(v)) => PotentialCurve::tabulated(r.clone(), v.clone())
                    .map_err(|source| ConfigError::Potential {
                        path: path.to_string(),
                        source,
                    }),
                _ => Err(field_err(
                    path,
                    "tabulated curves take either path = \"...\" or inline r_bohr/v_hartree arrays",
                )),
            }
        }
        other => Err(field_err(
            format!("{path}.kind"),
            format!("unknown kind {other:?} (flat | harmonic-force | morse | tabulated)"),
        )),
    }
}

fn resolve_envelope(raw: &RawEnvelope) -> Result<PulseEnvelope, ConfigError> {
    let t = |name: &str, ps: Option<f64>, au: Option<f64>| -> Result<f64, ConfigError> {
        one_unit(
            &format!("coupling.envelope.{name}"),
            &[
                (ps, Unit::Picosecond, "ps variant"),
                (au, Unit::AtomicTime, "au variant"),
            ],
        )
    };
    PulseEnvelope::new(
        t("t_start", raw.t_start_ps, raw.t_start_au)?,
        t("t_rise", raw.t_rise_ps, raw.t_rise_au)?,
        t("t_plateau", raw.t_plateau_ps, raw.t_plateau_au)?,
        t("t_fall", raw.t_fall_ps, raw.t_fall_au)?,
        raw.shape,
    )
    .map_err(|e| field_err("coupling.envelope", e.to_string()))
}

fn resolve_initial(raw: &RawInitial) -> Result<InitialState, ConfigError> {
    let channel = match raw.channel.as_str() {
        "g" => Channel::Ground,
        "e" => Channel::Excited,
        other => {
            return Err(field_err(
                "initial.channel",
                format!("expected \"g\" or \"e\", got {other:?}"),
            ))
        }
    };
    match raw.kind.as_str() {
        "eigenstate" => {
            let index = raw
                .index
                .ok_or_else(|| field_err("initial.index", "required for kind = \"eigenstate\""))?;
            Ok(InitialState::Eigenstate { channel, index })
        }
        "gaussian" => {
            let center = one_unit(
                "initial.center",
                &[
                    (raw.center_bohr, Unit::Bohr, "center_bohr"),
                    (raw.center_angstrom, Unit::Angstrom, "center_angstrom"),
                ],
            )?;
            let width = one_unit(
                "initial.width",
                &[
                    (raw.width_bohr, Unit::Bohr, "width_bohr"),
                    (raw.width_angstrom, Unit::Angstrom, "width_angstrom"),
                ],
            )?;
            Ok(InitialState::Gaussian {
                channel,
                center,
                width,
                momentum: raw.momentum_inv_bohr.unwrap_or(0.0),
            })
        }
        "shared-eigenstate" => {
            let index = raw.index.ok_or_else(|| {
                field_err("initial.index", "required for kind = \"shared-eigenstate\"")
            })?;
            Ok(InitialState::SharedEigenstate {
                of_channel: channel,
                index,
                weight_g: raw.weight_g.unwrap_or(std::f64::consts::FRAC_1_SQRT_2),
                weight_e: raw.weight_e.unwrap_or(std::f64::consts::FRAC_1_SQRT_2),
            })
        }
        other => Err(field_err(
            "initial.kind",
            format!("unknown kind {other:?} (eigenstate | gaussian | shared-eigenstate)"),
        )),
    }
}

fn echo_potential(out: &mut String, section: &str, curve: &PotentialCurve) {
    use std::fmt::Write;
    writeln!(out, "[potential.{section}]").unwrap();
    match curve {
        PotentialCurve::Flat { offset } => {
            writeln!(out, "kind = \"flat\"").unwrap();
            writeln!(out, "offset_hartree = {offset:.17e}").unwrap();
        }
        PotentialCurve::Harmonic {
            force_constant,
            center,
            offset,
        } => {
            writeln!(out, "kind = \"harmonic\"").unwrap();
            writeln!(out, "force_au = {force_constant:.17e}").unwrap();
            writeln!(out, "center_bohr = {center:.17e}").unwrap();
            writeln!(out, "offset_hartree = {offset:.17e}").unwrap();
        }
        PotentialCurve::Morse {
            depth,
            steepness,
            center,
            offset,
        } => {
            writeln!(out, "kind = \"morse\"").unwrap();
            writeln!(out, "depth_hartree = {depth:.17e}").unwrap();
            writeln!(out, "steepness_inv_bohr = {steepness:.17e}").unwrap();
            writeln!(out, "center_bohr = {center:.17e}").unwrap();
            writeln!(out, "offset_hartree = {offset:.17e}").unwrap();
        }
        PotentialCurve::Tabulated(spline) => {
            let (r, v) = spline.nodes();
            writeln!(out, "kind = \"tabulated\"").unwrap();
            let fmt_list = |xs: &[f64]| {
                xs.iter()
                    .map(|x| format!("{x:.17e}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            writeln!(out, "r_bohr = [{}]", fmt_list(r)).unwrap();
            writeln!(out, "v_hartree = [{}]", fmt_list(v)).unwrap();
        }
    }
    out.push('\n');
}

/// Render the resolved scenario as a config file in atomic units; parsing
/// the echo reproduces the scenario.
pub fn scenario_echo(s: &Scenario) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "name = \"{}\"", s.name).unwrap();
    out.push('\n');
    writeln!(out, "[grid]").unwrap();
    writeln!(out, "r_min_bohr = {:.17e}", s.grid.r_min).unwrap();
    writeln!(out, "r_max_bohr = {:.17e}", s.grid.r_max).unwrap();
    writeln!(out, "n_points = {}", s.grid.n_points).unwrap();
    out.push('\n');
    writeln!(out, "[system]").unwrap();
    writeln!(out, "mass_me = {:.17e}", s.mass).unwrap();
    out.push('\n');
    echo_potential(&mut out, "g", &s.v_g);
    echo_potential(&mut out, "e", &s.v_e);
    writeln!(out, "[coupling]").unwrap();
    writeln!(out, "strength_hartree = {:.17e}", s.coupling.strength).unwrap();
    out.push('\n');
    writeln!(out, "[coupling.envelope]").unwrap();
    let shape = match s.coupling.envelope.shape {
        RampShape::Linear => "linear",
        RampShape::SineSquared => "sine-squared",
    };
    writeln!(out, "shape = \"{shape}\"").unwrap();
    writeln!(out, "t_start_au = {:.17e}", s.coupling.envelope.t_start).unwrap();
    writeln!(out, "t_rise_au = {:.17e}", s.coupling.envelope.t_rise).unwrap();
    writeln!(out, "t_plateau_au = {:.17e}", s.coupling.envelope.t_plateau).unwrap();
    writeln!(out, "t_fall_au = {:.17e}", s.coupling.envelope.t_fall).unwrap();
    out.push('\n');
    writeln!(out, "[initial]").unwrap();
    match &s.initial {
        InitialState::Eigenstate { channel, index } => {
            writeln!(out, "channel = \"{}\"", channel_label(*channel)).unwrap();
            writeln!(out, "kind = \"eigenstate\"").unwrap();
            writeln!(out, "index = {index}").unwrap();
        }
        InitialState::Gaussian {
            channel,
            center,
            width,
            momentum,
        } => {
            writeln!(out, "channel = \"{}\"", channel_label(*channel)).unwrap();
            writeln!(out, "kind = \"gaussian\"").unwrap();
            writeln!(out, "center_bohr = {center:.17e}").unwrap();
            writeln!(out, "width_bohr = {width:.17e}").unwrap();
            writeln!(out, "momentum_inv_bohr = {momentum:.17e}").unwrap();
        }
        InitialState::SharedEigenstate {
            of_channel,
            index,
            weight_g,
            weight_e,
        } => {
            writeln!(out, "channel = \"{}\"", channel_label(*of_channel)).unwrap();
            writeln!(out, "kind = \"shared-eigenstate\"").unwrap();
            writeln!(out, "index = {index}").unwrap();
            writeln!(out, "weight_g = {weight_g:.17e}").unwrap();
            writeln!(out, "weight_e = {weight_e:.17e}").unwrap();
        }
    }
    out.push('\n');
    writeln!(out, "[integrator]").unwrap();
    match &s.method {
        StepMethod::SplitOperator => writeln!(out, "method = \"split-operator\"").unwrap(),
        StepMethod::Chebyshev {
            order,
            energy_bounds,
        } => {
            writeln!(out, "method = \"chebyshev\"").unwrap();
            writeln!(out, "chebyshev_order = {order}").unwrap();
            if let Some((lo, hi)) = energy_bounds {
                writeln!(out, "energy_min_hartree = {lo:.17e}").unwrap();
                writeln!(out, "energy_max_hartree = {hi:.17e}").unwrap();
            }
        }
    }
    writeln!(out, "dt_au = {:.17e}", s.dt).unwrap();
    writeln!(out, "t_final_au = {:.17e}", s.t_final).unwrap();
    writeln!(out, "sample_stride = {}", s.sample_stride).unwrap();
    out.push('\n');
    writeln!(out, "[guards]").unwrap();
    writeln!(out, "eps_pop = {:.17e}", s.guards.eps_pop).unwrap();
    writeln!(out, "eps_overlap = {:.17e}", s.guards.eps_overlap).unwrap();
    out
}

fn channel_label(c: Channel) -> &'static str {
    match c {
        Channel::Ground => "g",
        Channel::Excited => "e",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{AU_TIME_PER_PS, CM1_PER_HARTREE};

    fn base() -> &'static Path {
        Path::new(".")
    }

    #[test]
    fn minimal_preset_expands() {
        let s = parse_config_str("preset = \"morse-pair\"\n", base()).unwrap();
        assert_eq!(s.name, "morse-pair-1x");
        assert_eq!(s.grid.n_points, 1024);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn bad_dt_names_the_field() {
        let text = "preset = \"rabi-flat\"\n[integrator]\ndt_au = -0.5\nt_final_au = 10.0\n";
        match parse_config_str(text, base()).unwrap_err() {
            ConfigError::Field { path, .. } => assert_eq!(path, "integrator.dt"),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn spectroscopic_units_convert() {
        let text = r#"
preset = "rabi-flat"

[coupling]
strength_cm1 = 3.29

[coupling.envelope]
shape = "sine-squared"
t_start_ps = 50.0
t_rise_ps = 50.0
t_plateau_ps = 95.0
t_fall_ps = 55.0

[integrator]
dt_ps = 2.4e-5
t_final_ps = 1.0e-2
sample_stride = 4
"#;
        let s = parse_config_str(text, base()).unwrap();
        assert!((s.coupling.strength - 3.29 / CM1_PER_HARTREE).abs() < 1e-12 * s.coupling.strength);
        assert!((s.coupling.envelope.t_start - 50.0 * AU_TIME_PER_PS).abs() < 1e-6);
        assert!((s.dt - 2.4e-5 * AU_TIME_PER_PS).abs() < 1e-12 * s.dt);
    }

    #[test]
    fn duplicate_unit_variant_is_rejected() {
        let text = "preset = \"rabi-flat\"\n[system]\nmass_amu = 1.0\nmass_me = 1822.0\n";
        match parse_config_str(text, base()).unwrap_err() {
            ConfigError::Field { path, reason } => {
                assert_eq!(path, "system.mass");
                assert!(reason.contains("only one"));
            }
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn unknown_preset_lists_known_ones() {
        match parse_config_str("preset = \"nope\"\n", base()).unwrap_err() {
            ConfigError::UnknownPreset(name, known) => {
                assert_eq!(name, "nope");
                assert!(known.contains("morse-pair"));
            }
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_schema_errors() {
        let err =
            parse_config_str("preset = \"rabi-flat\"\nunknown_key = 1\n", base()).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax(_)));
    }

    #[test]
    fn echo_round_trips_every_preset() {
        for name in presets::PRESET_NAMES {
            let s = presets::by_name(name).unwrap();
            let echo = scenario_echo(&s);
            let back = parse_config_str(&echo, base())
                .unwrap_or_else(|e| panic!("echo of {name} failed to parse: {e}\n{echo}"));
            assert_eq!(back.grid, s.grid, "{name}: grid");
            assert_eq!(back.mass, s.mass, "{name}: mass");
            assert_eq!(back.v_g, s.v_g, "{name}: v_g");
            assert_eq!(back.v_e, s.v_e, "{name}: v_e");
            assert_eq!(back.coupling, s.coupling, "{name}: coupling");
            assert_eq!(back.initial, s.initial, "{name}: initial");
            assert_eq!(back.dt, s.dt, "{name}: dt");
            assert_eq!(back.t_final, s.t_final, "{name}: t_final");
            assert_eq!(back.sample_stride, s.sample_stride, "{name}: stride");
            assert_eq!(back.guards, s.guards, "{name}: guards");
        }
    }

    #[test]
    fn tabulated_inline_arrays() {
        let text = r#"
preset = "rabi-flat"

[potential.g]
kind = "tabulated"
r_bohr = [0.0, 10.0, 20.0, 30.0, 40.0]
v_hartree = [0.0, 1.0e-3, 0.5e-3, 0.2e-3, 0.1e-3]
"#;
        let s = parse_config_str(text, base()).unwrap();
        assert!(matches!(s.v_g, PotentialCurve::Tabulated(_)));
        assert_eq!(s.v_g.value(10.0).unwrap(), 1.0e-3);
    }
}
