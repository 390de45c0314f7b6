//! Command-line driver: run scenarios, sweep the coupling strength,
//! inspect vibrational eigenstates, check the built-in oracles, and
//! post-process trajectory files into interval reports.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use nmdyn_core::config::{parse_config_file, scenario_echo};
use nmdyn_core::eigen::bound_states;
use nmdyn_core::io::{self, OutputOptions};
use nmdyn_core::nonmarkov::after_pulse_measure;
use nmdyn_core::observables::ReducedDensity;
use nmdyn_core::oracles;
use nmdyn_core::report::interval_report;
use nmdyn_core::runner::run_scenario;
use nmdyn_core::scenario::{presets, Channel, InitialState, Scenario};
use nmdyn_core::units::{from_au, Unit};

#[derive(Parser)]
#[command(
    name = "nmdyn",
    about = "Coupled-channel wave-packet dynamics and non-Markovianity diagnostics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one scenario and write trajectory.csv, intervals.csv and a manifest.
    Run(RunArgs),
    /// Run the scenario once per value of a varied parameter.
    Sweep(SweepArgs),
    /// Solve for the lowest vibrational eigenstates of one channel.
    Eigen(EigenArgs),
    /// Propagate a named oracle scenario and compare with its closed form.
    OracleCheck(OracleArgs),
    /// Summarize an existing trajectory.csv over time intervals.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (TOML), or a bare preset name.
    config: String,
    /// Output directory (default: runs/<scenario-name>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Interval boundaries for the report, atomic time units.
    #[arg(long, value_delimiter = ',')]
    intervals: Option<Vec<f64>>,
    /// Also write per-panel plot data (and an SVG with --svg).
    #[arg(long)]
    plots: bool,
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct SweepArgs {
    config: String,
    /// Varied parameter, e.g. coupling.strength=1.5,3.0,6.0 (values in cm⁻¹).
    #[arg(long)]
    vary: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    intervals: Option<Vec<f64>>,
    #[arg(long)]
    plots: bool,
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct EigenArgs {
    config: String,
    /// Number of states to solve for.
    #[arg(long, default_value_t = 8)]
    count: usize,
    /// Channel to diagonalize: g or e (default: the initial-state channel).
    #[arg(long)]
    channel: Option<String>,
    /// Write eigenenergies and wave functions under this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// One of: rabi-flat, free-gaussian, displaced-harmonic.
    name: String,
}

#[derive(Args)]
struct ReportArgs {
    /// Existing trajectory.csv.
    trajectory: PathBuf,
    /// Interval boundaries, atomic time units, e.g. --intervals 0,1600,40000.
    #[arg(long, value_delimiter = ',', required = true)]
    intervals: Vec<f64>,
    /// Where to write intervals.csv (default: stdout only).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
        Command::Eigen(args) => eigen(args),
        Command::OracleCheck(args) => oracle_check(&args.name),
        Command::Report(args) => report(args),
    }
}

fn load_scenario(spec: &str) -> Result<Scenario> {
    if let Some(preset) = presets::by_name(spec) {
        return Ok(preset);
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!(
            "{spec:?} is neither a preset ({}) nor a config file",
            presets::PRESET_NAMES.join(", ")
        );
    }
    Ok(parse_config_file(path)?)
}

fn execute(
    scenario: &Scenario,
    out: &Path,
    intervals: Option<&[f64]>,
    plots: bool,
    svg: bool,
) -> Result<()> {
    scenario.validate()?;
    eprintln!(
        "running {} ({} steps of dt = {} au)…",
        scenario.name,
        (scenario.t_final / scenario.dt).round() as u64,
        scenario.dt
    );
    let (trajectory, stats) = run_scenario(scenario)?;
    let boundaries: Vec<f64> = match intervals {
        Some(list) => list.to_vec(),
        None => default_boundaries(scenario),
    };
    let rep = interval_report(&trajectory, &boundaries)?;
    let manifest = io::write_outputs(
        &trajectory,
        Some(&rep),
        &scenario_echo(scenario),
        &stats,
        out,
        &OutputOptions { plots, svg },
    )?;
    println!(
        "{}: {} samples ({} valid), wall {:.1}s -> {}",
        scenario.name,
        stats.samples,
        stats.valid_samples,
        stats.wall_seconds,
        out.display()
    );
    println!("  t1            t2            F            mean_n   bloch_ratio");
    for row in &rep.rows {
        println!(
            "  {:<13.5e} {:<13.5e} {:<12.5e} {:<8} {}",
            row.t1,
            row.t2,
            row.total_f,
            row.mean_n_index
                .map(|v| format!("{v:.3}"))
                .unwrap_or_else(|| "-".into()),
            row.bloch_ratio
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
    for rec in &manifest.outputs {
        eprintln!("  wrote {} ({} bytes)", rec.name, rec.bytes);
    }
    Ok(())
}

/// Pulse-phase boundaries when the caller does not provide any: pulse
/// support split at the plateau, then the remainder of the run.
fn default_boundaries(scenario: &Scenario) -> Vec<f64> {
    let env = &scenario.coupling.envelope;
    let (lo, hi) = env.support();
    let mut b = vec![0.0];
    for t in [
        lo,
        lo + env.t_rise,
        lo + env.t_rise + env.t_plateau,
        hi,
        scenario.t_final,
    ] {
        if t > b[b.len() - 1] + 1e-9 && t <= scenario.t_final {
            b.push(t);
        }
    }
    if *b.last().unwrap() < scenario.t_final {
        b.push(scenario.t_final);
    }
    b
}

fn run(args: RunArgs) -> Result<()> {
    let scenario = load_scenario(&args.config)?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from("runs").join(&scenario.name));
    execute(
        &scenario,
        &out,
        args.intervals.as_deref(),
        args.plots,
        args.svg,
    )
}

fn sweep(args: SweepArgs) -> Result<()> {
    let base = load_scenario(&args.config)?;
    let (key, values) = args
        .vary
        .split_once('=')
        .ok_or_else(|| anyhow!("--vary expects key=v1,v2,..."))?;
    let values: Vec<f64> = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().context("parsing --vary value"))
        .collect::<Result<_>>()?;
    if values.is_empty() {
        bail!("--vary needs at least one value");
    }
    let out_root = args
        .out
        .unwrap_or_else(|| PathBuf::from("runs").join(format!("{}-sweep", base.name)));
    for value in values {
        let mut scenario = base.clone();
        match key {
            // values cross the CLI boundary in cm⁻¹, like the config file
            "coupling.strength" | "coupling.strength_cm1" => {
                scenario.coupling.strength = nmdyn_core::units::to_au(value, Unit::InverseCm);
            }
            "coupling.strength_hartree" => scenario.coupling.strength = value,
            other => bail!("unsupported sweep key {other:?} (coupling.strength)"),
        }
        scenario.name = format!("{}-W{value:e}", base.name);
        let dir = out_root.join(format!("W_{value:e}"));
        execute(
            &scenario,
            &dir,
            args.intervals.as_deref(),
            args.plots,
            args.svg,
        )?;
    }
    Ok(())
}

fn eigen(args: EigenArgs) -> Result<()> {
    let scenario = load_scenario(&args.config)?;
    let channel = match args.channel.as_deref() {
        Some("g") => Channel::Ground,
        Some("e") => Channel::Excited,
        Some(other) => bail!("--channel must be g or e, got {other:?}"),
        None => match &scenario.initial {
            InitialState::Eigenstate { channel, .. } => *channel,
            InitialState::Gaussian { channel, .. } => *channel,
            InitialState::SharedEigenstate { of_channel, .. } => *of_channel,
        },
    };
    let potential = match channel {
        Channel::Ground => &scenario.v_g,
        Channel::Excited => &scenario.v_e,
    };
    let solved = bound_states(potential, &scenario.grid, scenario.mass, args.count)?;
    if !solved.grid_adequate() {
        eprintln!(
            "warning: grid too small, highest state reaches the edge with amplitude {:.2e}",
            solved.edge_amplitude
        );
    }
    println!("# v    E (hartree)            E (cm^-1)");
    for (v, state) in solved.states.iter().enumerate() {
        println!(
            "{v:>3}    {:<22.15e} {:.6}",
            state.energy,
            from_au(state.energy, Unit::InverseCm)
        );
    }
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        let mut text = String::from("# r_bohr");
        for v in 0..solved.states.len() {
            text += &format!(" psi_{v}");
        }
        text.push('\n');
        for (i, r) in scenario.grid.positions().enumerate() {
            text += &format!("{r:.10e}");
            for state in &solved.states {
                text += &format!(" {:.10e}", state.wave.amplitudes()[i].re);
            }
            text.push('\n');
        }
        let path = dir.join("eigenstates.tsv");
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn oracle_check(name: &str) -> Result<()> {
    let mut failed = false;
    let mut check = |label: &str, value: f64, tol: f64| {
        let ok = value <= tol;
        failed |= !ok;
        println!(
            "  {label}: {value:.3e} (tolerance {tol:.0e}) {}",
            if ok { "PASS" } else { "FAIL" }
        );
    };
    match name {
        "rabi-flat" => {
            let s = presets::rabi_flat();
            let (traj, _) = run_scenario(&s)?;
            let mut pe = 0.0f64;
            let mut lin = 0.0f64;
            let mut g3 = 0.0f64;
            for row in &traj.samples {
                let reference = oracles::rabi_reference(s.coupling.strength, row.time);
                pe = pe.max((row.p_e - reference.p_e).abs());
                lin = lin.max(row.scalars.linear_entropy);
                if let Some(r) = &row.rates {
                    g3 = g3.max(r.gamma[2].abs());
                }
            }
            println!("rabi-flat vs analytic two-level solution:");
            check("max |P_e - cos²(Wt)|", pe, 1e-6);
            check("max linear entropy", lin, 1e-9);
            check("max |γ3|", g3, 1e-9);
        }
        "free-gaussian" => {
            let s = presets::free_gaussian();
            let mut prop = nmdyn_core::propagate::Propagator::new(&s)?;
            let mut state = s.initial_state()?;
            for _ in 0..(s.t_final / s.dt).round() as usize {
                prop.step(&mut state)?;
            }
            let (_, var) = state.psi_g.position_moments();
            let expect = oracles::free_gaussian_width_sq(1.0, s.mass, state.time);
            println!("free-gaussian dispersion after t = {:.0} au:", state.time);
            check("width² relative error", (var - expect).abs() / expect, 1e-6);
        }
        "displaced-harmonic" => {
            let displacement = 0.8;
            let s = presets::displaced_harmonic(displacement, 0.0);
            let (traj, _) = run_scenario(&s)?;
            let mut mag = 0.0f64;
            for row in &traj.samples {
                let reference = 0.5
                    * oracles::displaced_harmonic_overlap(
                        presets::DISPLACED_HARMONIC_OMEGA,
                        displacement,
                        presets::DISPLACED_HARMONIC_MASS,
                        row.time,
                    );
                mag = mag.max((row.overlap.norm() - reference.norm()).abs());
            }
            let series: Vec<(f64, ReducedDensity)> = traj
                .samples
                .iter()
                .map(|row| {
                    (
                        row.time,
                        ReducedDensity::new(row.p_g, row.p_e, row.overlap).unwrap(),
                    )
                })
                .collect();
            let fd = after_pulse_measure(&series, s.guards.eps_overlap)?;
            let mut route = 0.0f64;
            for (point, row) in fd.iter().zip(traj.samples.iter().skip(1)) {
                if let Some(r) = &row.rates {
                    route = route.max((point.f - r.f).abs() / r.f);
                }
            }
            println!("displaced-harmonic vs coherent-state overlap:");
            check("max |c| deviation", mag, 1e-6);
            check("rate-route disagreement", route, 1e-5);
        }
        other => bail!("unknown oracle {other:?} (rabi-flat | free-gaussian | displaced-harmonic)"),
    }
    if failed {
        bail!("oracle check failed");
    }
    println!("oracle {name}: all checks passed");
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.trajectory)
        .with_context(|| format!("reading {}", args.trajectory.display()))?;
    let trajectory = io::trajectory_from_csv(&text)?;
    let rep = interval_report(&trajectory, &args.intervals)?;
    let csv = io::intervals_to_csv(&rep)?;
    print!("{csv}");
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        let path = dir.join("intervals.csv");
        std::fs::write(&path, csv)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
