//! Persistence: the trajectory CSV contract, interval CSV, run manifest
//! with content hashes, plot-data series, and a minimal SVG renderer.
//!
//! The trajectory column order is a stable contract:
//! `time,P_g,P_e,re_overlap,im_overlap,dPg_dt,abs_dov_dt,gamma1,gamma2,
//! gamma3,rate_sum,nm_factor,f,n_index,case,L,S_vN,C_l1,IS_factor,
//! bloch_logderiv,valid`. Numbers are written in scientific notation with
//! 17 significant digits; guard-invalid samples leave the rate columns
//! empty and carry valid=0. NaN is never written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::nonmarkov::DynamicsCase;
use crate::observables::CorrelationScalars;
use crate::report::IntervalReport;
use crate::runner::RunStats;
use crate::trajectory::{DiagnosticsSample, RateBlock, RunMeta, Trajectory};

pub const TRAJECTORY_HEADER: &str = "time,P_g,P_e,re_overlap,im_overlap,dPg_dt,abs_dov_dt,gamma1,gamma2,gamma3,rate_sum,nm_factor,f,n_index,case,L,S_vN,C_l1,IS_factor,bloch_logderiv,valid";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error("refusing to serialize a non-finite value in column {column}")]
    NonFinite { column: &'static str },
    #[error("io: {0}")]
    Disk(String),
}

fn fmt_f64(x: f64, column: &'static str, out: &mut String) -> Result<(), IoError> {
    if !x.is_finite() {
        return Err(IoError::NonFinite { column });
    }
    write!(out, "{x:.16e}").expect("formatting into a String");
    Ok(())
}

/// Serialize the trajectory under the stable column contract.
pub fn trajectory_to_csv(traj: &Trajectory) -> Result<String, IoError> {
    let mut out = String::with_capacity(64 + traj.samples.len() * 420);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        fmt_f64(s.time, "time", &mut out)?;
        out.push(',');
        fmt_f64(s.p_g, "P_g", &mut out)?;
        out.push(',');
        fmt_f64(s.p_e, "P_e", &mut out)?;
        out.push(',');
        fmt_f64(s.overlap.re, "re_overlap", &mut out)?;
        out.push(',');
        fmt_f64(s.overlap.im, "im_overlap", &mut out)?;
        out.push(',');
        fmt_f64(s.dpg_dt, "dPg_dt", &mut out)?;
        out.push(',');
        fmt_f64(s.abs_overlap_rate, "abs_dov_dt", &mut out)?;
        out.push(',');
        match &s.rates {
            Some(r) => {
                fmt_f64(r.gamma[0], "gamma1", &mut out)?;
                out.push(',');
                fmt_f64(r.gamma[1], "gamma2", &mut out)?;
                out.push(',');
                fmt_f64(r.gamma[2], "gamma3", &mut out)?;
                out.push(',');
                fmt_f64(r.rate_sum, "rate_sum", &mut out)?;
                out.push(',');
                fmt_f64(s.nm_factor, "nm_factor", &mut out)?;
                out.push(',');
                fmt_f64(r.f, "f", &mut out)?;
                out.push(',');
                write!(out, "{}", r.n_index).unwrap();
                out.push(',');
                write!(out, "{}", s.case).unwrap();
                out.push(',');
            }
            None => {
                // empty rate fields, but the factor and case stay reportable
                out.push_str(",,,,");
                fmt_f64(s.nm_factor, "nm_factor", &mut out)?;
                out.push_str(",,,");
                write!(out, "{}", s.case).unwrap();
                out.push(',');
            }
        }
        fmt_f64(s.scalars.linear_entropy, "L", &mut out)?;
        out.push(',');
        fmt_f64(s.scalars.von_neumann, "S_vN", &mut out)?;
        out.push(',');
        fmt_f64(s.scalars.l1_coherence, "C_l1", &mut out)?;
        out.push(',');
        fmt_f64(s.scalars.skew_factor, "IS_factor", &mut out)?;
        out.push(',');
        if let Some(r) = &s.rates {
            fmt_f64(r.bloch_log_derivative, "bloch_logderiv", &mut out)?;
        }
        out.push(',');
        out.push(if s.rates.is_some() { '1' } else { '0' });
        out.push('\n');
    }
    Ok(out)
}

/// Parse a trajectory CSV produced by [`trajectory_to_csv`].
///
/// The derivative of the overlap is not serialized; parsed samples carry a
/// zero `overlap_rate`.
pub fn trajectory_from_csv(text: &str) -> Result<Trajectory, IoError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| IoError::Csv {
        line: 1,
        reason: "empty file".into(),
    })?;
    if header != TRAJECTORY_HEADER {
        return Err(IoError::Csv {
            line: 1,
            reason: "unexpected header".into(),
        });
    }

    let mut samples = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 21 {
            return Err(IoError::Csv {
                line: lineno,
                reason: format!("expected 21 columns, got {}", cols.len()),
            });
        }
        let num = |i: usize| -> Result<f64, IoError> {
            cols[i].parse::<f64>().map_err(|e| IoError::Csv {
                line: lineno,
                reason: format!("column {}: {e}", i + 1),
            })
        };
        let valid = cols[20].trim() == "1";
        let rates = if valid {
            Some(RateBlock {
                gamma: [num(7)?, num(8)?, num(9)?],
                rate_sum: num(10)?,
                f: num(12)?,
                n_index: cols[13].parse::<u8>().map_err(|e| IoError::Csv {
                    line: lineno,
                    reason: format!("n_index: {e}"),
                })?,
                bloch_log_derivative: num(19)?,
            })
        } else {
            None
        };
        let case = DynamicsCase::from_label(cols[14]).ok_or_else(|| IoError::Csv {
            line: lineno,
            reason: format!("unknown case label {:?}", cols[14]),
        })?;
        let p_g = num(1)?;
        let p_e = num(2)?;
        samples.push(DiagnosticsSample {
            time: num(0)?,
            p_g,
            p_e,
            overlap: Complex64::new(num(3)?, num(4)?),
            dpg_dt: num(5)?,
            abs_overlap_rate: num(6)?,
            overlap_rate: Complex64::ZERO,
            nm_factor: num(11)?,
            case,
            scalars: CorrelationScalars {
                linear_entropy: num(15)?,
                von_neumann: num(16)?,
                l1_coherence: num(17)?,
                skew_factor: num(18)?,
                population_product: p_g * p_e,
            },
            rates,
            guard: None,
        });
    }

    Ok(Trajectory {
        meta: RunMeta {
            scenario_name: "parsed".into(),
            method: "unknown".into(),
            dt: f64::NAN,
            sample_stride: 1,
            t_final: samples.last().map(|s| s.time).unwrap_or(0.0),
            code_version: String::new(),
        },
        samples,
    })
}

/// Serialize an interval report.
pub fn intervals_to_csv(report: &IntervalReport) -> Result<String, IoError> {
    let mut out = String::from("t1,t2,F,mean_n_index,bloch_ratio,invalid_samples,skipped_span\n");
    for row in &report.rows {
        fmt_f64(row.t1, "t1", &mut out)?;
        out.push(',');
        fmt_f64(row.t2, "t2", &mut out)?;
        out.push(',');
        fmt_f64(row.total_f, "F", &mut out)?;
        out.push(',');
        if let Some(n) = row.mean_n_index {
            fmt_f64(n, "mean_n_index", &mut out)?;
        }
        out.push(',');
        if let Some(b) = row.bloch_ratio {
            fmt_f64(b, "bloch_ratio", &mut out)?;
        }
        out.push(',');
        write!(out, "{},", row.gaps.invalid_samples).unwrap();
        fmt_f64(row.gaps.skipped_span, "skipped_span", &mut out)?;
        out.push('\n');
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Run manifest: config echo, code version, wall times, guard-gap
/// statistics, and a content hash for every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_echo: String,
    pub code_version: String,
    pub stats: RunStats,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# run manifest\n");
        writeln!(out, "code_version = \"{}\"", self.code_version).unwrap();
        writeln!(out, "started_unix_s = {}", self.stats.started_unix_s).unwrap();
        writeln!(out, "finished_unix_s = {}", self.stats.finished_unix_s).unwrap();
        writeln!(out, "wall_seconds = {:.3}", self.stats.wall_seconds).unwrap();
        writeln!(out, "steps = {}", self.stats.steps).unwrap();
        writeln!(out, "samples = {}", self.stats.samples).unwrap();
        writeln!(out, "valid_samples = {}", self.stats.valid_samples).unwrap();
        writeln!(out, "guard_gap_longest = {}", self.stats.longest_gap).unwrap();
        out.push_str("\n[outputs]\n");
        for rec in &self.outputs {
            writeln!(
                out,
                "{} bytes={} sha256={}",
                rec.name, rec.bytes, rec.sha256
            )
            .unwrap();
        }
        out.push_str("\n[config]\n");
        for line in self.config_echo.lines() {
            writeln!(out, "# {line}").unwrap();
        }
        out
    }
}

/// Options for [`write_outputs`].
#[derive(Debug, Clone, Default)]
pub struct OutputOptions {
    pub plots: bool,
    pub svg: bool,
}

/// Write trajectory.csv, intervals.csv, the resolved-config echo, optional
/// plot data, and finally the manifest listing every file with its hash.
pub fn write_outputs(
    traj: &Trajectory,
    report: Option<&IntervalReport>,
    config_echo: &str,
    stats: &RunStats,
    out_dir: &Path,
    opts: &OutputOptions,
) -> Result<RunManifest, IoError> {
    std::fs::create_dir_all(out_dir).map_err(|e| IoError::Disk(e.to_string()))?;
    let mut outputs = Vec::new();
    let mut write_file = |name: &str, content: &str| -> Result<(), IoError> {
        let path = out_dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| IoError::Disk(e.to_string()))?;
        }
        std::fs::write(&path, content).map_err(|e| IoError::Disk(e.to_string()))?;
        outputs.push(OutputRecord {
            name: name.to_string(),
            bytes: content.len(),
            sha256: sha256_hex(content.as_bytes()),
        });
        Ok(())
    };

    write_file("trajectory.csv", &trajectory_to_csv(traj)?)?;
    if let Some(rep) = report {
        write_file("intervals.csv", &intervals_to_csv(rep)?)?;
    }
    write_file("config_resolved.toml", config_echo)?;

    if opts.plots {
        for (name, series) in plot_series(traj) {
            let mut text = String::new();
            for (t, v) in &series {
                writeln!(text, "{t:.16e}\t{v:.16e}").unwrap();
            }
            write_file(&format!("plotdata/{name}.tsv"), &text)?;
        }
        if opts.svg {
            write_file("panels.svg", &render_panels_svg(traj))?;
        }
    }

    let manifest = RunManifest {
        config_echo: config_echo.to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        stats: stats.clone(),
        outputs,
    };
    let path = out_dir.join("manifest.txt");
    std::fs::write(&path, manifest.render()).map_err(|e| IoError::Disk(e.to_string()))?;
    Ok(manifest)
}

/// Two-column series mirroring the usual diagnostic panels: populations,
/// the non-Markovianity factor, entropies, skew factor, coherence, f.
pub fn plot_series(traj: &Trajectory) -> Vec<(String, Vec<(f64, f64)>)> {
    let take = |f: &dyn Fn(&DiagnosticsSample) -> Option<f64>| -> Vec<(f64, f64)> {
        traj.samples
            .iter()
            .filter_map(|s| f(s).map(|v| (s.time, v)))
            .collect()
    };
    vec![
        ("panel_a_population_g".to_string(), take(&|s| Some(s.p_g))),
        ("panel_a_population_e".to_string(), take(&|s| Some(s.p_e))),
        (
            "panel_b_nm_factor".to_string(),
            take(&|s| Some(s.nm_factor)),
        ),
        (
            "panel_c_linear_entropy".to_string(),
            take(&|s| Some(s.scalars.linear_entropy)),
        ),
        (
            "panel_c_von_neumann".to_string(),
            take(&|s| Some(s.scalars.von_neumann)),
        ),
        (
            "panel_d_skew_factor".to_string(),
            take(&|s| Some(s.scalars.skew_factor)),
        ),
        (
            "panel_e_abs_overlap".to_string(),
            take(&|s| Some(s.overlap.norm())),
        ),
        (
            "panel_f_measure".to_string(),
            take(&|s| s.rates.map(|r| r.f)),
        ),
    ]
}

/// Minimal static SVG rendering of the diagnostic panels.
pub fn render_panels_svg(traj: &Trajectory) -> String {
    let series = plot_series(traj);
    let width = 720.0;
    let panel_h = 110.0;
    let pad = 34.0;
    let total_h = (panel_h + 18.0) * series.len() as f64 + pad;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{total_h:.0}\" viewBox=\"0 0 {width} {total_h:.0}\">\n"
    );
    for (panel_idx, (name, data)) in series.iter().enumerate() {
        let y0 = pad + (panel_h + 18.0) * panel_idx as f64;
        let _ = writeln!(
            svg,
            "<text x=\"8\" y=\"{:.1}\" font-size=\"11\" font-family=\"monospace\">{name}</text>",
            y0 - 6.0
        );
        if data.len() < 2 {
            continue;
        }
        let (t_lo, t_hi) = (data[0].0, data[data.len() - 1].0);
        let (mut v_lo, mut v_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (_, v) in data {
            v_lo = v_lo.min(*v);
            v_hi = v_hi.max(*v);
        }
        if v_hi - v_lo < 1e-300 {
            v_hi = v_lo + 1.0;
        }
        let mut points = String::new();
        for (t, v) in data {
            let x = 40.0 + (width - 60.0) * (t - t_lo) / (t_hi - t_lo).max(1e-300);
            let y = y0 + panel_h - panel_h * (v - v_lo) / (v_hi - v_lo);
            let _ = write!(points, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"#205080\" stroke-width=\"1\" points=\"{}\"/>",
            points.trim_end()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Resolve an output directory, creating parents as needed.
pub fn ensure_dir(path: &Path) -> Result<PathBuf, IoError> {
    std::fs::create_dir_all(path).map_err(|e| IoError::Disk(e.to_string()))?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonmarkov::GuardTrip;
    use crate::observables::{correlation_scalars, ReducedDensity};

    fn sample(t: f64, valid: bool) -> DiagnosticsSample {
        let rho = ReducedDensity::new(0.25, 0.75, Complex64::new(0.11, -0.07)).unwrap();
        DiagnosticsSample {
            time: t,
            p_g: rho.p_g,
            p_e: rho.p_e,
            overlap: rho.overlap,
            dpg_dt: -2.5e-5,
            abs_overlap_rate: 3.25e-5,
            overlap_rate: Complex64::new(1e-5, -3e-5),
            nm_factor: -1.25e-5,
            case: DynamicsCase::OneNegativeRate,
            scalars: correlation_scalars(&rho),
            rates: valid.then_some(RateBlock {
                gamma: [1.5e-4, -2.5e-4, 0.5e-4],
                rate_sum: -0.5e-4,
                f: 2.5e-4,
                n_index: 1,
                bloch_log_derivative: 1e-4,
            }),
            guard: (!valid).then_some(GuardTrip::Overlap),
        }
    }

    fn trajectory(n: usize) -> Trajectory {
        Trajectory {
            meta: RunMeta {
                scenario_name: "io-test".into(),
                method: "split-operator".into(),
                dt: 0.25,
                sample_stride: 2,
                t_final: n as f64 * 0.5,
                code_version: "test".into(),
            },
            samples: (0..n).map(|i| sample(i as f64 * 0.5, i != 1)).collect(),
        }
    }

    #[test]
    fn header_is_the_contract() {
        let csv = trajectory_to_csv(&trajectory(0)).unwrap();
        assert_eq!(csv.trim_end(), TRAJECTORY_HEADER);
    }

    #[test]
    fn row_count_and_flags() {
        let csv = trajectory_to_csv(&trajectory(3)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(",1"));
        assert!(lines[2].ends_with(",0"));
        // invalid row leaves the gamma columns empty
        let cols: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(cols.len(), 21);
        assert!(cols[7].is_empty() && cols[8].is_empty() && cols[9].is_empty());
        assert!(!cols[11].is_empty(), "nm_factor stays reportable");
        assert_eq!(cols[14], "i");
    }

    #[test]
    fn csv_round_trip_preserves_diagnostics() {
        let traj = trajectory(5);
        let csv = trajectory_to_csv(&traj).unwrap();
        let parsed = trajectory_from_csv(&csv).unwrap();
        assert_eq!(parsed.samples.len(), traj.samples.len());
        for (a, b) in traj.samples.iter().zip(&parsed.samples) {
            assert_eq!(a.time, b.time);
            assert_eq!(a.p_g, b.p_g);
            assert_eq!(a.overlap, b.overlap);
            assert_eq!(a.dpg_dt, b.dpg_dt);
            assert_eq!(a.nm_factor, b.nm_factor);
            assert_eq!(a.case, b.case);
            assert_eq!(a.scalars.linear_entropy, b.scalars.linear_entropy);
            assert_eq!(a.scalars.skew_factor, b.scalars.skew_factor);
            assert_eq!(a.rates.is_some(), b.rates.is_some());
            if let (Some(ra), Some(rb)) = (&a.rates, &b.rates) {
                assert_eq!(ra.gamma, rb.gamma);
                assert_eq!(ra.f, rb.f);
                assert_eq!(ra.n_index, rb.n_index);
            }
        }
    }

    #[test]
    fn serialization_is_deterministic() {
        let a = trajectory_to_csv(&trajectory(4)).unwrap();
        let b = trajectory_to_csv(&trajectory(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn manifest_lists_every_output_with_hash() {
        let dir = std::env::temp_dir().join(format!("nmdyn-io-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let traj = trajectory(3);
        let stats = RunStats {
            started_unix_s: 0,
            finished_unix_s: 0,
            wall_seconds: 0.0,
            steps: 6,
            samples: 3,
            valid_samples: 2,
            longest_gap: 1,
        };
        let manifest = write_outputs(
            &traj,
            None,
            "preset = \"io-test\"\n",
            &stats,
            &dir,
            &OutputOptions::default(),
        )
        .unwrap();
        for rec in &manifest.outputs {
            let bytes = std::fs::read(dir.join(&rec.name)).unwrap();
            assert_eq!(rec.bytes, bytes.len());
            assert_eq!(rec.sha256, sha256_hex(&bytes));
        }
        assert!(dir.join("manifest.txt").exists());
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn empty_trajectory_writes_header_and_notes_zero_samples() {
        let dir = std::env::temp_dir().join(format!("nmdyn-io-empty-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let traj = trajectory(0);
        let stats = RunStats {
            started_unix_s: 0,
            finished_unix_s: 0,
            wall_seconds: 0.0,
            steps: 0,
            samples: 0,
            valid_samples: 0,
            longest_gap: 0,
        };
        write_outputs(&traj, None, "", &stats, &dir, &OutputOptions::default()).unwrap();
        let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
        assert_eq!(csv.trim_end(), TRAJECTORY_HEADER);
        let manifest = std::fs::read_to_string(dir.join("manifest.txt")).unwrap();
        assert!(manifest.contains("samples = 0"));
        let _ = std::fs::remove_dir_all(&dir);
    }
}
