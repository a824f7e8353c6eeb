//! Command-line front end for the landing simulator.
//!
//! Subcommands: `run` one scenario, `sweep` a config grid, `tune-pid` the
//! baseline thrust gains, `report` tables from existing artifacts, and
//! `plot` SVGs from a log. Output lands under `--out`, or under the
//! `FLOWLANDER_OUT` root (default `out/`) with a per-command leaf.
//!
//! Exit codes: 0 success (a timeout still counts as a completed run), 1
//! config or IO error, 2 usage error, 3 simulation failure (partial log
//! preserved), 4 sweep with no successful cell.

mod artifacts;
mod config;
mod csvlog;
mod report;
mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use flowlander_core::{landing_metrics, run_scenario, tune_pid, SimLog, TerminalEvent};
use rayon::prelude::*;

use config::{FileConfig, SweepCell};
use report::CellResult;

const EXIT_SIM_FAILURE: u8 = 3;
const EXIT_ALL_CELLS_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "flowlander", version, about = "Optical-flow landing simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one landing scenario and write its artifacts.
    Run {
        /// Scenario config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: <root>/run).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace an existing output directory.
        #[arg(long)]
        overwrite: bool,
    },
    /// Run the cross-product grid in `[sweep]` and summarize it.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: <root>/sweep).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        overwrite: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Grid-search the baseline thrust gains at the flat tuning point.
    TunePid {
        #[arg(long)]
        config: PathBuf,
        /// Directory for the tuned config (default: print only).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        overwrite: bool,
    },
    /// Re-render summary tables from run or sweep artifacts.
    Report {
        /// Artifact directory produced by `run` or `sweep`.
        dir: PathBuf,
        /// Also write summary.txt / summary.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        overwrite: bool,
    },
    /// Draw an SVG from a run log.
    Plot {
        /// Log CSV produced by `run` or `sweep`.
        log: PathBuf,
        #[arg(long, value_enum, default_value_t = PlotKind::Timeseries)]
        kind: PlotKind,
        /// Output file (default: <log dir>/<kind>.svg).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        overwrite: bool,
        /// Scenario config for terrain/geometry (default: config.toml
        /// beside the log, else a flat default).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Trajectory snapshot spacing in seconds.
        #[arg(long, default_value_t = 0.5)]
        interval: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    /// Clearance, clearance rate, mean divergence, thrust.
    Timeseries,
    /// Adds roll, the divergence split, and the moment channel.
    SlopeLanding,
    /// World-frame path with terrain and body snapshots.
    Trajectory,
}

impl PlotKind {
    fn as_str(&self) -> &'static str {
        match self {
            PlotKind::Timeseries => "timeseries",
            PlotKind::SlopeLanding => "slope-landing",
            PlotKind::Trajectory => "trajectory",
        }
    }
}

/// `--out` wins; otherwise a per-command leaf under the `FLOWLANDER_OUT`
/// root (default `out/`).
fn resolve_out(cli: Option<PathBuf>, env_root: Option<OsString>, leaf: &str) -> PathBuf {
    match cli {
        Some(path) => path,
        None => PathBuf::from(env_root.unwrap_or_else(|| OsString::from("out"))).join(leaf),
    }
}

fn out_dir(cli: Option<PathBuf>, leaf: &str) -> PathBuf {
    resolve_out(cli, std::env::var_os("FLOWLANDER_OUT"), leaf)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Run { config, out, overwrite } => cmd_run(&config, out, overwrite),
        Cmd::Sweep { config, out, overwrite, jobs } => cmd_sweep(&config, out, overwrite, jobs),
        Cmd::TunePid { config, out, overwrite } => cmd_tune_pid(&config, out, overwrite),
        Cmd::Report { dir, out, overwrite } => cmd_report(&dir, out, overwrite),
        Cmd::Plot { log, kind, out, overwrite, config, interval } => {
            cmd_plot(&log, kind, out, overwrite, config, interval)
        }
    }
}

/// Runs one cell to artifacts inside `dir`; returns the cell's result row
/// and whether the run ended in a failure event.
fn run_to_artifacts(dir: &Path, file: &FileConfig) -> Result<(CellResult, bool)> {
    let cfg = file.resolve()?;
    artifacts::write_file(dir, "config.toml", &file.to_toml())?;
    let law = file.controller.law.clone();
    let (theta_star, alpha_deg) = (file.controller.theta_star, file.terrain.alpha_deg);
    let log: SimLog = run_scenario(&cfg).map_err(|e| anyhow::anyhow!("{e}"))?;
    artifacts::write_file(dir, "log.csv", &csvlog::to_csv(&log))?;
    let failed = matches!(log.terminal, TerminalEvent::Failure { .. });
    let (metrics, text) = match landing_metrics(&log, &cfg) {
        Ok(m) => (Some(m), report::metrics_text(&law, theta_star, alpha_deg, &log, &m)),
        Err(e) => (None, report::failure_text(&law, theta_star, alpha_deg, &e.to_string())),
    };
    artifacts::write_file(dir, "metrics.txt", &text)?;
    Ok((CellResult { law, theta_star, alpha_deg, metrics }, failed))
}

fn cmd_run(config: &Path, out: Option<PathBuf>, overwrite: bool) -> Result<ExitCode> {
    let file = FileConfig::load(config)?;
    file.resolve()?; // fail before touching the output directory
    let dir = out_dir(out, "run");
    artifacts::prepare_dir(&dir, overwrite)?;
    let (cell, failed) = run_to_artifacts(&dir, &file)?;
    let outcome = if failed {
        "failure"
    } else if cell.metrics.as_ref().is_some_and(|m| m.complete) {
        "touchdown"
    } else {
        "timeout"
    };
    println!("run: law={} outcome={outcome} artifacts={}", cell.law, dir.display());
    if failed {
        eprintln!("simulation failed; partial log preserved in {}", dir.display());
        return Ok(ExitCode::from(EXIT_SIM_FAILURE));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(
    config: &Path,
    out: Option<PathBuf>,
    overwrite: bool,
    jobs: Option<usize>,
) -> Result<ExitCode> {
    let file = FileConfig::load(config)?;
    let cells = file.sweep_cells()?;
    for cell in &cells {
        cell.file
            .resolve()
            .with_context(|| format!("sweep cell {}", cell.label))?;
    }
    let dir = out_dir(out, "sweep");
    artifacts::prepare_dir(&dir, overwrite)?;
    artifacts::write_file(&dir, "config.toml", &file.to_toml())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .context("building worker pool")?;
    let results: Vec<(usize, Result<CellResult>)> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell: &SweepCell| {
                let cell_dir = dir.join("cells").join(&cell.label);
                let run = std::fs::create_dir_all(&cell_dir)
                    .with_context(|| format!("creating {}", cell_dir.display()))
                    .and_then(|()| run_to_artifacts(&cell_dir, &cell.file))
                    .map(|(result, _)| result);
                (cell.id, run)
            })
            .collect()
    });

    let mut rows: Vec<CellResult> = Vec::with_capacity(cells.len());
    for ((_, run), cell) in results.into_iter().zip(&cells) {
        match run {
            Ok(row) => rows.push(row),
            Err(e) => {
                eprintln!("cell {}: {e:#}", cell.label);
                rows.push(CellResult {
                    law: cell.file.controller.law.clone(),
                    theta_star: cell.file.controller.theta_star,
                    alpha_deg: cell.file.terrain.alpha_deg,
                    metrics: None,
                });
            }
        }
    }

    let summary = report::render_summary(&rows)?;
    artifacts::write_file(&dir, "summary.txt", &summary.text)?;
    artifacts::write_file(&dir, "summary.csv", &summary.csv)?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", summary.text);
    println!("sweep: {} cells, artifacts={}", rows.len(), dir.display());
    if rows.iter().all(|r| r.metrics.is_none()) {
        eprintln!("every sweep cell failed");
        return Ok(ExitCode::from(EXIT_ALL_CELLS_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tune_pid(config: &Path, out: Option<PathBuf>, overwrite: bool) -> Result<ExitCode> {
    let file = FileConfig::load(config)?;
    let base = file.resolve()?;
    let tuned = match tune_pid(&base, &file.tune_grid()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("tuning failed: {e}");
            return Ok(ExitCode::from(EXIT_SIM_FAILURE));
        }
    };
    let t = tuned.thrust;
    println!("[controller.pid.thrust]");
    println!("kp = {}", t.kp);
    println!("ki = {}", t.ki);
    println!("kd = {}", t.kd);
    println!("i_limit = {}", t.i_limit);
    if let Some(out) = out {
        let dir = out_dir(Some(out), "tune-pid");
        artifacts::prepare_dir(&dir, overwrite)?;
        let mut tuned_file = file.clone();
        tuned_file.controller.pid.thrust = t.into();
        artifacts::write_file(&dir, "tuned.toml", &tuned_file.to_toml())?;
        println!("tune-pid: artifacts={}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(dir: &Path, out: Option<PathBuf>, overwrite: bool) -> Result<ExitCode> {
    let (text, csv) = if dir.join("cells").is_dir() {
        let (found, read_warnings) = artifacts::read_cells(dir)?;
        let cells = expected_grid(dir)
            .map(|grid| align_to_grid(&grid, &found))
            .unwrap_or(found);
        let summary = report::render_summary(&cells)?;
        for w in read_warnings.iter().chain(&summary.warnings) {
            eprintln!("warning: {w}");
        }
        (summary.text, summary.csv)
    } else {
        let path = dir.join("metrics.txt");
        let metrics = std::fs::read_to_string(&path)
            .with_context(|| format!("{} holds neither sweep cells nor a run", dir.display()))?;
        report::parse_metrics_text(&metrics)?;
        let csv = single_run_csv(&metrics);
        (metrics, csv)
    };
    print!("{text}");
    if let Some(out) = out {
        artifacts::prepare_dir(&out, overwrite)?;
        artifacts::write_file(&out, "summary.txt", &text)?;
        artifacts::write_file(&out, "summary.csv", &csv)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// The grid a sweep directory's snapshot promises, if it is recoverable.
fn expected_grid(dir: &Path) -> Option<Vec<SweepCell>> {
    let file = FileConfig::load(&dir.join("config.toml")).ok()?;
    file.sweep_cells().ok()
}

/// Orders the found cells along the snapshot grid so vanished cells still
/// render as blanks in their place.
fn align_to_grid(grid: &[SweepCell], found: &[CellResult]) -> Vec<CellResult> {
    // Coordinates survive the metrics files at nine significant digits.
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-8 * b.abs().max(1.0);
    grid.iter()
        .map(|cell| {
            let (law, ts, a) = (
                &cell.file.controller.law,
                cell.file.controller.theta_star,
                cell.file.terrain.alpha_deg,
            );
            let metrics = found
                .iter()
                .find(|c| c.law == *law && same(c.theta_star, ts) && same(c.alpha_deg, a))
                .and_then(|c| c.metrics);
            CellResult { law: law.clone(), theta_star: ts, alpha_deg: a, metrics }
        })
        .collect()
}

/// `key = value` lines as a one-row CSV.
fn single_run_csv(metrics: &str) -> String {
    let pairs: Vec<(&str, &str)> =
        metrics.lines().filter_map(|l| l.split_once(" = ")).collect();
    let header: Vec<&str> = pairs.iter().map(|(k, _)| *k).collect();
    let row: Vec<&str> = pairs.iter().map(|(_, v)| *v).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn cmd_plot(
    log: &Path,
    kind: PlotKind,
    out: Option<PathBuf>,
    overwrite: bool,
    config: Option<PathBuf>,
    interval: f64,
) -> Result<ExitCode> {
    let text = std::fs::read_to_string(log).with_context(|| format!("reading {}", log.display()))?;
    let data = csvlog::parse_csv(&text)?;
    if data.is_empty() {
        bail!("{} holds no samples", log.display());
    }
    if !(interval.is_finite() && interval > 0.0) {
        bail!("--interval must be a positive number of seconds");
    }
    let svg = match kind {
        PlotKind::Timeseries => svg::timeseries_svg(&data),
        PlotKind::SlopeLanding => svg::slope_landing_svg(&data),
        PlotKind::Trajectory => {
            let sibling = log.parent().map(|p| p.join("config.toml"));
            let cfg_path = config.or(sibling.filter(|p| p.is_file()));
            let (bc, alpha_deg) = match cfg_path {
                Some(path) => {
                    let file = FileConfig::load(&path)?;
                    (file.vehicle.bc, file.terrain.alpha_deg)
                }
                None => {
                    let file = FileConfig::default();
                    (file.vehicle.bc, file.terrain.alpha_deg)
                }
            };
            svg::trajectory_svg(&data, bc, alpha_deg, interval)
        }
    };
    let target = out.unwrap_or_else(|| {
        log.parent().unwrap_or(Path::new(".")).join(format!("{}.svg", kind.as_str()))
    });
    artifacts::prepare_file(&target, overwrite)?;
    std::fs::write(&target, svg).with_context(|| format!("writing {}", target.display()))?;
    println!("plot: kind={} file={}", kind.as_str(), target.display());
    Ok(ExitCode::SUCCESS)
}
