//! Acceptance gate: the ten guarantees the shipped defaults must honor,
//! one test per criterion with its tolerance stated inline. Each test
//! prints a single `criterion NN PASS` line (visible with `--nocapture`)
//! and fails loudly otherwise.

use std::path::{Path, PathBuf};
use std::process::Command;

use flowlander_core::{
    affine_model_residual, clearance_values, landing_metrics, median_abs, rms, run_scenario,
    tune_pid, ControlLaw, GainGrid, LandingMetrics, ScenarioConfig, SimLog, Terrain,
    VehicleParams, VehicleState,
};

const SETPOINTS: [f64; 3] = [-0.1, -0.2, -0.3];
const SLOPES_DEG: [f64; 3] = [10.0, 20.0, 30.0];

fn flat_cfg(theta_star: f64, law: ControlLaw) -> ScenarioConfig {
    let mut cfg = ScenarioConfig { law, ..Default::default() };
    cfg.controller.theta_star = theta_star;
    cfg
}

fn slope_cfg(alpha_deg: f64, law: ControlLaw) -> ScenarioConfig {
    ScenarioConfig { terrain: Terrain { alpha: alpha_deg.to_radians() }, law, ..Default::default() }
}

/// Runs to touchdown; timeouts and failures are acceptance failures.
fn run(cfg: &ScenarioConfig) -> (SimLog, LandingMetrics) {
    let log = run_scenario(cfg).expect("valid scenario");
    let m = landing_metrics(&log, cfg).expect("metrics");
    assert!(m.complete, "run did not reach touchdown: {:?}", log.terminal);
    (log, m)
}

#[test]
fn criterion_01_constant_divergence_descent_decays_exponentially() {
    // Tolerance: fitted decay slope within 10% of the setpoint and
    // y1-tracking RMSE at most 0.1·|setpoint|, per setpoint.
    let mut detail = String::new();
    for ts in SETPOINTS {
        let (_, m) = run(&flat_cfg(ts, ControlLaw::Indi));
        let slope_err = (m.decay_slope - ts).abs() / ts.abs();
        assert!(slope_err <= 0.10, "ts={ts}: decay slope {} off by {slope_err:.2e}", m.decay_slope);
        assert!(
            m.rmse_y1 <= 0.1 * ts.abs(),
            "ts={ts}: rmse_y1 {} exceeds {}",
            m.rmse_y1,
            0.1 * ts.abs()
        );
        detail.push_str(&format!(" ts={ts}: slope={:.4}, rmse={:.2e};", m.decay_slope, m.rmse_y1));
    }
    println!("criterion 01 PASS: exponential decay tracks the setpoint —{detail}");
}

#[test]
fn criterion_02_height_and_speed_vanish_together_at_contact() {
    // Tolerance: |ḣ/h − setpoint| ≤ 0.5·|setpoint| at the last pre-contact
    // sample, and |v_td| ≤ 1.5·|setpoint|·touchdown_threshold.
    let mut detail = String::new();
    for ts in SETPOINTS {
        let cfg = flat_cfg(ts, ControlLaw::Indi);
        let (log, m) = run(&cfg);
        let last = log.rows.last().expect("non-empty log");
        let div = last.clearances.hdot / last.clearances.h;
        assert!(
            (div - ts).abs() <= 0.5 * ts.abs(),
            "ts={ts}: divergence at contact {div} strayed from the setpoint"
        );
        let v_cap = 1.5 * ts.abs() * cfg.touchdown_threshold;
        assert!(m.v_td <= v_cap, "ts={ts}: v_td {} exceeds {v_cap}", m.v_td);
        detail.push_str(&format!(" ts={ts}: div={div:.4}, v_td={:.4};", m.v_td));
    }
    println!("criterion 02 PASS: divergence holds to the last sample —{detail}");
}

#[test]
fn criterion_03_incremental_law_tracks_tighter_than_tuned_baseline() {
    // Tolerance: strict rmse_y1 ordering at every setpoint, with the
    // baseline's thrust gains coming from the pinned grid search.
    let base = ScenarioConfig::default();
    let tuned = tune_pid(&base, &GainGrid::default()).expect("grid admits a landing");
    assert_eq!(
        tuned.thrust, base.pid.thrust,
        "shipped baseline gains must equal the grid-search winner"
    );
    let mut detail = String::new();
    for ts in SETPOINTS {
        let (_, indi) = run(&flat_cfg(ts, ControlLaw::Indi));
        let mut pid_cfg = flat_cfg(ts, ControlLaw::Pid);
        pid_cfg.pid = tuned;
        let (_, pid) = run(&pid_cfg);
        assert!(
            indi.rmse_y1 < pid.rmse_y1,
            "ts={ts}: incremental {} not below baseline {}",
            indi.rmse_y1,
            pid.rmse_y1
        );
        detail.push_str(&format!(" ts={ts}: {:.2e} < {:.2e};", indi.rmse_y1, pid.rmse_y1));
    }
    println!("criterion 03 PASS: tracking beats the tuned baseline —{detail}");
}

#[test]
fn criterion_04_touchdown_aligns_roll_with_the_slope() {
    // Tolerance: final roll within ±3° of the slope and |y2| below eps_y at
    // the last pre-contact sample, per slope.
    let mut detail = String::new();
    for a in SLOPES_DEG {
        let cfg = slope_cfg(a, ControlLaw::Indi);
        let (log, m) = run(&cfg);
        let err = m.phi_f_deg - a;
        assert!(err.abs() <= 3.0, "alpha={a}: phi_f {} off by {err}", m.phi_f_deg);
        let y2_td = log.rows.last().expect("non-empty log").obs.y2.abs();
        assert!(
            y2_td < cfg.controller.eps_y,
            "alpha={a}: |y2| at contact {y2_td} reached eps_y"
        );
        detail.push_str(&format!(" a={a}: phi_f={:.2}, |y2|={y2_td:.3};", m.phi_f_deg));
    }
    println!("criterion 04 PASS: roll meets the slope at contact —{detail}");
}

#[test]
fn criterion_05_drift_compensation_cancels_downhill_drift() {
    // Tolerance: strict |Y_drift| orderings per slope — compensation on
    // beats off, and the incremental law beats the tuned baseline.
    let mut detail = String::new();
    for a in SLOPES_DEG {
        let (_, on) = run(&slope_cfg(a, ControlLaw::Indi));
        let mut off_cfg = slope_cfg(a, ControlLaw::Indi);
        off_cfg.controller.drift_compensation = false;
        // Without the drift channel the vehicle may never touch down
        // inside the horizon; the drift metric is valid either way.
        let off_log = run_scenario(&off_cfg).expect("valid scenario");
        let off = landing_metrics(&off_log, &off_cfg).expect("metrics");
        let (_, pid) = run(&slope_cfg(a, ControlLaw::Pid));
        assert!(
            on.y_drift.abs() < off.y_drift.abs(),
            "alpha={a}: drift {} not reduced from {}",
            on.y_drift,
            off.y_drift
        );
        assert!(
            on.y_drift.abs() < pid.y_drift.abs(),
            "alpha={a}: drift {} not below baseline {}",
            on.y_drift,
            pid.y_drift
        );
        detail.push_str(&format!(
            " a={a}: |{:.3}| < |{:.3}| (off), < |{:.3}| (pid);",
            on.y_drift, off.y_drift, pid.y_drift
        ));
    }
    println!("criterion 05 PASS: drift compensation earns its keep —{detail}");
}

#[test]
fn criterion_06_split_regulation_beats_baseline_on_slopes() {
    // Tolerance: strict rmse_y2 ordering per slope.
    let mut detail = String::new();
    for a in SLOPES_DEG {
        let (_, indi) = run(&slope_cfg(a, ControlLaw::Indi));
        let (_, pid) = run(&slope_cfg(a, ControlLaw::Pid));
        assert!(
            indi.rmse_y2 < pid.rmse_y2,
            "alpha={a}: incremental {} not below baseline {}",
            indi.rmse_y2,
            pid.rmse_y2
        );
        detail.push_str(&format!(" a={a}: {:.4} < {:.4};", indi.rmse_y2, pid.rmse_y2));
    }
    println!("criterion 06 PASS: split regulation orders correctly —{detail}");
}

/// Deterministic 64-bit generator (splitmix64), portable across platforms.
struct Rng(u64);

impl Rng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [lo, hi).
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[test]
fn criterion_07_clearance_geometry_matches_vertical_ray_oracle() {
    // Tolerance: ≤ 1e-12 relative error against brute-force vertical rays
    // from each station, across 10^4 randomized states with |phi| < 1.2 rad
    // and |alpha| ≤ 35°.
    let params = VehicleParams::default();
    let mut rng = Rng(0x5eed_1234_5678_9abc);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let alpha = rng.uniform(-35.0, 35.0).to_radians();
        let terrain = Terrain { alpha };
        let y = rng.uniform(-10.0, 10.0);
        let state = VehicleState {
            y,
            z: terrain.surface_z(y) + rng.uniform(0.5, 20.0),
            phi: rng.uniform(-1.2, 1.2),
            ydot: rng.uniform(-3.0, 3.0),
            zdot: rng.uniform(-3.0, 3.0),
            phidot: rng.uniform(-2.0, 2.0),
        };
        let clr = clearance_values(&state, &terrain, &params);
        // Brute force: drop a vertical ray from the center and from each
        // camera station's world position onto the surface line.
        let (sin_phi, cos_phi) = (state.phi.sin(), state.phi.cos());
        let stations = [
            (state.y, state.z, clr.h),
            (state.y - params.bc * cos_phi, state.z - params.bc * sin_phi, clr.hl),
            (state.y + params.bc * cos_phi, state.z + params.bc * sin_phi, clr.hr),
        ];
        for (sy, sz, got) in stations {
            let oracle = sz - terrain.surface_z(sy);
            let rel = (got - oracle).abs() / oracle.abs();
            worst = worst.max(rel);
            assert!(
                rel <= 1e-12,
                "state {state:?} alpha={alpha}: clearance {got} vs oracle {oracle}"
            );
        }
    }
    println!("criterion 07 PASS: geometry matches the ray oracle — worst rel err {worst:.2e}");
}

#[test]
fn criterion_08_affine_rate_model_explains_measured_rates() {
    // Tolerance: median |ẏ1 residual| below 2% of the measured-rate RMS on
    // the default descent.
    let cfg = ScenarioConfig::default();
    let (log, _) = run(&cfg);
    let comps = affine_model_residual(&log, &cfg);
    let residuals: Vec<f64> = comps.iter().map(|c| c.residual()[0]).collect();
    let measured: Vec<f64> = comps.iter().map(|c| c.measured[0]).collect();
    let med = median_abs(&residuals).expect("non-empty");
    let scale = rms(&measured).expect("non-empty");
    assert!(med < 0.02 * scale, "median residual {med} vs 2% of RMS {}", 0.02 * scale);
    println!(
        "criterion 08 PASS: affine rate model holds — median residual {med:.2e} = {:.4}% of RMS",
        100.0 * med / scale
    );
}

#[test]
fn criterion_09_level_and_mirrored_runs_are_symmetric() {
    // Tolerance: flat level runs keep max|y2| ≤ 1e-10; ±20° mirrored runs
    // agree under mirroring to ≤ 1e-9 on every logged sample.
    let (flat_log, _) = run(&ScenarioConfig::default());
    let max_y2 = flat_log.rows.iter().map(|r| r.obs.y2.abs()).fold(0.0, f64::max);
    let max_u2 = flat_log.rows.iter().map(|r| r.cmd.u2.abs()).fold(0.0, f64::max);
    assert!(max_y2 <= 1e-10, "level run grew a split: max|y2| = {max_y2}");
    assert!(max_u2 <= 1e-10, "level run commanded a moment: max|u2| = {max_u2}");

    let base = slope_cfg(20.0, ControlLaw::Indi);
    let mut mirror = slope_cfg(-20.0, ControlLaw::Indi);
    mirror.kick = Some(base.controller.theta_star * base.h0);
    let mut base_run = base;
    base_run.kick = mirror.kick;
    let (log_p, _) = run(&base_run);
    let (log_m, _) = run(&mirror);
    assert_eq!(log_p.rows.len(), log_m.rows.len(), "mirrored runs diverged in length");
    let mut worst = 0.0f64;
    for (p, m) in log_p.rows.iter().zip(&log_m.rows) {
        for (a, b) in [
            (p.state.y, -m.state.y),
            (p.state.phi, -m.state.phi),
            (p.state.z, m.state.z),
            (p.obs.y2, -m.obs.y2),
            (p.cmd.u1, m.cmd.u1),
            (p.cmd.u2, -m.cmd.u2),
        ] {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst <= 1e-9, "mirror symmetry broke: worst deviation {worst:.2e}");
    println!(
        "criterion 09 PASS: symmetry holds — flat max|y2|={max_y2:.1e}, mirror worst={worst:.1e}"
    );
}

// --- criterion 10 drives the installed binary ---------------------------

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_flowlander"));
    cmd.env_remove("FLOWLANDER_OUT");
    cmd
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

/// Data cells per law row of a shaped summary CSV, checking every cell
/// parses as a finite number.
fn shape_of(csv: &str) -> (usize, Vec<usize>) {
    let mut lines = csv.lines();
    let header = lines.next().expect("header line");
    let ncols = header.split(',').count();
    let widths: Vec<usize> = lines
        .map(|row| {
            let cells: Vec<&str> = row.split(',').collect();
            assert_eq!(cells.len(), ncols, "ragged row {row:?}");
            let numeric = cells[1..]
                .iter()
                .map(|c| c.parse::<f64>().expect("numeric cell"))
                .filter(|v| v.is_finite())
                .count();
            assert_eq!(numeric, ncols - 1, "non-finite cell in {row:?}");
            numeric
        })
        .collect();
    (ncols, widths)
}

#[test]
fn criterion_10_runs_are_reproducible_and_reports_keep_shape() {
    // Tolerance: byte identity for the snapshot re-run; exact 2×3 and 2×9
    // table shapes for the two shipped sweeps.
    let tmp = tempfile::tempdir().expect("tempdir");
    let root = tmp.path();

    // Round trip: run the canonical config, then its own snapshot.
    let first = root.join("first");
    run_ok(bin().args(["run", "--config"]).arg(repo_config("default.toml")).arg("--out").arg(&first));
    let second = root.join("second");
    run_ok(bin().args(["run", "--config"]).arg(first.join("config.toml")).arg("--out").arg(&second));
    let log_a = std::fs::read(first.join("log.csv")).expect("first log");
    let log_b = std::fs::read(second.join("log.csv")).expect("second log");
    assert_eq!(log_a, log_b, "snapshot re-run changed the log bytes");

    // In-process determinism on an inclined scenario as well.
    let cfg = slope_cfg(20.0, ControlLaw::Indi);
    let once = run_scenario(&cfg).expect("valid scenario");
    let twice = run_scenario(&cfg).expect("valid scenario");
    assert_eq!(once, twice, "identical configs produced different logs");

    // Shaped summaries from the two shipped sweeps.
    let setpoints = root.join("setpoints");
    run_ok(
        bin()
            .args(["sweep", "--config"])
            .arg(repo_config("sweep_setpoints.toml"))
            .arg("--out")
            .arg(&setpoints),
    );
    let csv = std::fs::read_to_string(setpoints.join("summary.csv")).expect("summary");
    let (ncols, widths) = shape_of(&csv);
    assert_eq!((ncols, widths.as_slice()), (4, &[3usize, 3][..]), "setpoint table shape");

    let slopes = root.join("slopes");
    run_ok(
        bin()
            .args(["sweep", "--config"])
            .arg(repo_config("sweep_slopes.toml"))
            .arg("--out")
            .arg(&slopes),
    );
    let csv = std::fs::read_to_string(slopes.join("summary.csv")).expect("summary");
    let (ncols, widths) = shape_of(&csv);
    assert_eq!((ncols, widths.as_slice()), (10, &[9usize, 9][..]), "slope table shape");

    // `report` re-renders the same tables from the artifacts alone.
    let rendered = run_ok(bin().arg("report").arg(&slopes));
    let stored = std::fs::read_to_string(slopes.join("summary.txt")).expect("summary text");
    assert_eq!(rendered, stored, "report drifted from the stored summary");

    println!("criterion 10 PASS: byte-identical re-runs; report shapes 2x3 and 2x9 hold");
}
