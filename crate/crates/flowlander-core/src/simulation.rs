//! Closed-loop scenario execution: wires the plant, the flow sensing, and a
//! control law together at a fixed rate and records a complete log.
//!
//! Runs are seedless and fully deterministic — identical configs produce
//! bit-identical logs. A run ends at the first touchdown, at the time
//! horizon, or at a numerical failure (recorded as a terminal event, never a
//! panic).

use alloc::vec::Vec;

use crate::analysis::{landing_metrics, LandingMetrics};
use crate::control::{
    effectiveness, indi_increment, pid_command, supervise, update_command, virtual_inputs,
    ControllerConfig, EffectivenessMode, Phase, PidConfig, PidIntegrators, SupervisorState,
};
use crate::dynamics::{
    clearances, step, touchdown_check, Clearances, ControlCommand, Terrain, VehicleParams,
    VehicleState,
};
use crate::sensing::{observe, Observations, RateEstimator};
use crate::Error;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Which control law closes the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlLaw {
    /// Incremental inversion on the flow outputs.
    Indi,
    /// Classical PID baseline on the same outputs.
    Pid,
}

impl ControlLaw {
    pub fn as_str(&self) -> &'static str {
        match self {
            ControlLaw::Indi => "indi",
            ControlLaw::Pid => "pid",
        }
    }
}

impl core::fmt::Display for ControlLaw {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything needed to reproduce one landing run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub terrain: Terrain,
    /// True plant parameters.
    pub params: VehicleParams,
    /// Parameters the controller believes; `None` means a perfect model.
    pub model_params: Option<VehicleParams>,
    pub law: ControlLaw,
    pub controller: ControllerConfig,
    pub pid: PidConfig,
    /// Full initial-state override; `None` builds the default start: level
    /// hover at clearance `h0` with the descent kick applied.
    pub initial: Option<VehicleState>,
    /// Initial center clearance (m).
    pub h0: f64,
    /// Initial vertical speed; `None` uses the on-profile kick
    /// `theta_star·h0` so the divergence starts on the setpoint. Zero is a
    /// legitimate from-rest start.
    pub kick: Option<f64>,
    /// Step and control period (s).
    pub dt: f64,
    /// Time horizon (s).
    pub t_max: f64,
    /// Contact clearance on the lower camera station (m).
    pub touchdown_threshold: f64,
    /// Output-rate filter time constant (s).
    pub tau_f: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let params = VehicleParams::default();
        Self {
            terrain: Terrain::flat(),
            params,
            model_params: None,
            law: ControlLaw::Indi,
            controller: ControllerConfig::for_params(&params),
            pid: PidConfig::default(),
            initial: None,
            h0: 4.0,
            kick: None,
            dt: 0.002,
            t_max: 80.0,
            touchdown_threshold: 0.05,
            tau_f: 0.02,
        }
    }
}

impl ScenarioConfig {
    /// The parameters the controller works with.
    pub fn model(&self) -> VehicleParams {
        self.model_params.unwrap_or(self.params)
    }

    /// Initial state: the override if given, otherwise level hover at `h0`
    /// with the descent kick.
    pub fn initial_state(&self) -> VehicleState {
        self.initial.unwrap_or(VehicleState {
            y: 0.0,
            z: self.h0,
            phi: 0.0,
            ydot: 0.0,
            zdot: self.kick.unwrap_or(self.controller.theta_star * self.h0),
            phidot: 0.0,
        })
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.params.validate()?;
        if let Some(model) = self.model_params {
            model.validate()?;
        }
        self.terrain.validate()?;
        self.controller.validate()?;
        self.pid.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig("sim.dt", "must be finite and > 0"));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidConfig("sim.t_max", "must be finite and > 0"));
        }
        if !(self.touchdown_threshold.is_finite() && self.touchdown_threshold >= 0.0) {
            return Err(Error::InvalidConfig(
                "sim.touchdown_threshold",
                "must be finite and >= 0",
            ));
        }
        // h0 at or below the touchdown threshold is degenerate but legal:
        // the run ends in an immediate touchdown at t = 0.
        if !(self.h0.is_finite() && self.h0 > 0.0) {
            return Err(Error::InvalidConfig("sim.h0", "must be finite and > 0"));
        }
        if !(self.tau_f.is_finite() && self.tau_f >= 0.0) {
            return Err(Error::InvalidConfig("sim.tau_f", "must be finite and >= 0"));
        }
        if let Some(kick) = self.kick {
            if !kick.is_finite() {
                return Err(Error::InvalidConfig("sim.initial_zdot", "must be finite"));
            }
        }
        if let Some(initial) = self.initial {
            if !initial.is_finite() {
                return Err(Error::InvalidConfig("sim.initial", "must be finite"));
            }
        }
        Ok(())
    }
}

/// One logged tick: the state the controller saw and the command it issued.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub state: VehicleState,
    pub clearances: Clearances,
    pub obs: Observations,
    pub cmd: ControlCommand,
    pub phase: Phase,
}

/// How a run ended. Exactly one per log.
#[derive(Debug, Clone, PartialEq)]
pub enum TerminalEvent {
    /// Ground contact: the lower camera station reached the threshold.
    Touchdown { t: f64, state: VehicleState, clearances: Clearances },
    /// Horizon reached without contact.
    Timeout { t: f64 },
    /// Numerical or model failure; the log holds everything up to it.
    Failure { t: f64, reason: Error },
}

/// Uniformly sampled record of one run. Rows cover the pre-contact ticks
/// only; the terminal event carries the contact condition itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub dt: f64,
    pub rows: Vec<LogRow>,
    pub terminal: TerminalEvent,
}

impl SimLog {
    pub fn touchdown(&self) -> Option<(f64, &VehicleState, &Clearances)> {
        match &self.terminal {
            TerminalEvent::Touchdown { t, state, clearances } => Some((*t, state, clearances)),
            _ => None,
        }
    }

    pub fn final_phase(&self) -> Phase {
        match self.terminal {
            TerminalEvent::Touchdown { .. } => Phase::Contact,
            _ => self.rows.last().map_or(Phase::Descend, |r| r.phase),
        }
    }
}

/// Runs one closed-loop landing to touchdown, timeout, or failure.
///
/// Tick order: contact test on the current state, then observe → estimate
/// rates → supervise → command → log → integrate. The incremental law holds
/// the trim command until the rate estimator is warm, so no increment is
/// issued on the first tick.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimLog, Error> {
    cfg.validate()?;
    let model = cfg.model();
    let trim = model.hover_thrust();

    let mut state = cfg.initial_state();
    let mut estimator = RateEstimator::new(cfg.tau_f);
    let mut sup = SupervisorState::new();
    let mut integ = PidIntegrators::default();
    let mut prev_cmd = ControlCommand { u1: trim, u2: 0.0 };
    let mut rows = Vec::new();
    let mut k: u64 = 0;

    let terminal = loop {
        let t = k as f64 * cfg.dt;
        if let Some(contact) =
            touchdown_check(&state, &cfg.terrain, &cfg.params, cfg.touchdown_threshold)
        {
            break TerminalEvent::Touchdown { t, state, clearances: contact.clearances };
        }
        if t > cfg.t_max {
            break TerminalEvent::Timeout { t };
        }
        let clr = match clearances(&state, &cfg.terrain, &cfg.params) {
            Ok(clr) => clr,
            Err(reason) => break TerminalEvent::Failure { t, reason },
        };
        let obs = match observe(&state, &clr) {
            Ok(obs) => obs,
            Err(reason) => break TerminalEvent::Failure { t, reason },
        };
        let rates = estimator.estimate_output_rates(&obs, cfg.dt);
        sup = supervise(&obs, &sup, &cfg.controller);

        let cmd = match cfg.law {
            ControlLaw::Indi => {
                if estimator.is_warm() {
                    match effectiveness(&state, &cfg.terrain, &model, &cfg.controller) {
                        Ok(eff) => {
                            let nu = virtual_inputs(&obs, &cfg.controller, &sup);
                            let inc = indi_increment(&nu, &rates, &eff, &cfg.controller, &sup);
                            update_command(&prev_cmd, &inc, &cfg.controller)
                        }
                        // Undefined effectiveness: hold the last command.
                        Err(_) => prev_cmd,
                    }
                } else {
                    prev_cmd
                }
            }
            ControlLaw::Pid => {
                // The baseline shares the inversion's roll knowledge only to
                // orient its drift correction.
                let sin_phi = match cfg.controller.effectiveness_mode {
                    EffectivenessMode::TrueState => state.phi.sin(),
                    EffectivenessMode::FixedNominal => 0.0,
                };
                pid_command(
                    &obs,
                    &rates,
                    &mut integ,
                    &cfg.pid,
                    &cfg.controller,
                    &sup,
                    trim,
                    sin_phi,
                    cfg.dt,
                )
            }
        };

        rows.push(LogRow { t, state, clearances: clr, obs, cmd, phase: sup.phase });

        state = match step(&state, &cmd, &cfg.params, cfg.dt) {
            Ok(next) => next,
            Err(reason) => break TerminalEvent::Failure { t, reason },
        };
        prev_cmd = cmd;
        k += 1;
    };

    Ok(SimLog { dt: cfg.dt, rows, terminal })
}

/// One sweep cell: the scenario's grid coordinates and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    /// Ordinal id from grid order; stable across runs.
    pub id: usize,
    pub law: ControlLaw,
    /// Divergence setpoint of the cell (1/s).
    pub theta_star: f64,
    /// Terrain slope of the cell (rad).
    pub alpha: f64,
    /// Metrics, or the per-cell failure; a failed cell never aborts the sweep.
    pub metrics: Result<LandingMetrics, Error>,
}

/// Runs every scenario of a grid and summarizes each. Cells are independent;
/// results come back ordered by their ordinal id.
pub fn run_sweep(grid: &[ScenarioConfig]) -> Result<Vec<SweepSummary>, Error> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("sweep", "empty scenario grid"));
    }
    Ok(grid
        .iter()
        .enumerate()
        .map(|(id, cfg)| SweepSummary {
            id,
            law: cfg.law,
            theta_star: cfg.controller.theta_star,
            alpha: cfg.terrain.alpha,
            metrics: run_scenario(cfg).and_then(|log| landing_metrics(&log, cfg)),
        })
        .collect())
}
