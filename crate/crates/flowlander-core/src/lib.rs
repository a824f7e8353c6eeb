//! Deterministic planar lander: flow-divergence sensing and incremental-
//! inversion landing control over flat and inclined terrain.
//!
//! The library closes a loop around three pieces:
//!
//! - [`dynamics`] — a planar thrust-and-moment rigid body over a sloped
//!   surface, integrated with fixed-step RK4, with exact clearance geometry
//!   and touchdown detection;
//! - [`sensing`] — the optical-flow observables a pair of downward cameras
//!   would measure (flow divergences and ventral flow) plus a filtered
//!   output-rate estimator;
//! - [`control`] — an incremental nonlinear dynamic inversion law that lands
//!   at constant divergence, aligns roll with the surface, and compensates
//!   lateral drift, next to a PID baseline and a touchdown supervisor.
//!
//! [`simulation`] wires them together into deterministic, bit-reproducible
//! runs and sweeps; [`analysis`] turns logs into landing metrics, decay
//! fits, model-validation residuals, and tuned PID baselines.
//!
//! The crate is `no_std`-compatible (with `alloc`); everything that touches
//! files or the command line lives in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod control;
pub mod dynamics;
pub mod sensing;
pub mod simulation;

pub use analysis::{
    affine_model_residual, exp_decay_fit, landing_metrics, median_abs, rms, rmse, tune_pid,
    GainGrid, LandingMetrics, RateComparison, COLD_START_SKIP, DECAY_WINDOW,
};
pub use control::{
    constant_divergence_reference, effectiveness, indi_increment, pid_command, supervise,
    update_command, virtual_inputs, ControlIncrements, ControllerConfig, Effectiveness,
    EffectivenessMode, Phase, PidConfig, PidGains, PidIntegrators, SupervisorState, VirtualInputs,
};
pub use dynamics::{
    clearance_values, clearances, derivatives, step, touchdown_check, Clearances, Contact,
    ControlCommand, StateDerivative, Terrain, VehicleParams, VehicleState,
};
pub use sensing::{observe, Observations, OutputRates, RateEstimator};
pub use simulation::{
    run_scenario, run_sweep, ControlLaw, LogRow, ScenarioConfig, SimLog, SweepSummary,
    TerminalEvent,
};

use core::fmt;

/// Everything that can go wrong inside the core library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A model evaluation received a non-finite input; names the offender.
    NonFinite(&'static str),
    /// Integration produced a non-finite state component; names it.
    Integration(&'static str),
    /// A clearance went non-positive where the caller promised the vehicle
    /// was airborne (touchdown must be checked first).
    GroundPenetration,
    /// Roll reached ±90°: the cameras no longer face the ground.
    CameraFacing,
    /// Flow observables are undefined at non-positive clearance.
    ObservationUnavailable,
    /// Control effectiveness could not be evaluated (non-positive or
    /// non-finite clearance term).
    EffectivenessUndefined,
    /// A metric over an empty (or too short) series.
    EmptySeries,
    /// The exponential-decay fit had no usable window.
    DecayFitUndefined,
    /// No PID tuning candidate produced a successful landing.
    TuningFailed,
    /// A configuration field failed validation: (field, requirement).
    InvalidConfig(&'static str, &'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite(what) => write!(f, "non-finite {what}"),
            Error::Integration(component) => {
                write!(f, "integration produced a non-finite {component}")
            }
            Error::GroundPenetration => write!(f, "vehicle is at or below the surface"),
            Error::CameraFacing => write!(f, "roll beyond ±90°: cameras no longer face the ground"),
            Error::ObservationUnavailable => {
                write!(f, "flow observables undefined at non-positive clearance")
            }
            Error::EffectivenessUndefined => {
                write!(f, "control effectiveness undefined (non-positive clearance)")
            }
            Error::EmptySeries => write!(f, "metric over an empty series"),
            Error::DecayFitUndefined => write!(f, "decay fit has no usable window"),
            Error::TuningFailed => write!(f, "no tuning candidate landed"),
            Error::InvalidConfig(field, requirement) => {
                write!(f, "invalid config: {field} {requirement}")
            }
        }
    }
}

impl core::error::Error for Error {}
