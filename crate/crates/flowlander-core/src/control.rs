//! Landing control: incremental-inversion law on the flow outputs, touchdown
//! supervisor, PID baseline, and the analytic constant-divergence reference.
//!
//! The incremental law never reconstructs height or velocity. Each tick it
//! forms desired output rates (virtual inputs) from output errors, subtracts
//! the measured output rates, and divides by the control effectiveness — the
//! local gain from physical input to output rate — to obtain a command
//! *increment*:
//!
//! ```text
//! Δu = (ν − ẏ₀) / g,      u_k = u_{k−1} + Δu
//! ```
//!
//! Feeding back measured rates absorbs every model term that does not
//! multiply the input, so only the effectiveness needs to be (approximately)
//! known.

use crate::dynamics::{ControlCommand, Terrain, VehicleParams, VehicleState};
use crate::sensing::{Observations, OutputRates};
use crate::Error;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// What the inversion is allowed to know about the plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectivenessMode {
    /// Evaluate effectiveness at the true clearance, roll, and slope
    /// (model mass/inertia/offset still come from the nominal parameters).
    TrueState,
    /// Evaluate at a fixed nominal height, zero roll, zero slope — a
    /// robustness study mode with no state knowledge at all.
    FixedNominal,
}

/// Gains, thresholds, and limits of the landing controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    /// Divergence setpoint (1/s, negative for descent).
    pub theta_star: f64,
    /// Thrust-channel outer-loop gain (1/s).
    pub k1: f64,
    /// Roll-channel outer-loop gain (1/s).
    pub k2: f64,
    /// Drift-channel outer-loop gain (1/s).
    pub k3: f64,
    /// Roll-activation threshold on |y2| (1/s).
    pub eps_y: f64,
    /// Minimum |sin phi| for the drift-channel inversion.
    pub eps_phi: f64,
    pub effectiveness_mode: EffectivenessMode,
    /// Height assumed by [`EffectivenessMode::FixedNominal`] (m).
    pub nominal_h: f64,
    /// Thrust saturation (N).
    pub u1_max: f64,
    /// Moment saturation (N·m).
    pub u2_max: f64,
    /// Master switch for the ventral-flow drift channel.
    pub drift_compensation: bool,
}

impl ControllerConfig {
    /// Defaults with saturation scaled to the vehicle: u1_max = 4·m·g.
    pub fn for_params(params: &VehicleParams) -> Self {
        Self {
            theta_star: -0.2,
            k1: 2.0,
            k2: 5.0,
            k3: 1.0,
            eps_y: 0.05,
            eps_phi: 0.02,
            effectiveness_mode: EffectivenessMode::TrueState,
            nominal_h: 4.0,
            u1_max: 4.0 * params.m * params.g,
            u2_max: 1.0,
            drift_compensation: true,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.theta_star.is_finite() && self.theta_star < 0.0) {
            return Err(Error::InvalidConfig("controller.theta_star", "must be finite and < 0"));
        }
        for (v, name) in [
            (self.k1, "controller.k1"),
            (self.k2, "controller.k2"),
            (self.k3, "controller.k3"),
            (self.eps_y, "controller.eps_y"),
            (self.eps_phi, "controller.eps_phi"),
            (self.nominal_h, "controller.nominal_h"),
            (self.u1_max, "controller.u1_max"),
            (self.u2_max, "controller.u2_max"),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(name, "must be finite and > 0"));
            }
        }
        Ok(())
    }
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self::for_params(&VehicleParams::default())
    }
}

/// Landing phase as seen by the supervisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Constant-divergence descent, roll and drift channels idle.
    Descend,
    /// Roll alignment and drift compensation engaged.
    Align,
    /// Ground contact (terminal).
    Contact,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Descend => "descend",
            Phase::Align => "align",
            Phase::Contact => "contact",
        }
    }
}

impl core::fmt::Display for Phase {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Latching state of the touchdown supervisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupervisorState {
    pub roll_active: bool,
    pub drift_comp_active: bool,
    pub phase: Phase,
}

impl SupervisorState {
    pub fn new() -> Self {
        Self { roll_active: false, drift_comp_active: false, phase: Phase::Descend }
    }
}

impl Default for SupervisorState {
    fn default() -> Self {
        Self::new()
    }
}

/// Engages roll alignment (and, if enabled, drift compensation) once the
/// divergence split exceeds the activation threshold. The latch never
/// releases: near the ground `|y2|` grows as 1/h, and un-latching on the way
/// through the threshold would chatter.
pub fn supervise(
    obs: &Observations,
    sup: &SupervisorState,
    cfg: &ControllerConfig,
) -> SupervisorState {
    let mut next = *sup;
    if !next.roll_active && obs.y2.abs() > cfg.eps_y {
        next.roll_active = true;
        next.drift_comp_active = cfg.drift_compensation;
        next.phase = Phase::Align;
    }
    next
}

/// Desired output rates from the proportional outer loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualInputs {
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

/// Outer loop: first-order error dynamics on each active output channel.
pub fn virtual_inputs(
    obs: &Observations,
    cfg: &ControllerConfig,
    sup: &SupervisorState,
) -> VirtualInputs {
    VirtualInputs {
        nu1: cfg.k1 * (cfg.theta_star - obs.y1),
        nu2: if sup.roll_active { cfg.k2 * (-obs.y2) } else { 0.0 },
        nu3: if sup.drift_comp_active { cfg.k3 * (-obs.y3) } else { 0.0 },
    }
}

/// Control effectiveness: local input-to-output-rate gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effectiveness {
    /// ∂ẏ1/∂u1 (1/(s²·N)).
    pub g1: f64,
    /// ∂ẏ2/∂u2 (1/(s²·N·m)).
    pub g2: f64,
    /// ∂ẏ3/∂u1 (1/(s²·N)).
    pub g3: f64,
    /// sin of the roll angle the inversion assumed; gates the drift channel.
    pub sin_phi: f64,
}

/// Evaluates the controller's affine model gains:
///
/// ```text
/// g1 = (1 + φ·tan α)/(m·h)      g2 = 2·bc/(Ixx·h)      g3 = −sin φ/(m·h)
/// ```
///
/// In [`EffectivenessMode::TrueState`] the true `h`, `φ`, `α` are used with
/// the *model* mass/inertia/offset; in [`EffectivenessMode::FixedNominal`]
/// the gains are frozen at `h = nominal_h`, `φ = 0`, `α = 0`.
pub fn effectiveness(
    state: &VehicleState,
    terrain: &Terrain,
    model: &VehicleParams,
    cfg: &ControllerConfig,
) -> Result<Effectiveness, Error> {
    let (h, phi, tan_alpha) = match cfg.effectiveness_mode {
        EffectivenessMode::TrueState => {
            (state.z - state.y * terrain.tan_alpha(), state.phi, terrain.tan_alpha())
        }
        EffectivenessMode::FixedNominal => (cfg.nominal_h, 0.0, 0.0),
    };
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::EffectivenessUndefined);
    }
    let sin_phi = phi.sin();
    let eff = Effectiveness {
        g1: (1.0 + phi * tan_alpha) / (model.m * h),
        g2: 2.0 * model.bc / (model.ixx * h),
        g3: -sin_phi / (model.m * h),
        sin_phi,
    };
    if !(eff.g1.is_finite() && eff.g2.is_finite() && eff.g3.is_finite()) {
        return Err(Error::EffectivenessUndefined);
    }
    Ok(eff)
}

/// Command increments produced by one inversion step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlIncrements {
    /// Thrust increment from the divergence channel (N).
    pub du1: f64,
    /// Moment increment from the roll channel (N·m).
    pub du2: f64,
    /// Thrust correction from the drift channel (N).
    pub du1p: f64,
    /// Set when a channel had to be zeroed because its effectiveness was
    /// singular; the command then simply holds.
    pub singular: bool,
}

impl ControlIncrements {
    pub const ZERO: Self = Self { du1: 0.0, du2: 0.0, du1p: 0.0, singular: false };
}

/// Inverts the effectiveness to turn rate errors into command increments.
///
/// Inactive channels contribute zero. A singular or non-finite inversion on
/// an active channel zeroes that increment and raises the `singular` flag —
/// the loop degrades to holding the previous command, never a crash. The
/// drift channel is additionally zeroed (without flagging) whenever
/// `|sin φ| ≤ eps_phi`, where its inversion loses authority and blows up.
pub fn indi_increment(
    nu: &VirtualInputs,
    rates: &OutputRates,
    eff: &Effectiveness,
    cfg: &ControllerConfig,
    sup: &SupervisorState,
) -> ControlIncrements {
    let mut inc = ControlIncrements::ZERO;

    let du1 = (nu.nu1 - rates.y1dot) / eff.g1;
    if du1.is_finite() {
        inc.du1 = du1;
    } else {
        inc.singular = true;
    }

    if sup.roll_active {
        let du2 = (nu.nu2 - rates.y2dot) / eff.g2;
        if du2.is_finite() {
            inc.du2 = du2;
        } else {
            inc.singular = true;
        }
    }

    if sup.drift_comp_active && eff.sin_phi.abs() > cfg.eps_phi {
        let du1p = (nu.nu3 - rates.y3dot) / eff.g3;
        if du1p.is_finite() {
            inc.du1p = du1p;
        } else {
            inc.singular = true;
        }
    }

    inc
}

/// Applies the increments to the previous command and saturates: thrust is
/// clamped to `[0, u1_max]`, moment to `±u2_max`.
pub fn update_command(
    prev: &ControlCommand,
    inc: &ControlIncrements,
    cfg: &ControllerConfig,
) -> ControlCommand {
    ControlCommand {
        u1: (prev.u1 + inc.du1 + inc.du1p).clamp(0.0, cfg.u1_max),
        u2: (prev.u2 + inc.du2).clamp(-cfg.u2_max, cfg.u2_max),
    }
}

/// Closed-form constant-divergence descent from height `h0`:
/// `h(t) = h0·e^{θ*·t}`, so height, velocity, and acceleration all decay
/// with the same exponent and vanish together. Returns `(h, hdot, hddot)`.
pub fn constant_divergence_reference(h0: f64, theta_star: f64, t: f64) -> (f64, f64, f64) {
    debug_assert!(h0 > 0.0 && t >= 0.0);
    let h = h0 * (theta_star * t).exp();
    (h, theta_star * h, theta_star * theta_star * h)
}

/// Per-channel PID gains with an output-side integrator clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Anti-windup bound on the integral contribution `|ki·∫e|`, in output
    /// units (N or N·m).
    pub i_limit: f64,
}

impl PidGains {
    pub const ZERO: Self = Self { kp: 0.0, ki: 0.0, kd: 0.0, i_limit: 0.0 };

    pub fn validate(&self, name: &'static str) -> Result<(), Error> {
        for v in [self.kp, self.ki, self.kd, self.i_limit] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(name, "gains must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// Baseline PID controller: one channel per output, sharing the supervisor,
/// rate estimates, and saturation limits with the incremental law so a
/// comparison isolates the control law itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidConfig {
    /// Thrust from the divergence error θ* − y1.
    pub thrust: PidGains,
    /// Moment from the split error −y2 (once roll is active).
    pub moment: PidGains,
    /// Thrust correction from the drift error −y3 (once drift compensation
    /// is active).
    pub drift: PidGains,
}

impl PidConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.thrust.validate("pid.thrust")?;
        self.moment.validate("pid.moment")?;
        self.drift.validate("pid.drift")
    }
}

impl Default for PidConfig {
    /// Grid-tuned thrust gains (see the tuning search in the analysis
    /// module) plus hand-frozen roll/drift gains, which flat-terrain tuning
    /// cannot observe. The stiff drift gain trades touchdown softness for
    /// lateral-drift cancellation, the same trade the incremental law makes.
    fn default() -> Self {
        Self {
            thrust: PidGains { kp: 10.0, ki: 2.0, kd: 0.05, i_limit: 2.0 },
            moment: PidGains { kp: 0.3, ki: 0.1, kd: 0.02, i_limit: 0.5 },
            drift: PidGains { kp: 40.0, ki: 0.0, kd: 0.0, i_limit: 1.0 },
        }
    }
}

/// Error integrals carried by the PID baseline between ticks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidIntegrators {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

/// One PID channel: `kp·e + ki·∫e + kd·ė`, with the integral contribution
/// clamped to `±i_limit` (conditional integration: the stored integral is
/// capped so the clamp also stops windup).
fn pid_channel(g: &PidGains, e: f64, edot: f64, integral: &mut f64, dt: f64) -> f64 {
    if g.ki > 0.0 {
        *integral += e * dt;
        let bound = g.i_limit / g.ki;
        *integral = integral.clamp(-bound, bound);
    }
    g.kp * e + g.ki * *integral + g.kd * edot
}

/// Sign the drift correction must carry so that a thrust change pushes the
/// drift output toward zero: the thrust-to-drift gain is `−sin φ/(m·h)`, so
/// the correction flips with the roll direction and is cut inside the
/// `eps_phi` dead band where there is no lateral authority.
fn drift_sign(sin_phi: f64, eps_phi: f64) -> f64 {
    if sin_phi > eps_phi {
        -1.0
    } else if sin_phi < -eps_phi {
        1.0
    } else {
        0.0
    }
}

/// PID baseline command. `trim` is the feed-forward hover thrust; `sin_phi`
/// is the same roll knowledge the inversion uses (zero in fixed-nominal
/// mode), consumed here only to orient and gate the drift correction. Error
/// derivatives reuse the shared filtered output rates (`ė = −ẏ`).
#[allow(clippy::too_many_arguments)]
pub fn pid_command(
    obs: &Observations,
    rates: &OutputRates,
    integ: &mut PidIntegrators,
    pid: &PidConfig,
    cfg: &ControllerConfig,
    sup: &SupervisorState,
    trim: f64,
    sin_phi: f64,
    dt: f64,
) -> ControlCommand {
    let mut u1 = trim + pid_channel(&pid.thrust, cfg.theta_star - obs.y1, -rates.y1dot, &mut integ.e1, dt);
    let u2 = if sup.roll_active {
        pid_channel(&pid.moment, -obs.y2, -rates.y2dot, &mut integ.e2, dt)
    } else {
        0.0
    };
    if sup.drift_comp_active {
        let sign = drift_sign(sin_phi, cfg.eps_phi);
        if sign != 0.0 {
            u1 += sign * pid_channel(&pid.drift, -obs.y3, -rates.y3dot, &mut integ.e3, dt);
        }
    }
    ControlCommand {
        u1: u1.clamp(0.0, cfg.u1_max),
        u2: u2.clamp(-cfg.u2_max, cfg.u2_max),
    }
}
