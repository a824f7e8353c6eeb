//! Planar rigid-body vehicle model, inclined-terrain geometry, fixed-step
//! integration, and touchdown detection.
//!
//! The vehicle is a point mass with a roll degree of freedom, actuated by a
//! total thrust `u1` along the body vertical axis and a control moment `u2`:
//!
//! ```text
//! Ÿ = -(u1/m)·sin(φ)      Z̈ = (u1/m)·cos(φ) - g      φ̈ = u2/Ixx
//! ```
//!
//! Terrain is a straight line of slope `alpha` through the origin; all
//! clearance geometry uses exact trigonometry (no small-angle forms).

use crate::Error;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Planar pose and rates of the lander.
///
/// `y`/`z` are world-frame coordinates in metres, `phi` the roll angle in
/// radians (positive rolls the right camera down toward rising terrain).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    /// Lateral position (m).
    pub y: f64,
    /// Altitude in the world frame (m).
    pub z: f64,
    /// Roll angle (rad).
    pub phi: f64,
    /// Lateral velocity (m/s).
    pub ydot: f64,
    /// Vertical velocity (m/s).
    pub zdot: f64,
    /// Roll rate (rad/s).
    pub phidot: f64,
}

impl VehicleState {
    /// Level rest state at altitude `z`.
    pub fn at_rest(z: f64) -> Self {
        Self { y: 0.0, z, phi: 0.0, ydot: 0.0, zdot: 0.0, phidot: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.y.is_finite()
            && self.z.is_finite()
            && self.phi.is_finite()
            && self.ydot.is_finite()
            && self.zdot.is_finite()
            && self.phidot.is_finite()
    }
}

/// Physical vehicle constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    /// Mass (kg).
    pub m: f64,
    /// Roll moment of inertia (kg·m²).
    pub ixx: f64,
    /// Camera offset from the body center (m).
    pub bc: f64,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::InvalidConfig("vehicle.m", "must be finite and > 0"));
        }
        if !(self.ixx.is_finite() && self.ixx > 0.0) {
            return Err(Error::InvalidConfig("vehicle.Ixx", "must be finite and > 0"));
        }
        if !(self.bc.is_finite() && self.bc > 0.0) {
            return Err(Error::InvalidConfig("vehicle.bc", "must be finite and > 0"));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidConfig("vehicle.g", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Thrust that balances gravity when level.
    pub fn hover_thrust(&self) -> f64 {
        self.m * self.g
    }
}

impl Default for VehicleParams {
    /// Small-rotorcraft defaults: 1 kg, 0.01 kg·m², 0.2 m camera arm, Earth g.
    fn default() -> Self {
        Self { m: 1.0, ixx: 0.01, bc: 0.2, g: 9.81 }
    }
}

/// Margin keeping `tan(alpha)` well-conditioned: slopes must stay at least
/// this far from vertical (rad).
pub const SLOPE_MARGIN: f64 = 0.1;

/// Straight terrain of constant slope through the origin: the surface is the
/// line `z = y·tan(alpha)`. Positive `alpha` means the ground rises with +Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Terrain {
    /// Surface slope (rad).
    pub alpha: f64,
}

impl Terrain {
    pub fn flat() -> Self {
        Self { alpha: 0.0 }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.alpha.is_finite() || self.alpha.abs() >= core::f64::consts::FRAC_PI_2 - SLOPE_MARGIN
        {
            return Err(Error::InvalidConfig(
                "terrain.alpha",
                "slope magnitude must stay below 90 degrees minus margin",
            ));
        }
        Ok(())
    }

    pub fn tan_alpha(&self) -> f64 {
        self.alpha.tan()
    }

    /// Surface height under lateral position `y`.
    pub fn surface_z(&self, y: f64) -> f64 {
        y * self.tan_alpha()
    }
}

/// Vertical clearances of the body center and the two camera stations above
/// the terrain line, with their time rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clearances {
    /// Center clearance (m).
    pub h: f64,
    /// Left-camera clearance (m).
    pub hl: f64,
    /// Right-camera clearance (m).
    pub hr: f64,
    /// Center clearance rate (m/s).
    pub hdot: f64,
    /// Left-camera clearance rate (m/s).
    pub hldot: f64,
    /// Right-camera clearance rate (m/s).
    pub hrdot: f64,
}

impl Clearances {
    pub fn min_camera(&self) -> f64 {
        self.hl.min(self.hr)
    }

    pub fn is_finite(&self) -> bool {
        self.h.is_finite()
            && self.hl.is_finite()
            && self.hr.is_finite()
            && self.hdot.is_finite()
            && self.hldot.is_finite()
            && self.hrdot.is_finite()
    }
}

/// Physical control inputs: total thrust and roll moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCommand {
    /// Total thrust (N), non-negative.
    pub u1: f64,
    /// Control moment (N·m).
    pub u2: f64,
}

impl ControlCommand {
    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }
}

/// Six-component state rate: the time derivative of [`VehicleState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub ydot: f64,
    pub zdot: f64,
    pub phidot: f64,
    pub yddot: f64,
    pub zddot: f64,
    pub phiddot: f64,
}

/// Evaluates the rigid-body equations of motion with exact trigonometry.
pub fn derivatives(
    state: &VehicleState,
    cmd: &ControlCommand,
    params: &VehicleParams,
) -> Result<StateDerivative, Error> {
    if !state.is_finite() {
        return Err(Error::NonFinite("vehicle state"));
    }
    if !cmd.is_finite() {
        return Err(Error::NonFinite("control command"));
    }
    let (sin_phi, cos_phi) = (state.phi.sin(), state.phi.cos());
    let a = cmd.u1 / params.m;
    Ok(StateDerivative {
        ydot: state.ydot,
        zdot: state.zdot,
        phidot: state.phidot,
        yddot: -a * sin_phi,
        zddot: a * cos_phi - params.g,
        phiddot: cmd.u2 / params.ixx,
    })
}

fn advance(state: &VehicleState, d: &StateDerivative, dt: f64) -> VehicleState {
    VehicleState {
        y: state.y + dt * d.ydot,
        z: state.z + dt * d.zdot,
        phi: state.phi + dt * d.phidot,
        ydot: state.ydot + dt * d.yddot,
        zdot: state.zdot + dt * d.zddot,
        phidot: state.phidot + dt * d.phiddot,
    }
}

/// Advances the state one fixed step with classical RK4, holding the command
/// constant over the step (zero-order hold).
pub fn step(
    state: &VehicleState,
    cmd: &ControlCommand,
    params: &VehicleParams,
    dt: f64,
) -> Result<VehicleState, Error> {
    let k1 = derivatives(state, cmd, params)?;
    let k2 = derivatives(&advance(state, &k1, 0.5 * dt), cmd, params)?;
    let k3 = derivatives(&advance(state, &k2, 0.5 * dt), cmd, params)?;
    let k4 = derivatives(&advance(state, &k3, dt), cmd, params)?;
    let sixth = dt / 6.0;
    let next = VehicleState {
        y: state.y + sixth * (k1.ydot + 2.0 * k2.ydot + 2.0 * k3.ydot + k4.ydot),
        z: state.z + sixth * (k1.zdot + 2.0 * k2.zdot + 2.0 * k3.zdot + k4.zdot),
        phi: state.phi + sixth * (k1.phidot + 2.0 * k2.phidot + 2.0 * k3.phidot + k4.phidot),
        ydot: state.ydot + sixth * (k1.yddot + 2.0 * k2.yddot + 2.0 * k3.yddot + k4.yddot),
        zdot: state.zdot + sixth * (k1.zddot + 2.0 * k2.zddot + 2.0 * k3.zddot + k4.zddot),
        phidot: state.phidot
            + sixth * (k1.phiddot + 2.0 * k2.phiddot + 2.0 * k3.phiddot + k4.phiddot),
    };
    for (v, name) in [
        (next.y, "Y"),
        (next.z, "Z"),
        (next.phi, "phi"),
        (next.ydot, "Ydot"),
        (next.zdot, "Zdot"),
        (next.phidot, "phidot"),
    ] {
        if !v.is_finite() {
            return Err(Error::Integration(name));
        }
    }
    Ok(next)
}

/// Raw clearance geometry, defined for any `|phi| < pi/2`; may return
/// non-positive values when the vehicle is at or below the surface.
///
/// The camera stations sit at body offsets `±bc` along the body lateral
/// axis; their world positions are `(Y ± bc·cos φ, Z ± bc·sin φ)` and each
/// clearance is the vertical distance from that point down to the terrain
/// line. Expanding the vertical drop gives
///
/// ```text
/// h  = Z − Y·tan α
/// hL = h − bc·sin φ + bc·cos φ·tan α
/// hR = h + bc·sin φ − bc·cos φ·tan α
/// ```
///
/// and the rates follow from exact time differentiation.
pub fn clearance_values(
    state: &VehicleState,
    terrain: &Terrain,
    params: &VehicleParams,
) -> Clearances {
    let ta = terrain.tan_alpha();
    let (sin_phi, cos_phi) = (state.phi.sin(), state.phi.cos());
    let h = state.z - state.y * ta;
    let dh_phi = params.bc * sin_phi;
    let dh_alpha = params.bc * cos_phi * ta;
    let hdot = state.zdot - state.ydot * ta;
    let rate_phi = params.bc * cos_phi * state.phidot;
    let rate_alpha = params.bc * sin_phi * state.phidot * ta;
    Clearances {
        h,
        hl: h - dh_phi + dh_alpha,
        hr: h + dh_phi - dh_alpha,
        hdot,
        hldot: hdot - rate_phi - rate_alpha,
        hrdot: hdot + rate_phi + rate_alpha,
    }
}

/// Exact clearances of the body center and both cameras above the terrain.
///
/// Fails when the cameras no longer face the ground (`|phi| >= pi/2`) or when
/// any clearance is non-positive; callers are expected to have run
/// [`touchdown_check`] first.
pub fn clearances(
    state: &VehicleState,
    terrain: &Terrain,
    params: &VehicleParams,
) -> Result<Clearances, Error> {
    if !state.is_finite() {
        return Err(Error::NonFinite("vehicle state"));
    }
    if state.phi.abs() >= core::f64::consts::FRAC_PI_2 {
        return Err(Error::CameraFacing);
    }
    let clr = clearance_values(state, terrain, params);
    if clr.h <= 0.0 || clr.hl <= 0.0 || clr.hr <= 0.0 {
        return Err(Error::GroundPenetration);
    }
    Ok(clr)
}

/// Clearance geometry captured at the moment of ground contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub clearances: Clearances,
    /// Roll angle at contact (rad).
    pub phi: f64,
}

/// Declares touchdown when the lower of the two camera stations — the body's
/// extremal contact points — is within `threshold` of the surface
/// (boundary inclusive).
pub fn touchdown_check(
    state: &VehicleState,
    terrain: &Terrain,
    params: &VehicleParams,
    threshold: f64,
) -> Option<Contact> {
    let clearances = clearance_values(state, terrain, params);
    if clearances.min_camera() <= threshold {
        Some(Contact { clearances, phi: state.phi })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hover_equilibrium_has_zero_accelerations() {
        let params = VehicleParams::default();
        let state = VehicleState::at_rest(2.0);
        let cmd = ControlCommand { u1: params.hover_thrust(), u2: 0.0 };
        let d = derivatives(&state, &cmd, &params).unwrap();
        assert_eq!(d.yddot, 0.0);
        assert!(close(d.zddot, 0.0, TOL));
        assert_eq!(d.phiddot, 0.0);
    }

    #[test]
    fn tilted_thrust_accelerations_match_model() {
        // m=1, g=9.81, u1=2, phi=0.1:
        //   Ÿ = -2·sin(0.1) = -0.19966683...,  Z̈ = 2·cos(0.1) - 9.81 = -7.81999167...
        let params = VehicleParams { m: 1.0, ..VehicleParams::default() };
        let state = VehicleState { phi: 0.1, ..VehicleState::at_rest(5.0) };
        let cmd = ControlCommand { u1: 2.0, u2: 0.0 };
        let d = derivatives(&state, &cmd, &params).unwrap();
        assert!(close(d.yddot, -2.0 * 0.1f64.sin(), TOL));
        assert!(close(d.yddot, -0.19966683, 1e-7));
        assert!(close(d.zddot, -7.81999167, 1e-7));
    }

    #[test]
    fn roll_acceleration_is_moment_over_inertia() {
        let params = VehicleParams { ixx: 0.01, ..VehicleParams::default() };
        let state = VehicleState::at_rest(2.0);
        let cmd = ControlCommand { u1: 0.0, u2: 0.005 };
        let d = derivatives(&state, &cmd, &params).unwrap();
        assert!(close(d.phiddot, 0.5, TOL));
    }

    #[test]
    fn derivatives_reject_non_finite_input() {
        let params = VehicleParams::default();
        let mut state = VehicleState::at_rest(2.0);
        state.zdot = f64::NAN;
        let cmd = ControlCommand { u1: 1.0, u2: 0.0 };
        assert_eq!(
            derivatives(&state, &cmd, &params),
            Err(Error::NonFinite("vehicle state"))
        );
        let state = VehicleState::at_rest(2.0);
        let cmd = ControlCommand { u1: f64::INFINITY, u2: 0.0 };
        assert_eq!(
            derivatives(&state, &cmd, &params),
            Err(Error::NonFinite("control command"))
        );
    }

    #[test]
    fn hover_step_leaves_state_unchanged() {
        let params = VehicleParams::default();
        let state = VehicleState::at_rest(3.0);
        let cmd = ControlCommand { u1: params.hover_thrust(), u2: 0.0 };
        let next = step(&state, &cmd, &params, 0.05).unwrap();
        assert!(close(next.z, 3.0, TOL));
        assert!(close(next.zdot, 0.0, TOL));
        assert_eq!(next.y, 0.0);
        assert_eq!(next.phi, 0.0);
    }

    #[test]
    fn free_fall_step_matches_analytic_solution() {
        // Ballistic motion is polynomial in t, so RK4 reproduces it exactly:
        // Zdot = -g·dt = -0.0981, ΔZ = -g·dt²/2 = -0.00049050.
        let params = VehicleParams { m: 1.0, g: 9.81, ..VehicleParams::default() };
        let state = VehicleState::at_rest(4.0);
        let cmd = ControlCommand { u1: 0.0, u2: 0.0 };
        let next = step(&state, &cmd, &params, 0.01).unwrap();
        assert!(close(next.zdot, -0.0981, TOL));
        assert!(close(next.z - 4.0, -0.00049050, TOL));
    }

    #[test]
    fn pure_moment_step_matches_double_integrator() {
        // φ̈ = 0.5: after 0.01 s from rest, phidot = 0.005 and Δphi = 2.5e-5.
        let params = VehicleParams { ixx: 0.01, ..VehicleParams::default() };
        let state = VehicleState::at_rest(4.0);
        let cmd = ControlCommand { u1: 0.0, u2: 0.005 };
        let next = step(&state, &cmd, &params, 0.01).unwrap();
        assert!(close(next.phidot, 0.005, TOL));
        assert!(close(next.phi, 2.5e-5, TOL));
    }

    #[test]
    fn clearances_flat_level() {
        let params = VehicleParams { bc: 0.2, ..VehicleParams::default() };
        let state = VehicleState::at_rest(2.0);
        let clr = clearances(&state, &Terrain::flat(), &params).unwrap();
        assert_eq!(clr.h, 2.0);
        assert_eq!(clr.hl, 2.0);
        assert_eq!(clr.hr, 2.0);
        assert_eq!(clr.hdot, 0.0);
    }

    #[test]
    fn clearances_on_thirty_degree_slope() {
        // bc·tan(30°) = 0.2·0.57735027 = 0.11547005; level vehicle at h = 2:
        // hL = 2.11547005, hR = 1.88452995.
        let params = VehicleParams { bc: 0.2, ..VehicleParams::default() };
        let state = VehicleState::at_rest(2.0);
        let terrain = Terrain { alpha: 30.0_f64.to_radians() };
        let clr = clearances(&state, &terrain, &params).unwrap();
        assert!(close(clr.h, 2.0, TOL));
        assert!(close(clr.hl, 2.0 + 0.2 * terrain.tan_alpha(), TOL));
        assert!(close(clr.hl, 2.11547005, 1e-8));
        assert!(close(clr.hr, 1.88452995, 1e-8));
    }

    #[test]
    fn clearance_rates_with_roll_rate() {
        // Zdot=-0.4, phi=0, phidot=0.1, flat, bc=0.2:
        // hdot = -0.4, hLdot = -0.4 - 0.2·0.1 = -0.42, hRdot = -0.38.
        let params = VehicleParams { bc: 0.2, ..VehicleParams::default() };
        let state = VehicleState { zdot: -0.4, phidot: 0.1, ..VehicleState::at_rest(2.0) };
        let clr = clearances(&state, &Terrain::flat(), &params).unwrap();
        assert!(close(clr.hdot, -0.4, TOL));
        assert!(close(clr.hldot, -0.42, TOL));
        assert!(close(clr.hrdot, -0.38, TOL));
    }

    #[test]
    fn clearances_error_paths() {
        let params = VehicleParams::default();
        let below = VehicleState::at_rest(-0.5);
        assert_eq!(
            clearances(&below, &Terrain::flat(), &params),
            Err(Error::GroundPenetration)
        );
        let sideways = VehicleState { phi: 1.6, ..VehicleState::at_rest(2.0) };
        assert_eq!(
            clearances(&sideways, &Terrain::flat(), &params),
            Err(Error::CameraFacing)
        );
    }

    #[test]
    fn touchdown_boundary_is_inclusive() {
        let params = VehicleParams { bc: 0.2, ..VehicleParams::default() };
        let terrain = Terrain::flat();
        let high = VehicleState::at_rest(0.5);
        assert!(touchdown_check(&high, &terrain, &params, 0.01).is_none());
        let below = VehicleState::at_rest(-0.001);
        assert!(touchdown_check(&below, &terrain, &params, 0.01).is_some());
        let exactly = VehicleState::at_rest(0.01);
        let contact = touchdown_check(&exactly, &terrain, &params, 0.01).unwrap();
        assert_eq!(contact.clearances.min_camera(), 0.01);
        assert_eq!(contact.phi, 0.0);
    }

    /// Brute-force geometric oracle: drop a vertical ray from each camera's
    /// world position onto the terrain line and measure the drop and its
    /// time rate directly.
    fn ray_oracle(state: &VehicleState, terrain: &Terrain, params: &VehicleParams) -> Clearances {
        let ta = terrain.alpha.tan();
        let (s, c) = (state.phi.sin(), state.phi.cos());
        let drop = |py: f64, pz: f64| pz - py * ta;
        let left_y = state.y - params.bc * c;
        let left_z = state.z - params.bc * s;
        let right_y = state.y + params.bc * c;
        let right_z = state.z + params.bc * s;
        // d/dt of camera positions: ẏ ∓ bc·(-sinφ)·φ̇ ... differentiated directly.
        let left_ydot = state.ydot + params.bc * s * state.phidot;
        let left_zdot = state.zdot - params.bc * c * state.phidot;
        let right_ydot = state.ydot - params.bc * s * state.phidot;
        let right_zdot = state.zdot + params.bc * c * state.phidot;
        Clearances {
            h: drop(state.y, state.z),
            hl: drop(left_y, left_z),
            hr: drop(right_y, right_z),
            hdot: state.zdot - state.ydot * ta,
            hldot: left_zdot - left_ydot * ta,
            hrdot: right_zdot - right_ydot * ta,
        }
    }

    fn mirror_state(s: &VehicleState) -> VehicleState {
        VehicleState { y: -s.y, z: s.z, phi: -s.phi, ydot: -s.ydot, zdot: s.zdot, phidot: -s.phidot }
    }

    proptest! {
        #[test]
        fn clearances_match_ray_oracle(
            y in -20.0..20.0f64,
            z in 1.0..50.0f64,
            phi in -1.2..1.2f64,
            ydot in -5.0..5.0f64,
            zdot in -5.0..5.0f64,
            phidot in -2.0..2.0f64,
            alpha_deg in -35.0..35.0f64,
        ) {
            let params = VehicleParams::default();
            let terrain = Terrain { alpha: alpha_deg.to_radians() };
            let state = VehicleState { y, z: z + y.abs(), phi, ydot, zdot, phidot };
            let got = clearance_values(&state, &terrain, &params);
            let want = ray_oracle(&state, &terrain, &params);
            for (g, w) in [
                (got.h, want.h), (got.hl, want.hl), (got.hr, want.hr),
                (got.hdot, want.hdot), (got.hldot, want.hldot), (got.hrdot, want.hrdot),
            ] {
                prop_assert!((g - w).abs() <= 1e-12 * w.abs().max(1.0));
            }
        }

        #[test]
        fn clearances_mirror_swaps_cameras(
            y in -10.0..10.0f64,
            z in 1.0..20.0f64,
            phi in -1.2..1.2f64,
            ydot in -3.0..3.0f64,
            zdot in -3.0..3.0f64,
            phidot in -2.0..2.0f64,
            alpha_deg in -30.0..30.0f64,
        ) {
            let params = VehicleParams::default();
            let state = VehicleState { y, z: z + y.abs(), phi, ydot, zdot, phidot };
            let terrain = Terrain { alpha: alpha_deg.to_radians() };
            let mirrored = clearance_values(
                &mirror_state(&state),
                &Terrain { alpha: -terrain.alpha },
                &params,
            );
            let direct = clearance_values(&state, &terrain, &params);
            prop_assert!((mirrored.h - direct.h).abs() <= 1e-12);
            prop_assert!((mirrored.hl - direct.hr).abs() <= 1e-12);
            prop_assert!((mirrored.hr - direct.hl).abs() <= 1e-12);
            prop_assert!((mirrored.hldot - direct.hrdot).abs() <= 1e-12);
            prop_assert!((mirrored.hrdot - direct.hldot).abs() <= 1e-12);
        }

        #[test]
        fn trajectory_mirror_symmetry(
            phi in -0.3..0.3f64,
            phidot in -0.5..0.5f64,
            ydot in -2.0..2.0f64,
            u1 in 0.0..20.0f64,
            u2 in -0.5..0.5f64,
        ) {
            let params = VehicleParams::default();
            let state = VehicleState { y: 1.0, z: 10.0, phi, ydot, zdot: -0.5, phidot };
            let cmd = ControlCommand { u1, u2 };
            let mirrored_cmd = ControlCommand { u1, u2: -u2 };
            let mut a = state;
            let mut b = mirror_state(&state);
            for _ in 0..50 {
                a = step(&a, &cmd, &params, 0.002).unwrap();
                b = step(&b, &mirrored_cmd, &params, 0.002).unwrap();
            }
            let bm = mirror_state(&b);
            prop_assert!((a.y - bm.y).abs() <= 1e-12);
            prop_assert!((a.z - bm.z).abs() <= 1e-12);
            prop_assert!((a.phi - bm.phi).abs() <= 1e-12);
            prop_assert!((a.ydot - bm.ydot).abs() <= 1e-12);
            prop_assert!((a.zdot - bm.zdot).abs() <= 1e-12);
            prop_assert!((a.phidot - bm.phidot).abs() <= 1e-12);
        }

        #[test]
        fn small_angle_clearance_bound(
            phi in -0.05..0.05f64,
            alpha_deg in -30.0..30.0f64,
        ) {
            // First-order form: hL ≈ h - bc·phi + bc·tan(alpha). The exact and
            // first-order clearances differ by at most bc·phi²/2·(1 + |tan α|).
            let params = VehicleParams::default();
            let terrain = Terrain { alpha: alpha_deg.to_radians() };
            let state = VehicleState { phi, ..VehicleState::at_rest(2.0) };
            let exact = clearance_values(&state, &terrain, &params);
            let ta = terrain.tan_alpha();
            let approx_hl = exact.h - params.bc * phi + params.bc * ta;
            let approx_hr = exact.h + params.bc * phi - params.bc * ta;
            let bound = params.bc * phi * phi / 2.0 * (1.0 + ta.abs()) + 1e-15;
            prop_assert!((exact.hl - approx_hl).abs() <= bound);
            prop_assert!((exact.hr - approx_hr).abs() <= bound);
        }
    }

    #[test]
    fn rk4_is_fourth_order_on_rolling_hover() {
        // Constant thrust with a steady roll rate gives the closed form
        //   phi(t) = w·t
        //   Ydot(t) = Ydot0 + (u1/(m·w))·(cos(w·t) - 1)
        //   Zdot(t) = Zdot0 + (u1/(m·w))·sin(w·t) - g·t
        // which is trigonometric, so RK4 carries a genuine O(dt^4) error.
        let params = VehicleParams::default();
        let w = 0.8;
        let u1 = params.hover_thrust();
        let state0 = VehicleState { phidot: w, ..VehicleState::at_rest(10.0) };
        let cmd = ControlCommand { u1, u2: 0.0 };
        let horizon = 1.0;

        let analytic_vel = |t: f64| {
            let k = u1 / (params.m * w);
            (k * ((w * t).cos() - 1.0), k * (w * t).sin() - params.g * t)
        };

        let run = |dt: f64| {
            let n = (horizon / dt).round() as usize;
            let mut s = state0;
            for _ in 0..n {
                s = step(&s, &cmd, &params, dt).unwrap();
            }
            let (ydot, zdot) = analytic_vel(horizon);
            ((s.ydot - ydot).abs()).max((s.zdot - zdot).abs())
        };

        let coarse = run(0.02);
        let fine = run(0.01);
        let ratio = coarse / fine;
        assert!(
            (10.0..22.0).contains(&ratio),
            "expected ~16x error reduction, got {ratio} (coarse {coarse:e}, fine {fine:e})"
        );
    }
}
