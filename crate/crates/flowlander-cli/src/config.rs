//! On-disk scenario configuration.
//!
//! Files are TOML with the sections `[vehicle]`, `[terrain]`, `[controller]`,
//! `[sim]`, and `[sweep]`; keys mirror the library's field names. Angles are
//! degrees in files and reports and radians inside the library; that
//! conversion happens here and nowhere else. Every artifact directory gets a
//! snapshot of the fully resolved file so any run can be reproduced from its
//! own output.

use std::path::Path;

use anyhow::{bail, Context, Result};
use flowlander_core::{
    ControlLaw, ControllerConfig, EffectivenessMode, GainGrid, PidConfig, PidGains,
    ScenarioConfig, Terrain, VehicleParams,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleSection {
    /// Mass (kg).
    pub m: f64,
    /// Roll inertia (kg·m²).
    pub ixx: f64,
    /// Camera boom half-span (m).
    pub bc: f64,
    /// Gravity (m/s²).
    pub g: f64,
}

impl Default for VehicleSection {
    fn default() -> Self {
        let p = VehicleParams::default();
        Self { m: p.m, ixx: p.ixx, bc: p.bc, g: p.g }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerrainSection {
    /// Surface slope (degrees, positive rises toward +Y).
    pub alpha_deg: f64,
}

impl Default for TerrainSection {
    fn default() -> Self {
        Self { alpha_deg: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainsSection {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub i_limit: f64,
}

impl From<PidGains> for GainsSection {
    fn from(g: PidGains) -> Self {
        Self { kp: g.kp, ki: g.ki, kd: g.kd, i_limit: g.i_limit }
    }
}

impl From<GainsSection> for PidGains {
    fn from(g: GainsSection) -> Self {
        Self { kp: g.kp, ki: g.ki, kd: g.kd, i_limit: g.i_limit }
    }
}

impl Default for GainsSection {
    fn default() -> Self {
        PidGains::ZERO.into()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PidSection {
    pub thrust: GainsSection,
    pub moment: GainsSection,
    pub drift: GainsSection,
}

impl Default for PidSection {
    fn default() -> Self {
        let p = PidConfig::default();
        Self { thrust: p.thrust.into(), moment: p.moment.into(), drift: p.drift.into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerSection {
    /// `indi` or `pid`.
    pub law: String,
    /// Divergence setpoint (1/s, negative).
    pub theta_star: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub eps_y: f64,
    pub eps_phi: f64,
    /// `true-state` or `fixed-nominal`.
    pub effectiveness: String,
    pub nominal_h: f64,
    /// Thrust ceiling (N). Omitted = 4·m·g.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u1_max: Option<f64>,
    /// Moment limit (N·m).
    pub u2_max: f64,
    pub drift_compensation: bool,
    pub pid: PidSection,
}

impl Default for ControllerSection {
    fn default() -> Self {
        let c = ControllerConfig::for_params(&VehicleParams::default());
        Self {
            law: "indi".into(),
            theta_star: c.theta_star,
            k1: c.k1,
            k2: c.k2,
            k3: c.k3,
            eps_y: c.eps_y,
            eps_phi: c.eps_phi,
            effectiveness: "true-state".into(),
            nominal_h: c.nominal_h,
            u1_max: None,
            u2_max: c.u2_max,
            drift_compensation: c.drift_compensation,
            pid: PidSection::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    /// Initial clearance above the surface (m).
    pub h0: f64,
    /// Fixed step and control interval (s).
    pub dt: f64,
    /// Horizon (s).
    pub t_max: f64,
    /// Clearance at which a camera touches down (m).
    pub touchdown_threshold: f64,
    /// Rate-estimator filter time constant (s).
    pub tau_f: f64,
    /// Initial vertical speed (m/s). Omitted = theta_star·h0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kick: Option<f64>,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = ScenarioConfig::default();
        Self {
            h0: s.h0,
            dt: s.dt,
            t_max: s.t_max,
            touchdown_threshold: s.touchdown_threshold,
            tau_f: s.tau_f,
            kick: None,
        }
    }
}

/// Cross-product axes for `sweep`; empty axes make the sweep invalid.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub theta_star: Vec<f64>,
    pub alpha_deg: Vec<f64>,
    pub law: Vec<String>,
}

/// Grid axes for `tune-pid`; empty = the library's default grid.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuneSection {
    pub kp: Vec<f64>,
    pub ki: Vec<f64>,
    pub kd: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub vehicle: VehicleSection,
    pub terrain: TerrainSection,
    pub controller: ControllerSection,
    pub sim: SimSection,
    pub sweep: SweepSection,
    pub tune: TuneSection,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: FileConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        // Serialization of a plain struct tree is deterministic, which the
        // byte-identical round-trip guarantee relies on.
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn law(&self) -> Result<ControlLaw> {
        parse_law(&self.controller.law)
    }

    /// Resolve file units into a runnable scenario. Validation of numeric
    /// ranges is the library's job; only file-level vocabulary is checked
    /// here.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let params = VehicleParams {
            m: self.vehicle.m,
            ixx: self.vehicle.ixx,
            bc: self.vehicle.bc,
            g: self.vehicle.g,
        };
        let effectiveness_mode = match self.controller.effectiveness.as_str() {
            "true-state" => EffectivenessMode::TrueState,
            "fixed-nominal" => EffectivenessMode::FixedNominal,
            other => bail!("controller.effectiveness: unknown value {other:?} (expected \"true-state\" or \"fixed-nominal\")"),
        };
        let controller = ControllerConfig {
            theta_star: self.controller.theta_star,
            k1: self.controller.k1,
            k2: self.controller.k2,
            k3: self.controller.k3,
            eps_y: self.controller.eps_y,
            eps_phi: self.controller.eps_phi,
            effectiveness_mode,
            nominal_h: self.controller.nominal_h,
            u1_max: self.controller.u1_max.unwrap_or(4.0 * params.m * params.g),
            u2_max: self.controller.u2_max,
            drift_compensation: self.controller.drift_compensation,
        };
        let pid = PidConfig {
            thrust: self.controller.pid.thrust.clone().into(),
            moment: self.controller.pid.moment.clone().into(),
            drift: self.controller.pid.drift.clone().into(),
        };
        let cfg = ScenarioConfig {
            terrain: Terrain { alpha: self.terrain.alpha_deg.to_radians() },
            params,
            model_params: None,
            law: self.law()?,
            controller,
            pid,
            initial: None,
            h0: self.sim.h0,
            kick: self.sim.kick,
            dt: self.sim.dt,
            t_max: self.sim.t_max,
            touchdown_threshold: self.sim.touchdown_threshold,
            tau_f: self.sim.tau_f,
        };
        cfg.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(cfg)
    }

    /// The sweep cells in grid order (`theta_star` outermost, then
    /// `alpha_deg`, then `law`), each as a standalone single-run config.
    pub fn sweep_cells(&self) -> Result<Vec<SweepCell>> {
        if self.sweep.theta_star.is_empty() {
            bail!("sweep.theta_star: empty grid axis");
        }
        if self.sweep.alpha_deg.is_empty() {
            bail!("sweep.alpha_deg: empty grid axis");
        }
        if self.sweep.law.is_empty() {
            bail!("sweep.law: empty grid axis");
        }
        let mut cells = Vec::new();
        for &theta_star in &self.sweep.theta_star {
            for &alpha_deg in &self.sweep.alpha_deg {
                for law in &self.sweep.law {
                    parse_law(law)?;
                    let mut file = self.clone();
                    file.controller.theta_star = theta_star;
                    file.terrain.alpha_deg = alpha_deg;
                    file.controller.law = law.clone();
                    file.sweep = SweepSection::default();
                    let id = cells.len();
                    cells.push(SweepCell {
                        id,
                        label: format!("{id:03}_{law}_ts{theta_star}_a{alpha_deg}"),
                        file,
                    });
                }
            }
        }
        Ok(cells)
    }

    pub fn tune_grid(&self) -> GainGrid {
        let mut grid = GainGrid::default();
        if !self.tune.kp.is_empty() {
            grid.kp = self.tune.kp.clone();
        }
        if !self.tune.ki.is_empty() {
            grid.ki = self.tune.ki.clone();
        }
        if !self.tune.kd.is_empty() {
            grid.kd = self.tune.kd.clone();
        }
        grid
    }
}

fn parse_law(s: &str) -> Result<ControlLaw> {
    match s {
        "indi" => Ok(ControlLaw::Indi),
        "pid" => Ok(ControlLaw::Pid),
        other => bail!("controller.law: unknown value {other:?} (expected \"indi\" or \"pid\")"),
    }
}

/// One sweep grid point, ready to run and to snapshot.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub id: usize,
    pub label: String,
    pub file: FileConfig,
}
