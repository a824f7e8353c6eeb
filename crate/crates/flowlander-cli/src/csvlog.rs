//! The run-log CSV format.
//!
//! One row per control tick with the full state, clearance, observable, and
//! command set; the column order is fixed and floats carry nine significant
//! digits so identical runs produce byte-identical files.

use anyhow::{bail, Context, Result};
use flowlander_core::SimLog;

pub const HEADER: &str =
    "t,Y,Z,phi,Ydot,Zdot,phidot,h,hL,hR,thetaL,thetaR,thetaY,y1,y2,y3,u1,u2,phase";

/// Nine significant digits, locale-free.
fn fmt(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn to_csv(log: &SimLog) -> String {
    let mut out = String::with_capacity(64 + log.rows.len() * 220);
    out.push_str(HEADER);
    out.push('\n');
    for r in &log.rows {
        let vals = [
            r.t,
            r.state.y,
            r.state.z,
            r.state.phi,
            r.state.ydot,
            r.state.zdot,
            r.state.phidot,
            r.clearances.h,
            r.clearances.hl,
            r.clearances.hr,
            r.obs.theta_l,
            r.obs.theta_r,
            r.obs.theta_y,
            r.obs.y1,
            r.obs.y2,
            r.obs.y3,
            r.cmd.u1,
            r.cmd.u2,
        ];
        for v in vals {
            out.push_str(&fmt(v));
            out.push(',');
        }
        out.push_str(r.phase.as_str());
        out.push('\n');
    }
    out
}

/// Column store of a parsed run log, as written by [`to_csv`].
#[derive(Debug, Clone, Default)]
pub struct CsvData {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub phi: Vec<f64>,
    pub ydot: Vec<f64>,
    pub zdot: Vec<f64>,
    pub phidot: Vec<f64>,
    pub h: Vec<f64>,
    pub hl: Vec<f64>,
    pub hr: Vec<f64>,
    pub theta_l: Vec<f64>,
    pub theta_r: Vec<f64>,
    pub theta_y: Vec<f64>,
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    pub y3: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub phase: Vec<String>,
}

impl CsvData {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Central-difference rate of the center clearance (one-sided at the
    /// ends), so plots of ḣ need no scenario knowledge beyond the log.
    pub fn hdot(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        if n < 2 {
            return out;
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let (a, b) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            *slot = (self.h[b] - self.h[a]) / (self.t[b] - self.t[a]);
        }
        out
    }
}

pub fn parse_csv(text: &str) -> Result<CsvData> {
    let mut lines = text.lines();
    let header = lines.next().context("empty log file")?;
    if header != HEADER {
        bail!("unexpected log header {header:?}");
    }
    let mut d = CsvData::default();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 19 {
            bail!("row {}: expected 19 fields, found {}", idx + 2, fields.len());
        }
        let mut nums = [0.0; 18];
        for (slot, field) in nums.iter_mut().zip(&fields) {
            *slot = field
                .parse::<f64>()
                .with_context(|| format!("row {}: bad number {field:?}", idx + 2))?;
        }
        let [t, y, z, phi, ydot, zdot, phidot, h, hl, hr, tl, tr, ty, y1, y2, y3, u1, u2] = nums;
        d.t.push(t);
        d.y.push(y);
        d.z.push(z);
        d.phi.push(phi);
        d.ydot.push(ydot);
        d.zdot.push(zdot);
        d.phidot.push(phidot);
        d.h.push(h);
        d.hl.push(hl);
        d.hr.push(hr);
        d.theta_l.push(tl);
        d.theta_r.push(tr);
        d.theta_y.push(ty);
        d.y1.push(y1);
        d.y2.push(y2);
        d.y3.push(y3);
        d.u1.push(u1);
        d.u2.push(u2);
        d.phase.push(fields[18].to_string());
    }
    Ok(d)
}
