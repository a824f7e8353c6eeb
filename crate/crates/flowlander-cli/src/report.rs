//! Metrics files and sweep summary tables.
//!
//! Each run directory carries a `metrics.txt` in `key = value` form; sweep
//! directories additionally get a shaped summary in both plain text and CSV.
//! A grid swept over setpoints renders one tracking-error column per
//! setpoint; a grid swept over slopes renders the three landing metrics per
//! slope. Cells that failed leave blanks and a warning rather than sinking
//! the whole table.

use anyhow::{bail, Context, Result};
use flowlander_core::{LandingMetrics, SimLog, TerminalEvent};

fn fmt(x: f64) -> String {
    format!("{x:.8e}")
}

/// `metrics.txt` body for a finished run.
pub fn metrics_text(
    law: &str,
    theta_star: f64,
    alpha_deg: f64,
    log: &SimLog,
    m: &LandingMetrics,
) -> String {
    let (outcome, t_final) = match &log.terminal {
        TerminalEvent::Touchdown { t, .. } => ("touchdown".to_string(), *t),
        TerminalEvent::Timeout { t } => ("timeout".to_string(), *t),
        TerminalEvent::Failure { t, reason } => (format!("failure: {reason}"), *t),
    };
    let mut s = String::new();
    s.push_str(&format!("law = {law}\n"));
    s.push_str(&format!("theta_star = {}\n", fmt(theta_star)));
    s.push_str(&format!("alpha_deg = {}\n", fmt(alpha_deg)));
    s.push_str(&format!("outcome = {outcome}\n"));
    s.push_str(&format!("t_final = {}\n", fmt(t_final)));
    s.push_str(&format!("complete = {}\n", m.complete));
    s.push_str(&format!("rmse_y1 = {}\n", fmt(m.rmse_y1)));
    s.push_str(&format!("rmse_y2 = {}\n", fmt(m.rmse_y2)));
    s.push_str(&format!("phi_f_deg = {}\n", fmt(m.phi_f_deg)));
    s.push_str(&format!("Y_drift = {}\n", fmt(m.y_drift)));
    s.push_str(&format!("v_td = {}\n", fmt(m.v_td)));
    s.push_str(&format!("decay_slope = {}\n", fmt(m.decay_slope)));
    s
}

/// `metrics.txt` body for a run that produced no metrics.
pub fn failure_text(law: &str, theta_star: f64, alpha_deg: f64, error: &str) -> String {
    format!(
        "law = {law}\ntheta_star = {}\nalpha_deg = {}\noutcome = failure: {error}\n",
        fmt(theta_star),
        fmt(alpha_deg),
    )
}

/// One sweep cell as the report sees it; `metrics` is `None` for cells whose
/// run or metric extraction failed.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub law: String,
    pub theta_star: f64,
    pub alpha_deg: f64,
    pub metrics: Option<LandingMetrics>,
}

/// Parses a `metrics.txt` back into a cell result.
pub fn parse_metrics_text(text: &str) -> Result<CellResult> {
    let mut law = None;
    let mut vals = std::collections::BTreeMap::new();
    let mut complete = None;
    for line in text.lines() {
        let Some((key, value)) = line.split_once(" = ") else { continue };
        match key {
            "law" => law = Some(value.to_string()),
            "outcome" => {}
            "complete" => {
                complete =
                    Some(value.parse::<bool>().with_context(|| format!("bad flag {value:?}"))?)
            }
            _ => {
                let v: f64 =
                    value.parse().with_context(|| format!("bad number {value:?} for {key}"))?;
                vals.insert(key.to_string(), v);
            }
        }
    }
    let law = law.context("metrics file lacks a law line")?;
    let theta_star = *vals.get("theta_star").context("metrics file lacks theta_star")?;
    let alpha_deg = *vals.get("alpha_deg").context("metrics file lacks alpha_deg")?;
    let metrics = match complete {
        None => None,
        Some(complete) => Some(LandingMetrics {
            rmse_y1: *vals.get("rmse_y1").context("missing rmse_y1")?,
            rmse_y2: *vals.get("rmse_y2").context("missing rmse_y2")?,
            phi_f_deg: *vals.get("phi_f_deg").context("missing phi_f_deg")?,
            y_drift: *vals.get("Y_drift").context("missing Y_drift")?,
            v_td: *vals.get("v_td").context("missing v_td")?,
            decay_slope: *vals.get("decay_slope").context("missing decay_slope")?,
            complete,
        }),
    };
    Ok(CellResult { law, theta_star, alpha_deg, metrics })
}

/// Which table shape a grid gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepLayout {
    /// One tracking-error column per divergence setpoint.
    Setpoint,
    /// Three landing-metric columns per surface slope.
    Slope,
    /// Anything swept on both axes: one row per cell instead.
    Long,
}

pub fn layout_of(cells: &[CellResult]) -> SweepLayout {
    let thetas = distinct(cells.iter().map(|c| c.theta_star));
    let alphas = distinct(cells.iter().map(|c| c.alpha_deg));
    match (thetas.len() > 1, alphas.len() > 1) {
        (true, true) => SweepLayout::Long,
        (_, true) => SweepLayout::Slope,
        _ => SweepLayout::Setpoint,
    }
}

/// Values in order of first appearance (grid order), exact comparison: cell
/// coordinates come from config lists, not arithmetic.
fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn laws_of(cells: &[CellResult]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in cells {
        if !out.contains(&c.law) {
            out.push(c.law.clone());
        }
    }
    out
}

/// Rendered summary plus any missing-cell warnings.
#[derive(Debug, Clone)]
pub struct Summary {
    pub text: String,
    pub csv: String,
    pub warnings: Vec<String>,
}

pub fn render_summary(cells: &[CellResult]) -> Result<Summary> {
    if cells.is_empty() {
        bail!("no sweep cells to summarize");
    }
    Ok(match layout_of(cells) {
        SweepLayout::Setpoint => setpoint_summary(cells),
        SweepLayout::Slope => slope_summary(cells),
        SweepLayout::Long => long_summary(cells),
    })
}

fn find<'a>(
    cells: &'a [CellResult],
    law: &str,
    key: f64,
    by_alpha: bool,
) -> Option<&'a CellResult> {
    cells
        .iter()
        .find(|c| c.law == law && (if by_alpha { c.alpha_deg } else { c.theta_star }) == key)
}

/// Fixed-width text table from header + rows; the CSV twin joins the same
/// cells with commas.
fn tables(title: &str, header: &[String], rows: &[Vec<String>]) -> (String, String) {
    let ncol = header.len();
    let mut width = vec![0usize; ncol];
    for row in std::iter::once(header).chain(rows.iter().map(|r| &r[..])) {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut text = format!("{title}\n");
    for row in std::iter::once(header).chain(rows.iter().map(|r| &r[..])) {
        let mut line = String::new();
        for (i, (cell, w)) in row.iter().zip(&width).enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:<w$}"));
        }
        text.push_str(line.trim_end());
        text.push('\n');
    }
    let mut csv = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(|r| &r[..])) {
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    (text, csv)
}

fn setpoint_summary(cells: &[CellResult]) -> Summary {
    let thetas = distinct(cells.iter().map(|c| c.theta_star));
    let laws = laws_of(cells);
    let mut header = vec!["law".to_string()];
    header.extend(thetas.iter().map(|t| format!("rmse_y1[ts={t}]")));
    let mut warnings = Vec::new();
    let rows: Vec<Vec<String>> = laws
        .iter()
        .map(|law| {
            let mut row = vec![law.clone()];
            for &t in &thetas {
                match find(cells, law, t, false).and_then(|c| c.metrics.as_ref()) {
                    Some(m) => row.push(fmt(m.rmse_y1)),
                    None => {
                        warnings.push(format!("missing cell: law={law} theta_star={t}"));
                        row.push(String::new());
                    }
                }
            }
            row
        })
        .collect();
    let (text, csv) = tables("y1 tracking error (rms, 1/s) by divergence setpoint", &header, &rows);
    Summary { text, csv, warnings }
}

fn slope_summary(cells: &[CellResult]) -> Summary {
    let alphas = distinct(cells.iter().map(|c| c.alpha_deg));
    let laws = laws_of(cells);
    let mut header = vec!["law".to_string()];
    for a in &alphas {
        header.push(format!("rmse_y2[a={a}]"));
        header.push(format!("phi_f_deg[a={a}]"));
        header.push(format!("Y_drift[a={a}]"));
    }
    let mut warnings = Vec::new();
    let rows: Vec<Vec<String>> = laws
        .iter()
        .map(|law| {
            let mut row = vec![law.clone()];
            for &a in &alphas {
                match find(cells, law, a, true).and_then(|c| c.metrics.as_ref()) {
                    Some(m) => {
                        row.push(fmt(m.rmse_y2));
                        row.push(fmt(m.phi_f_deg));
                        row.push(fmt(m.y_drift));
                    }
                    None => {
                        warnings.push(format!("missing cell: law={law} alpha_deg={a}"));
                        row.extend([String::new(), String::new(), String::new()]);
                    }
                }
            }
            row
        })
        .collect();
    let (text, csv) = tables("landing metrics by surface slope (deg)", &header, &rows);
    Summary { text, csv, warnings }
}

fn long_summary(cells: &[CellResult]) -> Summary {
    let header: Vec<String> = [
        "law",
        "theta_star",
        "alpha_deg",
        "complete",
        "rmse_y1",
        "rmse_y2",
        "phi_f_deg",
        "Y_drift",
        "v_td",
        "decay_slope",
    ]
    .map(String::from)
    .to_vec();
    let mut warnings = Vec::new();
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            let mut row =
                vec![c.law.clone(), c.theta_star.to_string(), c.alpha_deg.to_string()];
            match &c.metrics {
                Some(m) => row.extend([
                    m.complete.to_string(),
                    fmt(m.rmse_y1),
                    fmt(m.rmse_y2),
                    fmt(m.phi_f_deg),
                    fmt(m.y_drift),
                    fmt(m.v_td),
                    fmt(m.decay_slope),
                ]),
                None => {
                    warnings.push(format!(
                        "missing cell: law={} theta_star={} alpha_deg={}",
                        c.law, c.theta_star, c.alpha_deg
                    ));
                    row.extend(std::iter::repeat_n(String::new(), 7));
                }
            }
            row
        })
        .collect();
    let (text, csv) = tables("sweep cells", &header, &rows);
    Summary { text, csv, warnings }
}
