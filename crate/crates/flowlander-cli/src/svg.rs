//! Dependency-free SVG plots of run logs.
//!
//! Three kinds: stacked time-series panels for a descent, the landing view
//! with roll and moment channels added, and a world-frame trajectory with
//! terrain and periodic body snapshots. All geometry is computed here; the
//! output is plain text.

use crate::csvlog::CsvData;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const PANEL_W: f64 = 800.0;
const PANEL_H: f64 = 170.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_TOP: f64 = 26.0;
const MARGIN_BOT: f64 = 30.0;

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (0.01..10000.0).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

/// Maps data space onto one panel's pixel rectangle (y grows upward in data,
/// downward in SVG).
struct Frame {
    px: f64,
    py: f64,
    pw: f64,
    ph: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        self.px + (x - self.xmin) / (self.xmax - self.xmin) * self.pw
    }

    fn sy(&self, y: f64) -> f64 {
        self.py + self.ph - (y - self.ymin) / (self.ymax - self.ymin) * self.ph
    }
}

fn polyline(out: &mut String, f: &Frame, xs: &[f64], ys: &[f64], color: &str) {
    let mut points = String::new();
    let mut open = false;
    for (&x, &y) in xs.iter().zip(ys) {
        if x.is_finite() && y.is_finite() {
            points.push_str(&format!("{:.1},{:.1} ", f.sx(x), f.sy(y)));
            open = true;
        } else if open {
            flush_polyline(out, &mut points, color);
            open = false;
        }
    }
    flush_polyline(out, &mut points, color);
}

fn flush_polyline(out: &mut String, points: &mut String, color: &str) {
    if !points.is_empty() {
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
            points.trim_end()
        ));
        points.clear();
    }
}

/// One stacked panel: frame, ticks, polylines, title, legend.
fn panel(
    out: &mut String,
    top: f64,
    title: &str,
    xs: &[f64],
    series: &[(&str, &[f64])],
    x_label: &str,
) {
    let (xmin, xmax) = finite_range(xs.iter().copied());
    let (ymin, ymax) = finite_range(series.iter().flat_map(|(_, ys)| ys.iter().copied()));
    let f = Frame {
        px: MARGIN_L,
        py: top + MARGIN_TOP,
        pw: PANEL_W - MARGIN_L - MARGIN_R,
        ph: PANEL_H - MARGIN_TOP - MARGIN_BOT,
        xmin,
        xmax,
        ymin,
        ymax,
    };
    out.push_str(&format!(
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n",
        f.px, f.py, f.pw, f.ph
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" font-weight=\"bold\">{title}</text>\n",
        f.px, top + 17.0
    ));
    for i in 0..=4 {
        let x = xmin + (xmax - xmin) * i as f64 / 4.0;
        let sx = f.sx(x);
        out.push_str(&format!(
            "<line x1=\"{sx:.1}\" y1=\"{:.1}\" x2=\"{sx:.1}\" y2=\"{:.1}\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n",
            f.py, f.py + f.ph
        ));
        out.push_str(&format!(
            "<text x=\"{sx:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            f.py + f.ph + 13.0,
            tick_label(x)
        ));
    }
    for i in 0..=3 {
        let y = ymin + (ymax - ymin) * i as f64 / 3.0;
        let sy = f.sy(y);
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{sy:.1}\" x2=\"{:.1}\" y2=\"{sy:.1}\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n",
            f.px, f.px + f.pw
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            f.px - 5.0,
            sy + 3.5,
            tick_label(y)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{x_label}</text>\n",
        f.px + f.pw / 2.0,
        f.py + f.ph + 26.0
    ));
    for (i, (label, ys)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        polyline(out, &f, xs, ys, color);
        if series.len() > 1 {
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{label}</text>\n",
                f.px + f.pw - 70.0,
                f.py + 14.0 + 13.0 * i as f64
            ));
        }
    }
}

fn document(body: &str, width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// Title plus labeled series of one stacked panel.
type PanelSpec<'a> = (&'a str, Vec<(&'a str, &'a [f64])>);

fn stacked(panels: &[PanelSpec], xs: &[f64]) -> String {
    let mut body = String::new();
    for (i, (title, series)) in panels.iter().enumerate() {
        let last = i == panels.len() - 1;
        panel(
            &mut body,
            i as f64 * PANEL_H,
            title,
            xs,
            series,
            if last { "t (s)" } else { "" },
        );
    }
    document(&body, PANEL_W, panels.len() as f64 * PANEL_H + 8.0)
}

/// Descent view: clearance, its rate, mean divergence, thrust.
pub fn timeseries_svg(d: &CsvData) -> String {
    let hdot = d.hdot();
    stacked(
        &[
            ("clearance h (m)", vec![("h", &d.h[..])]),
            ("clearance rate (m/s)", vec![("hdot", &hdot[..])]),
            ("mean divergence y1 (1/s)", vec![("y1", &d.y1[..])]),
            ("thrust u1 (N)", vec![("u1", &d.u1[..])]),
        ],
        &d.t,
    )
}

/// Landing view: adds roll, the divergence split, and the moment channel.
pub fn slope_landing_svg(d: &CsvData) -> String {
    let phi_deg: Vec<f64> = d.phi.iter().map(|p| p.to_degrees()).collect();
    stacked(
        &[
            ("clearance h (m)", vec![("h", &d.h[..])]),
            ("roll (deg)", vec![("phi", &phi_deg[..])]),
            ("divergence split y2 (1/s)", vec![("y2", &d.y2[..])]),
            ("thrust u1 (N)", vec![("u1", &d.u1[..])]),
            ("moment u2 (N*m)", vec![("u2", &d.u2[..])]),
        ],
        &d.t,
    )
}

/// World-frame flight path with the surface and body-attitude snapshots
/// every `interval` seconds. Aspect ratio is preserved so the geometry reads
/// true.
pub fn trajectory_svg(d: &CsvData, bc: f64, alpha_deg: f64, interval: f64) -> String {
    let tan_a = alpha_deg.to_radians().tan();
    let mut snapshots: Vec<usize> = Vec::new();
    let mut next_t = f64::NEG_INFINITY;
    for (i, &t) in d.t.iter().enumerate() {
        if t >= next_t {
            snapshots.push(i);
            next_t = t + interval.max(1e-9);
        }
    }
    if let Some(&last) = snapshots.last() {
        if last != d.len() - 1 {
            snapshots.push(d.len() - 1);
        }
    }

    let mut ys: Vec<f64> = d.y.clone();
    let mut zs: Vec<f64> = d.z.clone();
    for &i in &snapshots {
        let (c, s) = (d.phi[i].cos(), d.phi[i].sin());
        for sgn in [-1.0, 1.0] {
            ys.push(d.y[i] + sgn * bc * c);
            zs.push(d.z[i] + sgn * bc * s);
        }
    }
    let (ymin, ymax) = finite_range(ys.iter().copied());
    for &y in &[ymin, ymax] {
        zs.push(tan_a * y);
    }
    let (zmin, zmax) = finite_range(zs.iter().copied());

    let (w, h) = (760.0, 480.0);
    let scale = (w / (ymax - ymin)).min(h / (zmax - zmin));
    let px = MARGIN_L + (w - scale * (ymax - ymin)) / 2.0;
    let py = MARGIN_TOP + (h - scale * (zmax - zmin)) / 2.0;
    let f = Frame {
        px,
        py,
        pw: scale * (ymax - ymin),
        ph: scale * (zmax - zmin),
        xmin: ymin,
        xmax: ymax,
        ymin: zmin,
        ymax: zmax,
    };

    let mut body = String::new();
    body.push_str(
        "<text x=\"72\" y=\"17\" font-family=\"sans-serif\" font-size=\"13\" font-weight=\"bold\">trajectory (world frame, equal aspect)</text>\n",
    );
    body.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#8c564b\" stroke-width=\"2\"/>\n",
        f.sx(ymin),
        f.sy(tan_a * ymin),
        f.sx(ymax),
        f.sy(tan_a * ymax)
    ));
    polyline(&mut body, &f, &d.y, &d.z, PALETTE[0]);
    for &i in &snapshots {
        let (c, s) = (d.phi[i].cos(), d.phi[i].sin());
        body.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            f.sx(d.y[i] - bc * c),
            f.sy(d.z[i] - bc * s),
            f.sx(d.y[i] + bc * c),
            f.sy(d.z[i] + bc * s),
            PALETTE[1]
        ));
    }
    for (i, &yv) in [ymin, ymax].iter().enumerate() {
        body.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">Y={}</text>\n",
            f.sx(yv),
            py + h + 14.0,
            tick_label(yv)
        ));
        let zv = [zmin, zmax][i];
        body.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">Z={}</text>\n",
            px - 5.0,
            f.sy(zv) + 3.5,
            tick_label(zv)
        ));
    }
    document(&body, w + MARGIN_L + MARGIN_R, h + MARGIN_TOP + MARGIN_BOT + 8.0)
}
