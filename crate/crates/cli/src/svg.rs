//! Minimal SVG emission for carpets, densities, tower manifests and plane maps.

use std::fmt::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::formats::{CarpetJson, DensityJson, PlaneMapJson, RegionJson, TowerManifestJson};

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 40.0;

/// Maps data coordinates in a box to SVG pixels with the y axis pointing up.
struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let scale = (WIDTH - 2.0 * MARGIN) / (x1 - x0).max(y1 - y0);
        Frame {
            x0,
            y0,
            scale,
            height: (y1 - y0) * scale + 2.0 * MARGIN,
        }
    }

    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        self.height - MARGIN - (y - self.y0) * self.scale
    }

    fn rect(&self, out: &mut String, s: f64, w: f64, t: f64, h: f64, style: &str) {
        let _ = writeln!(
            out,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" {style}/>"#,
            self.x(s),
            self.y(t + h),
            w * self.scale,
            h * self.scale
        );
    }
}

fn header(out: &mut String, height: f64, timestamp: bool) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.0}" viewBox="0 0 {WIDTH} {height:.0}">"#
    );
    if timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let _ = writeln!(out, "<!-- generated at unix time {secs} -->");
    }
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn text(out: &mut String, x: f64, y: f64, s: &str) {
    let _ = writeln!(out, r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="12">{s}</text>"#);
}

/// Region outline with filled holes; C* carpets are drawn in log coordinates.
pub fn carpet(c: &CarpetJson, timestamp: bool) -> String {
    let (w, h, label) = match &c.region {
        RegionJson::Rect { a } | RegionJson::RectRing { a, .. } => (*a, 1.0, ""),
        RegionJson::Cstar { r, .. } => (r.ln(), std::f64::consts::TAU, "log coordinates (log|z|, arg z)"),
    };
    let f = Frame::fit(0.0, w, 0.0, h);
    let mut out = String::new();
    header(&mut out, f.height, timestamp);
    f.rect(&mut out, 0.0, w, 0.0, h, r##"fill="#d8d8d8" stroke="black""##);
    for k in c.k.iter().chain(&c.k_copies) {
        f.rect(&mut out, k[0], k[1], k[2], k[3], r##"fill="#1f4e99""##);
    }
    for &[cx, cy, side] in &c.holes {
        f.rect(&mut out, cx - side / 2.0, side, cy - side / 2.0, side, r#"class="hole" fill="black""#);
    }
    text(&mut out, MARGIN, 20.0, &format!("depth {} carpet, {} holes {label}", c.depth, c.holes.len()));
    out.push_str("</svg>\n");
    out
}

fn color(t: f64) -> String {
    // Blue to red through white.
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let u = t / 0.5;
        (u, u, 1.0)
    } else {
        let u = (t - 0.5) / 0.5;
        (1.0, 1.0 - u, 1.0 - u)
    };
    format!("#{:02x}{:02x}{:02x}", (r * 255.0) as u8, (g * 255.0) as u8, (b * 255.0) as u8)
}

/// Cell heatmap with a legend bar.
pub fn heatmap(d: &DensityJson, title: &str, timestamp: bool) -> String {
    let (w, h) = (d.dx * d.nx as f64, d.dy * d.ny as f64);
    let f = Frame::fit(d.x0, d.x0 + w, d.y0, d.y0 + h);
    let lo = d.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = d.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    let height = f.height + 50.0;
    header(&mut out, height, timestamp);
    for j in 0..d.ny {
        for i in 0..d.nx {
            let v = d.values[j * d.nx + i];
            let style = format!(r#"fill="{}""#, color((v - lo) / span));
            f.rect(&mut out, d.x0 + d.dx * i as f64, d.dx, d.y0 + d.dy * j as f64, d.dy, &style);
        }
    }
    text(&mut out, MARGIN, 20.0, title);
    let y = f.height;
    let steps = 32;
    out.push_str("<g class=\"legend\">\n");
    let bar = (WIDTH - 2.0 * MARGIN) / steps as f64;
    for s in 0..steps {
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{y:.1}" width="{:.2}" height="12" fill="{}"/>"#,
            MARGIN + bar * s as f64,
            bar + 0.5,
            color(s as f64 / (steps - 1) as f64)
        );
    }
    text(&mut out, MARGIN, y + 28.0, &format!("{lo:.4e}"));
    text(&mut out, WIDTH - MARGIN - 70.0, y + 28.0, &format!("{hi:.4e}"));
    out.push_str("</g>\n</svg>\n");
    out
}

/// `log10` of the per-ring residual against the ring index.
pub fn manifest_chart(m: &TowerManifestJson, timestamp: bool) -> String {
    let floor = 1e-17;
    let ys: Vec<f64> = m.rings.iter().map(|r| r.residual.max(floor).log10()).collect();
    let n = ys.len().max(2);
    let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min).floor();
    let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil().max(lo + 1.0);
    let height = 400.0;
    let px = |i: usize| MARGIN + (WIDTH - 2.0 * MARGIN) * i as f64 / (n - 1) as f64;
    let py = |v: f64| height - MARGIN - (height - 2.0 * MARGIN) * (v - lo) / (hi - lo);
    let mut out = String::new();
    header(&mut out, height, timestamp);
    let _ = writeln!(
        out,
        r#"<path d="M {m:.1} {t:.1} L {m:.1} {b:.1} L {r:.1} {b:.1}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = height - MARGIN,
        r = WIDTH - MARGIN
    );
    let points: Vec<String> = ys.iter().enumerate().map(|(i, &v)| format!("{:.1},{:.1}", px(i), py(v))).collect();
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
        points.join(" ")
    );
    for (i, &v) in ys.iter().enumerate() {
        let _ = writeln!(out, r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="#c0392b"/>"##, px(i), py(v));
    }
    text(&mut out, MARGIN, 20.0, &format!("log10 residual per ring (monotone: {})", m.monotone));
    text(&mut out, 4.0, MARGIN + 4.0, &format!("{hi}"));
    text(&mut out, 4.0, height - MARGIN, &format!("{lo}"));
    text(&mut out, WIDTH / 2.0 - 20.0, height - 10.0, "ring index");
    out.push_str("</svg>\n");
    out
}

/// Images of every `stride`-th grid line of a sampled plane map.
pub fn plane_map(m: &PlaneMapJson, timestamp: bool) -> String {
    let (nx, ny) = (m.region.nx, m.region.ny);
    let defined: Vec<[f64; 2]> = m.values.iter().flatten().copied().collect();
    let x0 = defined.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let x1 = defined.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    let y0 = defined.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
    let y1 = defined.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
    let f = if defined.is_empty() {
        Frame::fit(0.0, 1.0, 0.0, 1.0)
    } else {
        Frame::fit(x0, x1.max(x0 + 1e-12), y0, y1.max(y0 + 1e-12))
    };
    let stride = (nx.max(ny) / 32).max(1);
    let mut out = String::new();
    header(&mut out, f.height, timestamp);
    let mut polyline = |pts: &mut Vec<String>| {
        if pts.len() > 1 {
            let _ = writeln!(
                out,
                r##"<polyline points="{}" fill="none" stroke="#1f4e99" stroke-width="0.8"/>"##,
                pts.join(" ")
            );
        }
        pts.clear();
    };
    let mut pts = Vec::new();
    for j in (0..ny).step_by(stride) {
        for i in 0..nx {
            match m.values[j * nx + i] {
                Some([x, y]) => pts.push(format!("{:.2},{:.2}", f.x(x), f.y(y))),
                None => polyline(&mut pts),
            }
        }
        polyline(&mut pts);
    }
    for i in (0..nx).step_by(stride) {
        for j in 0..ny {
            match m.values[j * nx + i] {
                Some([x, y]) => pts.push(format!("{:.2},{:.2}", f.x(x), f.y(y))),
                None => polyline(&mut pts),
            }
        }
        polyline(&mut pts);
    }
    text(&mut out, MARGIN, 20.0, &format!("image of the {nx} x {ny} sample grid"));
    out.push_str("</svg>\n");
    out
}
