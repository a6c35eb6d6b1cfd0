//! Minimal self-contained SVG charts.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
}

impl Frame {
    fn fx(&self, x: f64) -> f64 {
        let (x, a, b) = if self.log_x {
            (x.log10(), self.x0.log10(), self.x1.log10())
        } else {
            (x, self.x0, self.x1)
        };
        LEFT + (x - a) / (b - a) * (WIDTH - LEFT - RIGHT)
    }

    fn fy(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn open(title: &str, x_label: &str, y_label: &str, frame: Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (bx, by) = (HEIGHT - BOTTOM, WIDTH - RIGHT);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{bx}" x2="{by}" y2="{bx}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bx}" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = if frame.log_x {
            10f64.powf(frame.x0.log10() + t * (frame.x1.log10() - frame.x0.log10()))
        } else {
            frame.x0 + t * (frame.x1 - frame.x0)
        };
        let yv = frame.y0 + t * (frame.y1 - frame.y0);
        let (px, py) = (frame.fx(xv), frame.fy(yv));
        let _ = writeln!(
            s,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            bx + 16.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (LEFT + by) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0:.1}" text-anchor="middle" transform="rotate(-90 16 {0:.1})">{1}</text>"#,
        (TOP + bx) / 2.0,
        escape(y_label)
    );
    s
}

fn legend(s: &mut String, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let y = TOP + 8.0 + 16.0 * i as f64;
        let x = WIDTH - RIGHT - 120.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{}"/>"#,
            y - 9.0,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}">{}</text>"#,
            x + 14.0,
            escape(name)
        );
    }
}

/// Polylines sharing one pair of linear axes.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    y_range: Option<(f64, f64)>,
) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if let Some(r) = y_range {
        (y0, y1) = r;
    }
    let (x0, x1) = span(x0, x1);
    let (y0, y1) = span(y0, y1);
    let frame = Frame {
        x0,
        x1,
        y0,
        y1,
        log_x: false,
    };
    let mut s = open(title, x_label, y_label, frame);
    for (i, ser) in series.iter().enumerate() {
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.fx(x), frame.fy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        );
    }
    legend(&mut s, &series.iter().map(|x| x.name).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

/// Side-by-side H and V bars per bin.
pub fn bar_chart(title: &str, h: &[f64], v: &[f64]) -> String {
    let bins = h.len().max(v.len()).max(1);
    let top = h.iter().chain(v).copied().fold(0.0, f64::max);
    let frame = Frame {
        x0: -0.5,
        x1: bins as f64 - 0.5,
        y0: 0.0,
        y1: if top > 0.0 { top * 1.1 } else { 1.0 },
        log_x: false,
    };
    let mut s = open(title, "time bin", "probability", frame);
    let slot = frame.fx(1.0) - frame.fx(0.0);
    let w = 0.4 * slot;
    for (k, values) in [h, v].into_iter().enumerate() {
        for (m, &p) in values.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            let x = frame.fx(m as f64) - w + k as f64 * w;
            let y = frame.fy(p);
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{:.2}" fill="{}"/>"#,
                frame.fy(0.0) - y,
                PALETTE[k]
            );
        }
    }
    legend(&mut s, &["H", "V"]);
    s.push_str("</svg>\n");
    s
}

pub struct ScatterPoint<'a> {
    pub x: f64,
    pub y: f64,
    /// Fill shade in [0, 1]; `None` draws a hollow marker.
    pub shade: Option<f64>,
    pub triangle: bool,
    pub label: &'a str,
}

/// Markers on a logarithmic x axis.
pub fn scatter_log_x(title: &str, x_label: &str, y_label: &str, points: &[ScatterPoint]) -> String {
    let xs = points.iter().map(|p| p.x).filter(|x| *x > 0.0);
    let x0 = xs.clone().fold(f64::INFINITY, f64::min);
    let x1 = xs.fold(f64::NEG_INFINITY, f64::max);
    let y0 = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let y1 = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1) = if x0.is_finite() {
        (x0 / 1.5, x1 * 1.5)
    } else {
        (1.0, 10.0)
    };
    let (y0, y1) = if y0.is_finite() {
        span(y0 - 0.5, y1 + 0.5)
    } else {
        (0.0, 1.0)
    };
    let frame = Frame {
        x0,
        x1,
        y0,
        y1,
        log_x: true,
    };
    let mut s = open(title, x_label, y_label, frame);
    for p in points.iter().filter(|p| p.x > 0.0) {
        let (cx, cy) = (frame.fx(p.x), frame.fy(p.y));
        let fill = match p.shade {
            Some(t) => {
                let t = t.clamp(0.0, 1.0);
                format!(
                    "rgb({},{},{})",
                    (255.0 * (1.0 - t)) as u8,
                    (80.0 + 100.0 * t) as u8,
                    (255.0 * t) as u8
                )
            }
            None => "white".to_owned(),
        };
        if p.triangle {
            let _ = writeln!(
                s,
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}" stroke="black"><title>{}</title></polygon>"#,
                cx,
                cy - 6.0,
                cx - 5.5,
                cy + 4.0,
                cx + 5.5,
                cy + 4.0,
                escape(p.label)
            );
        } else {
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="5" fill="{fill}" stroke="black"><title>{}</title></circle>"#,
                escape(p.label)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
