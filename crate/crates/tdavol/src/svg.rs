//! Minimal static SVG charts. Coordinates are rounded to two decimals so the
//! output is stable across platforms.

use std::fmt::Write as _;

use chrono::NaiveDate;
use tdavol_core::timeseries::BoxSummary;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub const BLUE: &str = "#1f77b4";
pub const ORANGE: &str = "#ff7f0e";
pub const GREEN: &str = "#2ca02c";
pub const RED: &str = "#d62728";
pub const GREY: &str = "#7f7f7f";
pub const BROWN: &str = "#8c564b";

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
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

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let (x1, y1) = (
            if x1 > x0 { x1 } else { x0 + 1.0 },
            if y1 > y0 { y1 } else { y0 + 1.0 },
        );
        let pad = (y1 - y0) * 0.05;
        Self {
            x0,
            x1,
            y0: y0 - pad,
            y1: y1 + pad,
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str, y_label: &str, digest: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<!-- config-digest: {digest} -->");
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(y_label)
    );
}

fn y_axis(out: &mut String, f: &Frame) {
    for t in ticks(f.y0, f.y1) {
        let y = f.py(t);
        let _ = writeln!(
            out,
            "<line x1=\"{LEFT}\" x2=\"{:.2}\" y1=\"{y:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\"/>\n<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            WIDTH - RIGHT,
            LEFT - 6.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
}

fn path_data(points: impl Iterator<Item = Option<(f64, f64)>>) -> String {
    let mut d = String::new();
    let mut pen_down = false;
    for p in points {
        match p {
            Some((x, y)) => {
                let _ = write!(d, "{}{x:.2},{y:.2} ", if pen_down { "L" } else { "M" });
                pen_down = true;
            }
            None => pen_down = false,
        }
    }
    d.trim_end().to_string()
}

/// A dated line; `None` values break the path.
pub struct Line {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(NaiveDate, Option<f64>)>,
}

impl Line {
    pub fn new(label: impl Into<String>, color: &'static str, dates: &[NaiveDate], values: &[f64]) -> Self {
        Self {
            label: label.into(),
            color,
            dashed: false,
            points: dates
                .iter()
                .copied()
                .zip(values.iter().map(|&v| Some(v)))
                .collect(),
        }
    }
}

/// A shaded interval between two dated curves.
pub struct Band {
    pub label: String,
    pub color: &'static str,
    pub dates: Vec<NaiveDate>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Default)]
pub struct TimeChart {
    pub title: String,
    pub y_label: String,
    pub lines: Vec<Line>,
    pub bands: Vec<Band>,
    /// Vertical dashed markers.
    pub markers: Vec<NaiveDate>,
    pub hlines: Vec<f64>,
    /// Highlighted points drawn as small circles.
    pub points: Vec<(NaiveDate, f64, &'static str)>,
}

fn day(d: NaiveDate) -> f64 {
    d.signed_duration_since(NaiveDate::default()).num_days() as f64
}

impl TimeChart {
    pub fn render(&self, digest: &str) -> String {
        let xs = self
            .lines
            .iter()
            .flat_map(|l| l.points.iter().map(|p| p.0))
            .chain(self.bands.iter().flat_map(|b| b.dates.iter().copied()));
        let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
        for d in xs {
            x0 = x0.min(day(d));
            x1 = x1.max(day(d));
        }
        let ys = self
            .lines
            .iter()
            .flat_map(|l| l.points.iter().filter_map(|p| p.1))
            .chain(
                self.bands
                    .iter()
                    .flat_map(|b| b.lower.iter().chain(&b.upper).copied()),
            )
            .chain(self.hlines.iter().copied())
            .filter(|v| v.is_finite());
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in ys {
            y0 = y0.min(v);
            y1 = y1.max(v);
        }
        if !x0.is_finite() {
            (x0, x1) = (0.0, 1.0);
        }
        if !y0.is_finite() {
            (y0, y1) = (0.0, 1.0);
        }
        let f = Frame::new(x0, x1, y0, y1);

        let mut out = String::new();
        header(&mut out, &self.title, &self.y_label, digest);
        y_axis(&mut out, &f);
        let n_ticks = 6;
        for k in 0..=n_ticks {
            let x = f.x0 + (f.x1 - f.x0) * k as f64 / n_ticks as f64;
            let date = NaiveDate::default() + chrono::Duration::days(x.round() as i64);
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{date}</text>"#,
                f.px(x),
                HEIGHT - BOTTOM + 18.0
            );
        }
        for b in &self.bands {
            let upper = b
                .dates
                .iter()
                .zip(&b.upper)
                .map(|(d, v)| (f.px(day(*d)), f.py(*v)));
            let lower = b
                .dates
                .iter()
                .zip(&b.lower)
                .rev()
                .map(|(d, v)| (f.px(day(*d)), f.py(*v)));
            let pts: Vec<String> = upper
                .chain(lower)
                .map(|(x, y)| format!("{x:.2},{y:.2}"))
                .collect();
            let _ = writeln!(
                out,
                r#"<polygon points="{}" fill="{}" fill-opacity="0.25" stroke="none"/>"#,
                pts.join(" "),
                b.color
            );
        }
        for &h in &self.hlines {
            let _ = writeln!(
                out,
                r#"<line x1="{LEFT}" x2="{:.2}" y1="{y:.2}" y2="{y:.2}" stroke="black" stroke-width="0.8"/>"#,
                WIDTH - RIGHT,
                y = f.py(h)
            );
        }
        for l in &self.lines {
            let d = path_data(l.points.iter().map(|(d, v)| v.map(|v| (f.px(day(*d)), f.py(v)))));
            let dash = if l.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                out,
                r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.2"{dash}/>"#,
                l.color
            );
        }
        for (d, v, color) in &self.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}"/>"#,
                f.px(day(*d)),
                f.py(*v)
            );
        }
        for m in &self.markers {
            let x = f.px(day(*m));
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" x2="{x:.2}" y1="{TOP}" y2="{:.2}" stroke="{BROWN}" stroke-width="1.5" stroke-dasharray="8 5"/>"#,
                HEIGHT - BOTTOM
            );
        }
        legend(
            &mut out,
            self.lines
                .iter()
                .map(|l| (l.label.as_str(), l.color))
                .chain(self.bands.iter().map(|b| (b.label.as_str(), b.color))),
        );
        out.push_str("</svg>\n");
        out
    }
}

fn legend<'a>(out: &mut String, entries: impl Iterator<Item = (&'a str, &'a str)>) {
    for (i, (label, color)) in entries.enumerate() {
        let y = TOP + 14.0 + 16.0 * i as f64;
        let x = LEFT + 10.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="14" height="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            y - 4.0,
            x + 20.0,
            y,
            escape(label)
        );
    }
}

/// Side-by-side Tukey box plots.
pub fn box_chart(title: &str, y_label: &str, groups: &[(String, BoxSummary<f64>)], digest: &str) -> String {
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, b) in groups {
        y0 = y0.min(b.whisker_low);
        y1 = y1.max(b.whisker_high);
    }
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    let f = Frame::new(0.0, groups.len().max(1) as f64, y0, y1);
    let mut out = String::new();
    header(&mut out, title, y_label, digest);
    y_axis(&mut out, &f);
    for (i, (name, b)) in groups.iter().enumerate() {
        let cx = f.px(i as f64 + 0.5);
        let half = 0.3 * (f.px(1.0) - f.px(0.0));
        let (q1, q3, med) = (f.py(b.q1), f.py(b.q3), f.py(b.median));
        let (lo, hi) = (f.py(b.whisker_low), f.py(b.whisker_high));
        let _ = writeln!(
            out,
            concat!(
                r#"<line x1="{cx:.2}" x2="{cx:.2}" y1="{lo:.2}" y2="{q1:.2}" stroke="black"/>"#,
                r#"<line x1="{cx:.2}" x2="{cx:.2}" y1="{q3:.2}" y2="{hi:.2}" stroke="black"/>"#,
                r#"<rect x="{x:.2}" y="{q3:.2}" width="{w:.2}" height="{h:.2}" fill="{BLUE}" fill-opacity="0.35" stroke="black"/>"#,
                r#"<line x1="{x:.2}" x2="{x2:.2}" y1="{med:.2}" y2="{med:.2}" stroke="{ORANGE}" stroke-width="2"/>"#
            ),
            cx = cx,
            lo = lo,
            q1 = q1,
            q3 = q3,
            hi = hi,
            x = cx - half,
            x2 = cx + half,
            w = 2.0 * half,
            h = (q1 - q3).max(0.0),
            med = med,
            BLUE = BLUE,
            ORANGE = ORANGE,
        );
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{} (n={}, outliers={})</text>"#,
            HEIGHT - BOTTOM + 18.0,
            escape(name),
            b.count,
            b.outliers
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Autocorrelation bars with a symmetric significance band.
pub fn acf_chart(title: &str, values: &[f64], halfwidth: f64, digest: &str) -> String {
    let lo = values.iter().copied().fold(-halfwidth, f64::min).min(0.0);
    let f = Frame::new(-0.5, values.len() as f64 - 0.5, lo, 1.0);
    let mut out = String::new();
    header(&mut out, title, "autocorrelation", digest);
    y_axis(&mut out, &f);
    let zero = f.py(0.0);
    for (k, &v) in values.iter().enumerate() {
        let x = f.px(k as f64);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" x2="{x:.2}" y1="{zero:.2}" y2="{:.2}" stroke="{BLUE}" stroke-width="3"/>"#,
            f.py(v)
        );
    }
    for h in [halfwidth, -halfwidth] {
        let _ = writeln!(
            out,
            r#"<line x1="{LEFT}" x2="{:.2}" y1="{y:.2}" y2="{y:.2}" stroke="{RED}" stroke-dasharray="5 4"/>"#,
            WIDTH - RIGHT,
            y = f.py(h)
        );
    }
    let step = (values.len() / 8).max(1);
    for k in (0..values.len()).step_by(step) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{k}</text>"#,
            f.px(k as f64),
            HEIGHT - BOTTOM + 18.0
        );
    }
    out.push_str("</svg>\n");
    out
}
