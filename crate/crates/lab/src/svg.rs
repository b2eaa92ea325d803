//! Static line and marker charts on a fixed 800×600 canvas.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::LabError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 10;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Style {
    Line { width: f64, dashed: bool },
    /// `x`-shaped markers of the given half-size in pixels.
    Crosses { size: f64 },
}

impl Style {
    pub const THICK: Style = Style::Line { width: 2.5, dashed: false };
    pub const THIN: Style = Style::Line { width: 1.0, dashed: false };
    pub const DASHED: Style = Style::Line { width: 1.2, dashed: true };
    pub const CROSSES: Style = Style::Crosses { size: 5.0 };
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    /// Palette slot; series sharing a slot share a colour.
    pub color: usize,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: Style, color: usize) -> Self {
        Self {
            label: label.into(),
            points,
            style,
            color,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Fixed vertical range; data outside it are clipped.
    pub y_range: Option<(f64, f64)>,
}

/// About `target` round tick values covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / target as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let v = TOP + (self.y.1 - y) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM);
        // Keeps far-off values representable; the clip path hides them.
        v.clamp(-10.0 * HEIGHT, 11.0 * HEIGHT)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

impl Plot {
    pub fn render(&self) -> Result<String, LabError> {
        let finite = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite();
        let all: Vec<(f64, f64)> = self.series.iter().flat_map(|s| s.points.iter().copied()).filter(finite).collect();
        if all.is_empty() {
            return Err(LabError::EmptyPlot);
        }
        let fold = |f: fn(&(f64, f64)) -> f64| {
            all.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let (x0, x1) = fold(|p| p.0);
        let frame = Frame {
            x: padded(x0, x1),
            y: match self.y_range {
                Some(r) => r,
                None => {
                    let (y0, y1) = fold(|p| p.1);
                    padded(y0, y1)
                }
            },
        };

        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let _ = writeln!(w, r#"<defs><clipPath id="plot-area"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath></defs>"#);
        let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(w, r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#, LEFT + pw / 2.0, escape(&self.title));

        let bottom = TOP + ph;
        let _ = writeln!(w, r#"<g class="axes" stroke="black" fill="none"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></g>"#);
        let _ = writeln!(w, r#"<g class="x-ticks" text-anchor="middle">"#);
        for t in ticks(frame.x.0, frame.x.1, TICKS) {
            let x = frame.px(t);
            let _ = writeln!(w, r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}">{}</text>"#, bottom + 5.0, bottom + 20.0, tick_label(t));
        }
        let _ = writeln!(w, "</g>");
        let _ = writeln!(w, r#"<g class="y-ticks" text-anchor="end">"#);
        for t in ticks(frame.y.0, frame.y.1, TICKS) {
            let y = frame.py(t);
            let _ = writeln!(w, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}">{}</text>"#, LEFT - 5.0, LEFT - 8.0, y + 4.0, tick_label(t));
        }
        let _ = writeln!(w, "</g>");
        let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 15.0, escape(&self.x_label));
        let _ = writeln!(w, r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#, TOP + ph / 2.0, TOP + ph / 2.0, escape(&self.y_label));

        let _ = writeln!(w, r#"<g clip-path="url(#plot-area)">"#);
        for s in &self.series {
            let color = PALETTE[s.color % PALETTE.len()];
            let pts: Vec<(f64, f64)> = s.points.iter().copied().filter(finite).collect();
            match s.style {
                Style::Line { width, dashed } => {
                    let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y))).collect();
                    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(w, r#"<polyline fill="none" stroke="{color}" stroke-width="{width}"{dash} points="{}"/>"#, coords.join(" "));
                }
                Style::Crosses { size } => {
                    let _ = writeln!(w, r#"<g class="crosses" stroke="{color}" stroke-width="1.5">"#);
                    for &(x, y) in &pts {
                        let (cx, cy) = (frame.px(x), frame.py(y));
                        let _ = writeln!(w, r#"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}"/>"#, cx - size, cy - size, cx + size, cy + size, cx - size, cy + size, cx + size, cy - size);
                    }
                    let _ = writeln!(w, "</g>");
                }
            }
        }
        let _ = writeln!(w, "</g>");

        let _ = writeln!(w, r#"<g class="legend">"#);
        let lx = WIDTH - RIGHT + 15.0;
        for (i, s) in self.series.iter().enumerate() {
            let y = TOP + 10.0 + 20.0 * i as f64;
            let color = PALETTE[s.color % PALETTE.len()];
            match s.style {
                Style::Line { width, dashed } => {
                    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(w, r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="{width}"{dash}/>"#, lx + 25.0);
                }
                Style::Crosses { .. } => {
                    let cx = lx + 12.5;
                    let _ = writeln!(w, r#"<path d="M{},{}L{},{}M{},{}L{},{}" stroke="{color}" stroke-width="1.5"/>"#, cx - 5.0, y - 5.0, cx + 5.0, y + 5.0, cx - 5.0, y + 5.0, cx + 5.0, y - 5.0);
                }
            }
            let _ = writeln!(w, r#"<text x="{}" y="{}">{}</text>"#, lx + 32.0, y + 4.0, escape(&s.label));
        }
        let _ = writeln!(w, "</g>");
        let _ = writeln!(w, "</svg>");
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<(), LabError> {
        let text = self.render()?;
        fs::write(path, text).map_err(LabError::io(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_heuristic() {
        assert_eq!(ticks(0.0, 1.0, 10), (0..=10).map(|i| i as f64 * 0.1).collect::<Vec<_>>());
        let t = ticks(0.003, 0.0093, 10);
        assert!(t.len() >= 5 && t.len() <= 12, "{t:?}");
        assert_eq!(ticks(2.0, 2.0, 10), vec![2.0]);
    }

    #[test]
    fn two_points_make_one_polyline() {
        let plot = Plot {
            title: "t".into(),
            series: vec![Series::new("a", vec![(0.0, 0.0), (1.0, 2.0)], Style::THICK, 0)],
            ..Plot::default()
        };
        let svg = plot.render().unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(points.split(' ').count(), 2);
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
    }

    #[test]
    fn empty_plots_are_rejected() {
        let plot = Plot {
            series: vec![Series::new("a", vec![], Style::THIN, 0)],
            ..Plot::default()
        };
        assert!(matches!(plot.render(), Err(LabError::EmptyPlot)));
    }
}
