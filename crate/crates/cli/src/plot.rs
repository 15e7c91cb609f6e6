//! Minimal self-contained SVG line charts with an optional secondary axis.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 80.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    None,
    HollowCircle,
    Circle,
    Square,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    /// SVG `stroke-dasharray`; `None` for a solid line.
    pub dash: Option<&'static str>,
    pub line: bool,
    pub marker: Marker,
    pub axis: Axis,
}

impl Series {
    pub fn line(name: impl Into<String>, points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Self {
            name: name.into(),
            points,
            color,
            dash: None,
            line: true,
            marker: Marker::None,
            axis: Axis::Left,
        }
    }

    pub fn markers(name: impl Into<String>, points: Vec<(f64, f64)>, color: &'static str, marker: Marker) -> Self {
        Self {
            line: false,
            marker,
            ..Self::line(name, points, color)
        }
    }

    pub fn dashed(mut self, dash: &'static str) -> Self {
        self.dash = Some(dash);
        self
    }

    pub fn on(mut self, axis: Axis) -> Self {
        self.axis = axis;
        self
    }
}

#[derive(Debug, Clone)]
pub struct RefLine {
    pub value: f64,
    pub label: String,
    pub color: &'static str,
    pub dash: Option<&'static str>,
    /// Axis for horizontal lines; ignored for vertical ones.
    pub axis: Axis,
}

#[derive(Debug, Clone, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y2_label: Option<String>,
    pub series: Vec<Series>,
    pub vlines: Vec<RefLine>,
    pub hlines: Vec<RefLine>,
    /// Fixed left-axis range; derived from the data when `None`.
    pub y_range: Option<(f64, f64)>,
}

/// Tick step of the form {1, 2, 5}·10^k giving about `target` ticks.
fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac < 1.5 {
        1.0
    } else if frac < 3.0 {
        2.0
    } else if frac < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

/// Range widened to whole tick steps.
fn nice_range(lo: f64, hi: f64) -> (f64, f64, f64) {
    let (lo, hi) = if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    };
    let step = nice_step(hi - lo, 6);
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

fn data_range<'a>(values: impl Iterator<Item = &'a f64>) -> Option<(f64, f64)> {
    values.filter(|v| v.is_finite()).fold(None, |acc, &v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Scale {
    lo: f64,
    hi: f64,
    step: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn contains(&self, v: f64) -> bool {
        v.is_finite() && v >= self.lo - 1e-12 && v <= self.hi + 1e-12
    }

    fn ticks(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step).round() as i64;
        (0..=count).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl Chart {
    fn y_scale(&self, axis: Axis) -> Option<Scale> {
        let (lo, hi) = match (axis, self.y_range) {
            (Axis::Left, Some(r)) => r,
            _ => {
                let series_values = self
                    .series
                    .iter()
                    .filter(|s| s.axis == axis)
                    .flat_map(|s| s.points.iter().map(|p| &p.1));
                let line_values = self.hlines.iter().filter(|l| l.axis == axis).map(|l| &l.value);
                data_range(series_values.chain(line_values))?
            }
        };
        let (lo, hi, step) = nice_range(lo, hi);
        Some(Scale {
            lo,
            hi,
            step,
            px_lo: HEIGHT - BOTTOM,
            px_hi: TOP,
        })
    }

    fn x_scale(&self) -> Scale {
        let (lo, hi) = data_range(
            self.series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| &p.0))
                .chain(self.vlines.iter().map(|l| &l.value)),
        )
        .unwrap_or((0.0, 1.0));
        let (lo, hi, step) = nice_range(lo, hi);
        Scale {
            lo,
            hi,
            step,
            px_lo: LEFT,
            px_hi: WIDTH - RIGHT,
        }
    }

    pub fn render(&self) -> String {
        let x = self.x_scale();
        let y_left = self.y_scale(Axis::Left).unwrap_or(Scale {
            lo: 0.0,
            hi: 1.0,
            step: 0.2,
            px_lo: HEIGHT - BOTTOM,
            px_hi: TOP,
        });
        let y_right = self.y_scale(Axis::Right);
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        let _ = writeln!(
            svg,
            r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );

        for t in x.ticks() {
            let px = x.map(t);
            let _ = writeln!(
                svg,
                r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
                y0 + 5.0,
                y0 + 19.0,
                fmt_tick(t, x.step)
            );
        }
        for t in y_left.ticks() {
            let py = y_left.map(t);
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                fmt_tick(t, y_left.step)
            );
        }
        if let Some(yr) = &y_right {
            for t in yr.ticks() {
                let py = yr.map(t);
                let _ = writeln!(
                    svg,
                    r#"<line x1="{x1}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}">{}</text>"#,
                    x1 + 5.0,
                    x1 + 8.0,
                    py + 4.0,
                    fmt_tick(t, yr.step)
                );
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 18.0,
            escape(&self.x_label)
        );
        let mid = (y0 + y1) / 2.0;
        let _ = writeln!(
            svg,
            r#"<text x="22" y="{mid}" text-anchor="middle" transform="rotate(-90 22 {mid})">{}</text>"#,
            escape(&self.y_label)
        );
        if let Some(label) = &self.y2_label {
            let xr = WIDTH - 18.0;
            let _ = writeln!(
                svg,
                r#"<text x="{xr}" y="{mid}" text-anchor="middle" transform="rotate(90 {xr} {mid})">{}</text>"#,
                escape(label)
            );
        }

        let _ = writeln!(
            svg,
            r#"<clipPath id="plot"><rect x="{x0}" y="{y1}" width="{}" height="{}"/></clipPath><g clip-path="url(#plot)">"#,
            x1 - x0,
            y0 - y1
        );
        for l in &self.vlines {
            if !x.contains(l.value) {
                continue;
            }
            let px = x.map(l.value);
            let _ = writeln!(
                svg,
                r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{y1}" stroke="{}"{}/>"#,
                l.color,
                dash_attr(l.dash)
            );
        }
        for l in &self.hlines {
            let scale = match l.axis {
                Axis::Left => Some(&y_left),
                Axis::Right => y_right.as_ref(),
            };
            let Some(scale) = scale else { continue };
            if !scale.contains(l.value) {
                continue;
            }
            let py = scale.map(l.value);
            let _ = writeln!(
                svg,
                r#"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="{}"{}/>"#,
                l.color,
                dash_attr(l.dash)
            );
        }
        for s in &self.series {
            let scale = match s.axis {
                Axis::Left => &y_left,
                Axis::Right => match &y_right {
                    Some(r) => r,
                    None => continue,
                },
            };
            if s.line {
                for segment in split_visible(&s.points, scale) {
                    let path: Vec<String> = segment
                        .iter()
                        .map(|&(vx, vy)| format!("{:.2},{:.2}", x.map(vx), scale.map(vy)))
                        .collect();
                    let _ = writeln!(
                        svg,
                        r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{} points="{}"/>"#,
                        s.color,
                        dash_attr(s.dash),
                        path.join(" ")
                    );
                }
            }
            for &(vx, vy) in &s.points {
                if !scale.contains(vy) {
                    continue;
                }
                let (px, py) = (x.map(vx), scale.map(vy));
                let _ = match s.marker {
                    Marker::None => Ok(()),
                    Marker::HollowCircle => writeln!(
                        svg,
                        r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="none" stroke="{}"/>"#,
                        s.color
                    ),
                    Marker::Circle => writeln!(
                        svg,
                        r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="{}"/>"#,
                        s.color
                    ),
                    Marker::Square => writeln!(
                        svg,
                        r#"<rect x="{:.2}" y="{:.2}" width="7" height="7" fill="{}"/>"#,
                        px - 3.5,
                        py - 3.5,
                        s.color
                    ),
                };
            }
        }
        let _ = writeln!(svg, "</g>");

        // legend
        let entries: Vec<(&str, &'static str, Option<&'static str>)> = self
            .series
            .iter()
            .map(|s| (s.name.as_str(), s.color, s.dash))
            .chain(self.vlines.iter().chain(&self.hlines).map(|l| (l.label.as_str(), l.color, l.dash)))
            .filter(|e| !e.0.is_empty())
            .collect();
        for (i, (name, color, dash)) in entries.iter().enumerate() {
            let ly = y1 + 14.0 + 16.0 * i as f64;
            let lx = x1 - 190.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{}/><text x="{}" y="{}">{}</text>"#,
                lx + 24.0,
                dash_attr(*dash),
                lx + 30.0,
                ly + 4.0,
                escape(name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn dash_attr(dash: Option<&str>) -> String {
    dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default()
}

/// Runs of consecutive points that lie inside the vertical range.
fn split_visible(points: &[(f64, f64)], scale: &Scale) -> Vec<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for &p in points {
        if p.0.is_finite() && scale.contains(p.1) {
            current.push(p);
        } else if !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out.retain(|s| s.len() > 1);
    out
}
