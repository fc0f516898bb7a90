//! Radial impact chart as standalone SVG.
//!
//! Axes start at 12 o'clock and run clockwise in risk insertion order. The
//! radial scale runs 0-4 with ring gridlines at each level. Coordinates are
//! printed with two decimals so identical input gives identical bytes.

use std::f64::consts::TAU;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::assessment::Assessment;

use super::ReportError;

pub const VIEWPORT: f64 = 800.0;
pub const INITIAL_COLOR: &str = "#1f77b4";
pub const FINAL_COLOR: &str = "#ff7f0e";
pub const FILL_OPACITY: &str = "0.15";

const CENTER: f64 = VIEWPORT / 2.0;
const RADIUS: f64 = 280.0;
const SCALE_MAX: f64 = 4.0;
const LABEL_WIDTH: usize = 24;
const LINE_HEIGHT: f64 = 17.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesRole {
    Initial,
    Final,
}

impl SeriesRole {
    fn color(self) -> &'static str {
        match self {
            SeriesRole::Initial => INITIAL_COLOR,
            SeriesRole::Final => FINAL_COLOR,
        }
    }

    fn label(self) -> &'static str {
        match self {
            SeriesRole::Initial => "Initial impact",
            SeriesRole::Final => "Final impact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialAxis {
    pub risk_id: String,
    pub right_key: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialSeries {
    pub role: SeriesRole,
    /// One ordinal per axis; 0 means absent.
    pub values: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialChartSpec {
    pub title: String,
    pub axes: Vec<RadialAxis>,
    pub series: Vec<RadialSeries>,
}

impl RadialChartSpec {
    /// One axis per scored, non-excluded risk. The final series is added only
    /// when requested and at least one plotted risk has a round.
    pub fn from_assessment(assessment: &Assessment, include_final: bool) -> Result<Self, ReportError> {
        let catalog = assessment.catalog();
        let plotted: Vec<_> = assessment
            .risks()
            .iter()
            .filter(|r| r.is_scored() && !r.is_excluded())
            .collect();
        if plotted.is_empty() {
            return Err(ReportError::NoRisks);
        }
        let mut axes: Vec<RadialAxis> = plotted
            .iter()
            .map(|r| RadialAxis {
                risk_id: r.id().to_string(),
                right_key: r.right_key().to_string(),
                label: catalog
                    .get(r.right_key())
                    .map_or_else(|| r.right_key().to_string(), |e| e.title.clone()),
            })
            .collect();
        // Several risks on one right: disambiguate with the risk id.
        for i in 0..axes.len() {
            if axes.iter().filter(|a| a.right_key == axes[i].right_key).count() > 1 {
                axes[i].label = format!("{} ({})", axes[i].label, axes[i].risk_id);
            }
        }
        let mut series = vec![RadialSeries {
            role: SeriesRole::Initial,
            values: plotted
                .iter()
                .map(|r| r.initial_evaluation().map_or(0, |e| e.overall.ordinal()))
                .collect(),
        }];
        if include_final && plotted.iter().any(|r| !r.rounds().is_empty()) {
            series.push(RadialSeries {
                role: SeriesRole::Final,
                values: plotted
                    .iter()
                    .map(|r| r.current_level().map_or(0, |l| l.ordinal()))
                    .collect(),
            });
        }
        Ok(Self {
            title: assessment.title().to_string(),
            axes,
            series,
        })
    }

    pub fn to_svg(&self) -> String {
        if self.axes.len() >= 3 {
            self.radial_svg()
        } else {
            self.bar_svg()
        }
    }

    fn open(&self, out: &mut String, kind: &str) {
        let _ = writeln!(
            out,
            r##"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800" data-chart="{kind}">"##
        );
        let _ = writeln!(out, "<title>{}</title>", escape(&self.title));
        out.push_str(r##"<g font-family="sans-serif" font-size="14" fill="#333333">"##);
        out.push('\n');
    }

    fn legend(&self, out: &mut String) {
        for (i, s) in self.series.iter().enumerate() {
            let y = 24.0 + 22.0 * i as f64;
            let _ = writeln!(
                out,
                r##"<rect x="20.00" y="{:.2}" width="14.00" height="14.00" fill="{c}" fill-opacity="{FILL_OPACITY}" stroke="{c}" stroke-width="2"/>"##,
                y - 12.0,
                c = s.role.color()
            );
            let _ = writeln!(out, r##"<text x="42.00" y="{y:.2}">{}</text>"##, s.role.label());
        }
    }

    fn radial_svg(&self) -> String {
        let n = self.axes.len();
        let mut out = String::new();
        self.open(&mut out, "radial");
        out.push_str(r##"<g class="grid" fill="none" stroke="#cccccc" stroke-width="1">"##);
        out.push('\n');
        for ring in 1..=4 {
            let r = RADIUS * f64::from(ring) / SCALE_MAX;
            let _ = writeln!(out, r##"<circle cx="{CENTER:.2}" cy="{CENTER:.2}" r="{r:.2}"/>"##);
        }
        for i in 0..n {
            let (x, y) = point(i, n, SCALE_MAX);
            let _ = writeln!(out, r##"<line x1="{CENTER:.2}" y1="{CENTER:.2}" x2="{x:.2}" y2="{y:.2}"/>"##);
        }
        out.push_str("</g>\n");
        out.push_str(r##"<g class="ring-labels" font-size="11" fill="#888888">"##);
        out.push('\n');
        for ring in 1..=4 {
            let y = CENTER - RADIUS * f64::from(ring) / SCALE_MAX;
            let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}">{ring}</text>"##, CENTER + 4.0, y - 3.0);
        }
        out.push_str("</g>\n");
        out.push_str(r##"<g class="axis-labels">"##);
        out.push('\n');
        for (i, axis) in self.axes.iter().enumerate() {
            let (x, y) = point(i, n, SCALE_MAX + 0.35);
            let anchor = if (x - CENTER).abs() < 1.0 {
                "middle"
            } else if x > CENTER {
                "start"
            } else {
                "end"
            };
            let lines = wrap(&axis.label, LABEL_WIDTH);
            // Labels above the center grow upward so they stay clear of the rings.
            let first_y = if y < CENTER - 1.0 {
                y + 5.0 - LINE_HEIGHT * (lines.len() - 1) as f64
            } else {
                y + 5.0
            };
            let _ = write!(out, r##"<text x="{x:.2}" y="{first_y:.2}" text-anchor="{anchor}">"##);
            for (k, line) in lines.iter().enumerate() {
                let dy = if k == 0 { 0.0 } else { LINE_HEIGHT };
                let _ = write!(out, r##"<tspan x="{x:.2}" dy="{dy:.2}">{}</tspan>"##, escape(line));
            }
            out.push_str("</text>\n");
        }
        out.push_str("</g>\n");
        for s in &self.series {
            let points: Vec<String> = s
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let (x, y) = point(i, n, f64::from(*v));
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                out,
                r##"<polygon class="series-{role}" points="{pts}" fill="{c}" fill-opacity="{FILL_OPACITY}" stroke="{c}" stroke-width="2"/>"##,
                role = role_name(s.role),
                pts = points.join(" "),
                c = s.role.color()
            );
        }
        self.legend(&mut out);
        out.push_str("</g>\n</svg>\n");
        out
    }

    /// Grouped bars for charts with fewer than three axes.
    fn bar_svg(&self) -> String {
        let mut out = String::new();
        self.open(&mut out, "bar");
        let (left, right, top, bottom) = (100.0, 740.0, 120.0, 680.0);
        let height = bottom - top;
        out.push_str(r##"<g class="grid" fill="none" stroke="#cccccc" stroke-width="1">"##);
        out.push('\n');
        for level in 0..=4 {
            let y = bottom - height * f64::from(level) / SCALE_MAX;
            let _ = writeln!(out, r##"<line x1="{left:.2}" y1="{y:.2}" x2="{right:.2}" y2="{y:.2}"/>"##);
        }
        out.push_str("</g>\n");
        for level in 1..=4 {
            let y = bottom - height * f64::from(level) / SCALE_MAX;
            let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" text-anchor="end">{level}</text>"##, left - 8.0, y + 5.0);
        }
        let slot = (right - left) / self.axes.len() as f64;
        let bar = slot * 0.6 / self.series.len() as f64;
        for (i, axis) in self.axes.iter().enumerate() {
            let x0 = left + slot * i as f64 + slot * 0.2;
            for (k, s) in self.series.iter().enumerate() {
                let v = f64::from(s.values[i]);
                let h = height * v / SCALE_MAX;
                let _ = writeln!(
                    out,
                    r##"<rect class="series-{role}" x="{:.2}" y="{:.2}" width="{bar:.2}" height="{h:.2}" fill="{c}" fill-opacity="{FILL_OPACITY}" stroke="{c}" stroke-width="2"/>"##,
                    x0 + bar * k as f64,
                    bottom - h,
                    role = role_name(s.role),
                    c = s.role.color()
                );
            }
            let _ = writeln!(
                out,
                r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                left + slot * (i as f64 + 0.5),
                bottom + 24.0,
                escape(&axis.label)
            );
        }
        self.legend(&mut out);
        out.push_str("</g>\n</svg>\n");
        out
    }
}

fn role_name(role: SeriesRole) -> &'static str {
    match role {
        SeriesRole::Initial => "initial",
        SeriesRole::Final => "final",
    }
}

/// Position of `value` on axis `i` of `n`, clockwise from 12 o'clock.
fn point(i: usize, n: usize, value: f64) -> (f64, f64) {
    let angle = TAU * i as f64 / n as f64;
    let r = RADIUS * value / SCALE_MAX;
    (CENTER + r * angle.sin(), CENTER - r * angle.cos())
}

/// Greedy word wrap at `width` characters; long words stay whole.
fn wrap(text: &str, width: usize) -> Vec<String> {
    let mut lines: Vec<String> = Vec::new();
    for word in text.split_whitespace() {
        match lines.last_mut() {
            Some(line) if line.chars().count() + 1 + word.chars().count() <= width => {
                line.push(' ');
                line.push_str(word);
            }
            _ => lines.push(word.to_string()),
        }
    }
    if lines.is_empty() {
        lines.push(String::new());
    }
    lines
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, series: usize) -> RadialChartSpec {
        RadialChartSpec {
            title: "t <&>".into(),
            axes: (0..n)
                .map(|i| RadialAxis {
                    risk_id: format!("r{i}"),
                    right_key: format!("k{i}"),
                    label: format!("Right {i}"),
                })
                .collect(),
            series: [SeriesRole::Initial, SeriesRole::Final]
                .into_iter()
                .take(series)
                .map(|role| RadialSeries { role, values: vec![4; n] })
                .collect(),
        }
    }

    #[test]
    fn first_axis_points_up() {
        let (x, y) = point(0, 3, 4.0);
        assert!((x - 400.0).abs() < 1e-9);
        assert!((y - 120.0).abs() < 1e-9);
        // clockwise: second axis lies to the right of center
        assert!(point(1, 3, 4.0).0 > 400.0);
    }

    #[test]
    fn radial_structure() {
        let svg = spec(3, 2).to_svg();
        assert!(svg.contains(r##"viewBox="0 0 800 800""##));
        assert!(svg.contains(r##"data-chart="radial""##));
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(svg.contains(INITIAL_COLOR) && svg.contains(FINAL_COLOR));
        assert!(svg.contains("t &lt;&amp;&gt;"));
        assert!(!svg.contains("<rect width=\"800"), "background stays transparent");
    }

    #[test]
    fn wraps_long_labels() {
        assert_eq!(wrap("Right to psychological and physical safety", 24), ["Right to psychological", "and physical safety"]);
        assert_eq!(wrap("", 24), [""]);
    }

    #[test]
    fn few_axes_fall_back_to_bars() {
        let svg = spec(2, 1).to_svg();
        assert!(svg.contains(r##"data-chart="bar""##));
        assert_eq!(svg.matches(r##"class="series-initial""##).count(), 2);
        assert!(!svg.contains(FINAL_COLOR));
    }
}
