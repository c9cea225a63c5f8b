//! The exponential-sum curve and SVG figures of both models.
//!
//! All writers build the document as a string in a fixed order with fixed
//! number formatting, so equal inputs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::group::{enumerate_words, GVariant, GroupError, DEFAULT_WORD_CAP};
use crate::mobius::{GeneralizedCircle, DEFAULT_TOL};
use crate::slit::{GeodesicTrace, SlitError, SlitSurface, TraceEvent};

/// Default clipping height for tessellation arcs.
pub const DEFAULT_CLIP: f64 = 1e-3;
/// Default drawing width in pixels.
pub const DEFAULT_WIDTH: f64 = 1200.0;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("the curve needs at least one term")]
    EmptyCurve,
    #[error("flat figures need at least one slit pair")]
    NoPairs,
    #[error("empty or inverted view box")]
    BadView,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Slit(#[from] SlitError),
}

/// Cumulative sums `s_k = Σ_{n ≤ k} exp(2πi (ln n)⁴)` for `k = 1..=n_max`.
pub fn curve_points(n_max: usize) -> Result<Vec<Complex64>, RenderError> {
    if n_max == 0 {
        return Err(RenderError::EmptyCurve);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    Ok((1..=n_max)
        .map(|n| {
            let phase = (n as f64).ln().powi(4);
            // reduce before scaling by 2π to keep the angle accurate
            acc += Complex64::from_polar(1.0, std::f64::consts::TAU * phase.fract());
            acc
        })
        .collect())
}

/// A rectangle of the model plane mapped onto the drawing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct View {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub width: f64,
}

impl View {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, RenderError> {
        if !(x_min < x_max && y_min < y_max)
            || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite())
        {
            return Err(RenderError::BadView);
        }
        Ok(View {
            x_min,
            x_max,
            y_min,
            y_max,
            width: DEFAULT_WIDTH,
        })
    }

    /// Default hyperbolic view for the domain figure: the circles
    /// `C_{4n}`, `|n| ≤ window`.
    pub fn domain(window: u32) -> Self {
        let half = 4.0 * window as f64 + 2.0;
        View::new(-half, half, 0.0, 3.0).expect("valid default view")
    }

    /// Default hyperbolic view for tessellations: `Re ∈ [−2, 16w + 14]`,
    /// `Im ∈ [0, 4]`.
    pub fn tessellation(window: u32) -> Self {
        View::new(-2.0, 16.0 * window as f64 + 14.0, 0.0, 4.0).expect("valid default view")
    }

    /// Default flat view: `x ∈ [0, 8k + 4]`, `y ∈ [−4, 4]`.
    pub fn flat(pairs: usize) -> Self {
        View::new(0.0, 8.0 * pairs as f64 + 4.0, -4.0, 4.0).expect("valid default view")
    }

    pub fn with_width(self, width: f64) -> Self {
        View { width, ..self }
    }

    fn scale(&self) -> f64 {
        self.width / (self.x_max - self.x_min)
    }

    fn height(&self) -> f64 {
        (self.y_max - self.y_min) * self.scale()
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let s = self.scale();
        ((x - self.x_min) * s, (self.y_max - y) * s)
    }
}

struct Svg {
    body: String,
    view: View,
}

impl Svg {
    fn new(view: View, title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(body, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#,
            w = view.width,
            h = view.height()
        );
        let _ = writeln!(body, "<title>{title}</title>");
        let _ = writeln!(
            body,
            r##"<rect x="0" y="0" width="{:.3}" height="{:.3}" fill="#ffffff"/>"##,
            view.width,
            view.height()
        );
        Svg { body, view }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), attrs: &str) {
        let (x1, y1) = self.view.px(a.0, a.1);
        let (x2, y2) = self.view.px(b.0, b.1);
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" {attrs}/>"#
        );
    }

    fn raw(&mut self, s: &str) {
        self.body.push_str(s);
        self.body.push('\n');
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), RenderError> {
    fs::write(path, content).map_err(|source| RenderError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// What a figure contains, for reports and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RenderSummary {
    /// Circles drawn as `<circle>` elements or base circles of a tessellation.
    pub circles: usize,
    /// Arcs or lines before clipping (tessellations only).
    pub arcs_total: usize,
    /// Arcs or lines actually drawn.
    pub arcs_drawn: usize,
    pub segments: usize,
    pub jumps: usize,
}

impl RenderSummary {
    fn empty() -> Self {
        RenderSummary {
            circles: 0,
            arcs_total: 0,
            arcs_drawn: 0,
            segments: 0,
            jumps: 0,
        }
    }
}

/// The circles `C_{4n}` for `|n| ≤ window` and the shaded domain `P` above them.
pub fn domain_svg(window: u32, view: Option<View>) -> (String, RenderSummary) {
    let view = view.unwrap_or_else(|| View::domain(window));
    let mut svg = Svg::new(view, "Fundamental domain and the half-circles C_4n");
    let w = window as i64;
    let centers: Vec<i64> = (-w..=w).map(|n| 4 * n).collect();

    // P: the strip under the top edge minus the half-disks
    let mut d = String::new();
    let (sx, sy) = view.px(view.x_min, 0.0);
    let _ = write!(d, "M {sx:.3} {sy:.3}");
    let r_px = view.scale();
    for &c in &centers {
        let (lx, ly) = view.px(c as f64 - 1.0, 0.0);
        let (rx, ry) = view.px(c as f64 + 1.0, 0.0);
        let _ = write!(
            d,
            " L {lx:.3} {ly:.3} A {r_px:.3} {r_px:.3} 0 0 1 {rx:.3} {ry:.3}"
        );
    }
    let (ex, ey) = view.px(view.x_max, 0.0);
    let (tx, ty) = view.px(view.x_max, view.y_max);
    let (ux, uy) = view.px(view.x_min, view.y_max);
    let _ = write!(
        d,
        " L {ex:.3} {ey:.3} L {tx:.3} {ty:.3} L {ux:.3} {uy:.3} Z"
    );
    svg.raw(&format!(
        r##"<path class="domain" d="{d}" fill="#cfe3f7" stroke="none"/>"##
    ));

    let (_, axis_y) = view.px(0.0, 0.0);
    svg.raw(&format!(
        r#"<clipPath id="upper"><rect x="0" y="0" width="{:.3}" height="{axis_y:.3}"/></clipPath>"#,
        view.width
    ));
    for &c in &centers {
        let (cx, cy) = view.px(c as f64, 0.0);
        svg.raw(&format!(
            r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r_px:.3}" fill="none" stroke="#1f4e79" stroke-width="1.5" clip-path="url(#upper)" data-center="{c}"/>"##
        ));
    }
    svg.line(
        (view.x_min, 0.0),
        (view.x_max, 0.0),
        r##"stroke="#000000" stroke-width="1""##,
    );
    let summary = RenderSummary {
        circles: centers.len(),
        ..RenderSummary::empty()
    };
    (svg.finish(), summary)
}

pub fn render_domain_svg(
    window: u32,
    view: Option<View>,
    out: &Path,
) -> Result<RenderSummary, RenderError> {
    let (doc, summary) = domain_svg(window, view);
    write_file(out, &doc)?;
    Ok(summary)
}

/// Base circles `C_{4n}` lying entirely within the horizontal extent of the view.
pub fn circles_in_view(view: &View) -> Vec<i64> {
    let first = ((view.x_min + 1.0) / 4.0).ceil() as i64;
    let last = ((view.x_max - 1.0) / 4.0).floor() as i64;
    (first..=last).map(|n| 4 * n).collect()
}

/// Images of the in-view base circles under every reduced word of length
/// ≤ `depth` with `|m| ≤ window`. Arcs whose top lies below `clip` are dropped.
pub fn tessellation_svg(
    window: u32,
    depth: u32,
    view: Option<View>,
    clip: f64,
) -> Result<(String, RenderSummary), RenderError> {
    let view = view.unwrap_or_else(|| View::tessellation(window));
    let words = enumerate_words(window as i64, depth, GVariant::Corrected, DEFAULT_WORD_CAP)?;
    let base: Vec<GeneralizedCircle> = circles_in_view(&view)
        .into_iter()
        .map(GeneralizedCircle::unit_at)
        .collect();
    let mut svg = Svg::new(view, "Orbit of the half-circles under the side pairings");
    svg.line(
        (view.x_min, 0.0),
        (view.x_max, 0.0),
        r##"stroke="#000000" stroke-width="1""##,
    );
    let scale = view.scale();
    let mut drawn = 0;
    for (depth_of, w) in words.iter().map(|w| (w.word.len(), w)) {
        let stroke = match depth_of {
            0 => "#1f4e79",
            1 => "#2e75b6",
            2 => "#5b9bd5",
            _ => "#9dc3e6",
        };
        for c in &base {
            match w.matrix.image_of_circle(c, DEFAULT_TOL) {
                GeneralizedCircle::Circle { center, radius } => {
                    if radius < clip || center + radius < view.x_min || center - radius > view.x_max
                    {
                        continue;
                    }
                    let (x1, y1) = view.px(center - radius, 0.0);
                    let (x2, y2) = view.px(center + radius, 0.0);
                    let r = radius * scale;
                    svg.raw(&format!(
                        r#"<path d="M {x1:.3} {y1:.3} A {r:.3} {r:.3} 0 0 1 {x2:.3} {y2:.3}" fill="none" stroke="{stroke}" stroke-width="0.8"/>"#
                    ));
                }
                GeneralizedCircle::VerticalLine { x0 } => {
                    if x0 < view.x_min || x0 > view.x_max {
                        continue;
                    }
                    svg.line(
                        (x0, clip),
                        (x0, view.y_max),
                        &format!(r#"stroke="{stroke}" stroke-width="0.8""#),
                    );
                }
            }
            drawn += 1;
        }
    }
    let summary = RenderSummary {
        circles: base.len(),
        arcs_total: base.len() * words.len(),
        arcs_drawn: drawn,
        ..RenderSummary::empty()
    };
    Ok((svg.finish(), summary))
}

pub fn render_tessellation_svg(
    window: u32,
    depth: u32,
    view: Option<View>,
    clip: f64,
    out: &Path,
) -> Result<RenderSummary, RenderError> {
    let (doc, summary) = tessellation_svg(window, depth, view, clip)?;
    write_file(out, &doc)?;
    Ok(summary)
}

const PAIR_COLORS: [&str; 6] = [
    "#c00000", "#0070c0", "#00a050", "#7030a0", "#ed7d31", "#806000",
];

/// The slit plane with `k` pairs, each pair drawn in its own color with a
/// matching label, and an optional geodesic whose crossing jumps are dashed.
pub fn flat_svg(
    surface: &SlitSurface,
    trace: Option<&GeodesicTrace>,
    view: Option<View>,
) -> Result<(String, RenderSummary), RenderError> {
    let k = surface.pairs();
    if k == 0 {
        return Err(RenderError::NoPairs);
    }
    let view = view.unwrap_or_else(|| View::flat(k));
    let mut svg = Svg::new(view, "Slit plane with glued segment pairs");
    svg.line(
        (view.x_min, 0.0),
        (view.x_max, 0.0),
        r##"stroke="#bbbbbb" stroke-width="0.5" stroke-dasharray="2 4""##,
    );
    for slit in surface.slits() {
        let pair = slit.index.div_ceil(2);
        let color = PAIR_COLORS[(pair - 1) % PAIR_COLORS.len()];
        svg.line(
            (slit.left, 0.0),
            (slit.right(), 0.0),
            &format!(r#"class="slit" data-slit="{}" data-pair="{pair}" stroke="{color}" stroke-width="3""#, slit.index),
        );
        let (tx, ty) = view.px(slit.left + 0.5, 0.25);
        svg.raw(&format!(
            r#"<text x="{tx:.3}" y="{ty:.3}" font-size="12" text-anchor="middle" fill="{color}">{pair}</text>"#
        ));
    }
    let mut summary = RenderSummary::empty();
    if let Some(trace) = trace {
        for seg in &trace.polyline {
            svg.line(
                seg.from,
                seg.to,
                r##"class="trace" stroke="#000000" stroke-width="1.5""##,
            );
            summary.segments += 1;
        }
        for ev in &trace.events {
            if let TraceEvent::Crossing { entry, exit, .. } = ev {
                svg.line(
                    surface.position(entry),
                    surface.position(exit),
                    r##"class="jump" stroke="#000000" stroke-width="1" stroke-dasharray="6 4""##,
                );
                summary.jumps += 1;
            }
        }
    }
    Ok((svg.finish(), summary))
}

pub fn render_flat_svg(
    surface: &SlitSurface,
    trace: Option<&GeodesicTrace>,
    view: Option<View>,
    out: &Path,
) -> Result<RenderSummary, RenderError> {
    let (doc, summary) = flat_svg(surface, trace, view)?;
    write_file(out, &doc)?;
    Ok(summary)
}

/// The polyline through `0, s_1, …, s_N`, unit coordinate scale, no axes.
pub fn curve_svg(points: &[Complex64]) -> String {
    let (mut lo, mut hi) = ((0.0f64, 0.0f64), (0.0f64, 0.0f64));
    for p in points {
        lo = (lo.0.min(p.re), lo.1.min(p.im));
        hi = (hi.0.max(p.re), hi.1.max(p.im));
    }
    let margin = 1.0;
    let view = View {
        x_min: lo.0 - margin,
        x_max: hi.0 + margin,
        y_min: lo.1 - margin,
        y_max: hi.1 + margin,
        width: DEFAULT_WIDTH,
    };
    let mut svg = Svg::new(view, "Exponential sum with phase (ln n)^4");
    let mut pts = String::new();
    let (x0, y0) = view.px(0.0, 0.0);
    let _ = write!(pts, "{x0:.3},{y0:.3}");
    for p in points {
        let (x, y) = view.px(p.re, p.im);
        let _ = write!(pts, " {x:.3},{y:.3}");
    }
    svg.raw(&format!(
        r##"<polyline points="{pts}" fill="none" stroke="#1f4e79" stroke-width="0.6"/>"##
    ));
    svg.finish()
}

pub fn render_curve_svg(n_max: usize, out: &Path) -> Result<Vec<Complex64>, RenderError> {
    let points = curve_points(n_max)?;
    write_file(out, &curve_svg(&points))?;
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_examples() {
        let p = curve_points(1).unwrap();
        assert_eq!(p, vec![Complex64::new(1.0, 0.0)]);

        let p = curve_points(2).unwrap();
        let phase = 2f64.ln().powi(4);
        assert!((phase - 0.230835).abs() < 1e-6);
        let want =
            Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, std::f64::consts::TAU * phase);
        assert!((p[1] - want).norm() < 1e-12);

        assert!(matches!(curve_points(0), Err(RenderError::EmptyCurve)));
    }

    #[test]
    fn curve_steps_are_unit() {
        let p = curve_points(6000).unwrap();
        assert_eq!(p.len(), 6000);
        let mut prev = Complex64::new(0.0, 0.0);
        for s in &p {
            assert!(((s - prev).norm() - 1.0).abs() <= 1e-12);
            prev = *s;
        }
    }

    #[test]
    fn domain_circle_counts() {
        let (doc, s) = domain_svg(2, None);
        assert_eq!(s.circles, 5);
        assert_eq!(doc.matches("<circle").count(), 5);
        assert_eq!(doc.matches(r#"class="domain""#).count(), 1);
        let (doc, _) = domain_svg(0, None);
        assert_eq!(doc.matches("<circle").count(), 1);
        assert_eq!(domain_svg(3, None).0, domain_svg(3, None).0);
    }

    #[test]
    fn tessellation_counts() {
        let (_, s0) = tessellation_svg(1, 0, None, DEFAULT_CLIP).unwrap();
        assert_eq!(s0.circles, 8);
        assert_eq!(s0.arcs_total, 8);
        let (_, s1) = tessellation_svg(1, 1, None, DEFAULT_CLIP).unwrap();
        assert_eq!(s1.arcs_total, 8 * 13);
        let (doc, s3) = tessellation_svg(1, 3, None, DEFAULT_CLIP).unwrap();
        assert_eq!(s3.arcs_total, 8 * (1 + 12 + 132 + 1452));
        assert!(s3.arcs_drawn <= s3.arcs_total);
        assert_eq!(doc, tessellation_svg(1, 3, None, DEFAULT_CLIP).unwrap().0);
    }

    #[test]
    fn flat_figure() {
        let s = SlitSurface::monster(2).unwrap();
        let (doc, _) = flat_svg(&s, None, None).unwrap();
        assert_eq!(doc.matches(r#"class="slit""#).count(), 4);
        for (x1, x2) in [(3.0, 4.0), (7.0, 8.0), (11.0, 12.0), (15.0, 16.0)] {
            let v = View::flat(2);
            let (a, _) = v.px(x1, 0.0);
            let (b, _) = v.px(x2, 0.0);
            assert!(doc.contains(&format!(r#"x1="{a:.3}" y1="#)));
            assert!(doc.contains(&format!(r#"x2="{b:.3}" y2="#)));
        }

        let s = SlitSurface::monster(1).unwrap();
        let t = s
            .trace_geodesic(
                crate::slit::FlatPoint::Regular { x: 3.5, y: 1.0 },
                (0.0, -1.0),
                5,
                3.0,
            )
            .unwrap();
        let (doc, summary) = flat_svg(&s, Some(&t), None).unwrap();
        assert_eq!(summary.jumps, 1);
        assert_eq!(doc.matches(r#"class="jump""#).count(), 1);

        assert!(matches!(
            flat_svg(&SlitSurface::plane(), None, None),
            Err(RenderError::NoPairs)
        ));
    }

    #[test]
    fn io_errors_carry_path() {
        let err = render_domain_svg(1, None, Path::new("/nonexistent-dir/x.svg")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.svg"));
    }
}
