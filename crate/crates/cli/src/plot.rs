//! Standalone SVG scatter plots of labeled examples over the decision regions
//! of a linear model. Output is byte-stable for identical inputs.

use std::fmt::Write as _;

use mobpred_core::dataset::Dataset;
use mobpred_core::svm::{KernelFamily, Label, SvmModel};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub width: u32,
    pub height: u32,
    /// Marker color for `+1` (route 0) and `−1` (route 1).
    pub positive_color: String,
    pub negative_color: String,
    pub positive_region: String,
    pub negative_region: String,
    pub shade_regions: bool,
    pub boundary_stroke: String,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub title: Option<String>,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            width: 800,
            height: 600,
            positive_color: "#d62728".into(),
            negative_color: "#1f77b4".into(),
            positive_region: "#3a3a3a".into(),
            negative_region: "#2ca02c".into(),
            shade_regions: true,
            boundary_stroke: "#000000".into(),
            x_range: None,
            y_range: None,
            title: None,
        }
    }
}

impl PlotSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(CliError::usage("plot dimensions must be positive"));
        }
        for (name, r) in [("x-range", self.x_range), ("y-range", self.y_range)] {
            if let Some((lo, hi)) = r {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(CliError::usage(format!("{name} must be a nonempty interval")));
                }
            }
        }
        Ok(())
    }
}

const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 45.0;
const MARKER: f64 = 3.5;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * (self.width - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        self.height - MARGIN_BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (self.height - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn corners(&self) -> Vec<(f64, f64)> {
        vec![(self.x0, self.y0), (self.x1, self.y0), (self.x1, self.y1), (self.x0, self.y1)]
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    if span > 0.0 {
        (lo - 0.05 * span, hi + 0.05 * span)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn auto_range(values: impl Iterator<Item = f64>, fallback: (f64, f64)) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        padded(lo, hi)
    } else {
        fallback
    }
}

/// Part of `poly` where `w·p + b` has the sign of `side`.
fn clip_half_plane(poly: &[(f64, f64)], w: &[f64], b: f64, side: f64) -> Vec<(f64, f64)> {
    let f = |p: (f64, f64)| side * (w[0] * p.0 + w[1] * p.1 + b);
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let a = poly[i];
        let c = poly[(i + 1) % poly.len()];
        let (fa, fc) = (f(a), f(c));
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fc >= 0.0) {
            let t = fa / (fa - fc);
            out.push((a.0 + t * (c.0 - a.0), a.1 + t * (c.1 - a.1)));
        }
    }
    out
}

/// Endpoints of the line `w·p + b = 0` inside the frame.
fn boundary_segment(frame: &Frame, w: &[f64], b: f64) -> Option<((f64, f64), (f64, f64))> {
    let corners = frame.corners();
    let f = |p: (f64, f64)| w[0] * p.0 + w[1] * p.1 + b;
    let mut hits = Vec::new();
    for i in 0..4 {
        let a = corners[i];
        let c = corners[(i + 1) % 4];
        let (fa, fc) = (f(a), f(c));
        if fa == 0.0 {
            hits.push(a);
        } else if (fa > 0.0) != (fc > 0.0) && fc != 0.0 {
            let t = fa / (fa - fc);
            hits.push((a.0 + t * (c.0 - a.0), a.1 + t * (c.1 - a.1)));
        }
    }
    (hits.len() >= 2).then(|| (hits[0], hits[1]))
}

fn polygon(out: &mut String, frame: &Frame, pts: &[(f64, f64)], fill: &str, class: &str) {
    if pts.len() < 3 {
        return;
    }
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    writeln!(
        out,
        r#"<polygon class="{class}" points="{}" fill="{fill}" fill-opacity="0.3" stroke="none"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
}

fn tick_label(v: f64, span: f64) -> String {
    if span >= 50.0 {
        format!("{v:.0}")
    } else if span >= 5.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.2}")
    }
}

pub fn render_svg(model: &SvmModel, data: &Dataset, spec: &PlotSpec) -> Result<String> {
    spec.validate()?;
    let linear = model.kernel.family() == KernelFamily::Linear;
    if spec.shade_regions && !linear {
        return Err(CliError::usage(format!(
            "region shading needs a linear model, this one uses {}",
            model.kernel.family()
        )));
    }
    let hyperplane = if linear { model.extract_hyperplane().ok() } else { None };

    let (fx, fy) = match &model.scaler {
        Some(s) if s.mean.len() == 2 => (
            (s.mean[0] - 2.0 * s.std[0], s.mean[0] + 2.0 * s.std[0]),
            (s.mean[1] - 2.0 * s.std[1], s.mean[1] + 2.0 * s.std[1]),
        ),
        _ => ((-1.0, 1.0), (-1.0, 1.0)),
    };
    let (x0, x1) = spec
        .x_range
        .unwrap_or_else(|| auto_range(data.examples.iter().map(|e| e.features[0]), fx));
    let (y0, y1) = spec
        .y_range
        .unwrap_or_else(|| auto_range(data.examples.iter().map(|e| e.features[1]), fy));
    let frame = Frame {
        x0,
        x1,
        y0,
        y1,
        width: spec.width as f64,
        height: spec.height as f64,
    };

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = spec.width,
        h = spec.height
    )
    .unwrap();
    writeln!(out, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, spec.width, spec.height).unwrap();
    writeln!(
        out,
        r#"<clipPath id="plot-area"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
        MARGIN_LEFT,
        MARGIN_TOP,
        frame.width - MARGIN_LEFT - MARGIN_RIGHT,
        frame.height - MARGIN_TOP - MARGIN_BOTTOM
    )
    .unwrap();

    if let Some((w, b)) = &hyperplane {
        if spec.shade_regions {
            let rect = frame.corners();
            polygon(&mut out, &frame, &clip_half_plane(&rect, w, *b, 1.0), &spec.positive_region, "region-positive");
            polygon(&mut out, &frame, &clip_half_plane(&rect, w, *b, -1.0), &spec.negative_region, "region-negative");
        }
        if let Some(((ax, ay), (bx, by))) = boundary_segment(&frame, w, *b) {
            writeln!(
                out,
                r#"<line class="boundary" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2"/>"#,
                frame.px(ax),
                frame.py(ay),
                frame.px(bx),
                frame.py(by),
                spec.boundary_stroke
            )
            .unwrap();
        }
    }

    // axes
    let (left, right) = (MARGIN_LEFT, frame.width - MARGIN_RIGHT);
    let (top, bottom) = (MARGIN_TOP, frame.height - MARGIN_BOTTOM);
    writeln!(
        out,
        r##"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000000"/>"##,
        right - left,
        bottom - top
    )
    .unwrap();
    for v in ticks(x0, x1) {
        let px = frame.px(v);
        writeln!(
            out,
            r##"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000000"/><text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"##,
            bottom + 5.0,
            bottom + 18.0,
            tick_label(v, x1 - x0)
        )
        .unwrap();
    }
    for v in ticks(y0, y1) {
        let py = frame.py(v);
        writeln!(
            out,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="#000000"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"##,
            left - 5.0,
            left - 8.0,
            py + 4.0,
            tick_label(v, y1 - y0)
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">x (m)</text>"#,
        (left + right) / 2.0,
        frame.height - 8.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">y (m)</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0
    )
    .unwrap();
    if let Some(title) = &spec.title {
        writeln!(
            out,
            r#"<text x="{:.2}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
            frame.width / 2.0,
            escape(title)
        )
        .unwrap();
    }

    writeln!(out, r#"<g clip-path="url(#plot-area)">"#).unwrap();
    for e in &data.examples {
        let (px, py) = (frame.px(e.features[0]), frame.py(e.features[1]));
        match e.label {
            Label::Positive => writeln!(
                out,
                r#"<circle class="point-positive" cx="{px:.2}" cy="{py:.2}" r="{MARKER}" fill="{}"/>"#,
                spec.positive_color
            ),
            Label::Negative => writeln!(
                out,
                r#"<rect class="point-negative" x="{:.2}" y="{:.2}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                px - MARKER,
                py - MARKER,
                2.0 * MARKER,
                2.0 * MARKER,
                spec.negative_color
            ),
        }
        .unwrap();
        if model.classify(&e.features)? != e.label {
            writeln!(
                out,
                r##"<circle class="miss" cx="{px:.2}" cy="{py:.2}" r="{:.1}" fill="none" stroke="#ff7f0e" stroke-width="2"/>"##,
                2.2 * MARKER
            )
            .unwrap();
        }
    }
    writeln!(out, "</g>").unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use mobpred_core::dataset::Provenance;
    use mobpred_core::svm::{KernelSpec, LabeledExample};

    /// `z = y + 1.5`: positive above `y = −1.5`.
    fn horizontal_model() -> SvmModel {
        SvmModel::new(
            vec![LabeledExample::new(vec![0.0, 1.0], Label::Positive)],
            vec![1.0],
            1.5,
            KernelSpec::Linear,
            2,
        )
        .unwrap()
    }

    fn dataset(points: &[(f64, f64, Label)]) -> Dataset {
        Dataset {
            examples: points.iter().map(|&(x, y, l)| LabeledExample::new(vec![x, y], l)).collect(),
            vehicle_ids: (0..points.len()).map(|i| format!("v{i}")).collect(),
            provenance: Provenance::Generated,
            seed: 0,
        }
    }

    #[test]
    fn one_error_in_ten_gives_one_ring() {
        let mut pts: Vec<_> = (0..9)
            .map(|i| {
                let x = 20.0 * i as f64;
                if i % 2 == 0 { (x, -0.5, Label::Positive) } else { (x, -2.0, Label::Negative) }
            })
            .collect();
        pts.push((50.0, -0.7, Label::Negative));
        let svg = render_svg(&horizontal_model(), &dataset(&pts), &PlotSpec::default()).unwrap();
        assert_eq!(svg.matches(r#"class="miss""#).count(), 1);
        assert_eq!(svg.matches("point-positive").count(), 5);
        assert_eq!(svg.matches("point-negative").count(), 5);
        assert_eq!(svg.matches(r#"class="region-"#).count(), 2);
        assert_eq!(svg.matches(r#"class="boundary""#).count(), 1);
    }

    #[test]
    fn empty_dataset_draws_regions_and_boundary_only() {
        let spec = PlotSpec {
            x_range: Some((0.0, 100.0)),
            y_range: Some((-3.0, 0.5)),
            ..PlotSpec::default()
        };
        let svg = render_svg(&horizontal_model(), &dataset(&[]), &spec).unwrap();
        assert_eq!(svg.matches(r#"class="region-"#).count(), 2);
        assert_eq!(svg.matches(r#"class="boundary""#).count(), 1);
        assert!(!svg.contains("point-"));
    }

    #[test]
    fn shading_requires_linear_kernel() {
        let mut m = horizontal_model();
        m.kernel = KernelSpec::Rbf { gamma: 1.0 };
        let err = render_svg(&m, &dataset(&[]), &PlotSpec::default()).unwrap_err();
        assert_eq!(err.code(), 2);
        let scatter = PlotSpec { shade_regions: false, ..PlotSpec::default() };
        let svg = render_svg(&m, &dataset(&[(0.0, 0.0, Label::Positive)]), &scatter).unwrap();
        assert!(!svg.contains("boundary"));
    }

    #[test]
    fn clipping_splits_the_frame() {
        let rect = vec![(0.0, -3.0), (10.0, -3.0), (10.0, 0.0), (0.0, 0.0)];
        let above = clip_half_plane(&rect, &[0.0, 1.0], 1.5, 1.0);
        assert!(above.iter().all(|p| p.1 >= -1.5));
        assert_eq!(above.len(), 4);
        let below = clip_half_plane(&rect, &[0.0, 1.0], 1.5, -1.0);
        assert!(below.iter().all(|p| p.1 <= -1.5));
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = PlotSpec { x_range: Some((1.0, 1.0)), ..PlotSpec::default() };
        assert!(render_svg(&horizontal_model(), &dataset(&[]), &spec).is_err());
        let spec = PlotSpec { width: 0, ..PlotSpec::default() };
        assert!(render_svg(&horizontal_model(), &dataset(&[]), &spec).is_err());
    }
}
