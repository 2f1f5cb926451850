//! SVG rendering of detections over a scene.
//!
//! The scene's segments are drawn in neutral gray; each detection gets a
//! color from a fixed palette, its projected template drawn dashed and the
//! scene segments supporting it redrawn solid in the same color. Output is
//! a plain string built deterministically — identical inputs produce
//! byte-identical SVG.

use std::fmt::Write as _;

use crate::error::RenderError;
use crate::formats::DetectionRecord;
use crate::geometry::{Aabb, Point2, Segment, SegmentSet};

/// Stroke colors cycled per detection.
const PALETTE: [&str; 6] = [
    "#d32f2f", "#1976d2", "#388e3c", "#f57c00", "#7b1fa2", "#00838f",
];
const SCENE_COLOR: &str = "#9e9e9e";
const MARGIN: f64 = 10.0;

/// Renders the scene with detection overlays. Fails when a record's label
/// indices don't fit the scene or its own hypothesis segments, since that
/// means the inputs belong to different runs.
pub fn render_svg(
    scene: &SegmentSet,
    detections: &[DetectionRecord],
) -> Result<String, RenderError> {
    for (k, rec) in detections.iter().enumerate() {
        for &(scene_index, tpl_index) in &rec.labels {
            if scene_index >= scene.len() {
                return Err(RenderError::SceneIndexOutOfRange {
                    detection: k,
                    index: scene_index,
                    len: scene.len(),
                });
            }
            if tpl_index >= rec.segments.len() {
                return Err(RenderError::TemplateIndexOutOfRange {
                    detection: k,
                    index: tpl_index,
                    len: rec.segments.len(),
                });
            }
        }
    }

    let all_points = scene
        .iter()
        .chain(detections.iter().flat_map(|r| r.segments.iter()))
        .flat_map(|s| [s.p(), s.q()]);
    let bounds = Aabb::from_points(all_points)
        .unwrap_or_else(|| Aabb::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)));
    let x0 = bounds.min.x - MARGIN;
    let y0 = bounds.min.y - MARGIN;
    let width = bounds.width() + 2.0 * MARGIN;
    let height = bounds.height() + 2.0 * MARGIN;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0} {y0} {width} {height}\" \
         width=\"{:.0}\" height=\"{:.0}\">",
        width.ceil(),
        height.ceil()
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{x0}\" y=\"{y0}\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
    );

    let _ = writeln!(svg, "<g stroke=\"{SCENE_COLOR}\" stroke-width=\"1\">");
    for seg in scene.iter() {
        line(&mut svg, seg, None);
    }
    svg.push_str("</g>\n");

    for (k, rec) in detections.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            svg,
            "<g stroke=\"{color}\" stroke-width=\"1.5\" fill=\"none\">"
        );
        for seg in &rec.segments {
            line(&mut svg, seg, Some("4 3"));
        }
        for &(scene_index, _) in &rec.labels {
            line(&mut svg, &scene.segments()[scene_index], None);
        }
        svg.push_str("</g>\n");
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn line(svg: &mut String, seg: &Segment, dash: Option<&str>) {
    let _ = write!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"",
        seg.p().x,
        seg.p().y,
        seg.q().x,
        seg.q().y
    );
    if let Some(d) = dash {
        let _ = write!(svg, " stroke-dasharray=\"{d}\"");
    }
    svg.push_str("/>\n");
}
