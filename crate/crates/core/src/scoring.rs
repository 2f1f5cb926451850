//! Folding collected evidence into a single similarity value, and the
//! area-coverage sanity filter.
//!
//! The similarity rewards two different things at once: how much of the
//! template's total edge length is covered by supporting scene segments,
//! and how many distinct template segments found any support at all. Both
//! factors live in `[0, 1]`, so their product does too — a hypothesis with
//! lots of cover concentrated on a few segments scores no better than one
//! with the same cover spread across the shape.

use crate::evidence::{match_length, EvidenceLabeling};
use crate::geometry::{Point2, Segment, SegmentSet};

/// Per-segment and aggregate similarity data for one hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreBreakdown {
    /// Supported length credited to each hypothesis segment, capped at the
    /// segment's own length.
    pub match_values: Vec<f64>,
    /// Total length of the hypothesis segments.
    pub total_length: f64,
    /// Number of hypothesis segments with at least one supporter.
    pub supported: usize,
    /// Normalized similarity in `[0, 1]`.
    pub sim: f64,
}

/// Scores a labeled hypothesis.
///
/// Each hypothesis segment is credited with the summed match lengths of its
/// supporters, capped at its own length (evidence cannot overfill a
/// segment). The similarity is the covered fraction of total length times
/// the fraction of segments that are supported.
pub fn similarity(
    hypothesis: &[Segment],
    scene: &SegmentSet,
    labeling: &EvidenceLabeling,
) -> ScoreBreakdown {
    if hypothesis.is_empty() {
        return ScoreBreakdown {
            match_values: Vec::new(),
            total_length: 0.0,
            supported: 0,
            sim: 0.0,
        };
    }

    let mut covered = vec![0.0f64; hypothesis.len()];
    let mut has_support = vec![false; hypothesis.len()];
    for (scene_index, hyp_index) in labeling.pairs() {
        covered[hyp_index] += match_length(&scene.segments()[scene_index], &hypothesis[hyp_index]);
        has_support[hyp_index] = true;
    }

    let mut total_length = 0.0;
    let mut total_match = 0.0;
    let match_values: Vec<f64> = hypothesis
        .iter()
        .zip(&covered)
        .map(|(seg, &sum)| {
            let len = seg.length();
            total_length += len;
            let value = sum.min(len);
            total_match += value;
            value
        })
        .collect();

    let supported = has_support.iter().filter(|&&s| s).count();
    let sim = (total_match / total_length) * (supported as f64 / hypothesis.len() as f64);
    ScoreBreakdown {
        match_values,
        total_length,
        supported,
        sim,
    }
}

/// Reference point for the area filter: the mean of the hypothesis
/// segments' midpoints.
pub fn center_point(hypothesis: &[Segment]) -> Point2 {
    let n = hypothesis.len() as f64;
    let (sx, sy) = hypothesis.iter().fold((0.0, 0.0), |(sx, sy), seg| {
        let m = seg.midpoint();
        (sx + m.x, sy + m.y)
    });
    Point2::new(sx / n, sy / n)
}

fn triangle_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs()
}

/// Area-coverage check for one labeled hypothesis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AreaReport {
    /// The reference point the triangle fan is anchored to.
    pub center: Point2,
    /// Total fan area over all hypothesis segments.
    pub area_hypothesis: f64,
    /// Fan area restricted to supported segments.
    pub area_evidence: f64,
    /// Whether the supported area reaches half of the total.
    pub passed: bool,
}

/// Rejects hypotheses whose support is spatially lopsided.
///
/// Each hypothesis segment spans a triangle against the central reference
/// point; the supported triangles must cover at least half of the total
/// fan area. Length coverage alone can be fooled by a dense clutter region
/// backing one side of the shape — this check demands that support
/// surrounds the center. Equality counts as a pass.
pub fn area_filter(hypothesis: &[Segment], labeling: &EvidenceLabeling) -> AreaReport {
    let center = center_point(hypothesis);
    let mut supported = vec![false; hypothesis.len()];
    for (_, hyp_index) in labeling.pairs() {
        supported[hyp_index] = true;
    }

    let mut area_hypothesis = 0.0;
    let mut area_evidence = 0.0;
    for (seg, &sup) in hypothesis.iter().zip(&supported) {
        let area = triangle_area(center, seg.p(), seg.q());
        area_hypothesis += area;
        if sup {
            area_evidence += area;
        }
    }

    AreaReport {
        center,
        area_hypothesis,
        area_evidence,
        passed: area_evidence >= 0.5 * area_hypothesis,
    }
}
