//! Hypothesis enumeration and the full detection pipeline.
//!
//! Every pairing of a template segment with a scene segment (in both
//! endpoint orders) determines exactly one similarity transform, giving at
//! most `2 * M * N` candidate placements of the template. Each candidate is
//! scored by projecting the whole template, collecting evidence, and folding
//! it into a similarity; the best-scoring candidates are then verified in
//! full, filtered by area coverage, and deduplicated with non-maximum
//! suppression on their bounding boxes.
//!
//! The candidate sweep dominates the cost, so it runs on a trig-free inner
//! loop ([`crate::evidence::fast_pair_distance`]) and can be spread across
//! threads; results are identical either way because candidates are scored
//! independently and collected in enumeration order.

use rayon::prelude::*;

use crate::evidence::{
    fast_match_length, fast_pair_distance, EvidenceLabeling, EvidenceParams, PreparedSegment,
};
use crate::geometry::{solve_similarity, Aabb, Point2, Segment, SegmentSet, SimilarityTransform};
use crate::scoring::{area_filter, similarity, AreaReport, ScoreBreakdown};

/// Knobs for [`detect`] and [`enumerate_hypotheses`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectParams {
    /// Evidence gate used both for the candidate sweep and verification.
    pub evidence: EvidenceParams,
    /// Candidates implying a smaller template-to-scene scale are discarded.
    pub min_scale: f64,
    /// Candidates implying a larger scale are discarded.
    pub max_scale: f64,
    /// How many top-ranked candidates survive into full verification.
    pub top_k: usize,
    /// Detections scoring below this similarity are dropped at the end.
    pub sim_floor: f64,
    /// Non-maximum suppression: a detection is dropped when its bounding
    /// box overlaps an already-kept detection with IoU above this.
    pub nms_iou: f64,
    /// Candidates whose projected bounding box overlaps the scene's
    /// bounding box by less than this fraction of their own area are
    /// discarded (the placement lies mostly outside the scene).
    pub frame_overlap: f64,
    /// Master switch for the scale and frame prunes. Turning it off costs
    /// time but guarantees the sweep is exhaustive.
    pub prune: bool,
    /// Score candidates across threads. Output is identical either way.
    pub parallel: bool,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            evidence: EvidenceParams::default(),
            min_scale: 0.2,
            max_scale: 5.0,
            top_k: 10,
            sim_floor: 0.3,
            nms_iou: 0.5,
            frame_overlap: 0.25,
            prune: true,
            parallel: true,
        }
    }
}

/// Which template/scene segment pairing produced a hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HypothesisOrigin {
    pub template_index: usize,
    pub image_index: usize,
    /// Whether the scene segment's endpoints were taken in reverse order.
    pub reversed: bool,
}

/// One candidate placement of the template.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hypothesis {
    pub origin: HypothesisOrigin,
    pub transform: SimilarityTransform,
}

impl Hypothesis {
    /// The template under this hypothesis's transform, in template order.
    pub fn projected_segments(&self, template: &SegmentSet) -> Vec<Segment> {
        template
            .iter()
            .map(|s| self.transform.apply_segment(s))
            .collect()
    }
}

/// A verified, accepted placement of the template in the scene.
#[derive(Clone, Debug)]
pub struct Detection {
    pub origin: HypothesisOrigin,
    pub transform: SimilarityTransform,
    /// The projected template segments, in template order.
    pub segments: Vec<Segment>,
    /// Scene-segment labeling backing the score.
    pub labeling: EvidenceLabeling,
    pub score: ScoreBreakdown,
    pub area: AreaReport,
    /// Bounding box of the projected segments.
    pub bbox: Aabb,
}

/// Enumerates candidate placements: one per (template segment, scene
/// segment, endpoint order) triple, ordered by template index, then scene
/// index, then order flag. With [`DetectParams::prune`] set, candidates
/// failing the scale range or the frame-overlap check are dropped.
pub fn enumerate_hypotheses(
    template: &SegmentSet,
    scene: &SegmentSet,
    params: &DetectParams,
) -> Vec<Hypothesis> {
    let scene_bbox = scene.bounding_box();
    candidate_hypotheses(template, scene, params)
        .into_iter()
        .filter(|h| {
            if !params.prune {
                return true;
            }
            let bbox = projected_bbox(&h.transform, template);
            match (bbox, scene_bbox) {
                (Some(b), Some(frame)) => passes_frame(&b, &frame, params.frame_overlap),
                _ => false,
            }
        })
        .collect()
}

/// Runs the full pipeline: sweep all candidates, keep the `top_k` best by
/// similarity, verify those in full, then apply the area filter,
/// non-maximum suppression, and the similarity floor. Detections come back
/// sorted by descending similarity.
pub fn detect(template: &SegmentSet, scene: &SegmentSet, params: &DetectParams) -> Vec<Detection> {
    if template.is_empty() || scene.is_empty() || params.top_k == 0 {
        return Vec::new();
    }

    let candidates = candidate_hypotheses(template, scene, params);
    if candidates.is_empty() {
        return Vec::new();
    }

    let template_prepared: Vec<PreparedSegment> =
        template.iter().map(PreparedSegment::new).collect();
    let template_total_length = template.total_length();
    let scene_prepared: Vec<PreparedSegment> = scene.iter().map(PreparedSegment::new).collect();
    let scene_bbox = scene.bounding_box().expect("scene is non-empty");

    let score_one = |hyp: &Hypothesis| {
        sweep_score(
            hyp,
            &template_prepared,
            template_total_length,
            &scene_prepared,
            &scene_bbox,
            params,
        )
    };
    let sweep: Vec<Option<f64>> = if params.parallel {
        candidates.par_iter().map(score_one).collect()
    } else {
        candidates.iter().map(score_one).collect()
    };

    // rank candidates by similarity, breaking ties by enumeration order
    let mut order: Vec<(usize, f64)> = sweep
        .iter()
        .enumerate()
        .filter_map(|(i, sim)| sim.map(|s| (i, s)))
        .collect();
    order.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    order.truncate(params.top_k);

    let mut detections: Vec<(usize, Detection)> = order
        .iter()
        .map(|&(i, _)| {
            let det = verify(
                &candidates[i],
                template,
                &template_prepared,
                scene,
                &scene_prepared,
                params,
            );
            (i, det)
        })
        .collect();
    detections.sort_by(|a, b| b.1.score.sim.total_cmp(&a.1.score.sim).then(a.0.cmp(&b.0)));

    let mut kept: Vec<Detection> = Vec::new();
    for (_, det) in detections {
        if !det.area.passed {
            continue;
        }
        if kept.iter().any(|k| k.bbox.iou(&det.bbox) > params.nms_iou) {
            continue;
        }
        kept.push(det);
    }
    kept.retain(|d| d.score.sim >= params.sim_floor);
    kept
}

/// Verifies one hypothesis at full fidelity: project, label, score, and
/// run the area filter. Labeling goes through the same prepared-segment
/// path as the candidate sweep, so the detection's labels are exactly the
/// ones its ranking score was computed from.
fn verify(
    hyp: &Hypothesis,
    template: &SegmentSet,
    template_prepared: &[PreparedSegment],
    scene: &SegmentSet,
    scene_prepared: &[PreparedSegment],
    params: &DetectParams,
) -> Detection {
    let (projected, bbox) = project_prepared(&hyp.transform, template_prepared);
    let labeling = EvidenceLabeling {
        labels: label_scene(&projected, scene_prepared, &params.evidence),
    };
    let segments = hyp.projected_segments(template);
    let score = similarity(&segments, scene, &labeling);
    let area = area_filter(&segments, &labeling);
    Detection {
        origin: hyp.origin,
        transform: hyp.transform,
        segments,
        labeling,
        score,
        area,
        bbox,
    }
}

/// All candidate transforms in enumeration order, with the scale prune
/// applied (the frame prune needs the projection and is done by the
/// caller).
fn candidate_hypotheses(
    template: &SegmentSet,
    scene: &SegmentSet,
    params: &DetectParams,
) -> Vec<Hypothesis> {
    let mut out = Vec::new();
    for (ti, tpl_seg) in template.iter().enumerate() {
        let inv_len = 1.0 / tpl_seg.length();
        for (ii, scene_seg) in scene.iter().enumerate() {
            let scale = scene_seg.length() * inv_len;
            if params.prune && (scale < params.min_scale || scale > params.max_scale) {
                continue;
            }
            for reversed in [false, true] {
                let dst = if reversed {
                    scene_seg.reversed()
                } else {
                    *scene_seg
                };
                out.push(Hypothesis {
                    origin: HypothesisOrigin {
                        template_index: ti,
                        image_index: ii,
                        reversed,
                    },
                    transform: solve_similarity(tpl_seg, &dst),
                });
            }
        }
    }
    out
}

fn projected_bbox(transform: &SimilarityTransform, template: &SegmentSet) -> Option<Aabb> {
    Aabb::from_points(
        template
            .iter()
            .flat_map(|s| [s.p(), s.q()])
            .map(|p| transform.apply_point(p)),
    )
}

fn passes_frame(bbox: &Aabb, frame: &Aabb, min_overlap: f64) -> bool {
    bbox.intersection_area(frame) >= min_overlap * bbox.area()
}

/// Projects a prepared template under a transform: endpoints via the linear
/// form, the unit direction by plain rotation, lengths by the scale factor.
/// Also returns the bounding box of the projected endpoints. Both the
/// candidate sweep and verification project through here, so the two stages
/// see bit-identical geometry.
fn project_prepared(
    transform: &SimilarityTransform,
    template: &[PreparedSegment],
) -> (Vec<PreparedSegment>, Aabb) {
    let scale = transform.scale();
    let (a, b, tx, ty) = transform.coefficients();
    let (cos_r, sin_r) = (a / scale, b / scale);

    let mut projected = Vec::with_capacity(template.len());
    let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for seg in template {
        let px = a * seg.px - b * seg.py + tx;
        let py = b * seg.px + a * seg.py + ty;
        let qx = a * seg.qx - b * seg.qy + tx;
        let qy = b * seg.qx + a * seg.qy + ty;
        min.x = min.x.min(px.min(qx));
        min.y = min.y.min(py.min(qy));
        max.x = max.x.max(px.max(qx));
        max.y = max.y.max(py.max(qy));
        projected.push(PreparedSegment {
            px,
            py,
            qx,
            qy,
            ux: cos_r * seg.ux - sin_r * seg.uy,
            uy: sin_r * seg.ux + cos_r * seg.uy,
            len: seg.len * scale,
            inv_len: seg.inv_len / scale,
        });
    }
    (projected, Aabb::new(min, max))
}

/// The exclusive evidence assignment on prepared segments: each scene
/// segment goes to the gate-passing hypothesis segment it lies closest to,
/// or to none. Matches [`crate::evidence::assign_evidence`] except for
/// tie-breaking at razor-edge case boundaries of the evidence metric.
fn label_scene(
    projected: &[PreparedSegment],
    scene: &[PreparedSegment],
    params: &EvidenceParams,
) -> Vec<Option<usize>> {
    let term_limit = params.term_limit();
    scene
        .iter()
        .map(|scene_seg| {
            let mut best: Option<usize> = None;
            let mut min_dist = params.threshold;
            for (j, hyp_seg) in projected.iter().enumerate() {
                if let Some(d) = fast_pair_distance(scene_seg, hyp_seg, params, term_limit) {
                    if d < min_dist {
                        best = Some(j);
                        min_dist = d;
                    }
                }
            }
            best
        })
        .collect()
}

/// Scores one candidate without materializing a detection: project the
/// template, prune against the frame, label the scene, and fold the
/// similarity. `None` means the candidate was pruned.
fn sweep_score(
    hyp: &Hypothesis,
    template: &[PreparedSegment],
    template_total_length: f64,
    scene: &[PreparedSegment],
    scene_bbox: &Aabb,
    params: &DetectParams,
) -> Option<f64> {
    let m = template.len();
    let (projected, bbox) = project_prepared(&hyp.transform, template);

    if params.prune && !passes_frame(&bbox, scene_bbox, params.frame_overlap) {
        return None;
    }

    let labels = label_scene(&projected, scene, &params.evidence);
    let mut covered = vec![0.0f64; m];
    let mut has_support = vec![false; m];
    for (scene_seg, &label) in scene.iter().zip(&labels) {
        if let Some(j) = label {
            covered[j] += fast_match_length(scene_seg, &projected[j]);
            has_support[j] = true;
        }
    }

    let supported = has_support.iter().filter(|&&s| s).count();
    if supported == 0 {
        return Some(0.0);
    }
    let total_match: f64 = covered
        .iter()
        .zip(&projected)
        .map(|(&sum, seg)| sum.min(seg.len))
        .sum();
    let total_length = template_total_length * hyp.transform.scale();
    Some((total_match / total_length) * (supported as f64 / m as f64))
}
