//! Evidence collection: deciding which scene segments support which
//! segments of a projected template hypothesis.
//!
//! The measure between a scene segment and a hypothesis segment is a sum of
//! three dimensionless terms — an angle term, a perpendicular-offset term
//! normalized by the hypothesis segment length, and a position term
//! penalizing projections that stick out past the hypothesis segment's
//! extent. A pair counts as evidence only when the total and every
//! individual term are small ([`passes_threshold`]), and each scene segment
//! is allowed to support at most one hypothesis segment
//! ([`assign_evidence`]).

use crate::geometry::{project_onto, Projection, Segment, SegmentSet};

/// Tunables for the evidence measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvidenceParams {
    /// Acceptance threshold on the total distance; each individual term must
    /// also stay within two thirds of it. Useful range is roughly 0.4..0.6 —
    /// larger admits sloppier evidence, smaller demands cleaner scenes.
    pub threshold: f64,
    /// Parameter-space radius around the hypothesis segment's endpoints used
    /// to flag near-degenerate projections (a scene segment that projects to
    /// nearly a single point at an endpoint carries no alignment
    /// information).
    pub endpoint_eps: f64,
}

impl Default for EvidenceParams {
    fn default() -> Self {
        EvidenceParams {
            threshold: 0.5,
            endpoint_eps: 0.05,
        }
    }
}

impl EvidenceParams {
    /// Ceiling applied to each individual term.
    pub fn term_limit(&self) -> f64 {
        self.threshold * (2.0 / 3.0)
    }
}

/// The three components of the evidence distance, plus their sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvidenceScore {
    /// Sine of the angle between the carrier lines; 0 when parallel.
    pub angle_term: f64,
    /// Mean perpendicular endpoint distance over the hypothesis segment
    /// length; 0 when the scene segment lies on the carrier.
    pub dist_term: f64,
    /// Penalty for the projected interval falling outside the hypothesis
    /// segment; 0 when it lies inside or covers it completely.
    pub position_term: f64,
    /// Sum of the three terms.
    pub total: f64,
}

/// Position penalty for a scene segment whose endpoints project to
/// parameters `t_p` and `t_q` on the hypothesis segment's carrier (the
/// hypothesis segment occupies `[0, 1]`).
///
/// Cases, in order of precedence:
/// - the projection collapses (within `endpoint_eps`) to a single point at
///   either end of the hypothesis segment: flat penalty of `0.5` — such a
///   segment is roughly perpendicular at an endpoint and should not count
///   as cheap evidence;
/// - the interval lies inside `[0, 1]`: no penalty (a fragment of the
///   expected edge);
/// - the interval covers all of `[0, 1]`: no penalty (the expected edge is
///   there, merely longer);
/// - the interval lies entirely past one end: the penalty grows with its
///   distance from that end;
/// - the interval overlaps one end: the penalty is the uncovered fraction
///   of the hypothesis segment.
pub fn position_term(t_p: f64, t_q: f64, endpoint_eps: f64) -> f64 {
    let near = |t: f64, target: f64| (t - target).abs() <= endpoint_eps;
    if (t_p - t_q).abs() <= endpoint_eps
        && ((near(t_p, 0.0) && near(t_q, 0.0)) || (near(t_p, 1.0) && near(t_q, 1.0)))
    {
        return 0.5;
    }

    let a = t_p.min(t_q);
    let b = t_p.max(t_q);
    if a >= 0.0 && b <= 1.0 {
        0.0
    } else if a <= 0.0 && b >= 1.0 {
        0.0
    } else if a > 1.0 {
        (t_p - t_q).abs() + a - 1.0
    } else if b < 0.0 {
        (t_p - t_q).abs() - b
    } else if a < 0.0 {
        // overlaps the near end; b is in [0, 1)
        1.0 - b.abs()
    } else {
        // overlaps the far end; a is in [0, 1]
        a.abs()
    }
}

/// Evidence distance between two segments, given their projection
/// relationship (scene segment projected onto the hypothesis segment).
pub fn evidence_distance(proj: &Projection, params: &EvidenceParams) -> EvidenceScore {
    let angle_term = proj.angle.sin();
    let dist_term = proj.dist / proj.ref_length;
    let position_term = position_term(proj.t_p, proj.t_q, params.endpoint_eps);
    EvidenceScore {
        angle_term,
        dist_term,
        position_term,
        total: angle_term + dist_term + position_term,
    }
}

/// Whether a score is good enough to count as evidence: the total must stay
/// within the threshold and no single term may exceed two thirds of it, so
/// one perfect term cannot paper over another bad one.
pub fn passes_threshold(score: &EvidenceScore, params: &EvidenceParams) -> bool {
    let limit = params.term_limit();
    score.total <= params.threshold
        && score.angle_term <= limit
        && score.dist_term <= limit
        && score.position_term <= limit
}

/// Length of the part of `hyp` covered by the projection of `scene` onto
/// its carrier: the overlap of the projected interval with `[0, 1]`, in
/// units of `hyp`'s length.
pub fn match_length(scene: &Segment, hyp: &Segment) -> f64 {
    let proj = project_onto(scene, hyp);
    let lo = proj.t_p.min(proj.t_q).max(0.0);
    let hi = proj.t_p.max(proj.t_q).min(1.0);
    (hi - lo).max(0.0) * proj.ref_length
}

/// Which hypothesis segment each scene segment supports, if any.
///
/// `labels[l]` is the index into the hypothesis segment slice, or `None`
/// when scene segment `l` is not evidence for any of them.
#[derive(Clone, Debug, PartialEq)]
pub struct EvidenceLabeling {
    pub labels: Vec<Option<usize>>,
}

impl EvidenceLabeling {
    /// Scene-segment indices supporting hypothesis segment `hyp_index`.
    pub fn supporters_of(&self, hyp_index: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter_map(move |(i, l)| (*l == Some(hyp_index)).then_some(i))
    }

    /// Pairs `(scene_index, hypothesis_index)` for every labeled segment.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.map(|j| (i, j)))
    }
}

/// Assigns each scene segment to the hypothesis segment it best supports.
///
/// For every scene segment the hypothesis segments are scanned in order;
/// a candidate must pass [`passes_threshold`] and strictly improve on the
/// best total seen so far, starting from the threshold itself. A pair
/// sitting exactly at the threshold therefore never wins, and ties go to
/// the lower hypothesis index. Each scene segment ends up supporting at
/// most one hypothesis segment; distinct scene segments may support the
/// same one.
pub fn assign_evidence(
    hypothesis: &[Segment],
    scene: &SegmentSet,
    params: &EvidenceParams,
) -> EvidenceLabeling {
    let labels = scene
        .iter()
        .map(|scene_seg| {
            let mut best = None;
            let mut min_dist = params.threshold;
            for (j, hyp_seg) in hypothesis.iter().enumerate() {
                let score = evidence_distance(&project_onto(scene_seg, hyp_seg), params);
                if passes_threshold(&score, params) && score.total < min_dist {
                    best = Some(j);
                    min_dist = score.total;
                }
            }
            best
        })
        .collect();
    EvidenceLabeling { labels }
}

/// A segment in the form the inner detection loop wants: origin point,
/// unit direction, and length, so the evidence terms reduce to dot and
/// cross products.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PreparedSegment {
    pub px: f64,
    pub py: f64,
    pub qx: f64,
    pub qy: f64,
    pub ux: f64,
    pub uy: f64,
    pub len: f64,
    pub inv_len: f64,
}

impl PreparedSegment {
    pub fn new(seg: &Segment) -> Self {
        let p = seg.p();
        let q = seg.q();
        let len = seg.length();
        let inv_len = 1.0 / len;
        PreparedSegment {
            px: p.x,
            py: p.y,
            qx: q.x,
            qy: q.y,
            ux: (q.x - p.x) * inv_len,
            uy: (q.y - p.y) * inv_len,
            len,
            inv_len,
        }
    }
}

/// Trig-free equivalent of projecting `scene` onto `hyp`, scoring it, and
/// gating it: returns the total distance when the pair passes, `None`
/// otherwise. Bails out after each term, cheapest first, which settles the
/// bulk of pairs on the angle term alone.
#[inline]
pub(crate) fn fast_pair_distance(
    scene: &PreparedSegment,
    hyp: &PreparedSegment,
    params: &EvidenceParams,
    term_limit: f64,
) -> Option<f64> {
    let angle = (scene.ux * hyp.uy - scene.uy * hyp.ux).abs();
    if angle > term_limit {
        return None;
    }

    let rx = scene.px - hyp.px;
    let ry = scene.py - hyp.py;
    let sx = scene.qx - hyp.px;
    let sy = scene.qy - hyp.py;

    let dist =
        0.5 * ((hyp.ux * ry - hyp.uy * rx).abs() + (hyp.ux * sy - hyp.uy * sx).abs()) * hyp.inv_len;
    if dist > term_limit || angle + dist > params.threshold {
        return None;
    }

    let t_p = (rx * hyp.ux + ry * hyp.uy) * hyp.inv_len;
    let t_q = (sx * hyp.ux + sy * hyp.uy) * hyp.inv_len;
    let position = position_term(t_p, t_q, params.endpoint_eps);
    let total = angle + dist + position;
    if position > term_limit || total > params.threshold {
        return None;
    }
    Some(total)
}

/// Interval-overlap match length on prepared segments; mirrors
/// [`match_length`].
#[inline]
pub(crate) fn fast_match_length(scene: &PreparedSegment, hyp: &PreparedSegment) -> f64 {
    let t_p = ((scene.px - hyp.px) * hyp.ux + (scene.py - hyp.py) * hyp.uy) * hyp.inv_len;
    let t_q = ((scene.qx - hyp.px) * hyp.ux + (scene.qy - hyp.py) * hyp.uy) * hyp.inv_len;
    let lo = t_p.min(t_q).max(0.0);
    let hi = t_p.max(t_q).min(1.0);
    (hi - lo).max(0.0) * hyp.len
}
