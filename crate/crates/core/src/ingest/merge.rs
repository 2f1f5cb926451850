//! Fusing fragments that continue one another along a common carrier.
//!
//! Fitting splits chains wherever junctions, noise, or occlusion broke the
//! underlying edge, so one physical line often arrives as several pieces.
//! Two segments merge when their carriers nearly agree in angle and offset
//! and the pieces nearly touch end to end; the replacement spans the two
//! most distant endpoints. Merging repeats until no pair qualifies, so a
//! whole run of fragments collapses regardless of input order.

use crate::geometry::Segment;

/// Greedily merges near-collinear, near-touching segments until no pair
/// qualifies.
///
/// `max_angle` (radians) bounds the carrier angle difference, `max_gap`
/// (pixels) the along-carrier gap between the pieces (overlapping pieces
/// have gap zero), and `max_offset` (pixels) the mean distance between each
/// segment's endpoints and the other's carrier line. The scan is in index
/// order and restarts after every merge, so the result is deterministic.
pub fn merge_collinear(
    segments: Vec<Segment>,
    max_angle: f64,
    max_gap: f64,
    max_offset: f64,
) -> Vec<Segment> {
    let mut segs = segments;
    loop {
        let mut merged = None;
        'scan: for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                if let Some(m) = try_merge(&segs[i], &segs[j], max_angle, max_gap, max_offset) {
                    merged = Some((i, j, m));
                    break 'scan;
                }
            }
        }
        match merged {
            Some((i, j, m)) => {
                segs[i] = m;
                segs.remove(j);
            }
            None => return segs,
        }
    }
}

fn try_merge(
    a: &Segment,
    b: &Segment,
    max_angle: f64,
    max_gap: f64,
    max_offset: f64,
) -> Option<Segment> {
    let (adx, ady) = a.delta();
    let (bdx, bdy) = b.delta();
    let cross = (adx * bdy - ady * bdx).abs();
    let dot = (adx * bdx + ady * bdy).abs();
    if cross.atan2(dot) > max_angle {
        return None;
    }

    // mean distance of all four endpoints to the opposite carrier
    let offset = (line_distance(a, b.p().x, b.p().y)
        + line_distance(a, b.q().x, b.q().y)
        + line_distance(b, a.p().x, a.p().y)
        + line_distance(b, a.q().x, a.q().y))
        / 4.0;
    if offset > max_offset {
        return None;
    }

    // along-carrier gap, measured on the longer segment's carrier
    let longer = if a.length() >= b.length() { a } else { b };
    let other = if a.length() >= b.length() { b } else { a };
    let (t1, t2) = carrier_interval(longer, other);
    let gap = (t1.max(0.0) - t2.min(longer.length())).max(0.0);
    if gap > max_gap {
        return None;
    }

    // replacement: the two most distant endpoints, oriented like the longer
    // segment
    let pts = [a.p(), a.q(), b.p(), b.q()];
    let (mut best_pair, mut best_d2) = ((pts[0], pts[1]), f64::NEG_INFINITY);
    for i in 0..4 {
        for j in i + 1..4 {
            let d2 = (pts[i].x - pts[j].x).powi(2) + (pts[i].y - pts[j].y).powi(2);
            if d2 > best_d2 {
                best_d2 = d2;
                best_pair = (pts[i], pts[j]);
            }
        }
    }
    let (p, q) = best_pair;
    let (ldx, ldy) = longer.delta();
    let (p, q) = if (q.x - p.x) * ldx + (q.y - p.y) * ldy >= 0.0 {
        (p, q)
    } else {
        (q, p)
    };
    Segment::new(p, q).ok()
}

/// Perpendicular distance from `(x, y)` to the carrier line of `s`.
fn line_distance(s: &Segment, x: f64, y: f64) -> f64 {
    let (dx, dy) = s.delta();
    let len = s.length();
    ((x - s.p().x) * dy - (y - s.p().y) * dx).abs() / len
}

/// Projection interval of `other`'s endpoints on `base`'s carrier, in
/// pixels from `base.p()`, low end first.
fn carrier_interval(base: &Segment, other: &Segment) -> (f64, f64) {
    let (dx, dy) = base.delta();
    let inv_len = 1.0 / base.length();
    let t = |x: f64, y: f64| ((x - base.p().x) * dx + (y - base.p().y) * dy) * inv_len;
    let t1 = t(other.p().x, other.p().y);
    let t2 = t(other.q().x, other.q().y);
    (t1.min(t2), t1.max(t2))
}
