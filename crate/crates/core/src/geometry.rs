//! Core 2-D primitives: points, directed line segments, similarity
//! transforms, and the projection construction relating one segment to
//! another.
//!
//! Everything downstream (evidence collection, scoring, detection) is built
//! from these types. All operations are pure; values are plain `f64` pixels.

use std::fmt;

use crate::error::GeometryError;

/// Shortest segment length accepted at construction, in pixels.
///
/// Every evidence formula divides by a segment length, so zero-length
/// segments are rejected at the door.
pub const MIN_SEGMENT_LENGTH: f64 = 1e-9;

/// A point in image coordinates (pixels, y down).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance_to(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A directed line segment from `p` to `q`.
///
/// Construction guarantees finite coordinates and length of at least
/// [`MIN_SEGMENT_LENGTH`]; every consumer may rely on a usable direction
/// vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    p: Point2,
    q: Point2,
}

impl Segment {
    pub fn new(p: Point2, q: Point2) -> Result<Self, GeometryError> {
        if !p.is_finite() || !q.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if p.distance_to(q) < MIN_SEGMENT_LENGTH {
            return Err(GeometryError::Degenerate);
        }
        Ok(Segment { p, q })
    }

    pub fn from_coords(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self, GeometryError> {
        Segment::new(Point2::new(x1, y1), Point2::new(x2, y2))
    }

    pub fn p(&self) -> Point2 {
        self.p
    }

    pub fn q(&self) -> Point2 {
        self.q
    }

    /// Euclidean length `|pq|`.
    pub fn length(&self) -> f64 {
        self.p.distance_to(self.q)
    }

    /// Arithmetic midpoint of the endpoints.
    pub fn midpoint(&self) -> Point2 {
        Point2::new((self.p.x + self.q.x) * 0.5, (self.p.y + self.q.y) * 0.5)
    }

    /// Direction vector `q - p` (not normalized).
    pub fn delta(&self) -> (f64, f64) {
        (self.q.x - self.p.x, self.q.y - self.p.y)
    }

    /// The same carrier with the endpoint order swapped.
    pub fn reversed(&self) -> Segment {
        Segment {
            p: self.q,
            q: self.p,
        }
    }
}

/// An axis-aligned bounding box with `min` componentwise below `max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub fn new(min: Point2, max: Point2) -> Self {
        Aabb { min, max }
    }

    /// Smallest box containing every point of the iterator; `None` when empty.
    pub fn from_points(points: impl IntoIterator<Item = Point2>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut min = first;
        let mut max = first;
        for p in it {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Some(Aabb { min, max })
    }

    pub fn width(&self) -> f64 {
        (self.max.x - self.min.x).max(0.0)
    }

    pub fn height(&self) -> f64 {
        (self.max.y - self.min.y).max(0.0)
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Area of the overlap region, zero when disjoint.
    pub fn intersection_area(&self, other: &Aabb) -> f64 {
        let w = self.max.x.min(other.max.x) - self.min.x.max(other.min.x);
        let h = self.max.y.min(other.max.y) - self.min.y.max(other.min.y);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    /// Intersection over union. Zero when disjoint or when both boxes are
    /// degenerate (zero union area).
    pub fn iou(&self, other: &Aabb) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }
}

/// An ordered, named collection of segments.
///
/// Indices are stable for the lifetime of the set; evidence labels refer to
/// them. Templates are always non-empty, but sets that come out of the image
/// pipeline (a blank image, an empty scene file) may legitimately hold zero
/// segments, so emptiness is permitted at the container level and checked by
/// the operations that need segments.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSet {
    name: String,
    segments: Vec<Segment>,
}

impl SegmentSet {
    pub fn new(name: impl Into<String>, segments: Vec<Segment>) -> Self {
        SegmentSet {
            name: name.into(),
            segments,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Segment> {
        self.segments.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Segment> {
        self.segments.iter()
    }

    /// Min/max corners over all endpoints; `None` for an empty set.
    pub fn bounding_box(&self) -> Option<Aabb> {
        Aabb::from_points(self.segments.iter().flat_map(|s| [s.p(), s.q()]))
    }

    /// Applies `t` to every segment, preserving order.
    pub fn transformed(&self, t: &SimilarityTransform, name: impl Into<String>) -> SegmentSet {
        SegmentSet {
            name: name.into(),
            segments: self.segments.iter().map(|s| t.apply_segment(s)).collect(),
        }
    }

    /// Total segment length.
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }
}

/// Scale, rotation, and translation (no reflection): `x' = s R(phi) x + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityTransform {
    scale: f64,
    rotation: f64,
    translation: (f64, f64),
}

impl SimilarityTransform {
    pub fn new(scale: f64, rotation: f64, translation: (f64, f64)) -> Result<Self, GeometryError> {
        if !(scale.is_finite() && rotation.is_finite())
            || !translation.0.is_finite()
            || !translation.1.is_finite()
        {
            return Err(GeometryError::NonFinite);
        }
        if scale <= 0.0 {
            return Err(GeometryError::NonPositiveScale(scale));
        }
        Ok(SimilarityTransform {
            scale,
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        SimilarityTransform {
            scale: 1.0,
            rotation: 0.0,
            translation: (0.0, 0.0),
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn translation(&self) -> (f64, f64) {
        self.translation
    }

    /// The linear form `(a, b, tx, ty)` with `x' = a x - b y + tx`,
    /// `y' = b x + a y + ty`. Handy when applying the same transform to many
    /// points.
    pub fn coefficients(&self) -> (f64, f64, f64, f64) {
        let a = self.scale * self.rotation.cos();
        let b = self.scale * self.rotation.sin();
        (a, b, self.translation.0, self.translation.1)
    }

    pub fn apply_point(&self, p: Point2) -> Point2 {
        let (a, b, tx, ty) = self.coefficients();
        Point2::new(a * p.x - b * p.y + tx, b * p.x + a * p.y + ty)
    }

    pub fn apply_segment(&self, s: &Segment) -> Segment {
        // scale > 0 keeps the segment non-degenerate; skip revalidation
        Segment {
            p: self.apply_point(s.p()),
            q: self.apply_point(s.q()),
        }
    }

    /// `other` followed by `self`.
    pub fn compose(&self, other: &SimilarityTransform) -> SimilarityTransform {
        let (a, b, tx, ty) = self.coefficients();
        let (ox, oy) = other.translation;
        SimilarityTransform {
            scale: self.scale * other.scale,
            rotation: self.rotation + other.rotation,
            translation: (a * ox - b * oy + tx, b * ox + a * oy + ty),
        }
    }

    pub fn inverse(&self) -> SimilarityTransform {
        let inv_scale = 1.0 / self.scale;
        let (c, s) = (self.rotation.cos(), self.rotation.sin());
        let (tx, ty) = self.translation;
        // R(-phi)/s applied to -t
        SimilarityTransform {
            scale: inv_scale,
            rotation: -self.rotation,
            translation: (
                -(c * tx + s * ty) * inv_scale,
                -(-s * tx + c * ty) * inv_scale,
            ),
        }
    }
}

/// Solves for the unique (reflection-free) similarity transform mapping
/// `src.p -> dst.p` and `src.q -> dst.q`.
///
/// Treating points as complex numbers, the transform is `z' = a z + b` with
/// `a = (dst.q - dst.p) / (src.q - src.p)` and `b = dst.p - a src.p`.
pub fn solve_similarity(src: &Segment, dst: &Segment) -> SimilarityTransform {
    let (sx, sy) = src.delta();
    let (dx, dy) = dst.delta();
    let denom = sx * sx + sy * sy;
    // a = d / s  (complex division)
    let ax = (dx * sx + dy * sy) / denom;
    let ay = (dy * sx - dx * sy) / denom;
    let scale = ax.hypot(ay);
    let rotation = ay.atan2(ax);
    let p = src.p();
    let translation = (
        dst.p().x - (ax * p.x - ay * p.y),
        dst.p().y - (ay * p.x + ax * p.y),
    );
    SimilarityTransform {
        scale,
        rotation,
        translation,
    }
}

/// Applies `t` to a segment. Output length is `t.scale()` times the input
/// length.
pub fn apply_transform(t: &SimilarityTransform, s: &Segment) -> Segment {
    t.apply_segment(s)
}

/// Quantities relating a segment `cd` to a reference segment `ab`:
/// the undirected angle between the carrier lines, the mean perpendicular
/// distance of `cd`'s endpoints to `ab`'s carrier, and the scalar parameters
/// of the orthogonal projections of `cd.p` and `cd.q` onto that carrier
/// (parametrized so `ab.p` is 0 and `ab.q` is 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    /// Undirected angle between carrier lines, in `[0, pi/2]`.
    pub angle: f64,
    /// Mean of the two endpoint-to-carrier perpendicular distances, >= 0.
    pub dist: f64,
    /// Parameter of `cd.p` projected onto `ab`'s carrier.
    pub t_p: f64,
    /// Parameter of `cd.q` projected onto `ab`'s carrier.
    pub t_q: f64,
    /// Length of the reference segment `ab`.
    pub ref_length: f64,
}

/// Projects `cd` onto the carrier line of `ab`.
///
/// The distance is the mean of the two endpoint distances, which is
/// symmetric in `cd`'s endpoints and reduces to the carrier separation when
/// the segments are parallel.
pub fn project_onto(cd: &Segment, ab: &Segment) -> Projection {
    let (abx, aby) = ab.delta();
    let len2 = abx * abx + aby * aby;
    let len = len2.sqrt();

    let rx = cd.p().x - ab.p().x;
    let ry = cd.p().y - ab.p().y;
    let sx = cd.q().x - ab.p().x;
    let sy = cd.q().y - ab.p().y;

    let t_p = (rx * abx + ry * aby) / len2;
    let t_q = (sx * abx + sy * aby) / len2;

    let dist_p = (abx * ry - aby * rx).abs() / len;
    let dist_q = (abx * sy - aby * sx).abs() / len;
    let dist = 0.5 * (dist_p + dist_q);

    let (cdx, cdy) = cd.delta();
    let cross = (abx * cdy - aby * cdx).abs();
    let dot = (abx * cdx + aby * cdy).abs();
    let angle = cross.atan2(dot);

    Projection {
        angle,
        dist,
        t_p,
        t_q,
        ref_length: len,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn seg(x1: f64, y1: f64, x2: f64, y2: f64) -> Segment {
        Segment::from_coords(x1, y1, x2, y2).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn assert_points_close(a: Point2, b: Point2, tol: f64) {
        assert!(a.distance_to(b) <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn segment_rejects_degenerate_and_nonfinite() {
        assert!(Segment::from_coords(1.0, 2.0, 1.0, 2.0).is_err());
        assert!(Segment::from_coords(0.0, 0.0, 1e-12, 0.0).is_err());
        assert!(Segment::from_coords(0.0, f64::NAN, 1.0, 0.0).is_err());
        assert!(Segment::from_coords(0.0, 0.0, f64::INFINITY, 0.0).is_err());
        assert!(Segment::from_coords(0.0, 0.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn length_midpoint_bbox() {
        assert_close(seg(0.0, 0.0, 3.0, 4.0).length(), 5.0, 0.0);
        let m = seg(0.0, 0.0, 2.0, 4.0).midpoint();
        assert_eq!(m, Point2::new(1.0, 2.0));

        let set = SegmentSet::new("t", vec![seg(0.0, 0.0, 1.0, 1.0), seg(-1.0, 2.0, 0.0, 0.0)]);
        let bb = set.bounding_box().unwrap();
        assert_eq!(bb.min, Point2::new(-1.0, 0.0));
        assert_eq!(bb.max, Point2::new(1.0, 2.0));
    }

    #[test]
    fn empty_set_has_no_bbox() {
        assert!(SegmentSet::new("empty", Vec::new())
            .bounding_box()
            .is_none());
    }

    #[test]
    fn solve_identity() {
        let s = seg(0.0, 0.0, 1.0, 0.0);
        let t = solve_similarity(&s, &s);
        assert_close(t.scale(), 1.0, 1e-12);
        assert_close(t.rotation(), 0.0, 1e-12);
        assert_close(t.translation().0, 0.0, 1e-12);
        assert_close(t.translation().1, 0.0, 1e-12);
    }

    #[test]
    fn solve_scale_two_quarter_turn() {
        let src = seg(0.0, 0.0, 1.0, 0.0);
        let dst = seg(2.0, 3.0, 2.0, 5.0);
        let t = solve_similarity(&src, &dst);
        assert_close(t.scale(), 2.0, 1e-12);
        assert_close(t.rotation(), FRAC_PI_2, 1e-12);
        assert_close(t.translation().0, 2.0, 1e-12);
        assert_close(t.translation().1, 3.0, 1e-12);
        // application oracle
        let mapped = apply_transform(&t, &src);
        assert_points_close(mapped.p(), dst.p(), 1e-9);
        assert_points_close(mapped.q(), dst.q(), 1e-9);
    }

    #[test]
    fn solve_half_scale() {
        let src = seg(0.0, 0.0, 2.0, 0.0);
        let dst = seg(5.0, 5.0, 6.0, 5.0);
        let t = solve_similarity(&src, &dst);
        assert_close(t.scale(), 0.5, 1e-12);
        assert_close(t.rotation(), 0.0, 1e-12);
        assert_close(t.translation().0, 5.0, 1e-12);
        assert_close(t.translation().1, 5.0, 1e-12);
        let mapped = apply_transform(&t, &src);
        assert_points_close(mapped.p(), dst.p(), 1e-9);
        assert_points_close(mapped.q(), dst.q(), 1e-9);
    }

    #[test]
    fn apply_examples() {
        let id = SimilarityTransform::identity();
        let s = seg(3.0, -1.0, 7.0, 2.0);
        assert_eq!(apply_transform(&id, &s), s);

        let t = SimilarityTransform::new(2.0, 0.0, (0.0, 0.0)).unwrap();
        let mapped = apply_transform(&t, &seg(0.0, 0.0, 1.0, 0.0));
        assert_points_close(mapped.p(), Point2::new(0.0, 0.0), 1e-12);
        assert_points_close(mapped.q(), Point2::new(2.0, 0.0), 1e-12);

        let t = SimilarityTransform::new(2.0, FRAC_PI_2, (2.0, 3.0)).unwrap();
        let mapped = apply_transform(&t, &seg(0.0, 0.0, 1.0, 0.0));
        assert_points_close(mapped.p(), Point2::new(2.0, 3.0), 1e-9);
        assert_points_close(mapped.q(), Point2::new(2.0, 5.0), 1e-9);
    }

    #[test]
    fn transform_scales_length() {
        let t = SimilarityTransform::new(3.5, 1.2, (-4.0, 9.0)).unwrap();
        let s = seg(1.0, 2.0, 5.0, -3.0);
        assert_close(apply_transform(&t, &s).length(), 3.5 * s.length(), 1e-9);
    }

    #[test]
    fn transform_rejects_bad_scale() {
        assert!(SimilarityTransform::new(0.0, 0.0, (0.0, 0.0)).is_err());
        assert!(SimilarityTransform::new(-1.0, 0.0, (0.0, 0.0)).is_err());
    }

    #[test]
    fn project_offset_parallel() {
        let proj = project_onto(&seg(1.0, 1.0, 3.0, 1.0), &seg(0.0, 0.0, 4.0, 0.0));
        assert_close(proj.angle, 0.0, 1e-12);
        assert_close(proj.dist, 1.0, 1e-12);
        assert_close(proj.t_p, 0.25, 1e-12);
        assert_close(proj.t_q, 0.75, 1e-12);
        assert_close(proj.ref_length, 4.0, 1e-12);
    }

    #[test]
    fn project_self() {
        let s = seg(2.0, 5.0, 9.0, -1.0);
        let proj = project_onto(&s, &s);
        assert_close(proj.angle, 0.0, 1e-12);
        assert_close(proj.dist, 0.0, 1e-9);
        assert_close(proj.t_p, 0.0, 1e-12);
        assert_close(proj.t_q, 1.0, 1e-12);
    }

    #[test]
    fn project_perpendicular() {
        let proj = project_onto(&seg(0.0, 0.0, 0.0, 2.0), &seg(0.0, 0.0, 4.0, 0.0));
        assert_close(proj.angle, FRAC_PI_2, 1e-12);
        assert_close(proj.t_p, 0.0, 1e-12);
        assert_close(proj.t_q, 0.0, 1e-12);
        // mean of the endpoint distances 0 and 2
        assert_close(proj.dist, 1.0, 1e-12);
    }

    #[test]
    fn aabb_iou_cases() {
        let unit = Aabb::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
        assert_close(unit.iou(&unit), 1.0, 0.0);
        let far = Aabb::new(Point2::new(5.0, 5.0), Point2::new(6.0, 6.0));
        assert_close(unit.iou(&far), 0.0, 0.0);
        let shifted = Aabb::new(Point2::new(0.5, 0.0), Point2::new(1.5, 1.0));
        assert_close(unit.iou(&shifted), 1.0 / 3.0, 1e-12);
    }

    prop_compose! {
        fn arb_point()(x in -500.0f64..500.0, y in -500.0f64..500.0) -> Point2 {
            Point2::new(x, y)
        }
    }

    prop_compose! {
        fn arb_segment()(p in arb_point(), q in arb_point()) -> Option<Segment> {
            Segment::new(p, q).ok()
        }
    }

    prop_compose! {
        fn arb_transform()(
            scale in 0.1f64..8.0,
            rotation in -PI..PI,
            tx in -200.0f64..200.0,
            ty in -200.0f64..200.0,
        ) -> SimilarityTransform {
            SimilarityTransform::new(scale, rotation, (tx, ty)).unwrap()
        }
    }

    proptest! {
        #[test]
        fn prop_solve_apply_round_trip(src in arb_segment(), dst in arb_segment()) {
            let (src, dst) = match (src, dst) {
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(()),
            };
            let t = solve_similarity(&src, &dst);
            let mapped = apply_transform(&t, &src);
            prop_assert!(mapped.p().distance_to(dst.p()) < 1e-9);
            prop_assert!(mapped.q().distance_to(dst.q()) < 1e-9);
        }

        #[test]
        fn prop_solve_composes(
            a in arb_segment(), b in arb_segment(), c in arb_segment()
        ) {
            let (a, b, c) = match (a, b, c) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => return Ok(()),
            };
            let ab = solve_similarity(&a, &b);
            let bc = solve_similarity(&b, &c);
            let ac = solve_similarity(&a, &c);
            let composed = bc.compose(&ab);
            for corner in [a.p(), a.q(), a.midpoint()] {
                let lhs = composed.apply_point(corner);
                let rhs = ac.apply_point(corner);
                prop_assert!(lhs.distance_to(rhs) < 1e-9 * (1.0 + rhs.x.abs() + rhs.y.abs()));
            }
        }

        #[test]
        fn prop_inverse_is_identity(t in arb_transform(), p in arb_point()) {
            let back = t.inverse().apply_point(t.apply_point(p));
            prop_assert!(back.distance_to(p) < 1e-9 * (1.0 + p.x.abs() + p.y.abs()));
        }

        #[test]
        fn prop_projection_reversal_swaps_params(
            cd in arb_segment(), ab in arb_segment()
        ) {
            let (cd, ab) = match (cd, ab) {
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(()),
            };
            let fwd = project_onto(&cd, &ab);
            let rev = project_onto(&cd.reversed(), &ab);
            prop_assert!((fwd.t_p - rev.t_q).abs() < 1e-12);
            prop_assert!((fwd.t_q - rev.t_p).abs() < 1e-12);
            prop_assert!((fwd.angle - rev.angle).abs() < 1e-12);
            prop_assert!((fwd.dist - rev.dist).abs() < 1e-12);
        }

        #[test]
        fn prop_projection_invariants(cd in arb_segment(), ab in arb_segment()) {
            let (cd, ab) = match (cd, ab) {
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(()),
            };
            let proj = project_onto(&cd, &ab);
            prop_assert!(proj.angle >= 0.0 && proj.angle <= FRAC_PI_2 + 1e-12);
            prop_assert!(proj.dist >= 0.0);
            prop_assert!(proj.ref_length > 0.0);
        }

        #[test]
        fn prop_projection_similarity_invariant(
            cd in arb_segment(), ab in arb_segment(), t in arb_transform()
        ) {
            let (cd, ab) = match (cd, ab) {
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(()),
            };
            let base = project_onto(&cd, &ab);
            let moved = project_onto(&t.apply_segment(&cd), &t.apply_segment(&ab));
            let tol = 1e-8 * (1.0 + base.ref_length);
            prop_assert!((moved.angle - base.angle).abs() < 1e-7);
            prop_assert!((moved.t_p - base.t_p).abs() < tol);
            prop_assert!((moved.t_q - base.t_q).abs() < tol);
            // distance scales with the transform; the ratio is invariant
            prop_assert!((moved.dist - base.dist * t.scale()).abs() < tol * t.scale());
            prop_assert!(
                (moved.dist / moved.ref_length - base.dist / base.ref_length).abs() < 1e-8
            );
        }
    }
}
