//! Shared fixtures for the integration suites: seeded RNG helpers and
//! synthetic templates and scenes.

use std::f64::consts::TAU;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use segmatch::{Aabb, Point2, Segment, SegmentSet, SimilarityTransform};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn seg(x1: f64, y1: f64, x2: f64, y2: f64) -> Segment {
    Segment::from_coords(x1, y1, x2, y2).unwrap()
}

/// A random segment with both endpoints in `range` (per axis) and length at
/// least `min_len`.
pub fn random_segment(rng: &mut ChaCha8Rng, range: Range<f64>, min_len: f64) -> Segment {
    loop {
        let p = Point2::new(rng.gen_range(range.clone()), rng.gen_range(range.clone()));
        let q = Point2::new(rng.gen_range(range.clone()), rng.gen_range(range.clone()));
        if p.distance_to(q) >= min_len {
            return Segment::new(p, q).unwrap();
        }
    }
}

/// `n` clutter segments with centers uniform over a `field`-sized square,
/// uniform orientation, and length uniform in `len`.
pub fn clutter(rng: &mut ChaCha8Rng, n: usize, field: f64, len: Range<f64>) -> Vec<Segment> {
    (0..n)
        .map(|_| {
            let cx = rng.gen_range(0.0..field);
            let cy = rng.gen_range(0.0..field);
            let angle = rng.gen_range(0.0..TAU);
            let half = rng.gen_range(len.clone()) / 2.0;
            let (dx, dy) = (half * angle.cos(), half * angle.sin());
            seg(cx - dx, cy - dy, cx + dx, cy + dy)
        })
        .collect()
}

/// A random similarity transform with scale in `scale` and free rotation
/// and translation.
pub fn random_transform(
    rng: &mut ChaCha8Rng,
    scale: Range<f64>,
    shift: f64,
) -> SimilarityTransform {
    SimilarityTransform::new(
        rng.gen_range(scale),
        rng.gen_range(0.0..TAU),
        (rng.gen_range(-shift..shift), rng.gen_range(-shift..shift)),
    )
    .unwrap()
}

/// A random placement of `template` whose projection lands entirely inside
/// the `field`-sized square, found by rejection sampling.
pub fn plant_in_field(
    rng: &mut ChaCha8Rng,
    template: &SegmentSet,
    scale: Range<f64>,
    field: f64,
) -> SimilarityTransform {
    loop {
        let tf = SimilarityTransform::new(
            rng.gen_range(scale.clone()),
            rng.gen_range(0.0..TAU),
            (rng.gen_range(0.0..field), rng.gen_range(0.0..field)),
        )
        .unwrap();
        let bbox = projected_bbox(template, &tf);
        if bbox.min.x >= 0.0 && bbox.min.y >= 0.0 && bbox.max.x <= field && bbox.max.y <= field {
            return tf;
        }
    }
}

pub fn projected_bbox(set: &SegmentSet, tf: &SimilarityTransform) -> Aabb {
    Aabb::from_points(
        set.iter()
            .flat_map(|s| [s.p(), s.q()])
            .map(|p| tf.apply_point(p)),
    )
    .expect("set is non-empty")
}

/// A thirty-segment angular jet silhouette: mirrored ten-edge outline plus
/// canopy, intake, fin, and spine details. No rotational self-similarity,
/// so a planted copy pins down its transform uniquely.
pub fn jet_silhouette() -> SegmentSet {
    // right-hand outline from the nose to the tail centerline
    let right: [(f64, f64); 11] = [
        (100.0, 0.0),
        (117.0, 28.0),
        (146.0, 52.0),
        (196.0, 86.0),
        (176.0, 96.0),
        (148.0, 88.0),
        (160.0, 118.0),
        (136.0, 110.0),
        (142.0, 140.0),
        (112.0, 128.0),
        (100.0, 146.0),
    ];
    let mut segs = Vec::new();
    for w in right.windows(2) {
        let ((x1, y1), (x2, y2)) = (w[0], w[1]);
        segs.push(seg(x1, y1, x2, y2));
        segs.push(seg(200.0 - x1, y1, 200.0 - x2, y2));
    }
    // canopy diamond
    segs.push(seg(100.0, 34.0, 108.0, 52.0));
    segs.push(seg(108.0, 52.0, 100.0, 70.0));
    segs.push(seg(100.0, 70.0, 92.0, 52.0));
    segs.push(seg(92.0, 52.0, 100.0, 34.0));
    // intake cheek lines
    segs.push(seg(120.0, 60.0, 132.0, 84.0));
    segs.push(seg(80.0, 60.0, 68.0, 84.0));
    // tail-fin roots
    segs.push(seg(118.0, 100.0, 126.0, 124.0));
    segs.push(seg(82.0, 100.0, 74.0, 124.0));
    // dorsal spine and rudder hinge
    segs.push(seg(100.0, 78.0, 100.0, 112.0));
    segs.push(seg(100.0, 118.0, 100.0, 134.0));
    SegmentSet::new("jet", segs)
}

/// A convex equilateral octagon with side `len` and uneven corner spacing.
/// Equal side lengths make occlusion fractions by segment count coincide
/// with fractions by total length, while the skew keeps a half-by-count
/// subset of sides from covering exactly half the area — so area checks on
/// occluded copies stay away from their decision boundary.
pub fn skewed_octagon(len: f64) -> SegmentSet {
    let dirs_deg = [0.0, 35.0, 55.0, 90.0, 180.0, 215.0, 235.0, 270.0];
    let mut segs = Vec::new();
    let (mut x, mut y) = (0.0, 0.0);
    for d in dirs_deg {
        let rad = f64::to_radians(d);
        let (nx, ny) = (x + len * rad.cos(), y + len * rad.sin());
        segs.push(seg(x, y, nx, ny));
        (x, y) = (nx, ny);
    }
    SegmentSet::new("octagon", segs)
}
