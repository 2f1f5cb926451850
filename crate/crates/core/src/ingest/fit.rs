//! Piecewise-linear fitting of pixel chains.
//!
//! Classic split-on-max-deviation: a chain is approximated by the chord
//! between its ends; if some pixel strays too far from the chord, the chain
//! is split there and both halves are fitted again. The result is the
//! coarsest piecewise-linear cover whose every pixel stays within the
//! tolerance of its piece.

use super::link::PixelChain;
use crate::geometry::Segment;

/// Fits straight segments to each chain. `max_deviation` bounds the
/// distance from any chain pixel to its fitted segment; pieces whose chord
/// is shorter than `min_length` are dropped. Chains with fewer than two
/// pixels produce nothing.
pub fn fit_segments(chains: &[PixelChain], max_deviation: f64, min_length: f64) -> Vec<Segment> {
    let mut out = Vec::new();
    for chain in chains {
        if chain.len() < 2 {
            continue;
        }
        let points: Vec<(f64, f64)> = chain.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
        for window in breakpoints(&points, max_deviation).windows(2) {
            let (a, b) = (points[window[0]], points[window[1]]);
            // chain pixels are distinct, so the chord cannot degenerate
            let seg = Segment::from_coords(a.0, a.1, b.0, b.1).expect("distinct chain pixels");
            if seg.length() >= min_length {
                out.push(seg);
            }
        }
    }
    out
}

/// Indices that partition `points` into maximal runs whose pixels all lie
/// within `max_deviation` of the run's chord. Always starts with `0` and
/// ends with `points.len() - 1`; ties on the split position go to the
/// lowest index.
pub(super) fn breakpoints(points: &[(f64, f64)], max_deviation: f64) -> Vec<usize> {
    let mut cuts = vec![0];
    let mut stack = vec![(0usize, points.len() - 1)];
    while let Some((lo, hi)) = stack.pop() {
        match farthest_from_chord(points, lo, hi, max_deviation) {
            Some(mid) => {
                // left half first so cut indices come out in order
                stack.push((mid, hi));
                stack.push((lo, mid));
            }
            None => cuts.push(hi),
        }
    }
    cuts
}

/// Index of the interior point farthest from the chord `points[lo] ..
/// points[hi]`, if that distance exceeds `max_deviation`.
fn farthest_from_chord(
    points: &[(f64, f64)],
    lo: usize,
    hi: usize,
    max_deviation: f64,
) -> Option<usize> {
    let mut worst = max_deviation;
    let mut index = None;
    for i in lo + 1..hi {
        let d = distance_to_chord(points[i], points[lo], points[hi]);
        if d > worst {
            worst = d;
            index = Some(i);
        }
    }
    index
}

/// Distance from `p` to the finite chord `a..b` (projection clamped to the
/// chord).
fn distance_to_chord(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (abx, aby) = (b.0 - a.0, b.1 - a.1);
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * abx + (p.1 - a.1) * aby) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.0 + t * abx - p.0, a.1 + t * aby - p.1);
    cx.hypot(cy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(points: &[(usize, usize)]) -> PixelChain {
        points.to_vec()
    }

    #[test]
    fn straight_chain_is_one_segment() {
        let chains = vec![chain(&[(1, 5), (2, 5), (3, 5), (4, 5), (5, 5), (6, 5)])];
        let segs = fit_segments(&chains, 1.0, 0.0);
        assert_eq!(segs.len(), 1);
        assert_eq!((segs[0].p().x, segs[0].p().y), (1.0, 5.0));
        assert_eq!((segs[0].q().x, segs[0].q().y), (6.0, 5.0));
    }

    #[test]
    fn l_shape_splits_at_the_corner() {
        let mut pts: Vec<(usize, usize)> = (0..10).map(|i| (0, i)).collect();
        pts.extend((1..10).map(|i| (i, 9)));
        let segs = fit_segments(&[pts], 1.0, 0.0);
        assert_eq!(segs.len(), 2);
        // the split lands on the corner pixel
        assert_eq!((segs[0].q().x, segs[0].q().y), (0.0, 9.0));
        assert_eq!((segs[1].p().x, segs[1].p().y), (0.0, 9.0));
    }

    #[test]
    fn small_wiggle_within_tolerance_stays_one_segment() {
        let pts: Vec<(usize, usize)> = (0..20)
            .map(|i| (i, if i % 3 == 0 { 11 } else { 10 }))
            .collect();
        let segs = fit_segments(&[pts], 2.0, 0.0);
        assert_eq!(segs.len(), 1);
    }

    #[test]
    fn min_length_drops_short_chords() {
        let chains = vec![chain(&[(0, 0), (1, 1), (2, 2)])];
        assert!(fit_segments(&chains, 1.0, 8.0).is_empty());
        assert_eq!(fit_segments(&chains, 1.0, 0.0).len(), 1);
    }

    #[test]
    fn every_pixel_stays_within_deviation_of_its_piece() {
        // a wandering chain: sine-ish wave rasterized by hand
        let pts: Vec<(f64, f64)> = (0..120)
            .map(|i| {
                let x = i as f64;
                (x, (x * 0.17).sin() * 9.0 + 20.0)
            })
            .collect();
        let max_dev = 1.5;
        let cuts = breakpoints(&pts, max_dev);
        assert!(cuts.len() >= 3, "the wave cannot be a single chord");
        assert_eq!(*cuts.first().unwrap(), 0);
        assert_eq!(*cuts.last().unwrap(), pts.len() - 1);
        assert!(cuts.windows(2).all(|w| w[0] < w[1]), "cuts not sorted");
        for w in cuts.windows(2) {
            for i in w[0]..=w[1] {
                let d = distance_to_chord(pts[i], pts[w[0]], pts[w[1]]);
                assert!(d <= max_dev, "pixel {i} deviates {d}");
            }
        }
    }

    #[test]
    fn circle_fits_a_sensible_polygon() {
        // rasterize a radius-40 circle as an ordered pixel ring
        let mut pts: Vec<(usize, usize)> = Vec::new();
        let n = 2000;
        for k in 0..n {
            let t = k as f64 / n as f64 * std::f64::consts::TAU;
            let p = (
                (60.0 + 40.0 * t.cos()).round() as usize,
                (60.0 + 40.0 * t.sin()).round() as usize,
            );
            if pts.last() != Some(&p) && !pts.contains(&p) {
                pts.push(p);
            }
        }
        let segs = fit_segments(&[pts.clone()], 2.0, 0.0);
        // chord geometry: each piece can span at most the arc whose sagitta
        // is the tolerance, so a full circle needs at least ~10 pieces; the
        // splitter should not shatter it either
        assert!(
            (8..=32).contains(&segs.len()),
            "circle split into {} segments",
            segs.len()
        );
        let total: f64 = segs.iter().map(|s| s.length()).sum();
        let circumference = std::f64::consts::TAU * 40.0;
        assert!((total - circumference).abs() < 0.15 * circumference);
    }
}
