//! Scoring detector output against ground-truth boxes.
//!
//! Detections are matched one-to-one to ground-truth boxes greedily in rank
//! order, a precision/recall point is produced at every distinct score, and
//! the curve is summarized by its equal-error rate — the value where
//! precision and recall meet, read off the piecewise-linear curve.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::EvalError;
use crate::geometry::Aabb;

/// One detection reduced to what evaluation needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoredBox {
    pub score: f64,
    pub bbox: Aabb,
}

/// How a detection qualifies as hitting a ground-truth box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatchCriterion {
    /// Intersection-over-union at least this value.
    Iou(f64),
    /// Intersection covering at least half the ground-truth box's area.
    HalfGroundTruth,
}

impl MatchCriterion {
    /// The criterion's own overlap measure; a detection hits a box when the
    /// measure reaches the qualifying value.
    fn measure(&self, det: &Aabb, gt: &Aabb) -> f64 {
        match self {
            MatchCriterion::Iou(_) => det.iou(gt),
            MatchCriterion::HalfGroundTruth => {
                let area = gt.area();
                if area <= 0.0 {
                    0.0
                } else {
                    det.intersection_area(gt) / area
                }
            }
        }
    }

    fn qualifies(&self, measure: f64) -> bool {
        match self {
            MatchCriterion::Iou(t) => measure >= *t,
            MatchCriterion::HalfGroundTruth => measure >= 0.5,
        }
    }
}

impl FromStr for MatchCriterion {
    type Err = String;

    /// Accepts `half-gt` or `iou:<value>` (e.g. `iou:0.5`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "half-gt" {
            return Ok(MatchCriterion::HalfGroundTruth);
        }
        if let Some(v) = s.strip_prefix("iou:") {
            let t: f64 = v.parse().map_err(|_| format!("bad iou threshold {v:?}"))?;
            if !(0.0..=1.0).contains(&t) {
                return Err(format!("iou threshold {t} outside 0..=1"));
            }
            return Ok(MatchCriterion::Iou(t));
        }
        Err(format!(
            "unknown criterion {s:?} (expected half-gt or iou:<x>)"
        ))
    }
}

/// Ground-truth boxes per image id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroundTruth {
    boxes: BTreeMap<String, Vec<Aabb>>,
}

impl GroundTruth {
    /// Parses lines of `image_id xmin ymin xmax ymax`. Blank lines and
    /// lines starting with `#` are skipped; coordinates may come in either
    /// order per axis.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut boxes: BTreeMap<String, Vec<Aabb>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(EvalError::Parse {
                    line,
                    message: format!("expected 5 fields, got {}", fields.len()),
                });
            }
            let mut coords = [0.0f64; 4];
            for (k, f) in fields[1..].iter().enumerate() {
                coords[k] = f.parse().map_err(|_| EvalError::Parse {
                    line,
                    message: format!("bad coordinate {f:?}"),
                })?;
            }
            let bbox = Aabb::new(
                crate::geometry::Point2::new(coords[0].min(coords[2]), coords[1].min(coords[3])),
                crate::geometry::Point2::new(coords[0].max(coords[2]), coords[1].max(coords[3])),
            );
            boxes.entry(fields[0].to_string()).or_default().push(bbox);
        }
        Ok(GroundTruth { boxes })
    }

    pub fn insert(&mut self, image: impl Into<String>, bbox: Aabb) {
        self.boxes.entry(image.into()).or_default().push(bbox);
    }

    pub fn images(&self) -> impl Iterator<Item = (&str, &[Aabb])> {
        self.boxes.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn get(&self, image: &str) -> Option<&[Aabb]> {
        self.boxes.get(image).map(Vec::as_slice)
    }

    pub fn total_boxes(&self) -> usize {
        self.boxes.values().map(Vec::len).sum()
    }
}

/// Greedy one-to-one matching. Detections must already be in rank order
/// (best first); each takes the qualifying unmatched box with the highest
/// overlap measure, ties going to the lowest box index. Returns the matched
/// box index per detection.
pub fn match_detections(
    detections: &[ScoredBox],
    gts: &[Aabb],
    criterion: &MatchCriterion,
) -> Vec<Option<usize>> {
    let mut taken = vec![false; gts.len()];
    detections
        .iter()
        .map(|det| {
            let mut best: Option<(usize, f64)> = None;
            for (i, gt) in gts.iter().enumerate() {
                if taken[i] {
                    continue;
                }
                let m = criterion.measure(&det.bbox, gt);
                if criterion.qualifies(m) && best.map_or(true, |(_, bm)| m > bm) {
                    best = Some((i, m));
                }
            }
            best.map(|(i, _)| {
                taken[i] = true;
                i
            })
        })
        .collect()
}

/// One point of the precision/recall sweep: the metrics over all
/// detections scoring at least `threshold`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Sweeps the score threshold over every distinct detection score
/// (descending) and reports precision and recall at each.
///
/// `detections` maps image id to that image's detections in rank order.
/// Every ground-truth image must be present (an image with no detections
/// still needs an empty entry); extra images count their detections as
/// false positives.
pub fn pr_curve(
    detections: &BTreeMap<String, Vec<ScoredBox>>,
    gt: &GroundTruth,
    criterion: &MatchCriterion,
) -> Result<Vec<PrPoint>, EvalError> {
    if gt.total_boxes() == 0 {
        return Err(EvalError::EmptyGroundTruth);
    }
    let missing: Vec<&str> = gt
        .images()
        .map(|(id, _)| id)
        .filter(|id| !detections.contains_key(*id))
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingImages(missing.join(", ")));
    }

    // global rank order: score descending, ties by image then index, which
    // preserves each image's own ordering
    let mut ranked: Vec<(&str, usize, f64)> = detections
        .iter()
        .flat_map(|(id, dets)| {
            dets.iter()
                .enumerate()
                .map(move |(i, d)| (id.as_str(), i, d.score))
        })
        .collect();
    ranked.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(b.0)).then(a.1.cmp(&b.1)));

    // greedy matching is prefix-stable, so the sweep can be incremental
    let mut taken: BTreeMap<&str, Vec<bool>> = gt
        .images()
        .map(|(id, boxes)| (id, vec![false; boxes.len()]))
        .collect();
    let total_gt = gt.total_boxes() as f64;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut curve = Vec::new();

    let mut i = 0;
    while i < ranked.len() {
        let threshold = ranked[i].2;
        // consume the whole group of equal scores before emitting a point
        while i < ranked.len() && ranked[i].2 == threshold {
            let (id, det_index, _) = ranked[i];
            let det = &detections[id][det_index];
            let hit = match (gt.get(id), taken.get_mut(id)) {
                (Some(boxes), Some(flags)) => {
                    let mut best: Option<(usize, f64)> = None;
                    for (k, gt_box) in boxes.iter().enumerate() {
                        if flags[k] {
                            continue;
                        }
                        let m = criterion.measure(&det.bbox, gt_box);
                        if criterion.qualifies(m) && best.map_or(true, |(_, bm)| m > bm) {
                            best = Some((k, m));
                        }
                    }
                    if let Some((k, _)) = best {
                        flags[k] = true;
                        true
                    } else {
                        false
                    }
                }
                _ => false, // image absent from ground truth: all false positives
            };
            if hit {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        curve.push(PrPoint {
            threshold,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / total_gt,
        });
    }
    Ok(curve)
}

/// Equal-error rate of a precision/recall curve: the value at which
/// precision equals recall, interpolated linearly along the curve. The
/// curve is anchored at a virtual high-threshold point with precision 1 and
/// recall 0, so an empty curve scores 0.
pub fn eer(curve: &[PrPoint]) -> f64 {
    let mut best: f64 = 0.0;
    let mut prev = (1.0f64, 0.0f64);
    for pt in curve {
        let cur = (pt.precision, pt.recall);
        best = best.max(prev.0.min(prev.1)).max(cur.0.min(cur.1));
        // where the segment crosses precision == recall
        let denom = (cur.0 - prev.0) - (cur.1 - prev.1);
        if denom.abs() > 1e-12 {
            let alpha = (prev.1 - prev.0) / denom;
            if (0.0..=1.0).contains(&alpha) {
                best = best.max(prev.0 + alpha * (cur.0 - prev.0));
            }
        }
        prev = cur;
    }
    best
}

/// Renders the sweep as `threshold,precision,recall` CSV with a header.
pub fn pr_csv(curve: &[PrPoint]) -> String {
    let mut out = String::from("threshold,precision,recall\n");
    for pt in curve {
        let _ = writeln!(out, "{},{},{}", pt.threshold, pt.precision, pt.recall);
    }
    out
}
