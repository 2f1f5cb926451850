//! Shape-template object detection from line-segment evidence.
//!
//! The detector locates instances of a segment-based shape template inside a
//! cluttered segment scene, tolerating translation, rotation, and scale. The
//! pipeline has four stages:
//!
//! 1. **Ingest** ([`ingest`]): a raster image is reduced to a set of line
//!    segments — edge detection, chaining of edge pixels into curves, and
//!    piecewise-linear fitting with collinear merging.
//! 2. **Hypothesis enumeration** ([`detector`]): every pairing of a template
//!    segment with a scene segment (in both endpoint orders) pins down one
//!    similarity transform, yielding a candidate placement of the whole
//!    template.
//! 3. **Evidence collection** ([`evidence`]): each projected template
//!    segment is compared against nearby scene segments with a
//!    scale-invariant distance; each scene segment supports at most one
//!    template segment of a hypothesis.
//! 4. **Scoring and selection** ([`scoring`], [`detector`]): the collected
//!    evidence is folded into a normalized similarity in `[0, 1]`, sanity
//!    checked by an area-coverage filter, and the surviving hypotheses are
//!    deduplicated by non-maximum suppression.
//!
//! [`eval`] measures detector output against ground-truth boxes
//! (precision/recall sweeps, equal-error rate), [`formats`] reads and writes
//! the plain-text segment/detection files used by the CLI, and [`render`]
//! draws detections over a scene as SVG.

pub mod detector;
pub mod error;
pub mod eval;
pub mod evidence;
pub mod formats;
pub mod geometry;
pub mod ingest;
pub mod render;
pub mod scoring;

pub use detector::{
    detect, enumerate_hypotheses, DetectParams, Detection, Hypothesis, HypothesisOrigin,
};
pub use error::{EvalError, FormatError, GeometryError, IngestError, RenderError};
pub use eval::{
    eer, match_detections, pr_csv, pr_curve, GroundTruth, MatchCriterion, PrPoint, ScoredBox,
};
pub use evidence::{
    assign_evidence, evidence_distance, match_length, passes_threshold, position_term,
    EvidenceLabeling, EvidenceParams, EvidenceScore,
};
pub use formats::{
    load_detections, load_segments, parse_detections, parse_segments, save_detections,
    save_segments, write_detections, write_segments, DetectionRecord,
};
pub use geometry::{
    apply_transform, project_onto, solve_similarity, Aabb, Point2, Projection, Segment, SegmentSet,
    SimilarityTransform,
};
pub use ingest::{segments_from_image, EdgeMap, GrayImage, IngestParams};
pub use render::render_svg;
pub use scoring::{area_filter, center_point, similarity, AreaReport, ScoreBreakdown};
