//! Reduction of a raster image to a line-segment set.
//!
//! The stages are classical and deterministic:
//!
//! 1. [`canny::detect_edges`] — Gaussian smoothing, Sobel gradients,
//!    non-maximum suppression, and hysteresis thresholding produce a binary
//!    edge map.
//! 2. [`link::link_edges`] — edge pixels are chained into ordered curves;
//!    junctions terminate chains so every pixel lands in exactly one chain.
//! 3. [`fit::fit_segments`] — each chain is recursively split at its point
//!    of maximum deviation from the chord until every piece is straight
//!    within a tolerance.
//! 4. [`merge::merge_collinear`] — fragments that continue one another on a
//!    common carrier are fused back into single segments.
//!
//! Short leftovers are dropped only after merging, so a long edge broken by
//! noise or a junction still survives as one segment.

pub mod canny;
pub mod fit;
pub mod link;
pub mod merge;

use std::path::Path;

use crate::error::IngestError;
use crate::geometry::SegmentSet;

pub use canny::detect_edges;
pub use fit::fit_segments;
pub use link::{link_edges, PixelChain};
pub use merge::merge_collinear;

/// Tunables for [`segments_from_image`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IngestParams {
    /// Hysteresis low threshold, as a fraction of the maximum gradient
    /// magnitude in the image.
    pub canny_low: f32,
    /// Hysteresis high threshold, same normalization.
    pub canny_high: f32,
    /// Segments shorter than this (pixels) are discarded at the end.
    pub min_segment_length: f64,
    /// Maximum distance (pixels) an edge pixel may sit from the segment
    /// fitted through its chain.
    pub fit_deviation: f64,
    /// Largest carrier-angle difference (radians) between two fragments
    /// that may merge.
    pub merge_angle: f64,
    /// Largest along-carrier gap (pixels) between two fragments that may
    /// merge.
    pub merge_gap: f64,
}

impl Default for IngestParams {
    fn default() -> Self {
        IngestParams {
            canny_low: 0.1,
            canny_high: 0.2,
            min_segment_length: 8.0,
            fit_deviation: 2.0,
            merge_angle: 5.0_f64.to_radians(),
            merge_gap: 3.0,
        }
    }
}

/// Grayscale image with `f32` intensities in `[0, 255]`, row-major.
#[derive(Clone, Debug)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Self {
        GrayImage {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            data,
        }
    }

    /// Decodes an image file and converts it to luminance
    /// (`0.299 R + 0.587 G + 0.114 B`).
    pub fn load(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let rgb = image::open(path)?.to_rgb8();
        let (width, height) = (rgb.width() as usize, rgb.height() as usize);
        let data = rgb
            .pixels()
            .map(|p| 0.299 * p.0[0] as f32 + 0.587 * p.0[1] as f32 + 0.114 * p.0[2] as f32)
            .collect();
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f32) {
        self.data[y * self.width + x] = value;
    }
}

/// Binary edge mask produced by [`detect_edges`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl EdgeMap {
    pub fn new(width: usize, height: usize) -> Self {
        EdgeMap {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    /// Builds a map from rows of `.` (background) and `#` (edge); handy in
    /// tests.
    pub fn from_rows(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut map = EdgeMap::new(width, height);
        for (y, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), width, "ragged rows");
            for (x, c) in row.bytes().enumerate() {
                if c == b'#' {
                    map.set(x, y, true);
                }
            }
        }
        map
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn edge_count(&self) -> usize {
        self.data.iter().filter(|&&e| e).count()
    }

    /// Edge pixels in row-major order.
    pub fn edge_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |y| {
            (0..self.width).filter_map(move |x| self.is_edge(x, y).then_some((x, y)))
        })
    }
}

/// Runs the whole reduction: edges, chains, straight pieces, merged
/// segments, and a final minimum-length filter.
///
/// Length filtering happens only after merging (fitting runs with no length
/// floor), so fragments of a long edge are given the chance to fuse before
/// being judged too short. A blank or featureless image produces an empty
/// set.
pub fn segments_from_image(
    img: &GrayImage,
    name: impl Into<String>,
    params: &IngestParams,
) -> SegmentSet {
    let edges = detect_edges(img, params.canny_low, params.canny_high);
    let chains = link_edges(&edges);
    let fitted = fit_segments(&chains, params.fit_deviation, 0.0);
    let merged = merge_collinear(
        fitted,
        params.merge_angle,
        params.merge_gap,
        params.fit_deviation,
    );
    let kept = merged
        .into_iter()
        .filter(|s| s.length() >= params.min_segment_length)
        .collect();
    SegmentSet::new(name, kept)
}
