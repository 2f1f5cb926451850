//! Error types shared across the crate.

use thiserror::Error;

/// Construction and transform-solving failures.
#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum GeometryError {
    #[error("coordinate is NaN or infinite")]
    NonFinite,
    #[error("segment endpoints coincide")]
    Degenerate,
    #[error("similarity scale must be positive, got {0}")]
    NonPositiveScale(f64),
}

/// Failures while reading or writing the plain-text segment and detection
/// formats.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unexpected end of input (expected {expected})")]
    Truncated { expected: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Failures while loading or decoding images for the segment-extraction
/// pipeline.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to load image: {0}")]
    Image(#[from] image::ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failures in detection rendering (bad cross-references between scene and
/// detection records).
#[derive(Debug, Error)]
pub enum RenderError {
    #[error("detection {detection} labels scene segment {index}, but the scene has {len}")]
    SceneIndexOutOfRange {
        detection: usize,
        index: usize,
        len: usize,
    },
    #[error("detection {detection} labels template segment {index}, but the hypothesis has {len}")]
    TemplateIndexOutOfRange {
        detection: usize,
        index: usize,
        len: usize,
    },
}

/// Failures in detection evaluation against ground truth.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("ground truth is empty")]
    EmptyGroundTruth,
    #[error("no detection results for ground-truth image(s): {0}")]
    MissingImages(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
