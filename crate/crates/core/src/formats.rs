//! Plain-text interchange formats: segment sets and detection records.
//!
//! Both formats are line-oriented, whitespace-separated, and carry a
//! version tag so they can evolve. Floats are written with Rust's shortest
//! round-trip formatting, so write → parse is lossless. Parse errors report
//! the offending line number.
//!
//! Segment set:
//!
//! ```text
//! segset v1 <name> <count>
//! <x1> <y1> <x2> <y2>        (count lines)
//! ```
//!
//! Detection list:
//!
//! ```text
//! detections v1 <count>
//! detection <k>
//! transform <scale> <rotation> <tx> <ty>
//! sim <value>
//! gamma <supported-count>
//! area <evidence> <hypothesis>
//! bbox <x0> <y0> <x1> <y1>
//! hyp <n>
//! <x1> <y1> <x2> <y2>        (n lines)
//! labels <n>
//! <scene-index> <template-index>   (n lines)
//! end
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::detector::Detection;
use crate::error::FormatError;
use crate::geometry::{Aabb, Point2, Segment, SegmentSet, SimilarityTransform};

/// Replaces whitespace so a set name stays a single token in the header.
fn sanitize_name(name: &str) -> String {
    let cleaned: String = name.split_whitespace().collect::<Vec<_>>().join("-");
    if cleaned.is_empty() {
        "unnamed".to_string()
    } else {
        cleaned
    }
}

/// Serializes a segment set. The name is sanitized to a single token.
pub fn write_segments(set: &SegmentSet) -> String {
    let mut out = format!("segset v1 {} {}\n", sanitize_name(set.name()), set.len());
    for seg in set.iter() {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            seg.p().x,
            seg.p().y,
            seg.q().x,
            seg.q().y
        );
    }
    out
}

/// Parses a segment set, validating every segment.
pub fn parse_segments(text: &str) -> Result<SegmentSet, FormatError> {
    let mut cursor = Cursor::new(text);
    let header = cursor.next_line("segset header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "segset" || fields[1] != "v1" {
        return Err(FormatError::parse(
            cursor.line,
            "expected header `segset v1 <name> <count>`",
        ));
    }
    let name = fields[2].to_string();
    let count: usize = fields[3]
        .parse()
        .map_err(|_| FormatError::parse(cursor.line, format!("bad count {:?}", fields[3])))?;

    let mut segments = Vec::with_capacity(count);
    for _ in 0..count {
        let line = cursor.next_line("segment line")?;
        let nums = parse_floats::<4>(line, cursor.line)?;
        let seg = Segment::from_coords(nums[0], nums[1], nums[2], nums[3])
            .map_err(|e| FormatError::parse(cursor.line, e.to_string()))?;
        segments.push(seg);
    }
    cursor.expect_end()?;
    Ok(SegmentSet::new(name, segments))
}

pub fn save_segments(path: impl AsRef<Path>, set: &SegmentSet) -> Result<(), FormatError> {
    fs::write(path, write_segments(set))?;
    Ok(())
}

pub fn load_segments(path: impl AsRef<Path>) -> Result<SegmentSet, FormatError> {
    parse_segments(&fs::read_to_string(path)?)
}

/// A detection flattened for interchange: the fitted placement, its scores,
/// the projected template segments, and the sparse evidence pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionRecord {
    pub transform: SimilarityTransform,
    pub sim: f64,
    /// Number of template segments with at least one supporter.
    pub supported: usize,
    pub area_evidence: f64,
    pub area_hypothesis: f64,
    pub bbox: Aabb,
    /// Projected template segments, in template order.
    pub segments: Vec<Segment>,
    /// `(scene index, template index)` pairs for every supporting segment.
    pub labels: Vec<(usize, usize)>,
}

impl From<&Detection> for DetectionRecord {
    fn from(det: &Detection) -> Self {
        DetectionRecord {
            transform: det.transform,
            sim: det.score.sim,
            supported: det.score.supported,
            area_evidence: det.area.area_evidence,
            area_hypothesis: det.area.area_hypothesis,
            bbox: det.bbox,
            segments: det.segments.clone(),
            labels: det.labeling.pairs().collect(),
        }
    }
}

/// Serializes a detection list.
pub fn write_detections(records: &[DetectionRecord]) -> String {
    let mut out = format!("detections v1 {}\n", records.len());
    for (k, rec) in records.iter().enumerate() {
        let _ = writeln!(out, "detection {k}");
        let (tx, ty) = rec.transform.translation();
        let _ = writeln!(
            out,
            "transform {} {} {} {}",
            rec.transform.scale(),
            rec.transform.rotation(),
            tx,
            ty
        );
        let _ = writeln!(out, "sim {}", rec.sim);
        let _ = writeln!(out, "gamma {}", rec.supported);
        let _ = writeln!(out, "area {} {}", rec.area_evidence, rec.area_hypothesis);
        let _ = writeln!(
            out,
            "bbox {} {} {} {}",
            rec.bbox.min.x, rec.bbox.min.y, rec.bbox.max.x, rec.bbox.max.y
        );
        let _ = writeln!(out, "hyp {}", rec.segments.len());
        for seg in &rec.segments {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                seg.p().x,
                seg.p().y,
                seg.q().x,
                seg.q().y
            );
        }
        let _ = writeln!(out, "labels {}", rec.labels.len());
        for (scene, tpl) in &rec.labels {
            let _ = writeln!(out, "{scene} {tpl}");
        }
        out.push_str("end\n");
    }
    out
}

/// Parses a detection list written by [`write_detections`].
pub fn parse_detections(text: &str) -> Result<Vec<DetectionRecord>, FormatError> {
    let mut cursor = Cursor::new(text);
    let header = cursor.next_line("detections header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "detections" || fields[1] != "v1" {
        return Err(FormatError::parse(
            cursor.line,
            "expected header `detections v1 <count>`",
        ));
    }
    let count: usize = fields[2]
        .parse()
        .map_err(|_| FormatError::parse(cursor.line, format!("bad count {:?}", fields[2])))?;

    let mut records = Vec::with_capacity(count);
    for k in 0..count {
        cursor.expect_tag("detection", &[&k.to_string()])?;
        let t = cursor.tagged_floats::<4>("transform")?;
        let transform = SimilarityTransform::new(t[0], t[1], (t[2], t[3]))
            .map_err(|e| FormatError::parse(cursor.line, e.to_string()))?;
        let sim = cursor.tagged_floats::<1>("sim")?[0];
        let supported = cursor.tagged_usize("gamma")?;
        let area = cursor.tagged_floats::<2>("area")?;
        let b = cursor.tagged_floats::<4>("bbox")?;
        let bbox = Aabb::new(Point2::new(b[0], b[1]), Point2::new(b[2], b[3]));

        let n_segs = cursor.tagged_usize("hyp")?;
        let mut segments = Vec::with_capacity(n_segs);
        for _ in 0..n_segs {
            let line = cursor.next_line("hypothesis segment")?;
            let nums = parse_floats::<4>(line, cursor.line)?;
            segments.push(
                Segment::from_coords(nums[0], nums[1], nums[2], nums[3])
                    .map_err(|e| FormatError::parse(cursor.line, e.to_string()))?,
            );
        }

        let n_labels = cursor.tagged_usize("labels")?;
        let mut labels = Vec::with_capacity(n_labels);
        for _ in 0..n_labels {
            let line = cursor.next_line("label pair")?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(FormatError::parse(cursor.line, "expected 2 indices"));
            }
            let scene = fields[0].parse().map_err(|_| {
                FormatError::parse(cursor.line, format!("bad index {:?}", fields[0]))
            })?;
            let tpl = fields[1].parse().map_err(|_| {
                FormatError::parse(cursor.line, format!("bad index {:?}", fields[1]))
            })?;
            labels.push((scene, tpl));
        }

        let end = cursor.next_line("end marker")?;
        if end.trim() != "end" {
            return Err(FormatError::parse(cursor.line, "expected `end`"));
        }

        records.push(DetectionRecord {
            transform,
            sim,
            supported,
            area_evidence: area[0],
            area_hypothesis: area[1],
            bbox,
            segments,
            labels,
        });
    }
    cursor.expect_end()?;
    Ok(records)
}

pub fn save_detections(
    path: impl AsRef<Path>,
    records: &[DetectionRecord],
) -> Result<(), FormatError> {
    fs::write(path, write_detections(records))?;
    Ok(())
}

pub fn load_detections(path: impl AsRef<Path>) -> Result<Vec<DetectionRecord>, FormatError> {
    parse_detections(&fs::read_to_string(path)?)
}

/// Line-by-line reader that tracks the current line number for error
/// reporting.
struct Cursor<'a> {
    lines: std::str::Lines<'a>,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            lines: text.lines(),
            line: 0,
        }
    }

    fn next_line(&mut self, expected: &str) -> Result<&'a str, FormatError> {
        match self.lines.next() {
            Some(l) => {
                self.line += 1;
                Ok(l)
            }
            None => Err(FormatError::Truncated {
                expected: expected.to_string(),
            }),
        }
    }

    /// Reads a line of the form `<tag> <args...>` with exact arguments.
    fn expect_tag(&mut self, tag: &str, args: &[&str]) -> Result<(), FormatError> {
        let line = self.next_line(tag)?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 1 + args.len() || fields[0] != tag || &fields[1..] != args {
            return Err(FormatError::parse(
                self.line,
                format!("expected `{tag} {}`", args.join(" ")),
            ));
        }
        Ok(())
    }

    /// Reads `<tag>` followed by exactly `N` floats.
    fn tagged_floats<const N: usize>(&mut self, tag: &str) -> Result<[f64; N], FormatError> {
        let line = self.next_line(tag)?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some(tag) {
            return Err(FormatError::parse(
                self.line,
                format!("expected `{tag} ...`"),
            ));
        }
        let rest: Vec<&str> = fields.collect();
        parse_floats_from(&rest, self.line)
    }

    /// Reads `<tag> <usize>`.
    fn tagged_usize(&mut self, tag: &str) -> Result<usize, FormatError> {
        let line = self.next_line(tag)?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 || fields[0] != tag {
            return Err(FormatError::parse(
                self.line,
                format!("expected `{tag} <count>`"),
            ));
        }
        fields[1]
            .parse()
            .map_err(|_| FormatError::parse(self.line, format!("bad count {:?}", fields[1])))
    }

    fn expect_end(&mut self) -> Result<(), FormatError> {
        match self.lines.next() {
            None => Ok(()),
            Some(extra) if extra.trim().is_empty() => self.expect_end(),
            Some(extra) => Err(FormatError::parse(
                self.line + 1,
                format!("unexpected trailing content {extra:?}"),
            )),
        }
    }
}

fn parse_floats<const N: usize>(line: &str, line_no: usize) -> Result<[f64; N], FormatError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    parse_floats_from(&fields, line_no)
}

fn parse_floats_from<const N: usize>(
    fields: &[&str],
    line_no: usize,
) -> Result<[f64; N], FormatError> {
    if fields.len() != N {
        return Err(FormatError::parse(
            line_no,
            format!("expected {N} numbers, got {}", fields.len()),
        ));
    }
    let mut out = [0.0; N];
    for (i, f) in fields.iter().enumerate() {
        out[i] = f
            .parse()
            .map_err(|_| FormatError::parse(line_no, format!("bad number {f:?}")))?;
    }
    Ok(out)
}
