//! Command-line front end for the segment-template detector: extract
//! segments from rasters, run detection, render SVG overlays, and score
//! detection corpora against ground truth.
//!
//! Exit codes: 0 on success (`detect` additionally requires at least one
//! detection), 1 when `detect` comes up empty, 2 on any input or I/O error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use segmatch::{
    detect, eer, load_detections, load_segments, pr_csv, pr_curve, render_svg, save_segments,
    segments_from_image, write_detections, DetectParams, DetectionRecord, EvidenceParams,
    GrayImage, GroundTruth, IngestParams, MatchCriterion, ScoredBox, SegmentSet,
};

#[derive(Parser)]
#[command(
    name = "segmatch",
    version,
    about = "Detect a line-segment template in cluttered scenes",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract line segments from a raster image into a segment file
    Preprocess(PreprocessArgs),
    /// Find placements of a template among a scene's segments
    Detect(DetectArgs),
    /// Draw a scene and its detections as an SVG overlay
    Render(RenderArgs),
    /// Score a detection corpus against ground-truth boxes
    Eval(EvalArgs),
}

#[derive(Args)]
struct PreprocessArgs {
    /// Input raster image (PNG, PGM, ...)
    image: PathBuf,
    /// Output segment file
    out: PathBuf,
    /// Lower hysteresis threshold, as a fraction of the strongest gradient
    #[arg(long, default_value_t = IngestParams::default().canny_low)]
    canny_low: f32,
    /// Upper hysteresis threshold, as a fraction of the strongest gradient
    #[arg(long, default_value_t = IngestParams::default().canny_high)]
    canny_high: f32,
    /// Drop segments shorter than this many pixels
    #[arg(long, default_value_t = IngestParams::default().min_segment_length)]
    min_seg_len: f64,
    /// Maximum deviation (pixels) of an edge chain from its fitted chord
    #[arg(long, default_value_t = IngestParams::default().fit_deviation)]
    fit_dev: f64,
    /// Largest angle (degrees) between segments that may merge
    #[arg(long, default_value_t = IngestParams::default().merge_angle.to_degrees())]
    merge_angle: f64,
    /// Largest gap (pixels) between collinear segments that may merge
    #[arg(long, default_value_t = IngestParams::default().merge_gap)]
    merge_gap: f64,
}

#[derive(Args)]
struct DetectArgs {
    /// Template segment file
    #[arg(long)]
    template: PathBuf,
    /// Scene: a segment file, or a raster image (told apart by extension)
    /// preprocessed with default settings
    #[arg(long)]
    scene: PathBuf,
    /// Evidence gate: largest total evidence distance that still supports
    #[arg(long, default_value_t = EvidenceParams::default().threshold)]
    th: f64,
    /// How many top-ranked candidates get full verification
    #[arg(long, default_value_t = DetectParams::default().top_k)]
    top_k: usize,
    /// Smallest admissible template-to-scene scale
    #[arg(long, default_value_t = DetectParams::default().min_scale)]
    min_scale: f64,
    /// Largest admissible template-to-scene scale
    #[arg(long, default_value_t = DetectParams::default().max_scale)]
    max_scale: f64,
    /// Drop a detection overlapping a better one by more than this box IoU
    #[arg(long, default_value_t = DetectParams::default().nms_iou)]
    nms_iou: f64,
    /// Drop detections scoring below this similarity
    #[arg(long, default_value_t = DetectParams::default().sim_floor)]
    sim_floor: f64,
    /// Score every candidate: disable the scale and frame prunes
    #[arg(long)]
    no_prune: bool,
    /// Write the detection document here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Scene segment file
    #[arg(long)]
    scene: PathBuf,
    /// Detection document produced by `detect`
    #[arg(long)]
    detections: PathBuf,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of per-image detection documents, named `<image_id>.det`
    #[arg(long)]
    detections_dir: PathBuf,
    /// Ground-truth file: one `image_id xmin ymin xmax ymax` line per box
    #[arg(long)]
    gt: PathBuf,
    /// Hit criterion: `half-gt` or `iou:<x>`
    #[arg(long, default_value = "half-gt")]
    criterion: MatchCriterion,
    /// Write the precision/recall CSV here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Preprocess(args) => preprocess(args),
        Command::Detect(args) => run_detect(args),
        Command::Render(args) => render(args),
        Command::Eval(args) => eval(args),
    }
}

fn preprocess(args: PreprocessArgs) -> Result<ExitCode> {
    let img = GrayImage::load(&args.image)
        .with_context(|| format!("reading image {}", args.image.display()))?;
    let name = args
        .image
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("image");
    let params = IngestParams {
        canny_low: args.canny_low,
        canny_high: args.canny_high,
        min_segment_length: args.min_seg_len,
        fit_deviation: args.fit_dev,
        merge_angle: args.merge_angle.to_radians(),
        merge_gap: args.merge_gap,
    };
    let set = segments_from_image(&img, name, &params);
    save_segments(&args.out, &set)
        .with_context(|| format!("writing segment file {}", args.out.display()))?;
    println!("{}", set.len());
    Ok(ExitCode::SUCCESS)
}

fn run_detect(args: DetectArgs) -> Result<ExitCode> {
    let template = load_segments(&args.template)
        .with_context(|| format!("reading template {}", args.template.display()))?;
    let scene = load_scene(&args.scene)?;
    let params = DetectParams {
        evidence: EvidenceParams {
            threshold: args.th,
            ..EvidenceParams::default()
        },
        min_scale: args.min_scale,
        max_scale: args.max_scale,
        top_k: args.top_k,
        sim_floor: args.sim_floor,
        nms_iou: args.nms_iou,
        prune: !args.no_prune,
        ..DetectParams::default()
    };

    let detections = detect(&template, &scene, &params);
    let records: Vec<DetectionRecord> = detections.iter().map(DetectionRecord::from).collect();
    let doc = write_detections(&records);
    match &args.out {
        Some(path) => fs::write(path, doc)
            .with_context(|| format!("writing detections {}", path.display()))?,
        None => print!("{doc}"),
    }
    if records.is_empty() {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

/// Loads scene segments from either a segment file or a raster image,
/// dispatching on the file extension.
fn load_scene(path: &Path) -> Result<SegmentSet> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let is_raster = matches!(
        ext.as_deref(),
        Some("png" | "pgm" | "pnm" | "ppm" | "pbm" | "jpg" | "jpeg" | "bmp" | "tif" | "tiff")
    );
    if is_raster {
        let img = GrayImage::load(path)
            .with_context(|| format!("reading scene image {}", path.display()))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scene");
        Ok(segments_from_image(&img, name, &IngestParams::default()))
    } else {
        load_segments(path).with_context(|| format!("reading scene {}", path.display()))
    }
}

fn render(args: RenderArgs) -> Result<ExitCode> {
    let scene = load_segments(&args.scene)
        .with_context(|| format!("reading scene {}", args.scene.display()))?;
    let records = load_detections(&args.detections)
        .with_context(|| format!("reading detections {}", args.detections.display()))?;
    let svg = render_svg(&scene, &records)?;
    fs::write(&args.out, svg).with_context(|| format!("writing SVG {}", args.out.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn eval(args: EvalArgs) -> Result<ExitCode> {
    let gt_text =
        fs::read_to_string(&args.gt).with_context(|| format!("reading {}", args.gt.display()))?;
    let gt = GroundTruth::parse(&gt_text)
        .with_context(|| format!("parsing ground truth {}", args.gt.display()))?;

    // every `<id>.det` file takes part; detections for images outside the
    // ground truth still count as false positives
    let mut detections: BTreeMap<String, Vec<ScoredBox>> = BTreeMap::new();
    let dir = fs::read_dir(&args.detections_dir)
        .with_context(|| format!("reading directory {}", args.detections_dir.display()))?;
    for entry in dir {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("det") {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let records = load_detections(&path)
            .with_context(|| format!("reading detections {}", path.display()))?;
        let boxes = records
            .iter()
            .map(|r| ScoredBox {
                score: r.sim,
                bbox: r.bbox,
            })
            .collect();
        detections.insert(id.to_string(), boxes);
    }

    let missing: Vec<&str> = gt
        .images()
        .map(|(id, _)| id)
        .filter(|id| !detections.contains_key(*id))
        .collect();
    if !missing.is_empty() {
        bail!(
            "no detection file for ground-truth image(s): {}",
            missing.join(", ")
        );
    }

    let curve = pr_curve(&detections, &gt, &args.criterion)?;
    let csv = pr_csv(&curve);
    match &args.out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing CSV {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    println!("EER={}", eer(&curve));
    Ok(ExitCode::SUCCESS)
}
