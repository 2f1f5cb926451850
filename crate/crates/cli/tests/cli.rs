//! End-to-end tests driving the compiled binary through every subcommand
//! and the documented exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use segmatch::{load_segments, parse_detections};

const GLYPH: &str = "segset v1 glyph 5\n\
                     0 0 10 0\n\
                     10 0 10 6\n\
                     10 6 4 6\n\
                     4 6 0 2\n\
                     2 2 7 3\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_segmatch"))
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Writes a binary 8-bit PGM, the simplest raster the decoder accepts.
fn write_pgm(path: &Path, width: usize, height: usize, pixel: impl Fn(usize, usize) -> u8) {
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    for y in 0..height {
        for x in 0..width {
            bytes.push(pixel(x, y));
        }
    }
    fs::write(path, bytes).unwrap();
}

fn square_pgm(path: &Path) {
    write_pgm(path, 100, 100, |x, y| {
        if (30..70).contains(&x) && (30..70).contains(&y) {
            200
        } else {
            40
        }
    });
}

#[test]
fn preprocess_extracts_the_square_outline() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("square.pgm");
    let segs = dir.path().join("square.segs");
    square_pgm(&img);

    let out = bin()
        .arg("preprocess")
        .arg(&img)
        .arg(&segs)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));

    let count: usize = stdout_of(&out).trim().parse().expect("prints the count");
    assert!((4..=8).contains(&count), "got {count} segments");
    let set = load_segments(&segs).unwrap();
    assert_eq!(set.len(), count);
}

#[test]
fn detect_finds_exact_self_copy() {
    let dir = tempfile::tempdir().unwrap();
    let tpl = dir.path().join("glyph.segs");
    fs::write(&tpl, GLYPH).unwrap();

    let out = bin()
        .arg("detect")
        .args(["--template".as_ref(), tpl.as_os_str()])
        .args(["--scene".as_ref(), tpl.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let records = parse_detections(&stdout_of(&out)).unwrap();
    assert_eq!(records.len(), 1);
    let rec = &records[0];
    assert!(rec.sim > 0.999, "sim {}", rec.sim);
    assert!((rec.transform.scale() - 1.0).abs() < 1e-9);
    assert!(rec.transform.rotation().abs() < 1e-9);
    assert_eq!(rec.supported, 5);
}

#[test]
fn detect_accepts_a_raster_scene() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("square.pgm");
    let segs = dir.path().join("square.segs");
    square_pgm(&img);
    bin()
        .arg("preprocess")
        .arg(&img)
        .arg(&segs)
        .output()
        .unwrap();

    let out = bin()
        .arg("detect")
        .args(["--template".as_ref(), segs.as_os_str()])
        .args(["--scene".as_ref(), img.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let records = parse_detections(&stdout_of(&out)).unwrap();
    assert!(!records.is_empty());
    assert!(records[0].sim > 0.999, "sim {}", records[0].sim);
}

#[test]
fn detect_on_empty_scene_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let tpl = dir.path().join("glyph.segs");
    let scene = dir.path().join("empty.segs");
    fs::write(&tpl, GLYPH).unwrap();
    fs::write(&scene, "segset v1 empty 0\n").unwrap();

    let out = bin()
        .arg("detect")
        .args(["--template".as_ref(), tpl.as_os_str()])
        .args(["--scene".as_ref(), scene.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_of(&out), "detections v1 0\n");
}

#[test]
fn malformed_segment_file_exits_two_with_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let tpl = dir.path().join("glyph.segs");
    let bad = dir.path().join("bad.segs");
    fs::write(&tpl, GLYPH).unwrap();
    fs::write(&bad, "segset v1 bad 2\n0 0 10 0\nnot a segment\n").unwrap();

    let out = bin()
        .arg("detect")
        .args(["--template".as_ref(), tpl.as_os_str()])
        .args(["--scene".as_ref(), bad.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("line 3"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn render_writes_deterministic_svg() {
    let dir = tempfile::tempdir().unwrap();
    let tpl = dir.path().join("glyph.segs");
    let det = dir.path().join("self.det");
    fs::write(&tpl, GLYPH).unwrap();
    bin()
        .arg("detect")
        .args(["--template".as_ref(), tpl.as_os_str()])
        .args(["--scene".as_ref(), tpl.as_os_str()])
        .args(["--out".as_ref(), det.as_os_str()])
        .output()
        .unwrap();

    let render = |out_path: &Path| {
        let out = bin()
            .arg("render")
            .args(["--scene".as_ref(), tpl.as_os_str()])
            .args(["--detections".as_ref(), det.as_os_str()])
            .args(["--out".as_ref(), out_path.as_os_str()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
        fs::read(out_path).unwrap()
    };
    let first = render(&dir.path().join("a.svg"));
    let second = render(&dir.path().join("b.svg"));
    assert_eq!(first, second, "identical inputs must give identical bytes");

    let svg = String::from_utf8(first).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("stroke-dasharray"), "hypothesis lines dashed");
}

#[test]
fn eval_scores_a_perfect_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let tpl = dir.path().join("glyph.segs");
    let dets = dir.path().join("dets");
    fs::write(&tpl, GLYPH).unwrap();
    fs::create_dir(&dets).unwrap();
    for id in ["img1", "img2"] {
        bin()
            .arg("detect")
            .args(["--template".as_ref(), tpl.as_os_str()])
            .args(["--scene".as_ref(), tpl.as_os_str()])
            .args(["--out".as_ref(), dets.join(format!("{id}.det")).as_os_str()])
            .output()
            .unwrap();
    }
    let gt = dir.path().join("gt.txt");
    fs::write(&gt, "img1 0 0 10 6\nimg2 0 0 10 6\n").unwrap();
    let csv_path = dir.path().join("pr.csv");

    let out = bin()
        .arg("eval")
        .args(["--detections-dir".as_ref(), dets.as_os_str()])
        .args(["--gt".as_ref(), gt.as_os_str()])
        .args(["--out".as_ref(), csv_path.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out).trim(), "EER=1");

    let csv = fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("threshold,precision,recall\n"));
    assert!(csv.lines().nth(1).unwrap().ends_with(",1,1"));
}

#[test]
fn eval_without_detections_for_an_image_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let tpl = dir.path().join("glyph.segs");
    let dets = dir.path().join("dets");
    fs::write(&tpl, GLYPH).unwrap();
    fs::create_dir(&dets).unwrap();
    bin()
        .arg("detect")
        .args(["--template".as_ref(), tpl.as_os_str()])
        .args(["--scene".as_ref(), tpl.as_os_str()])
        .args(["--out".as_ref(), dets.join("img1.det").as_os_str()])
        .output()
        .unwrap();
    let gt = dir.path().join("gt.txt");
    fs::write(&gt, "img1 0 0 10 6\nimg3 0 0 10 6\n").unwrap();

    let out = bin()
        .arg("eval")
        .args(["--detections-dir".as_ref(), dets.as_os_str()])
        .args(["--gt".as_ref(), gt.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("img3"),
        "stderr: {}",
        stderr_of(&out)
    );
}
