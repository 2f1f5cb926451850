//! Edge detection: Gaussian smoothing, Sobel gradients, non-maximum
//! suppression, hysteresis.
//!
//! Thresholds are fractions of the image's maximum gradient magnitude, so
//! the same settings behave comparably across differently lit images. The
//! whole stage is deterministic: ties in the suppression step always keep
//! the pixel on the lower-coordinate side, and the hysteresis flood walks
//! in row-major seed order.

use super::{EdgeMap, GrayImage};

/// Standard deviation of the smoothing kernel, in pixels.
const GAUSSIAN_SIGMA: f32 = 1.4;

/// tan(22.5 degrees): boundary between the axis and diagonal direction bins.
const DIAG_SLOPE: f32 = 0.414_213_56;

/// Detects edges with hysteresis thresholds `low` and `high`, both given as
/// fractions of the maximum gradient magnitude (`0.0..=1.0`, `low <= high`
/// expected). A constant image has no gradient anywhere and produces an
/// empty map.
pub fn detect_edges(img: &GrayImage, low: f32, high: f32) -> EdgeMap {
    let (w, h) = (img.width(), img.height());
    let mut edges = EdgeMap::new(w, h);
    if w < 3 || h < 3 {
        return edges;
    }

    let smoothed = gaussian_blur(img, GAUSSIAN_SIGMA);
    let (gx, gy, mag) = sobel(&smoothed);

    let max_mag = mag.iter().copied().fold(0.0f32, f32::max);
    if max_mag <= 0.0 {
        return edges;
    }
    let low = low * max_mag;
    let high = high * max_mag;

    let thin = suppress_non_maxima(&gx, &gy, &mag, w, h);

    // hysteresis: flood from strong pixels through connected weak ones
    let mut state = vec![0u8; w * h]; // 0 = off, 1 = weak, 2 = edge
    for (i, &m) in thin.iter().enumerate() {
        if m >= low {
            state[i] = 1;
        }
    }
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if state[i] == 1 && thin[i] >= high {
                state[i] = 2;
                stack.push((x, y));
                while let Some((cx, cy)) = stack.pop() {
                    for (nx, ny) in neighbors8(cx, cy, w, h) {
                        let ni = ny * w + nx;
                        if state[ni] == 1 {
                            state[ni] = 2;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }

    for y in 0..h {
        for x in 0..w {
            if state[y * w + x] == 2 {
                edges.set(x, y, true);
            }
        }
    }
    edges
}

/// Separable Gaussian blur with clamped (edge-replicating) borders.
fn gaussian_blur(img: &GrayImage, sigma: f32) -> GrayImage {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel = Vec::with_capacity((2 * radius + 1) as usize);
    for i in -radius..=radius {
        kernel.push((-((i * i) as f32) / (2.0 * sigma * sigma)).exp());
    }
    let sum: f32 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }

    let (w, h) = (img.width(), img.height());
    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;

    let mut horizontal = GrayImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let sx = clamp(x as isize + ki as isize - radius, w);
                acc += k * img.get(sx, y);
            }
            horizontal.set(x, y, acc);
        }
    }
    let mut out = GrayImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let sy = clamp(y as isize + ki as isize - radius, h);
                acc += k * horizontal.get(x, sy);
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// 3x3 Sobel; border pixels get zero gradient.
fn sobel(img: &GrayImage) -> (Vec<f32>, Vec<f32>, Vec<f32>) {
    let (w, h) = (img.width(), img.height());
    let mut gx = vec![0.0f32; w * h];
    let mut gy = vec![0.0f32; w * h];
    let mut mag = vec![0.0f32; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let p = |dx: isize, dy: isize| {
                img.get((x as isize + dx) as usize, (y as isize + dy) as usize)
            };
            let sx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let sy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            let i = y * w + x;
            gx[i] = sx;
            gy[i] = sy;
            mag[i] = sx.hypot(sy);
        }
    }
    (gx, gy, mag)
}

/// Keeps only pixels that are local maxima along their gradient direction.
///
/// The comparison is strict against the backward neighbor and non-strict
/// against the forward one, so a two-pixel plateau keeps exactly its first
/// pixel.
fn suppress_non_maxima(gx: &[f32], gy: &[f32], mag: &[f32], w: usize, h: usize) -> Vec<f32> {
    let mut out = vec![0.0f32; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let i = y * w + x;
            let m = mag[i];
            if m <= 0.0 {
                continue;
            }
            let ax = gx[i].abs();
            let ay = gy[i].abs();
            // forward neighbor offset along the (quantized) gradient
            let (dx, dy) = if ay <= ax * DIAG_SLOPE {
                (1isize, 0isize)
            } else if ax <= ay * DIAG_SLOPE {
                (0, 1)
            } else if (gx[i] > 0.0) == (gy[i] > 0.0) {
                (1, 1)
            } else {
                (1, -1)
            };
            let fwd = mag[((y as isize + dy) as usize) * w + (x as isize + dx) as usize];
            let bwd = mag[((y as isize - dy) as usize) * w + (x as isize - dx) as usize];
            if m >= fwd && m > bwd {
                out[i] = m;
            }
        }
    }
    out
}

pub(super) fn neighbors8(
    x: usize,
    y: usize,
    w: usize,
    h: usize,
) -> impl Iterator<Item = (usize, usize)> {
    const OFFSETS: [(isize, isize); 8] = [
        (-1, -1),
        (0, -1),
        (1, -1),
        (-1, 0),
        (1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
    ];
    OFFSETS.into_iter().filter_map(move |(dx, dy)| {
        let nx = x as isize + dx;
        let ny = y as isize + dy;
        (nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h)
            .then(|| (nx as usize, ny as usize))
    })
}
