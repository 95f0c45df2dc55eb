//! Synthetic test images.

use crate::error::Result;
use crate::forward::Grid2D;

const SUPERSAMPLE: usize = 4;

/// Question-mark glyphs on a zero background, anti-aliased by 4×4
/// supersampling; values in `[0, 1]`. Shapes stay inside the central 80%
/// of the frame.
pub fn question_mark(rows: usize, cols: usize, dx: f64) -> Result<Grid2D> {
    rasterize(rows, cols, dx, |x, y| {
        in_question_mark(x, y, 0.40, 0.30, 1.0)
            || in_question_mark(x, y, 0.74, 0.60, 0.45)
            || in_apostrophe(x, y)
    })
}

/// [`question_mark`] on an `n × n` square drawn inside a frame of `pad`
/// zero pixels on every side.
pub fn question_mark_padded(n: usize, pad: usize, dx: f64) -> Result<Grid2D> {
    let inner = n.saturating_sub(2 * pad).max(1);
    let glyphs = question_mark(inner, inner, dx)?;
    Grid2D::from_fn(n, n, dx, |r, c| {
        if (pad..pad + inner).contains(&r) && (pad..pad + inner).contains(&c) {
            glyphs.get(r - pad, c - pad)
        } else {
            0.0
        }
    })
}

/// `exp(-|x - x0|² / (2σ²))` centred on the grid, `σ` in pixels.
pub fn gaussian_blob(rows: usize, cols: usize, dx: f64, sigma_pixels: f64) -> Result<Grid2D> {
    let (r0, c0) = ((rows as f64 - 1.0) / 2.0, (cols as f64 - 1.0) / 2.0);
    Grid2D::from_fn(rows, cols, dx, |r, c| {
        let (y, x) = (r as f64 - r0, c as f64 - c0);
        (-(x * x + y * y) / (2.0 * sigma_pixels * sigma_pixels)).exp()
    })
}

/// Coverage fraction of `inside` over each pixel, in unit-square
/// coordinates with `y` pointing down the rows.
fn rasterize<F: Fn(f64, f64) -> bool>(rows: usize, cols: usize, dx: f64, inside: F) -> Result<Grid2D> {
    let side = rows.max(cols) as f64;
    let n = SUPERSAMPLE as f64;
    Grid2D::from_fn(rows, cols, dx, |r, c| {
        let mut hits = 0usize;
        for i in 0..SUPERSAMPLE {
            for j in 0..SUPERSAMPLE {
                let x = (c as f64 + (j as f64 + 0.5) / n) / side;
                let y = (r as f64 + (i as f64 + 0.5) / n) / side;
                if inside(x, y) {
                    hits += 1;
                }
            }
        }
        hits as f64 / (SUPERSAMPLE * SUPERSAMPLE) as f64
    })
}

/// A question mark whose hook is centred at `(cx, cy)`, scaled by `scale`.
fn in_question_mark(x: f64, y: f64, cx: f64, cy: f64, scale: f64) -> bool {
    let (u, v) = ((x - cx) / scale, (y - cy) / scale);
    let radius = u.hypot(v);
    // hook: ring open towards the lower left
    let angle = (-v).atan2(u).to_degrees();
    let hook = (0.085..=0.15).contains(&radius) && !(-170.0..=-90.0).contains(&angle);
    let stem = (-0.035..=0.035).contains(&u) && (0.10..=0.25).contains(&v);
    let dot = u.hypot(v - 0.33) <= 0.045;
    hook || stem || dot
}

fn in_apostrophe(x: f64, y: f64) -> bool {
    let (u, v) = (x - 0.17, y - 0.20);
    let head = u.hypot(v) <= 0.03;
    // tapering tail towards the lower left
    let t = v / 0.08;
    let tail = (0.0..=1.0).contains(&t) && (u + 0.02 * t).abs() <= 0.02 * (1.0 - t);
    head || tail
}
