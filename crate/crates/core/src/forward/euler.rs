use super::grid::Grid2D;
use crate::error::{Error, Result};
use crate::exec;
use crate::green::DiffusionParams;

/// Explicit 5-point scheme for `∂u/∂t = D0 Δu` up to time `t`.
///
/// Requires `N = 2` and `D0 dt / dx² <= 1/4`. A final shorter step covers
/// any remainder of `t / dt`. Values outside the grid read as zero.
pub fn evolve_euler_standard(u: &Grid2D, p: &DiffusionParams, t: f64, dt: f64) -> Result<Grid2D> {
    if p.dimension != 2 {
        return Err(Error::Config(format!(
            "the 5-point scheme is two-dimensional, got N = {}",
            p.dimension
        )));
    }
    if !(t > 0.0) || !(dt > 0.0) || !t.is_finite() || !dt.is_finite() {
        return Err(Error::Config(format!("invalid time {t} or step {dt}")));
    }
    let dx2 = u.dx() * u.dx();
    let ratio = p.d0() * dt / dx2;
    let limit = 1.0 / (2.0 * p.dimension as f64);
    if ratio > limit {
        return Err(Error::Config(format!(
            "unstable step: D0 dt / dx^2 = {ratio} exceeds {limit}"
        )));
    }
    let q = t / dt;
    let mut full = q.floor();
    let mut remainder = t - full * dt;
    if (q - q.round()).abs() <= 1e-12 * q.max(1.0) {
        full = q.round();
        remainder = 0.0;
    }
    let mut grid = u.clone();
    for _ in 0..full as u64 {
        grid = euler_update(&grid, ratio);
    }
    if remainder > 0.0 {
        grid = euler_update(&grid, p.d0() * remainder / dx2);
    }
    Ok(grid)
}

/// `(1 - 4r) u + r (E + N + W + S)`, neighbours summed counter-clockwise
/// from the `+x` direction.
pub fn euler_update(u: &Grid2D, r: f64) -> Grid2D {
    let cols = u.cols();
    let centre = 1.0 - 4.0 * r;
    let mut out = vec![0.0; u.len()];
    exec::for_each_row(&mut out, cols, |row, slots| {
        let ri = row as isize;
        for (c, slot) in slots.iter_mut().enumerate() {
            let ci = c as isize;
            let neighbours = u.get_or_zero(ri, ci + 1)
                + u.get_or_zero(ri + 1, ci)
                + u.get_or_zero(ri, ci - 1)
                + u.get_or_zero(ri - 1, ci);
            *slot = centre * u.get(row, c) + r * neighbours;
        }
    });
    u.with_values(out).expect("update of finite values is finite")
}
