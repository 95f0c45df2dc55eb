use super::grid::Grid1D;
use crate::error::{Error, Result};
use crate::green::{split_time, DiffusionParams};

/// `½ [u(x - cs) + u(x + cs)]` with linear interpolation.
pub fn step_1d(u: &Grid1D, p: &DiffusionParams, s: f64) -> Result<Grid1D> {
    if p.dimension != 1 {
        return Err(Error::Config(format!(
            "1D stepping needs N = 1, got N = {}",
            p.dimension
        )));
    }
    if !(s > 0.0) || s > p.tau * (1.0 + 1e-12) {
        return Err(Error::Config(format!("step time {s} outside (0, tau = {}]", p.tau)));
    }
    let shift = p.c * s / u.dx();
    let values = (0..u.len())
        .map(|i| {
            let x = i as f64;
            0.5 * (lerp(u, x - shift) + lerp(u, x + shift))
        })
        .collect();
    Ok(u.with_values(values))
}

/// `S_τ^m S_s u` in one dimension.
pub fn evolve_1d(u: &Grid1D, p: &DiffusionParams, t: f64) -> Result<Grid1D> {
    let split = split_time(p, t)?;
    let mut out = step_1d(u, p, split.s)?;
    for _ in 0..split.m {
        out = step_1d(&out, p, p.tau)?;
    }
    Ok(out)
}

fn lerp(u: &Grid1D, x: f64) -> f64 {
    let x0 = x.floor();
    let f = x - x0;
    let i = x0 as isize;
    let a = u.get_or_zero(i);
    if f == 0.0 {
        a
    } else {
        (1.0 - f) * a + f * u.get_or_zero(i + 1)
    }
}
