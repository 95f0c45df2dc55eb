use super::grid::Grid2D;
use super::stencil::CircleStencil;
use crate::error::{Error, Result};
use crate::exec;
use crate::green::{split_time, DiffusionParams};

/// Result of a spatial step; `support_clipped` flags mass that may have
/// been pushed across the grid boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialStep {
    pub grid: Grid2D,
    pub support_clipped: bool,
}

/// One bilinear sample offset split into integer and fractional parts.
#[derive(Debug, Clone, Copy)]
struct Tap {
    ix: isize,
    iy: isize,
    fx: f64,
    fy: f64,
}

impl Tap {
    fn new([ox, oy]: [f64; 2]) -> Self {
        let (x0, y0) = (ox.floor(), oy.floor());
        Self {
            ix: x0 as isize,
            iy: y0 as isize,
            fx: ox - x0,
            fy: oy - y0,
        }
    }

    #[inline]
    fn sample(&self, u: &Grid2D, r: isize, c: isize) -> f64 {
        let (r0, c0) = (r + self.iy, c + self.ix);
        let a = u.get_or_zero(r0, c0);
        if self.fx == 0.0 && self.fy == 0.0 {
            return a;
        }
        let b = u.get_or_zero(r0, c0 + 1);
        let lower = (1.0 - self.fx) * a + self.fx * b;
        if self.fy == 0.0 {
            return lower;
        }
        let cc = u.get_or_zero(r0 + 1, c0);
        let d = u.get_or_zero(r0 + 1, c0 + 1);
        let upper = (1.0 - self.fx) * cc + self.fx * d;
        (1.0 - self.fy) * lower + self.fy * upper
    }
}

/// Spherical mean over the circle of radius `c s` around every pixel.
pub fn step_spatial(
    u: &Grid2D,
    p: &DiffusionParams,
    s: f64,
    stencil: &CircleStencil,
) -> Result<SpatialStep> {
    if p.dimension != 2 {
        return Err(Error::Config(format!(
            "spatial stepping is implemented for N = 2, got N = {}",
            p.dimension
        )));
    }
    if !(s > 0.0) || s > p.tau * (1.0 + 1e-12) {
        return Err(Error::Config(format!("step time {s} outside (0, tau = {}]", p.tau)));
    }
    let radius = p.c * s;
    if (stencil.radius() - radius).abs() > 1e-12 * radius {
        return Err(Error::Config(format!(
            "stencil radius {} does not match c s = {radius}",
            stencil.radius()
        )));
    }
    Ok(SpatialStep {
        support_clipped: support_reaches_boundary(u, radius),
        grid: average_over_stencil(u, stencil),
    })
}

fn average_over_stencil(u: &Grid2D, stencil: &CircleStencil) -> Grid2D {
    let taps: Vec<Tap> = stencil.offsets().iter().copied().map(Tap::new).collect();
    let w = stencil.weight();
    let cols = u.cols();
    let mut out = vec![0.0; u.len()];
    exec::for_each_row(&mut out, cols, |r, row| {
        for (c, slot) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for tap in &taps {
                acc += w * tap.sample(u, r as isize, c as isize);
            }
            *slot = acc;
        }
    });
    u.with_values(out).expect("averaging keeps values finite")
}

/// Whether some nonzero pixel lies within `radius` (plus one pixel of
/// interpolation spread) of the grid edge.
fn support_reaches_boundary(u: &Grid2D, radius: f64) -> bool {
    let reach = (radius / u.dx()).ceil() as usize + 1;
    let (rows, cols) = (u.rows(), u.cols());
    (0..rows).any(|r| {
        (0..cols).any(|c| {
            u.get(r, c) != 0.0
                && (r < reach || c < reach || r + reach >= rows || c + reach >= cols)
        })
    })
}

/// Output of [`evolve_with_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub grid: Grid2D,
    pub support_clipped: bool,
}

/// `F_T u = S_τ^m S_s u` by circle averaging.
pub fn evolve(u: &Grid2D, p: &DiffusionParams, t: f64, stencil_points: usize) -> Result<Grid2D> {
    Ok(evolve_with_report(u, p, t, stencil_points)?.grid)
}

pub fn evolve_with_report(
    u: &Grid2D,
    p: &DiffusionParams,
    t: f64,
    stencil_points: usize,
) -> Result<Evolution> {
    let split = split_time(p, t)?;
    let partial = CircleStencil::new(p.c * split.s, stencil_points, u.dx())?;
    let first = step_spatial(u, p, split.s, &partial)?;
    let mut grid = first.grid;
    let mut clipped = first.support_clipped;
    if split.m > 0 {
        let full = if split.s == p.tau {
            partial
        } else {
            CircleStencil::new(p.c * p.tau, stencil_points, u.dx())?
        };
        for _ in 0..split.m {
            let step = step_spatial(&grid, p, p.tau, &full)?;
            clipped |= step.support_clipped;
            grid = step.grid;
        }
    }
    Ok(Evolution {
        grid,
        support_clipped: clipped,
    })
}
