use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_STENCIL_POINTS: usize = 50;
const SNAP_TOL: f64 = 1e-12;

/// Equally spaced quadrature nodes on a circle, equal weights `1/n`.
///
/// Offsets are stored in pixel units. For even `n` the second half of the
/// nodes is the exact negation of the first half, so the averaging operator
/// is symmetric to the last bit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleStencil {
    radius: f64,
    dx: f64,
    offsets: Vec<[f64; 2]>,
}

impl CircleStencil {
    pub fn new(radius: f64, n_points: usize, dx: f64) -> Result<Self> {
        if n_points < 4 {
            return Err(Error::Config(format!(
                "circle stencil needs at least 4 points, got {n_points}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) || !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Config(format!(
                "invalid stencil radius {radius} or pixel size {dx}"
            )));
        }
        let rho = radius / dx;
        let node = |i: usize| {
            let theta = 2.0 * PI * i as f64 / n_points as f64;
            [snap(rho * theta.cos()), snap(rho * theta.sin())]
        };
        let offsets = if n_points.is_multiple_of(2) {
            let half: Vec<[f64; 2]> = (0..n_points / 2).map(node).collect();
            let negated: Vec<[f64; 2]> = half.iter().map(|&[x, y]| [-x, -y]).collect();
            half.into_iter().chain(negated).collect()
        } else {
            (0..n_points).map(node).collect()
        };
        Ok(Self { radius, dx, offsets })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n_points(&self) -> usize {
        self.offsets.len()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.offsets.len() as f64
    }

    /// `(x, y)` offsets in pixel units.
    pub fn offsets(&self) -> &[[f64; 2]] {
        &self.offsets
    }

    /// Offsets in physical length units.
    pub fn physical_offsets(&self) -> Vec<[f64; 2]> {
        self.offsets
            .iter()
            .map(|&[x, y]| [x * self.dx, y * self.dx])
            .collect()
    }
}

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= SNAP_TOL * r.abs().max(1.0) {
        r
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_on_circle() {
        for &n in &[4usize, 7, 50, 64] {
            let s = CircleStencil::new(0.3, n, 0.1).unwrap();
            assert_eq!(s.n_points(), n);
            for [x, y] in s.physical_offsets() {
                assert!(((x * x + y * y).sqrt() - 0.3).abs() < 1e-12);
            }
            let total: f64 = (0..n).map(|_| s.weight()).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn four_points_are_lattice_neighbours() {
        let s = CircleStencil::new(1.0, 4, 1.0).unwrap();
        assert_eq!(s.offsets(), &[[1.0, 0.0], [0.0, 1.0], [-1.0, -0.0], [-0.0, -1.0]]);
    }

    #[test]
    fn even_stencils_are_point_symmetric() {
        let s = CircleStencil::new(2.7, 50, 0.3).unwrap();
        let o = s.offsets();
        for i in 0..25 {
            assert_eq!(o[i + 25], [-o[i][0], -o[i][1]]);
        }
    }

    #[test]
    fn rejects_bad_config() {
        assert!(CircleStencil::new(1.0, 3, 1.0).is_err());
        assert!(CircleStencil::new(0.0, 8, 1.0).is_err());
    }
}
