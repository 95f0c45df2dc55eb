//! Forward operators `F_T` on gridded concentrations.
//!
//! Two implementations of the causal model are provided: circle averaging
//! in physical space ([`evolve`]) and multiplication in Fourier space
//! ([`evolve_spectral`]). [`evolve_euler_standard`] is the explicit scheme
//! for standard diffusion that the 4-point circle stencil reproduces.

mod euler;
mod grid;
mod oned;
mod spatial;
mod spectral;
mod stencil;

pub use euler::{euler_update, evolve_euler_standard};
pub use grid::{Grid1D, Grid2D};
pub use oned::{evolve_1d, step_1d};
pub use spatial::{evolve, evolve_with_report, step_spatial, Evolution, SpatialStep};
pub use spectral::{
    evolve_spectral, evolve_spectral_time_derivative, radial_factors, wavenumber, Spectrum,
};
pub use stencil::{CircleStencil, DEFAULT_STENCIL_POINTS};

use crate::error::Result;
use crate::green::DiffusionParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardPath {
    Spatial { stencil_points: usize },
    Spectral,
}

impl Default for ForwardPath {
    fn default() -> Self {
        ForwardPath::Spatial {
            stencil_points: DEFAULT_STENCIL_POINTS,
        }
    }
}

/// `F_T` for fixed parameters, time and discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardOperator {
    pub params: DiffusionParams,
    pub time: f64,
    pub path: ForwardPath,
}

impl ForwardOperator {
    pub fn new(params: DiffusionParams, time: f64, path: ForwardPath) -> Self {
        Self { params, time, path }
    }

    pub fn apply(&self, u: &Grid2D) -> Result<Grid2D> {
        match self.path {
            ForwardPath::Spatial { stencil_points } => {
                evolve(u, &self.params, self.time, stencil_points)
            }
            ForwardPath::Spectral => evolve_spectral(u, &self.params, self.time),
        }
    }

    /// `F_T` has an even kernel, so its adjoint is itself.
    pub fn adjoint(&self, w: &Grid2D) -> Result<Grid2D> {
        self.apply(w)
    }
}

/// Adjoint of the spatial [`evolve`]; identical to it.
pub fn adjoint_apply(
    w: &Grid2D,
    p: &DiffusionParams,
    t: f64,
    stencil_points: usize,
) -> Result<Grid2D> {
    evolve(w, p, t, stencil_points)
}
