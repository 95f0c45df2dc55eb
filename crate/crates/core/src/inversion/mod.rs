//! Solvers for the backwards diffusion problem `F_T u = w`.

mod landweber;
mod spectral;

pub use landweber::{
    landweber_step, solve_landweber, DiscrepancyScale, IterationRecord, LandweberConfig, LandweberState, StopReason,
};
pub use spectral::{
    moore_penrose_spectral, time_reversal, time_reversal_data, PseudoInverse,
    DEFAULT_BAND_SPLIT_TOL, DEFAULT_ZERO_MASK_TOL,
};
