//! Causal diffusion with finite propagation speed.
//!
//! The crate provides the radial profile family [`upsilon`], the Green
//! function in wave-vector space ([`green`]), forward operators on grids
//! ([`forward`]), a particle simulator for synthetic data ([`particle`]) and
//! solvers for the backwards diffusion problem ([`inversion`]).

// NaN must fail validation, so bounds are checked with negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod forward;
pub mod green;
pub mod inversion;
pub mod io;
pub mod particle;
pub mod phantom;
pub mod upsilon;

pub use error::{Error, Result};
pub use forward::{Grid1D, Grid2D};
pub use green::DiffusionParams;
pub use upsilon::UpsilonEvaluator;
