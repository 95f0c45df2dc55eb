use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::{evolve_spectral, evolve_spectral_time_derivative, radial_factors, Grid2D, Spectrum};
use crate::green::{split_time, CausalSymbol, DiffusionParams};
use crate::upsilon::UpsilonEvaluator;

pub const DEFAULT_ZERO_MASK_TOL: f64 = 1e-3;
pub const DEFAULT_BAND_SPLIT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoInverse {
    pub estimate: Grid2D,
    /// Fraction of frequency bins set to zero.
    pub masked_fraction: f64,
    pub warning: Option<String>,
}

/// Spectral division by the causal multiplier, restricted to bins where
/// `|multiplier| > zero_mask_tol · max |multiplier|`.
pub fn moore_penrose_spectral(
    w: &Grid2D,
    p: &DiffusionParams,
    t: f64,
    zero_mask_tol: f64,
) -> Result<PseudoInverse> {
    if !(zero_mask_tol > 0.0) || !zero_mask_tol.is_finite() {
        return Err(Error::Config(format!(
            "zero mask tolerance must be positive, got {zero_mask_tol}"
        )));
    }
    let symbol = CausalSymbol::new(p, t)?;
    let mut spectrum = Spectrum::forward(w);
    let multipliers = radial_factors(&spectrum.wavenumber_magnitudes(), |k| symbol.at(k))?;
    let peak = multipliers.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cutoff = zero_mask_tol * peak;
    let mut masked = 0usize;
    for (z, &g) in spectrum.coeffs_mut().iter_mut().zip(&multipliers) {
        if g.abs() > cutoff {
            *z /= g;
        } else {
            *z = Complex64::new(0.0, 0.0);
            masked += 1;
        }
    }
    let masked_fraction = masked as f64 / multipliers.len() as f64;
    let warning = (masked_fraction > 0.5).then(|| {
        format!(
            "{:.1}% of frequency bins lie near zeros of the multiplier",
            100.0 * masked_fraction
        )
    });
    Ok(PseudoInverse {
        estimate: spectrum.inverse(),
        masked_fraction,
        warning,
    })
}

/// Data for [`time_reversal`]: `F_t u` and its time derivative.
pub fn time_reversal_data(u: &Grid2D, p: &DiffusionParams, t: f64) -> Result<(Grid2D, Grid2D)> {
    Ok((
        evolve_spectral(u, p, t)?,
        evolve_spectral_time_derivative(u, p, t)?,
    ))
}

/// Recovers `u` from `w = F_T u` and `w2 = ∂_t F_t u |_{t=T}` for `T <= τ`.
///
/// Bins with `|Υ(kcT)| >= band_split_tol` use `ŵ / Υ(kcT)`, the others
/// `ŵ₂ / (k c Υ'(kcT))`.
pub fn time_reversal(
    w: &Grid2D,
    w2: &Grid2D,
    p: &DiffusionParams,
    t: f64,
    band_split_tol: f64,
) -> Result<Grid2D> {
    w.check_same_geometry(w2)?;
    let split = split_time(p, t)?;
    if split.m != 0 {
        return Err(Error::Config(format!(
            "time reversal needs 0 < T <= tau = {}, got T = {t}",
            p.tau
        )));
    }
    if !(band_split_tol > 0.0) {
        return Err(Error::Config(format!(
            "band split tolerance must be positive, got {band_split_tol}"
        )));
    }
    let ev = UpsilonEvaluator::new(p.dimension)?;
    let mut a = Spectrum::forward(w);
    let b = Spectrum::forward(w2);
    let ks = a.wavenumber_magnitudes();
    let factors = radial_factors(&ks, |k| {
        let arg = k * p.c * t;
        let y = ev.eval(arg)?;
        if y.abs() >= band_split_tol {
            return Ok((true, 1.0 / y));
        }
        let dy = ev.eval_derivative(arg)?;
        if dy.abs() < band_split_tol {
            return Err(Error::Internal(format!(
                "both |Υ| = {} and |Υ'| = {} fall below {band_split_tol} at k = {k}",
                y.abs(),
                dy.abs()
            )));
        }
        Ok((false, 1.0 / (k * p.c * dy)))
    });
    let factors = factors?;
    for ((z, zb), (use_a, f)) in a.coeffs_mut().iter_mut().zip(b.coeffs()).zip(factors) {
        *z = if use_a { *z * f } else { *zb * f };
    }
    Ok(a.inverse())
}
