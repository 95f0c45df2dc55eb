//! The Green function of causal and standard diffusion in `(k, t)` space.
//!
//! All `ghat_*` functions carry the symmetric `(2π)^{-N/2}` Fourier
//! convention. The discrete pipeline works with the normalized multiplier
//! `(2π)^{N/2} ĝ`, available from [`CausalSymbol::at`]; [`spectral_normalization`]
//! is the single conversion factor between the two.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::upsilon::{UpsilonEvaluator, ZeroKind};

/// Relative tolerance for recognising `t` as an integer multiple of `τ`.
const SPLIT_SNAP_TOL: f64 = 1e-12;
/// Zeros closer than this are merged in [`zero_set`].
pub const ZERO_DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    pub c: f64,
    pub tau: f64,
    pub dimension: u32,
}

impl DiffusionParams {
    pub fn new(c: f64, tau: f64, dimension: u32) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("speed c must be positive and finite, got {c}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("step tau must be positive and finite, got {tau}")));
        }
        if dimension == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        Ok(Self { c, tau, dimension })
    }

    /// Diffusivity of the matching standard diffusion, `c² τ / (2N)`.
    pub fn d0(&self) -> f64 {
        self.c * self.c * self.tau / (2.0 * self.dimension as f64)
    }

    /// Radius `c τ` covered by one full step.
    pub fn step_radius(&self) -> f64 {
        self.c * self.tau
    }

    pub fn split_time(&self, t: f64) -> Result<TimeSplit> {
        split_time(self, t)
    }
}

/// `t = m τ + s` with `s ∈ (0, τ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSplit {
    pub m: u64,
    pub s: f64,
}

pub fn split_time(p: &DiffusionParams, t: f64) -> Result<TimeSplit> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be positive and finite, got {t}")));
    }
    let q = t / p.tau;
    let nearest = q.round();
    if nearest >= 1.0 && (q - nearest).abs() <= SPLIT_SNAP_TOL * q.max(1.0) {
        return Ok(TimeSplit {
            m: nearest as u64 - 1,
            s: p.tau,
        });
    }
    let m = q.floor();
    let s = t - m * p.tau;
    if s <= 0.0 {
        // q sat just above an integer that the snap tolerance did not catch
        return Ok(TimeSplit {
            m: (m as u64).saturating_sub(1),
            s: p.tau,
        });
    }
    Ok(TimeSplit {
        m: m as u64,
        s: s.min(p.tau),
    })
}

/// `(2π)^{-N/2}`.
pub fn spectral_normalization(dimension: u32) -> f64 {
    (2.0 * PI).powf(-(dimension as f64) / 2.0)
}

/// The normalized causal multiplier `Υ(k c τ)^m Υ(k c s)` at a fixed time.
#[derive(Debug, Clone)]
pub struct CausalSymbol {
    params: DiffusionParams,
    split: TimeSplit,
    evaluator: UpsilonEvaluator,
}

impl CausalSymbol {
    pub fn new(params: &DiffusionParams, t: f64) -> Result<Self> {
        Ok(Self {
            params: *params,
            split: split_time(params, t)?,
            evaluator: UpsilonEvaluator::new(params.dimension)?,
        })
    }

    pub fn split(&self) -> TimeSplit {
        self.split
    }

    pub fn evaluator(&self) -> &UpsilonEvaluator {
        &self.evaluator
    }

    /// `(2π)^{N/2} ĝ_causal(k, t)`.
    pub fn at(&self, k: f64) -> Result<f64> {
        check_wavenumber(k)?;
        let c = self.params.c;
        let partial = self.evaluator.eval(k * c * self.split.s)?;
        if self.split.m == 0 {
            return Ok(partial);
        }
        let full = self.evaluator.eval(k * c * self.params.tau)?;
        Ok(powu(full, self.split.m) * partial)
    }

    /// Time derivative of [`Self::at`], `Υ(k c τ)^m · k c Υ'(k c s)`.
    pub fn time_derivative_at(&self, k: f64) -> Result<f64> {
        check_wavenumber(k)?;
        let c = self.params.c;
        let partial = k * c * self.evaluator.eval_derivative(k * c * self.split.s)?;
        if self.split.m == 0 {
            return Ok(partial);
        }
        let full = self.evaluator.eval(k * c * self.params.tau)?;
        Ok(powu(full, self.split.m) * partial)
    }
}

fn powu(x: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(n) => x.powi(n),
        Err(_) => x.powf(n as f64),
    }
}

fn check_wavenumber(k: f64) -> Result<()> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("wave number must be finite and >= 0, got {k}")));
    }
    Ok(())
}

pub fn ghat_causal(p: &DiffusionParams, k: f64, t: f64) -> Result<f64> {
    Ok(spectral_normalization(p.dimension) * CausalSymbol::new(p, t)?.at(k)?)
}

pub fn ghat_standard(p: &DiffusionParams, k: f64, t: f64) -> Result<f64> {
    check_wavenumber(k)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    Ok(spectral_normalization(p.dimension) * (-p.d0() * k * k * t).exp())
}

/// Standard diffusion with the enlarged diffusivity `D0 / ln 2`.
pub fn ghat_perturbed(p: &DiffusionParams, k: f64, t: f64) -> Result<f64> {
    ghat_standard(p, k, t / LN_2)
}

/// Zeros of `k ↦ ĝ_causal(k, t)` in `(0, k_max]`, sorted.
pub fn zero_set(p: &DiffusionParams, t: f64, k_max: f64) -> Result<Vec<f64>> {
    if !(k_max > 0.0) || !k_max.is_finite() {
        return Err(Error::Domain(format!("k_max must be positive, got {k_max}")));
    }
    let split = split_time(p, t)?;
    let ev = UpsilonEvaluator::new(p.dimension)?;
    let scaled_zeros = |radius: f64| -> Result<Vec<f64>> {
        Ok(ev
            .zeros_in(0.0, radius * k_max, ZeroKind::Function)?
            .into_iter()
            .map(|z| z / radius)
            .filter(|&k| k > 0.0 && k <= k_max)
            .collect())
    };
    let mut zeros = scaled_zeros(p.c * split.s)?;
    if split.m >= 1 {
        zeros.extend(scaled_zeros(p.c * p.tau)?);
    }
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|b, a| (*b - *a).abs() < ZERO_DEDUP_TOL);
    Ok(zeros)
}

/// `|ĝ_causal(k, T)|` decays like `a_T k^{-exponent}` (envelope).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeDecay {
    pub exponent: f64,
    pub a_t: f64,
}

/// Decay exponent `(m+1)(N-1)/2` and coefficient
/// `a_T = (cτ)^{m(N-1)/2} (cs)^{(N-1)/2}` for `T = mτ + s`.
pub fn envelope_decay_rate(p: &DiffusionParams, t: f64) -> Result<EnvelopeDecay> {
    let split = split_time(p, t)?;
    let half = (p.dimension as f64 - 1.0) / 2.0;
    let m = split.m as f64;
    Ok(EnvelopeDecay {
        exponent: (m + 1.0) * half,
        a_t: (p.c * p.tau).powf(m * half) * (p.c * split.s).powf(half),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: u32) -> DiffusionParams {
        DiffusionParams::new(1.0, 1.0, n).unwrap()
    }

    #[test]
    fn split_examples() {
        let p = unit(3);
        assert_eq!(split_time(&p, 1.0).unwrap(), TimeSplit { m: 0, s: 1.0 });
        assert_eq!(split_time(&p, 2.5).unwrap(), TimeSplit { m: 2, s: 0.5 });
        let q = DiffusionParams::new(1.0, 0.25, 3).unwrap();
        assert_eq!(split_time(&q, 0.75).unwrap(), TimeSplit { m: 2, s: 0.25 });
        assert!(split_time(&p, 0.0).is_err());
        assert!(split_time(&p, -1.0).is_err());
    }

    #[test]
    fn split_snaps_rounded_multiples() {
        let p = DiffusionParams::new(1.0, 0.1, 2).unwrap();
        let s = split_time(&p, 0.1 + 0.2).unwrap();
        assert_eq!(s.m, 2);
        assert_eq!(s.s, 0.1);
    }

    #[test]
    fn causal_examples() {
        let p = unit(3);
        let norm = (2.0 * PI).powf(-1.5);
        assert_eq!(ghat_causal(&p, 0.0, 3.7).unwrap(), norm);
        assert!(ghat_causal(&p, PI, 1.0).unwrap().abs() < 1e-17);
        let sinc = |x: f64| x.sin() / x;
        let expected = norm * sinc(2.0).powi(2) * sinc(1.0);
        assert!((ghat_causal(&p, 2.0, 2.5).unwrap() - expected).abs() < 1e-16);
    }

    #[test]
    fn standard_and_perturbed_examples() {
        let p = unit(3);
        let norm = (2.0 * PI).powf(-1.5);
        assert_eq!(ghat_standard(&p, 0.0, 2.0).unwrap(), norm);
        let e = norm * (-1.0f64 / 6.0).exp();
        assert!((ghat_standard(&p, 1.0, 1.0).unwrap() - e).abs() < 1e-16);
        assert!((ghat_perturbed(&p, 1.0, LN_2).unwrap() - e).abs() < 1e-16);
        assert_eq!(
            ghat_perturbed(&p, 0.7, 1.3).unwrap(),
            ghat_standard(&p, 0.7, 1.3 / LN_2).unwrap()
        );
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let g = ghat_standard(&p, i as f64 * 0.5, 1.0).unwrap();
            assert!(g <= prev);
            prev = g;
        }
        assert!(prev < 1e-100);
    }

    #[test]
    fn d0_link() {
        assert_eq!(unit(3).d0(), 1.0 / 6.0);
        let p = DiffusionParams::new(6.3e-3, 1e-3 / 6.3e-3, 2).unwrap();
        assert!((p.d0() - 1.575e-6).abs() < 1e-18);
    }

    #[test]
    fn zero_set_examples() {
        let p = unit(3);
        let z = zero_set(&p, 1.0, 7.0).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z[0] - PI).abs() < 1e-11 && (z[1] - 2.0 * PI).abs() < 1e-11);
        let z = zero_set(&p, 1.5, 7.0).unwrap();
        assert_eq!(z.len(), 2);
        // s = 0.5 contributes 2π, coinciding with a full-step zero
        let z = zero_set(&p, 1.5, 13.0).unwrap();
        assert_eq!(z.len(), 4);
        assert!((z[3] - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn zero_sets_coincide_for_whole_step_shifts_beyond_first_step() {
        let p = unit(3);
        let a = zero_set(&p, 1.3, 40.0).unwrap();
        let b = zero_set(&p, 2.3, 40.0).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn first_step_lacks_full_step_zeros() {
        let p = unit(3);
        let early = zero_set(&p, 0.3, 7.0).unwrap();
        let later = zero_set(&p, 1.3, 7.0).unwrap();
        assert!(early.is_empty());
        assert_eq!(later.len(), 2);
    }

    #[test]
    fn envelope_examples() {
        let p = unit(3);
        assert_eq!(envelope_decay_rate(&p, 1.0).unwrap().exponent, 1.0);
        assert_eq!(envelope_decay_rate(&p, 2.5).unwrap().exponent, 3.0);
        assert_eq!(envelope_decay_rate(&unit(1), 4.2).unwrap().exponent, 0.0);
        let q = DiffusionParams::new(2.0, 1.0, 3).unwrap();
        let e = envelope_decay_rate(&q, 2.5).unwrap();
        assert!((e.a_t - 2.0 * 2.0 * 1.0).abs() < 1e-14);
    }

    #[test]
    fn time_derivative_matches_finite_difference() {
        let p = unit(3);
        let h = 1e-6;
        for &t in &[0.4, 0.7, 1.6] {
            let d = CausalSymbol::new(&p, t).unwrap().time_derivative_at(2.3).unwrap();
            let plus = CausalSymbol::new(&p, t + h).unwrap().at(2.3).unwrap();
            let minus = CausalSymbol::new(&p, t - h).unwrap().at(2.3).unwrap();
            assert!((d - (plus - minus) / (2.0 * h)).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(DiffusionParams::new(0.0, 1.0, 2).is_err());
        assert!(DiffusionParams::new(1.0, f64::NAN, 2).is_err());
        assert!(DiffusionParams::new(1.0, 1.0, 0).is_err());
        assert!(ghat_causal(&unit(2), -1.0, 1.0).is_err());
    }
}
