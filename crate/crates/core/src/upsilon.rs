//! The radial spectral profile Υ_N.
//!
//! Υ_N solves `Υ'' + (N-1)/t Υ' + Υ = 0` with `Υ(0) = 1`, `Υ'(0) = 0` and is
//! given by the everywhere convergent series
//!
//! ```text
//! Υ_N(t) = Σ_j (-1)^j a_{2j} t^{2j},   a_0 = 1,   a_{2j} = a_{2j-2} / ((2j) (N + 2j - 2))
//! ```
//!
//! For N = 1, 2, 3 it reduces to `cos`, `J0` and `sinc`. Higher dimensions are
//! evaluated with the series while its terms do not grow, and otherwise with
//! the upward recurrence
//!
//! ```text
//! Υ_{n+2}(t)  = -(n / t) Υ'_n(t)
//! Υ'_{n+2}(t) =  (n / t) (Υ_n(t) - Υ_{n+2}(t))
//! ```
//!
//! started from the closed forms for n = 1 or n = 2.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-17;
pub const DEFAULT_MAX_TERMS: usize = 500;

/// Scan step used for bracketing roots.
pub const ZERO_SCAN_STEP: f64 = PI / 8.0;
const ZERO_BISECTION_TOL: f64 = 1e-12;

const ENVELOPE_SCAN: (f64, f64) = (1.0, 200.0);
const ENVELOPE_SCAN_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroKind {
    Function,
    Derivative,
}

/// Coefficients `a[j] = a_{2j}` of the power series of Υ_N.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    a: Vec<f64>,
}

impl SeriesCoefficients {
    pub fn new(dimension: u32, count: usize) -> Self {
        let n = dimension as f64;
        let mut a = Vec::with_capacity(count);
        let mut current = 1.0;
        for j in 0..count {
            if j > 0 {
                let jf = j as f64;
                current /= (2.0 * jf) * (n + 2.0 * jf - 2.0);
            }
            a.push(current);
        }
        Self { a }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }
}

#[derive(Debug, Clone)]
pub struct UpsilonEvaluator {
    dimension: u32,
    truncation_tol: f64,
    max_terms: usize,
    envelope_constant: OnceLock<f64>,
}

impl UpsilonEvaluator {
    pub fn new(dimension: u32) -> Result<Self> {
        Self::with_tolerance(dimension, DEFAULT_TRUNCATION_TOL, DEFAULT_MAX_TERMS)
    }

    pub fn with_tolerance(dimension: u32, truncation_tol: f64, max_terms: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(truncation_tol > 0.0) || !truncation_tol.is_finite() {
            return Err(Error::Domain(format!(
                "truncation tolerance must be positive, got {truncation_tol}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::Domain("max_terms must be at least 1".into()));
        }
        Ok(Self {
            dimension,
            truncation_tol,
            max_terms,
            envelope_constant: OnceLock::new(),
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn truncation_tol(&self) -> f64 {
        self.truncation_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Υ_N(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_argument(t)?;
        if t == 0.0 {
            return Ok(1.0);
        }
        match self.dimension {
            1 => Ok(t.cos()),
            2 => Ok(libm::j0(t)),
            3 => Ok(t.sin() / t),
            _ if self.series_is_stable(t) => self.series(t, 0),
            _ => Ok(self.chain(t).current.0),
        }
    }

    /// Υ'_N(t); exactly zero at the origin.
    pub fn eval_derivative(&self, t: f64) -> Result<f64> {
        check_argument(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        match self.dimension {
            1 => Ok(-t.sin()),
            2 => Ok(-libm::j1(t)),
            3 if t < 0.5 => self.series(t, 1),
            3 => Ok((t * t.cos() - t.sin()) / (t * t)),
            _ if self.series_is_stable(t) => self.series(t, 1),
            _ => Ok(self.chain(t).current.1),
        }
    }

    /// Υ''_N(t), computed without using the differential equation.
    pub fn eval_second_derivative(&self, t: f64) -> Result<f64> {
        check_argument(t)?;
        if t == 0.0 {
            return Ok(-1.0 / self.dimension as f64);
        }
        match self.dimension {
            1 => Ok(-t.cos()),
            2 => Ok(-libm::j0(t) + libm::j1(t) / t),
            3 if t < 1.0 => self.series(t, 2),
            3 => {
                let (s, c) = t.sin_cos();
                Ok(-s / t - 2.0 * c / (t * t) + 2.0 * s / (t * t * t))
            }
            _ if self.series_is_stable(t) => self.series(t, 2),
            _ => {
                let chain = self.chain(t);
                let n = (self.dimension - 2) as f64;
                let (y_prev, dy_prev) = chain.previous;
                let (y, dy) = chain.current;
                Ok(-n / (t * t) * (y_prev - y) + n / t * (dy_prev - dy))
            }
        }
    }

    /// Υ_N(t) through the recurrence chain from the trigonometric or Bessel
    /// base case. For N ≤ 2 this is the base case itself.
    pub fn eval_by_recurrence(&self, t: f64) -> Result<f64> {
        check_argument(t)?;
        if t == 0.0 {
            return Err(Error::Domain(
                "recurrence is singular at t = 0; use eval".into(),
            ));
        }
        Ok(self.chain(t).current.0)
    }

    /// `Υ'' + (N-1)/t Υ' + Υ`; vanishes up to rounding.
    pub fn ode_residual(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("ODE residual needs t > 0, got {t}")));
        }
        let n = self.dimension as f64;
        let y = self.eval(t)?;
        let dy = self.eval_derivative(t)?;
        let d2y = self.eval_second_derivative(t)?;
        Ok(d2y + (n - 1.0) / t * dy + y)
    }

    /// Simple roots of Υ_N (or Υ'_N) in `[a, b]`, strictly increasing.
    pub fn zeros_in(&self, a: f64, b: f64, which: ZeroKind) -> Result<Vec<f64>> {
        if !(a >= 0.0) || !(b > a) || !b.is_finite() {
            return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
        }
        let f = |t: f64| match which {
            ZeroKind::Function => self.eval(t),
            ZeroKind::Derivative => self.eval_derivative(t),
        };
        let steps = ((b - a) / ZERO_SCAN_STEP).ceil() as usize;
        let mut roots = Vec::new();
        let mut x0 = a;
        let mut f0 = f(x0)?;
        if f0 == 0.0 {
            roots.push(x0);
        }
        for i in 1..=steps {
            let x1 = if i == steps { b } else { a + i as f64 * ZERO_SCAN_STEP };
            let f1 = f(x1)?;
            if f1 == 0.0 {
                roots.push(x1);
            } else if f0 != 0.0 && f0.signum() != f1.signum() {
                roots.push(bisect(&f, x0, x1, f0)?);
            }
            x0 = x1;
            f0 = f1;
        }
        Ok(roots)
    }

    /// `C_N t^{-(N-1)/2}`, an upper bound for `|Υ_N(t)|` on `[1, 200]`.
    pub fn envelope_bound(&self, t: f64) -> Result<f64> {
        if !(t >= 1.0) || !t.is_finite() {
            return Err(Error::Domain(format!("envelope bound needs t >= 1, got {t}")));
        }
        let exponent = (self.dimension as f64 - 1.0) / 2.0;
        Ok(self.envelope_constant()? * t.powf(-exponent))
    }

    /// The constant `C_N` of [`Self::envelope_bound`].
    pub fn envelope_constant(&self) -> Result<f64> {
        if let Some(c) = self.envelope_constant.get() {
            return Ok(*c);
        }
        let c = self.scan_envelope_constant()?;
        Ok(*self.envelope_constant.get_or_init(|| c))
    }

    fn scan_envelope_constant(&self) -> Result<f64> {
        if self.dimension == 1 {
            return Ok(1.0);
        }
        let exponent = (self.dimension as f64 - 1.0) / 2.0;
        let g = |t: f64| -> Result<f64> { Ok(self.eval(t)?.abs() * t.powf(exponent)) };

        let (lo, hi) = ENVELOPE_SCAN;
        let count = ((hi - lo) / ENVELOPE_SCAN_STEP).round() as usize;
        let samples = (0..=count)
            .map(|i| {
                let t = lo + i as f64 * ENVELOPE_SCAN_STEP;
                g(t).map(|v| (t, v))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut best = samples.iter().map(|&(_, v)| v).fold(0.0, f64::max);
        // Golden-section refinement of every interior local maximum.
        for w in samples.windows(3) {
            let (t_mid, v_mid) = w[1];
            if v_mid >= w[0].1 && v_mid >= w[2].1 {
                let refined = golden_max(&g, t_mid - ENVELOPE_SCAN_STEP, t_mid + ENVELOPE_SCAN_STEP)?;
                best = best.max(refined);
            }
        }
        Ok(best)
    }

    /// Power series summation of the `order`-th derivative.
    fn series(&self, t: f64, order: u32) -> Result<f64> {
        let n = self.dimension as f64;
        let t2 = t * t;
        // term_j = (-1)^j a_{2j} t^{2j}; the derivative of order d multiplies by
        // (2j)(2j-1)...(2j-d+1) / t^d.
        let mut term = 1.0;
        let mut sum = if order == 0 { 1.0 } else { 0.0 };
        for j in 1..self.max_terms {
            let jf = j as f64;
            term *= -t2 / ((2.0 * jf) * (n + 2.0 * jf - 2.0));
            let contribution = match order {
                0 => term,
                1 => term * 2.0 * jf / t,
                _ => term * 2.0 * jf * (2.0 * jf - 1.0) / t2,
            };
            if contribution.abs() < self.truncation_tol {
                return Ok(sum);
            }
            sum += contribution;
        }
        Err(Error::Convergence {
            partial: sum,
            terms: self.max_terms,
        })
    }

    /// The series has monotonically decreasing terms while `t² <= 2N`; the
    /// upward recurrence is stable once `t` exceeds the Bessel order `N/2 - 1`.
    fn series_is_stable(&self, t: f64) -> bool {
        let n = self.dimension as f64;
        t * t <= 2.0 * n || t <= 0.5 * n
    }

    fn chain(&self, t: f64) -> Chain {
        let (mut n, mut current) = if self.dimension % 2 == 1 {
            (1u32, (t.cos(), -t.sin()))
        } else {
            (2u32, (libm::j0(t), -libm::j1(t)))
        };
        let mut previous = current;
        while n < self.dimension {
            let nf = n as f64;
            let (y, dy) = current;
            let y_next = -nf / t * dy;
            let dy_next = nf / t * (y - y_next);
            previous = current;
            current = (y_next, dy_next);
            n += 2;
        }
        Chain { previous, current }
    }
}

struct Chain {
    previous: (f64, f64),
    current: (f64, f64),
}

fn check_argument(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("argument must be finite, got {t}")));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("argument must be nonnegative, got {t}")));
    }
    Ok(())
}

fn bisect<F>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while hi - lo > ZERO_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_max<F>(g: &F, mut a: f64, mut b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    for _ in 0..60 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d)?;
        }
    }
    Ok(gc.max(gd))
}
