use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid2D;
use crate::error::Result;
use crate::exec;
use crate::green::{CausalSymbol, DiffusionParams};

/// Unitary 2D discrete Fourier transform of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
    rows: usize,
    cols: usize,
    dx: f64,
    origin: [f64; 2],
}

struct Plans {
    row: Arc<dyn Fft<f64>>,
    col: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(rows: usize, cols: usize, inverse: bool) -> Self {
        let mut planner = FftPlanner::new();
        if inverse {
            Self {
                row: planner.plan_fft_inverse(cols),
                col: planner.plan_fft_inverse(rows),
            }
        } else {
            Self {
                row: planner.plan_fft_forward(cols),
                col: planner.plan_fft_forward(rows),
            }
        }
    }
}

fn transform(data: &mut Vec<Complex64>, rows: usize, cols: usize, inverse: bool) {
    let plans = Plans::new(rows, cols, inverse);
    exec::for_each_row(data, cols, |_, row| plans.row.process(row));
    let mut transposed = transpose(data, rows, cols);
    exec::for_each_row(&mut transposed, rows, |_, col| plans.col.process(col));
    *data = transpose(&transposed, cols, rows);
    let scale = 1.0 / ((rows * cols) as f64).sqrt();
    data.iter_mut().for_each(|z| *z *= scale);
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    exec::for_each_row(&mut out, rows, |c, column| {
        for (r, slot) in column.iter_mut().enumerate() {
            *slot = data[r * cols + c];
        }
    });
    out
}

/// Signed lattice wave number `2π j / (n dx)` of bin `index`.
pub fn wavenumber(index: usize, n: usize, dx: f64) -> f64 {
    let j = if index <= n / 2 {
        index as f64
    } else {
        index as f64 - n as f64
    };
    2.0 * PI * j / (n as f64 * dx)
}

impl Spectrum {
    pub fn forward(u: &Grid2D) -> Self {
        let mut coeffs: Vec<Complex64> =
            u.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform(&mut coeffs, u.rows(), u.cols(), false);
        Self {
            coeffs,
            rows: u.rows(),
            cols: u.cols(),
            dx: u.dx(),
            origin: u.origin(),
        }
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse(&self) -> Grid2D {
        let mut data = self.coeffs.clone();
        transform(&mut data, self.rows, self.cols, true);
        Grid2D::new(self.rows, self.cols, self.dx, data.iter().map(|z| z.re).collect())
            .expect("inverse transform of a finite spectrum is finite")
            .with_origin(self.origin)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `|k|` of every bin, row-major.
    pub fn wavenumber_magnitudes(&self) -> Vec<f64> {
        let (rows, cols, dx) = (self.rows, self.cols, self.dx);
        let ky: Vec<f64> = (0..rows).map(|r| wavenumber(r, rows, dx)).collect();
        let kx: Vec<f64> = (0..cols).map(|c| wavenumber(c, cols, dx)).collect();
        let mut out = vec![0.0; rows * cols];
        exec::for_each_row(&mut out, cols, |r, row| {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = kx[c].hypot(ky[r]);
            }
        });
        out
    }

    /// Multiplies each bin by `f(|k|)`.
    pub fn apply_radial<F>(&mut self, f: F) -> Result<()>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        let factors = radial_factors(&self.wavenumber_magnitudes(), f)?;
        self.coeffs
            .iter_mut()
            .zip(&factors)
            .for_each(|(z, &m)| *z *= m);
        Ok(())
    }
}

/// `f(k)` for every entry, evaluated in parallel.
pub fn radial_factors<T, F>(magnitudes: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    exec::map_indices(magnitudes.len(), |i| f(magnitudes[i]))
        .into_iter()
        .collect()
}

/// `F_T u` by multiplication with the causal symbol in Fourier space.
pub fn evolve_spectral(u: &Grid2D, p: &DiffusionParams, t: f64) -> Result<Grid2D> {
    let symbol = CausalSymbol::new(p, t)?;
    let mut spectrum = Spectrum::forward(u);
    spectrum.apply_radial(|k| symbol.at(k))?;
    Ok(spectrum.inverse())
}

/// `∂/∂t F_t u` at `t`, by the spectral multiplier `Υ(kcτ)^m k c Υ'(k c s)`.
pub fn evolve_spectral_time_derivative(u: &Grid2D, p: &DiffusionParams, t: f64) -> Result<Grid2D> {
    let symbol = CausalSymbol::new(p, t)?;
    let mut spectrum = Spectrum::forward(u);
    spectrum.apply_radial(|k| symbol.time_derivative_at(k))?;
    Ok(spectrum.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise_grid(rows: usize, cols: usize) -> Grid2D {
        // deterministic pseudo-random values
        let mut state = 0x2545_f491_4f6c_dd1du64;
        Grid2D::from_fn(rows, cols, 0.5, |_, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .unwrap()
    }

    #[test]
    fn round_trip() {
        for &(r, c) in &[(16, 16), (12, 20), (7, 5)] {
            let u = noise_grid(r, c);
            let back = Spectrum::forward(&u).inverse();
            for (a, b) in u.values().iter().zip(back.values()) {
                assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn hermitian_symmetry_for_real_input() {
        let (rows, cols) = (8, 6);
        let s = Spectrum::forward(&noise_grid(rows, cols));
        for r in 0..rows {
            for c in 0..cols {
                let z = s.coeffs()[r * cols + c];
                let w = s.coeffs()[((rows - r) % rows) * cols + (cols - c) % cols];
                assert!((z - w.conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval() {
        let u = noise_grid(10, 14);
        let s = Spectrum::forward(&u);
        let e_space: f64 = u.values().iter().map(|v| v * v).sum();
        let e_freq: f64 = s.coeffs().iter().map(|z| z.norm_sqr()).sum();
        assert!((e_space - e_freq).abs() < 1e-10 * e_space);
    }

    #[test]
    fn wavenumbers_are_signed() {
        assert_eq!(wavenumber(0, 8, 1.0), 0.0);
        assert!((wavenumber(1, 8, 1.0) - PI / 4.0).abs() < 1e-15);
        assert!((wavenumber(7, 8, 1.0) + PI / 4.0).abs() < 1e-15);
        assert!((wavenumber(4, 8, 1.0) - PI).abs() < 1e-15);
    }

    #[test]
    fn evolution_conserves_mass() {
        let u = noise_grid(32, 32);
        let p = DiffusionParams::new(1.0, 2.0, 2).unwrap();
        let w = evolve_spectral(&u, &p, 3.0).unwrap();
        assert!((w.total_mass() - u.total_mass()).abs() < 1e-12 * u.total_mass());
    }
}
