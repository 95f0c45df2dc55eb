use crate::error::{Error, Result};

/// Concentration on a uniform square-pixel lattice, row-major.
///
/// Column index runs along `x`, row index along `y`; the center of pixel
/// `(r, c)` sits at `origin + (c dx, r dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    dx: f64,
    origin: [f64; 2],
}

impl Grid2D {
    pub fn new(rows: usize, cols: usize, dx: f64, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain(format!("grid must be non-empty, got {rows}x{cols}")));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Domain(format!("pixel size must be positive, got {dx}")));
        }
        if values.len() != rows * cols {
            return Err(Error::Domain(format!(
                "{} values do not fill a {rows}x{cols} grid",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at flat index {i}")));
        }
        Ok(Self {
            values,
            rows,
            cols,
            dx,
            origin: [0.0, 0.0],
        })
    }

    pub fn zeros(rows: usize, cols: usize, dx: f64) -> Result<Self> {
        Self::new(rows, cols, dx, vec![0.0; rows * cols])
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(
        rows: usize,
        cols: usize,
        dx: f64,
        mut f: F,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(r, c));
            }
        }
        Self::new(rows, cols, dx, values)
    }

    pub fn with_origin(mut self, origin: [f64; 2]) -> Self {
        self.origin = origin;
        self
    }

    /// A grid with the same geometry and new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Ok(Self::new(self.rows, self.cols, self.dx, values)?.with_origin(self.origin))
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

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.values[r * self.cols + c] = v;
    }

    /// Value at signed indices, zero outside the grid.
    pub fn get_or_zero(&self, r: isize, c: isize) -> f64 {
        if r < 0 || c < 0 || r as usize >= self.rows || c as usize >= self.cols {
            0.0
        } else {
            self.values[r as usize * self.cols + c as usize]
        }
    }

    /// Physical `(x, y)` of a pixel center.
    pub fn center(&self, r: usize, c: usize) -> [f64; 2] {
        [
            self.origin[0] + c as f64 * self.dx,
            self.origin[1] + r as f64 * self.dx,
        ]
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.dx == other.dx
    }

    pub fn check_same_geometry(&self, other: &Self) -> Result<()> {
        if self.same_geometry(other) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "grid mismatch: {}x{} (dx {}) vs {}x{} (dx {})",
                self.rows, self.cols, self.dx, other.rows, other.cols, other.dx
            )))
        }
    }

    /// `dx² Σ values`, summed in index order.
    pub fn total_mass(&self) -> f64 {
        self.dx * self.dx * self.values.iter().sum::<f64>()
    }

    pub fn l1_norm(&self) -> f64 {
        self.dx * self.dx * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// `dx² Σ u v` over matching pixels.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert!(self.same_geometry(other));
        self.dx
            * self.dx
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.check_same_geometry(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + alpha * b)
            .collect();
        self.with_values(values)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `‖self - other‖₂ / ‖other‖₂`.
    pub fn relative_l2_error(&self, reference: &Self) -> Result<f64> {
        let diff = self.axpy(-1.0, reference)?;
        Ok(diff.l2_norm() / reference.l2_norm())
    }
}

/// Uniform 1D grid, used for the `N = 1` model.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    values: Vec<f64>,
    dx: f64,
    origin: f64,
}

impl Grid1D {
    pub fn new(dx: f64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("grid must be non-empty".into()));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Domain(format!("pixel size must be positive, got {dx}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid contains non-finite values".into()));
        }
        Ok(Self {
            values,
            dx,
            origin: 0.0,
        })
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get_or_zero(&self, i: isize) -> f64 {
        if i < 0 || i as usize >= self.values.len() {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.dx * self.values.iter().sum::<f64>()
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            values,
            dx: self.dx,
            origin: self.origin,
        }
    }
}
