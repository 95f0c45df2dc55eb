use std::io::Write;

use crate::error::{Error, Result};
use crate::forward::{ForwardOperator, ForwardPath, Grid2D};
use crate::green::DiffusionParams;

/// How `δ` enters the discrepancy test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiscrepancyScale {
    /// `‖F u - w‖ < η δ ‖w‖`.
    #[default]
    Relative,
    /// `‖F u - w‖ < η δ`, norms taken with the pixel area.
    Absolute,
}

/// Projected Landweber with discrepancy stopping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandweberConfig {
    /// Discrepancy factor, at least 2.
    pub eta: f64,
    /// Noise level of the data.
    pub delta: f64,
    pub max_iters: usize,
    pub forward_path: ForwardPath,
    pub scale: DiscrepancyScale,
}

impl LandweberConfig {
    pub fn new(eta: f64, delta: f64, max_iters: usize, forward_path: ForwardPath) -> Result<Self> {
        let cfg = Self {
            eta,
            delta,
            max_iters,
            forward_path,
            scale: DiscrepancyScale::Relative,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_scale(mut self, scale: DiscrepancyScale) -> Self {
        self.scale = scale;
        self
    }

    /// Residual norm below which iteration stops.
    pub fn threshold(&self, w_delta: &Grid2D) -> f64 {
        match self.scale {
            DiscrepancyScale::Relative => self.eta * self.delta * w_delta.l2_norm(),
            DiscrepancyScale::Absolute => self.eta * self.delta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 2.0) || !self.eta.is_finite() {
            return Err(Error::Config(format!("eta must be >= 2, got {}", self.eta)));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::Config(format!("delta must be >= 0, got {}", self.delta)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for LandweberConfig {
    fn default() -> Self {
        Self {
            eta: 2.0,
            delta: 0.0,
            max_iters: 100,
            forward_path: ForwardPath::default(),
            scale: DiscrepancyScale::Relative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Discrepancy,
    MaxIters,
}

/// One residual evaluation. `omega`, `min_value` and `mass` describe the
/// update that followed it; the final record of a stopped run has no update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub residual_norm: f64,
    pub omega: Option<f64>,
    pub min_value: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandweberState {
    pub iterate: Grid2D,
    pub records: Vec<IterationRecord>,
    /// Number of updates performed when the discrepancy test succeeded.
    pub stopped_at: Option<usize>,
    pub stop_reason: Option<StopReason>,
}

impl LandweberState {
    pub fn new(u0: Grid2D) -> Self {
        Self {
            iterate: u0,
            records: Vec::new(),
            stopped_at: None,
            stop_reason: None,
        }
    }

    pub fn iterations(&self) -> usize {
        self.records.iter().filter(|r| r.omega.is_some()).count()
    }

    pub fn residual_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.residual_norm).collect()
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.omega).collect()
    }

    /// CSV with columns `iteration,residual_norm,omega,min_value,mass`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "iteration,residual_norm,omega,min_value,mass")?;
        for r in &self.records {
            let omega = r.omega.map(|w| format!("{w:e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{:e},{},{:e},{:e}",
                r.iteration, r.residual_norm, omega, r.min_value, r.mass
            )?;
        }
        Ok(())
    }
}

/// `(u_{n+1}, ω)` from `u_n`, its residual `r` and `F r`.
fn projected_update(u: &Grid2D, r_norm: f64, fr: &Grid2D) -> Result<(Grid2D, f64)> {
    let fr_norm = fr.l2_norm();
    if fr_norm == 0.0 {
        return Err(Error::Stagnation {
            residual_norm: r_norm,
        });
    }
    let omega = 0.25 * r_norm * r_norm / (fr_norm * fr_norm);
    let values = u
        .values()
        .iter()
        .zip(fr.values())
        .map(|(a, b)| (a - omega * b).max(0.0))
        .collect();
    Ok((u.with_values(values)?, omega))
}

/// A single projected Landweber update, appending its record to `state`.
pub fn landweber_step(
    state: &LandweberState,
    w_delta: &Grid2D,
    p: &DiffusionParams,
    t: f64,
    cfg: &LandweberConfig,
) -> Result<LandweberState> {
    let op = ForwardOperator::new(*p, t, cfg.forward_path);
    state.iterate.check_same_geometry(w_delta)?;
    let residual = op.apply(&state.iterate)?.axpy(-1.0, w_delta)?;
    let r_norm = residual.l2_norm();
    let mut next = state.clone();
    let iteration = state.iterations();
    if r_norm == 0.0 {
        next.records.push(IterationRecord {
            iteration,
            residual_norm: 0.0,
            omega: Some(0.0),
            min_value: state.iterate.min_value(),
            mass: state.iterate.total_mass(),
        });
        return Ok(next);
    }
    let fr = op.adjoint(&residual)?;
    let (iterate, omega) = projected_update(&state.iterate, r_norm, &fr)?;
    next.records.push(IterationRecord {
        iteration,
        residual_norm: r_norm,
        omega: Some(omega),
        min_value: iterate.min_value(),
        mass: iterate.total_mass(),
    });
    next.iterate = iterate;
    Ok(next)
}

/// Iterates until the discrepancy test of `cfg` holds or `max_iters` updates.
pub fn solve_landweber(
    w_delta: &Grid2D,
    p: &DiffusionParams,
    t: f64,
    cfg: &LandweberConfig,
    u0: &Grid2D,
) -> Result<LandweberState> {
    cfg.validate()?;
    u0.check_same_geometry(w_delta)?;
    let op = ForwardOperator::new(*p, t, cfg.forward_path);
    let threshold = cfg.threshold(w_delta);
    let mut state = LandweberState::new(u0.clone());
    let mut n = 0;
    loop {
        let residual = op.apply(&state.iterate)?.axpy(-1.0, w_delta)?;
        let r_norm = residual.l2_norm();
        let mut record = IterationRecord {
            iteration: n,
            residual_norm: r_norm,
            omega: None,
            min_value: state.iterate.min_value(),
            mass: state.iterate.total_mass(),
        };
        if r_norm < threshold || r_norm == 0.0 {
            state.records.push(record);
            state.stopped_at = Some(n);
            state.stop_reason = Some(StopReason::Discrepancy);
            return Ok(state);
        }
        if n == cfg.max_iters {
            state.records.push(record);
            state.stop_reason = Some(StopReason::MaxIters);
            return Ok(state);
        }
        let fr = op.adjoint(&residual)?;
        let (iterate, omega) = projected_update(&state.iterate, r_norm, &fr)?;
        record.omega = Some(omega);
        record.min_value = iterate.min_value();
        record.mass = iterate.total_mass();
        state.records.push(record);
        state.iterate = iterate;
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(n: usize) -> Grid2D {
        Grid2D::from_fn(n, n, 1.0, |r, c| {
            let (x, y) = (c as f64 - n as f64 / 2.0, r as f64 - n as f64 / 2.0);
            (-(x * x + y * y) / 20.0).exp()
        })
        .unwrap()
    }

    fn setup() -> (DiffusionParams, LandweberConfig) {
        let p = DiffusionParams::new(3.0, 1.0, 2).unwrap();
        let cfg = LandweberConfig::new(2.0, 0.0, 20, ForwardPath::Spectral).unwrap();
        (p, cfg)
    }

    #[test]
    fn exact_solution_is_a_fixed_point() {
        let (p, cfg) = setup();
        let u = blob(32);
        let w = crate::forward::evolve_spectral(&u, &p, 1.0).unwrap();
        let op = ForwardOperator::new(p, 1.0, cfg.forward_path);
        let r = op.apply(&u).unwrap().axpy(-1.0, &w).unwrap();
        assert_eq!(r.l2_norm(), 0.0);
        let next = landweber_step(&LandweberState::new(u.clone()), &w, &p, 1.0, &cfg).unwrap();
        assert_eq!(next.iterate, u);
    }

    #[test]
    fn first_step_from_zero_is_nonnegative() {
        let (p, cfg) = setup();
        let w = crate::forward::evolve_spectral(&blob(32), &p, 1.0).unwrap();
        let zero = Grid2D::zeros(32, 32, 1.0).unwrap();
        let s = landweber_step(&LandweberState::new(zero), &w, &p, 1.0, &cfg).unwrap();
        assert!(s.iterate.min_value() >= 0.0);
        assert!(s.iterate.max_value() > 0.0);
        assert_eq!(s.records.len(), 1);
        assert!(s.omegas()[0] >= 0.25);
    }

    #[test]
    fn large_delta_stops_immediately() {
        let (p, _) = setup();
        let cfg = LandweberConfig::new(2.0, 0.6, 20, ForwardPath::Spectral).unwrap();
        let w = crate::forward::evolve_spectral(&blob(16), &p, 1.0).unwrap();
        let s = solve_landweber(&w, &p, 1.0, &cfg, &Grid2D::zeros(16, 16, 1.0).unwrap()).unwrap();
        assert_eq!(s.stopped_at, Some(0));
        assert_eq!(s.stop_reason, Some(StopReason::Discrepancy));
        assert_eq!(s.iterations(), 0);
    }

    #[test]
    fn max_iters_is_respected() {
        let (p, _) = setup();
        let cfg = LandweberConfig::new(2.0, 0.0, 3, ForwardPath::Spectral).unwrap();
        let w = crate::forward::evolve_spectral(&blob(16), &p, 1.0).unwrap();
        let s = solve_landweber(&w, &p, 1.0, &cfg, &Grid2D::zeros(16, 16, 1.0).unwrap()).unwrap();
        assert_eq!(s.stop_reason, Some(StopReason::MaxIters));
        assert_eq!(s.iterations(), 3);
        assert_eq!(s.records.len(), 4);
    }

    #[test]
    fn stagnation_is_reported() {
        let u = Grid2D::zeros(4, 4, 1.0).unwrap();
        let r = Grid2D::zeros(4, 4, 1.0).unwrap();
        assert!(matches!(
            projected_update(&u, 1.0, &r),
            Err(Error::Stagnation { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(LandweberConfig::new(1.9, 0.0, 1, ForwardPath::Spectral).is_err());
        assert!(LandweberConfig::new(2.0, -0.1, 1, ForwardPath::Spectral).is_err());
        assert!(LandweberConfig::new(2.0, 0.0, 0, ForwardPath::Spectral).is_err());
    }

    #[test]
    fn csv_log() {
        let (p, _) = setup();
        let cfg = LandweberConfig::new(2.0, 0.0, 2, ForwardPath::Spectral).unwrap();
        let w = crate::forward::evolve_spectral(&blob(16), &p, 1.0).unwrap();
        let s = solve_landweber(&w, &p, 1.0, &cfg, &Grid2D::zeros(16, 16, 1.0).unwrap()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "iteration,residual_norm,omega,min_value,mass");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("2,"));
        assert_eq!(lines[3].split(',').nth(2), Some(""));
    }
}
