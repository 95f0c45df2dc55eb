//! Particle simulation of causal diffusion for synthetic data.
//!
//! Every pixel's mass is split into `M` equal particles. In each step a
//! particle moves on a straight line by `R = c s (1 + η)` in a direction
//! drawn uniformly from a set of `M` angles; `η` is a uniform radius
//! perturbation. Particles are finally binned back onto a grid and positive
//! mean uniform noise is added.
//!
//! Random numbers come from ChaCha8 streams keyed by `(seed, step)` and the
//! particle index, so results do not depend on thread scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::forward::Grid2D;
use crate::green::{split_time, DiffusionParams};

const PIXEL_STREAM_BASE: u64 = 1 << 62;
const STEP_STREAM: u64 = u64::MAX;
const DATA_NOISE_STREAM: u64 = u64::MAX - 1;

/// Admissible propagation directions for `M` parts per pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirectionSet {
    /// `φ = 2π j / M`, a uniform cover of the full circle.
    #[default]
    FullTurn,
    /// `φ = π j / M`, covering only the upper half plane. Biased: the cloud
    /// drifts in the `+y` direction.
    HalfTurn,
}

impl DirectionSet {
    pub fn angle(self, j: usize, m: usize) -> f64 {
        match self {
            DirectionSet::FullTurn => 2.0 * PI * j as f64 / m as f64,
            DirectionSet::HalfTurn => PI * j as f64 / m as f64,
        }
    }
}

/// How often a fresh radius perturbation is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JitterScope {
    #[default]
    PerParticle,
    PerSourcePixel,
    PerStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    /// i.i.d. uniform samples on `[0, 1)`, rescaled to the requested level.
    #[default]
    UniformPositiveMean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub radius_rel_perturbation: f64,
    pub data_noise_level: f64,
    pub noise_kind: NoiseKind,
    pub seed: u64,
    pub jitter: JitterScope,
}

impl NoiseSpec {
    pub fn new(radius_rel_perturbation: f64, data_noise_level: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            radius_rel_perturbation,
            data_noise_level,
            noise_kind: NoiseKind::UniformPositiveMean,
            seed,
            jitter: JitterScope::PerParticle,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn none() -> Self {
        Self {
            radius_rel_perturbation: 0.0,
            data_noise_level: 0.0,
            noise_kind: NoiseKind::UniformPositiveMean,
            seed: 0,
            jitter: JitterScope::PerParticle,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x >= 0.0 && x.is_finite();
        if !ok(self.radius_rel_perturbation) || self.radius_rel_perturbation >= 1.0 {
            return Err(Error::Domain(format!(
                "radius perturbation must lie in [0, 1), got {}",
                self.radius_rel_perturbation
            )));
        }
        if !ok(self.data_noise_level) {
            return Err(Error::Domain(format!(
                "noise level must be >= 0, got {}",
                self.data_noise_level
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    positions: Vec<[f64; 2]>,
    /// Particle mass divided by `cell_area`, i.e. a concentration share.
    weights: Vec<f64>,
    source_pixel: Vec<usize>,
    cell_area: f64,
    parts_per_pixel: usize,
    rng_seed: u64,
    directions: DirectionSet,
}

impl ParticleCloud {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn masses(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w * self.cell_area).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.cell_area * self.weights.iter().sum::<f64>()
    }

    pub fn parts_per_pixel(&self) -> usize {
        self.parts_per_pixel
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn directions(&self) -> DirectionSet {
        self.directions
    }

    pub fn with_directions(mut self, directions: DirectionSet) -> Self {
        self.directions = directions;
        self
    }
}

/// Splits each nonzero pixel into `m` particles at the pixel center.
pub fn scatter(u: &Grid2D, m: usize, seed: u64) -> Result<ParticleCloud> {
    if m == 0 {
        return Err(Error::Domain("need at least one part per pixel".into()));
    }
    let mut positions = Vec::new();
    let mut weights = Vec::new();
    let mut source_pixel = Vec::new();
    for r in 0..u.rows() {
        for c in 0..u.cols() {
            let v = u.get(r, c);
            if v < 0.0 {
                return Err(Error::Domain(format!(
                    "negative concentration {v} at pixel ({r}, {c})"
                )));
            }
            if v == 0.0 {
                continue;
            }
            let share = v / m as f64;
            let centre = u.center(r, c);
            for _ in 0..m {
                positions.push(centre);
                weights.push(share);
                source_pixel.push(r * u.cols() + c);
            }
        }
    }
    Ok(ParticleCloud {
        positions,
        weights,
        source_pixel,
        cell_area: u.dx() * u.dx(),
        parts_per_pixel: m,
        rng_seed: seed,
        directions: DirectionSet::default(),
    })
}

fn step_rng(seed: u64, step_index: u64, salt: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&step_index.to_le_bytes());
    key[16..24].copy_from_slice(&salt.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn stream(base: &ChaCha8Rng, id: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(id);
    rng
}

fn draw_jitter(rng: &mut ChaCha8Rng, eps: f64) -> f64 {
    if eps == 0.0 {
        0.0
    } else {
        rng.gen_range(-eps..=eps)
    }
}

/// Moves every particle by `c s (1 + η)` in a random admissible direction.
pub fn step_cloud(
    cloud: &ParticleCloud,
    p: &DiffusionParams,
    s: f64,
    noise: &NoiseSpec,
    step_index: u64,
) -> Result<ParticleCloud> {
    noise.validate()?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("step time must be positive, got {s}")));
    }
    let m = cloud.parts_per_pixel;
    let eps = noise.radius_rel_perturbation;
    let base = step_rng(cloud.rng_seed, step_index, 0);
    let jitter_base = step_rng(noise.seed, step_index, 1);
    let step_jitter = match noise.jitter {
        JitterScope::PerStep => draw_jitter(&mut stream(&jitter_base, STEP_STREAM), eps),
        _ => 0.0,
    };
    let radius = p.c * s;
    let directions = cloud.directions;
    let positions = exec::map_indices(cloud.len(), |i| {
        let mut rng = stream(&base, i as u64);
        let j = rng.gen_range(0..m);
        let eta = match noise.jitter {
            JitterScope::PerParticle => draw_jitter(&mut rng, eps),
            JitterScope::PerSourcePixel => draw_jitter(
                &mut stream(&jitter_base, PIXEL_STREAM_BASE + cloud.source_pixel[i] as u64),
                eps,
            ),
            JitterScope::PerStep => step_jitter,
        };
        let (sin, cos) = directions.angle(j, m).sin_cos();
        let r = radius * (1.0 + eta);
        let [x, y] = cloud.positions[i];
        [x + r * cos, y + r * sin]
    });
    Ok(ParticleCloud {
        positions,
        ..cloud.clone()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gathered {
    pub grid: Grid2D,
    pub outside_mass: f64,
}

/// Bins particle masses into the pixels of `template`.
///
/// Per-pixel sums use pairwise summation in particle order, so binning `2^k`
/// equal shares reproduces the original value exactly.
pub fn gather(cloud: &ParticleCloud, template: &Grid2D) -> Gathered {
    let (rows, cols, dx) = (template.rows(), template.cols(), template.dx());
    let [ox, oy] = template.origin();
    let bins: Vec<Option<usize>> = exec::map_indices(cloud.len(), |i| {
        let [x, y] = cloud.positions[i];
        let c = ((x - ox) / dx + 0.5).floor();
        let r = ((y - oy) / dx + 0.5).floor();
        (c >= 0.0 && r >= 0.0 && (c as usize) < cols && (r as usize) < rows)
            .then(|| r as usize * cols + c as usize)
    });

    // Counting sort keeps particle order within each pixel.
    let mut counts = vec![0usize; rows * cols + 1];
    let mut outside = Vec::new();
    for (i, b) in bins.iter().enumerate() {
        match b {
            Some(k) => counts[k + 1] += 1,
            None => outside.push(cloud.weights[i]),
        }
    }
    for k in 0..rows * cols {
        counts[k + 1] += counts[k];
    }
    let starts = counts.clone();
    let mut sorted = vec![0.0; counts[rows * cols]];
    let mut cursor = counts;
    for (i, b) in bins.iter().enumerate() {
        if let Some(k) = *b {
            sorted[cursor[k]] = cloud.weights[i];
            cursor[k] += 1;
        }
    }

    let scale = cloud.cell_area / (dx * dx);
    let values = exec::map_indices(rows * cols, |k| {
        let share = pairwise_sum(&sorted[starts[k]..starts[k + 1]]);
        if scale == 1.0 {
            share
        } else {
            share * scale
        }
    });
    Gathered {
        grid: template
            .with_values(values)
            .expect("binned particle weights are finite"),
        outside_mass: cloud.cell_area * outside.iter().sum::<f64>(),
    }
}

fn pairwise_sum(x: &[f64]) -> f64 {
    match x.len() {
        0 => 0.0,
        1 => x[0],
        n => pairwise_sum(&x[..n / 2]) + pairwise_sum(&x[n / 2..]),
    }
}

/// `w + e ‖w‖ δ / ‖e‖` with `e` uniform on `[0, 1)`.
pub fn add_data_noise(w: &Grid2D, noise: &NoiseSpec) -> Result<Grid2D> {
    noise.validate()?;
    let delta = noise.data_noise_level;
    if delta == 0.0 {
        return Ok(w.clone());
    }
    let mut rng = stream(&step_rng(noise.seed, 0, 2), DATA_NOISE_STREAM);
    let e = match noise.noise_kind {
        NoiseKind::UniformPositiveMean => {
            w.with_values((0..w.len()).map(|_| rng.gen::<f64>()).collect())?
        }
    };
    let e_norm = e.l2_norm();
    if e_norm == 0.0 {
        return Err(Error::Internal("noise sample vanished identically".into()));
    }
    w.axpy(w.l2_norm() * delta / e_norm, &e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedData {
    pub data: Grid2D,
    pub outside_mass: f64,
}

/// Particle data for `F_T u`: scatter, `m` full steps and one step of
/// length `s`, gather, then additive noise.
pub fn simulate_data(
    u: &Grid2D,
    p: &DiffusionParams,
    t: f64,
    m: usize,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<SimulatedData> {
    simulate_data_with(u, p, t, m, noise, seed, DirectionSet::default())
}

pub fn simulate_data_with(
    u: &Grid2D,
    p: &DiffusionParams,
    t: f64,
    m: usize,
    noise: &NoiseSpec,
    seed: u64,
    directions: DirectionSet,
) -> Result<SimulatedData> {
    if p.dimension != 2 {
        return Err(Error::Config(format!(
            "the particle method is two-dimensional, got N = {}",
            p.dimension
        )));
    }
    let split = split_time(p, t)?;
    let mut cloud = scatter(u, m, seed)?.with_directions(directions);
    for step in 0..split.m {
        cloud = step_cloud(&cloud, p, p.tau, noise, step)?;
    }
    cloud = step_cloud(&cloud, p, split.s, noise, split.m)?;
    let gathered = gather(&cloud, u);
    Ok(SimulatedData {
        data: add_data_noise(&gathered.grid, noise)?,
        outside_mass: gathered.outside_mass,
    })
}
