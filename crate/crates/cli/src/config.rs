use std::fs;
use std::path::{Path, PathBuf};

use causal_diffusion::forward::{ForwardPath, Grid2D, DEFAULT_STENCIL_POINTS};
use causal_diffusion::green::DiffusionParams;
use causal_diffusion::inversion::{DiscrepancyScale, LandweberConfig, DEFAULT_BAND_SPLIT_TOL, DEFAULT_ZERO_MASK_TOL};
use causal_diffusion::io::GridFile;
use causal_diffusion::particle::{JitterScope, NoiseSpec};
use causal_diffusion::phantom;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phantom {
    QuestionMark,
    Blob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Causal,
    /// Classical diffusion with the linked diffusivity, explicit Euler.
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Landweber,
    MoorePenrose,
    TimeReversal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    Spatial,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[allow(clippy::enum_variant_names)]
pub enum Jitter {
    PerParticle,
    PerSourcePixel,
    PerStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Relative,
    Absolute,
}

/// On-disk experiment description. Every key is optional except `c` and
/// one of `tau` / `tau_pixels`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    c: f64,
    tau: Option<f64>,
    tau_pixels: Option<f64>,
    #[serde(default = "default_dimension")]
    dimension: u32,
    time: Option<f64>,
    time_steps: Option<f64>,

    input: Option<PathBuf>,
    data: Option<PathBuf>,
    phantom: Option<Phantom>,
    #[serde(default = "default_grid")]
    grid: usize,
    #[serde(default)]
    pad: usize,
    dx: Option<f64>,
    #[serde(default = "default_sigma")]
    blob_sigma: f64,

    #[serde(default = "default_model")]
    model: Model,
    euler_dt: Option<f64>,
    #[serde(default = "default_method")]
    method: Method,
    #[serde(default = "default_path")]
    forward_path: PathKind,
    #[serde(default = "default_points")]
    stencil_points: usize,

    #[serde(default = "default_parts")]
    parts: usize,
    #[serde(default)]
    delta: f64,
    #[serde(default)]
    radius_perturbation: f64,
    #[serde(default = "default_jitter")]
    jitter: Jitter,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    noise_seed: u64,

    #[serde(default = "default_eta")]
    eta: f64,
    #[serde(default = "default_max_iters")]
    max_iters: usize,
    #[serde(default = "default_scale")]
    discrepancy: Scale,
    #[serde(default = "default_zero_mask_tol")]
    zero_mask_tol: f64,
    #[serde(default = "default_band_split_tol")]
    band_split_tol: f64,

    #[serde(default = "default_out_dir")]
    out_dir: PathBuf,
}

fn default_dimension() -> u32 {
    2
}
fn default_grid() -> usize {
    128
}
fn default_sigma() -> f64 {
    6.0
}
fn default_model() -> Model {
    Model::Causal
}
fn default_method() -> Method {
    Method::Landweber
}
fn default_path() -> PathKind {
    PathKind::Spatial
}
fn default_points() -> usize {
    DEFAULT_STENCIL_POINTS
}
fn default_parts() -> usize {
    65
}
fn default_jitter() -> Jitter {
    Jitter::PerParticle
}
fn default_eta() -> f64 {
    2.0
}
fn default_max_iters() -> usize {
    100
}
fn default_scale() -> Scale {
    Scale::Relative
}
fn default_zero_mask_tol() -> f64 {
    DEFAULT_ZERO_MASK_TOL
}
fn default_band_split_tol() -> f64 {
    DEFAULT_BAND_SPLIT_TOL
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Command-line replacements for config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub time_steps: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

/// A validated experiment with its initial condition loaded.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub params: DiffusionParams,
    pub time: f64,
    /// Ground truth or forward input; absent when only `data` is given.
    pub truth: Option<Grid2D>,
    pub data: Option<Grid2D>,
    pub model: Model,
    /// Euler step for the standard model.
    pub euler_dt: f64,
    pub method: Method,
    pub forward_path: ForwardPath,
    pub parts: usize,
    pub noise: NoiseSpec,
    pub seed: u64,
    pub landweber: LandweberConfig,
    pub zero_mask_tol: f64,
    pub band_split_tol: f64,
    pub out_dir: PathBuf,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn load_grid(path: &Path, dimension: u32) -> Result<Grid2D, CliError> {
    if !path.exists() {
        return Err(config_err(format!("{} does not exist", path.display())));
    }
    let file = GridFile::load(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    if file.dimension != dimension {
        return Err(config_err(format!(
            "{} was written for N = {}, config says N = {dimension}",
            path.display(),
            file.dimension
        )));
    }
    Ok(file.grid)
}

impl Experiment {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, overrides)
    }

    /// Parses `text`, reading referenced files relative to `base`.
    pub fn parse(text: &str, base: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if let Some(steps) = overrides.time_steps {
            table.remove("time");
            table.insert("time_steps".into(), toml::Value::Float(steps));
        }
        if let Some(dir) = &overrides.out_dir {
            let dir = std::env::current_dir().map(|cwd| cwd.join(dir)).unwrap_or_else(|_| dir.clone());
            table.insert("out_dir".into(), toml::Value::String(dir.display().to_string()));
        }
        let raw: RawConfig = table.try_into().map_err(|e: toml::de::Error| config_err(e.to_string()))?;
        let lift = |e: causal_diffusion::Error| config_err(e.to_string());

        let truth = match (&raw.input, raw.phantom) {
            (Some(_), Some(_)) => return Err(config_err("set either `input` or `phantom`, not both")),
            (Some(p), None) => Some(load_grid(&resolve(base, p), raw.dimension)?),
            (None, Some(kind)) => {
                if raw.grid == 0 || 2 * raw.pad >= raw.grid {
                    return Err(config_err(format!("grid {} with pad {} is empty", raw.grid, raw.pad)));
                }
                let dx = raw.dx.unwrap_or(1.0 / (raw.grid - 1) as f64);
                Some(match kind {
                    Phantom::QuestionMark => phantom::question_mark_padded(raw.grid, raw.pad, dx),
                    Phantom::Blob => phantom::gaussian_blob(raw.grid, raw.grid, dx, raw.blob_sigma),
                }
                .map_err(lift)?)
            }
            (None, None) => None,
        };
        let data = match &raw.data {
            Some(p) => Some(load_grid(&resolve(base, p), raw.dimension)?),
            None => None,
        };
        let reference = truth
            .as_ref()
            .or(data.as_ref())
            .ok_or_else(|| config_err("one of `input`, `phantom` or `data` is required"))?;
        if let (Some(t), Some(d)) = (&truth, &data) {
            t.check_same_geometry(d).map_err(lift)?;
        }

        let tau = match (raw.tau, raw.tau_pixels) {
            (Some(t), None) => t,
            (None, Some(px)) => px * reference.dx() / raw.c,
            _ => return Err(config_err("set exactly one of `tau` and `tau_pixels`")),
        };
        let params = DiffusionParams::new(raw.c, tau, raw.dimension).map_err(lift)?;
        let time = match (raw.time, raw.time_steps) {
            (Some(t), None) => t,
            (None, Some(steps)) => steps * tau,
            _ => return Err(config_err("set exactly one of `time` and `time_steps`")),
        };
        if !(time > 0.0 && time.is_finite()) {
            return Err(config_err(format!("time must be positive, got {time}")));
        }

        let forward_path = match raw.forward_path {
            PathKind::Spatial => ForwardPath::Spatial {
                stencil_points: raw.stencil_points,
            },
            PathKind::Spectral => ForwardPath::Spectral,
        };
        if raw.parts == 0 {
            return Err(config_err("`parts` must be at least 1"));
        }
        let mut noise = NoiseSpec::new(raw.radius_perturbation, raw.delta, raw.noise_seed).map_err(lift)?;
        noise.jitter = match raw.jitter {
            Jitter::PerParticle => JitterScope::PerParticle,
            Jitter::PerSourcePixel => JitterScope::PerSourcePixel,
            Jitter::PerStep => JitterScope::PerStep,
        };
        let scale = match raw.discrepancy {
            Scale::Relative => DiscrepancyScale::Relative,
            Scale::Absolute => DiscrepancyScale::Absolute,
        };
        let landweber = LandweberConfig::new(raw.eta, raw.delta, raw.max_iters, forward_path)
            .map_err(lift)?
            .with_scale(scale);
        let euler_dt = match raw.euler_dt {
            Some(dt) => dt,
            None => reference.dx().powi(2) / (2.0 * raw.dimension as f64 * params.d0()),
        };
        if raw.model == Model::Standard && raw.dimension != 2 {
            return Err(config_err("the standard model runs on planar grids only (N = 2)"));
        }
        for (name, tol) in [("zero_mask_tol", raw.zero_mask_tol), ("band_split_tol", raw.band_split_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(config_err(format!("`{name}` must lie in (0, 1), got {tol}")));
            }
        }

        Ok(Self {
            params,
            time,
            truth,
            data,
            model: raw.model,
            euler_dt,
            method: raw.method,
            forward_path,
            parts: raw.parts,
            noise,
            seed: raw.seed,
            landweber,
            zero_mask_tol: raw.zero_mask_tol,
            band_split_tol: raw.band_split_tol,
            out_dir: resolve(base, &raw.out_dir),
        })
    }
}
