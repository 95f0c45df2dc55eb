use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use causal_diffusion::forward::{evolve_euler_standard, ForwardOperator, Grid2D};
use causal_diffusion::green::{ghat_causal, ghat_perturbed, ghat_standard, spectral_normalization, zero_set, DiffusionParams};
use causal_diffusion::inversion::{moore_penrose_spectral, solve_landweber, time_reversal, time_reversal_data};
use causal_diffusion::io::{save_pgm, write_csv, GridFile};
use causal_diffusion::particle::{add_data_noise, simulate_data, NoiseSpec};
use causal_diffusion::upsilon::UpsilonEvaluator;
use causal_diffusion::Error;
use clap::{Parser, Subcommand};

mod config;

use config::{Experiment, Method, Model, Overrides};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, configuration or input files (exit 2).
    Config(String),
    /// The computation itself failed (exit 3).
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) | Error::Format(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Numeric(format!("i/o failure: {e}"))
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "cdiff", version, about = "Causal diffusion: Green functions, forward models and inversion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate Υ_N and its derivative as CSV.
    Upsilon {
        #[arg(long, default_value_t = 3)]
        dim: u32,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 4.0 * std::f64::consts::PI)]
        t_max: f64,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long, default_value = "upsilon.csv")]
        out: PathBuf,
    },
    /// Causal, standard and perturbed Green symbols, normalized to 1 at k = 0.
    CompareGreen {
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 3)]
        dim: u32,
        /// Comma separated list of times.
        #[arg(long, value_delimiter = ',', default_value = "1,9")]
        times: Vec<f64>,
        #[arg(long, default_value_t = 20.0)]
        k_max: f64,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
        #[arg(long, default_value = "green.csv")]
        out: PathBuf,
    },
    /// Zeros of the causal symbol `k ↦ Ĝ(k, t)` in `(0, k_max]`, one per line.
    Zeros {
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 3)]
        dim: u32,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 20.0)]
        k_max: f64,
    },
    /// Apply the forward operator to the configured input.
    Forward(ConfigArgs),
    /// Generate particle-method data from the configured input.
    Simulate(ConfigArgs),
    /// Reconstruct the initial concentration from data.
    Invert(ConfigArgs),
}

#[derive(clap::Args, Debug)]
struct ConfigArgs {
    /// TOML experiment file; relative paths inside resolve against its directory.
    #[arg(long)]
    config: PathBuf,
    /// Replace the configured time by this multiple of τ.
    #[arg(long)]
    time_steps: Option<f64>,
    /// Replace the configured output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn csv_file(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| a + i as f64 * step)
}

fn cmd_upsilon(dim: u32, t_min: f64, t_max: f64, samples: usize, out: &Path) -> CliResult {
    if !(t_min >= 0.0 && t_max > t_min && t_max.is_finite()) || samples < 2 {
        return Err(CliError::Config(format!(
            "need 0 <= t_min < t_max and samples >= 2, got [{t_min}, {t_max}] with {samples}"
        )));
    }
    let ev = UpsilonEvaluator::new(dim)?;
    let rows = linspace(t_min, t_max, samples)
        .map(|t| Ok(vec![t, ev.eval(t)?, ev.eval_derivative(t)?]))
        .collect::<Result<Vec<_>, Error>>()?;
    write_csv(csv_file(out)?, &["t", "upsilon", "upsilon_prime"], rows)?;
    Ok(())
}

fn cmd_compare_green(p: &DiffusionParams, times: &[f64], k_max: f64, samples: usize, out: &Path) -> CliResult {
    if !(k_max > 0.0 && k_max.is_finite()) || samples < 2 || times.is_empty() {
        return Err(CliError::Config("need k_max > 0, samples >= 2 and at least one time".into()));
    }
    let norm = spectral_normalization(p.dimension).recip();
    let mut rows = Vec::with_capacity(times.len() * samples);
    for &t in times {
        for k in linspace(0.0, k_max, samples) {
            rows.push(vec![
                t,
                k,
                norm * ghat_causal(p, k, t)?,
                norm * ghat_standard(p, k, t)?,
                norm * ghat_perturbed(p, k, t)?,
            ]);
        }
    }
    write_csv(csv_file(out)?, &["t", "k", "causal", "standard", "perturbed"], rows)?;
    Ok(())
}

fn cmd_zeros(p: &DiffusionParams, t: f64, k_max: f64) -> CliResult {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for k in zero_set(p, t, k_max)? {
        writeln!(out, "{k:.12}")?;
    }
    Ok(())
}

fn save_grid(exp: &Experiment, name: &str, grid: &Grid2D) -> CliResult {
    GridFile::new(exp.params.dimension, grid.clone()).save(&exp.out_dir.join(format!("{name}.cdg")))?;
    save_pgm(grid, &exp.out_dir.join(format!("{name}.pgm")))?;
    Ok(())
}

fn write_meta(exp: &Experiment, command: &str, config: &Path) -> CliResult {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut f = File::create(exp.out_dir.join("run.meta"))?;
    writeln!(f, "command = {command}")?;
    writeln!(f, "config = {}", config.display())?;
    writeln!(f, "version = {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(f, "unix_time = {stamp}")?;
    Ok(())
}

fn require_truth(exp: &Experiment) -> CliResult<&Grid2D> {
    exp.truth
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs `input` or `phantom`".into()))
}

fn simulated(exp: &Experiment, truth: &Grid2D) -> CliResult<Grid2D> {
    let sim = simulate_data(truth, &exp.params, exp.time, exp.parts, &exp.noise, exp.seed)?;
    if sim.outside_mass > 1e-12 * truth.total_mass() {
        eprintln!("warning: mass {:.3e} left the grid", sim.outside_mass);
    }
    Ok(sim.data)
}

fn report_error(estimate: &Grid2D, truth: Option<&Grid2D>) -> CliResult {
    if let Some(truth) = truth {
        println!("relative L2 error {:.6}", estimate.relative_l2_error(truth)?);
    }
    Ok(())
}

fn run_experiment(command: &str, args: &ConfigArgs) -> CliResult {
    let config = &args.config;
    let overrides = Overrides {
        time_steps: args.time_steps,
        out_dir: args.out_dir.clone(),
    };
    let exp = Experiment::load(config, &overrides)?;
    if exp.model == Model::Standard && command != "forward" {
        return Err(CliError::Config(format!("`{command}` needs the causal model")));
    }
    fs::create_dir_all(&exp.out_dir)?;
    match command {
        "forward" => {
            let u = require_truth(&exp)?;
            let w = match exp.model {
                Model::Causal => ForwardOperator::new(exp.params, exp.time, exp.forward_path).apply(u)?,
                Model::Standard => evolve_euler_standard(u, &exp.params, exp.time, exp.euler_dt)?,
            };
            save_grid(&exp, "input", u)?;
            save_grid(&exp, "forward", &w)?;
            println!("mass {:.12e} -> {:.12e}", u.total_mass(), w.total_mass());
        }
        "simulate" => {
            let u = require_truth(&exp)?;
            let data = simulated(&exp, u)?;
            save_grid(&exp, "truth", u)?;
            save_grid(&exp, "data", &data)?;
            println!("data grid {}x{}", data.rows(), data.cols());
        }
        _ => invert(&exp)?,
    }
    write_meta(&exp, command, config)
}

fn invert(exp: &Experiment) -> CliResult {
    let truth = exp.truth.as_ref();
    if let Some(u) = truth {
        save_grid(exp, "truth", u)?;
    }
    let estimate = match exp.method {
        Method::TimeReversal => {
            let u = require_truth(exp)?;
            let (w, w2) = time_reversal_data(u, &exp.params, exp.time)?;
            let second = NoiseSpec {
                seed: exp.noise.seed.wrapping_add(1),
                ..exp.noise
            };
            let (w, w2) = (add_data_noise(&w, &exp.noise)?, add_data_noise(&w2, &second)?);
            save_grid(exp, "data", &w)?;
            time_reversal(&w, &w2, &exp.params, exp.time, exp.band_split_tol)?
        }
        method => {
            let data = match (&exp.data, truth) {
                (Some(d), _) => d.clone(),
                (None, Some(u)) => {
                    let d = simulated(exp, u)?;
                    save_grid(exp, "data", &d)?;
                    d
                }
                (None, None) => unreachable!("config requires input, phantom or data"),
            };
            if method == Method::MoorePenrose {
                let mp = moore_penrose_spectral(&data, &exp.params, exp.time, exp.zero_mask_tol)?;
                if let Some(w) = &mp.warning {
                    eprintln!("warning: {w}");
                }
                println!("masked fraction {:.4}", mp.masked_fraction);
                mp.estimate
            } else {
                let start = Grid2D::zeros(data.rows(), data.cols(), data.dx())?.with_origin(data.origin());
                let state = solve_landweber(&data, &exp.params, exp.time, &exp.landweber, &start)?;
                state.write_csv(BufWriter::new(File::create(exp.out_dir.join("iterations.csv"))?))?;
                match state.stopped_at {
                    Some(n) => println!("discrepancy reached after {n} steps"),
                    None => println!("no discrepancy stop within {} steps", exp.landweber.max_iters),
                }
                state.iterate
            }
        }
    };
    save_grid(exp, "reconstruction", &estimate)?;
    report_error(&estimate, truth)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Upsilon {
            dim,
            t_min,
            t_max,
            samples,
            out,
        } => cmd_upsilon(dim, t_min, t_max, samples, &out),
        Command::CompareGreen {
            c,
            tau,
            dim,
            times,
            k_max,
            samples,
            out,
        } => cmd_compare_green(&DiffusionParams::new(c, tau, dim)?, &times, k_max, samples, &out),
        Command::Zeros { c, tau, dim, t, k_max } => cmd_zeros(&DiffusionParams::new(c, tau, dim)?, t, k_max),
        Command::Forward(args) => run_experiment("forward", &args),
        Command::Simulate(args) => run_experiment("simulate", &args),
        Command::Invert(args) => run_experiment("invert", &args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = match &e {
                CliError::Config(m) => format!("configuration error: {m}"),
                CliError::Numeric(m) => format!("numerical failure: {m}"),
            };
            eprintln!("cdiff: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
