use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pointcurv::cli;
use pointcurv::config::RunConfig;
use pointcurv::{Error, Result};

#[derive(Parser)]
#[command(name = "pointcurv", version, about = "Principal curvature estimation on 3-D point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a benchmark surface and write its ground-truth CSV.
    Generate {
        /// Surface as kind[:params], e.g. torus:2:1, ellipsoid:3:2:1, saddle, sphere:1, plane.
        #[arg(long)]
        surface: Option<String>,
        /// Number of points.
        #[arg(short, long)]
        n: Option<String>,
        /// Per-coordinate Gaussian noise standard deviation.
        #[arg(long)]
        sigma: Option<String>,
        /// area or parameter.
        #[arg(long)]
        sampling: Option<String>,
        /// Output CSV; standard output if absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        shared: Shared,
    },
    /// Estimate curvature for every point of a CSV cloud with x,y,z columns.
    Estimate {
        input: PathBuf,
        /// Output CSV; standard output if absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        shared: Shared,
    },
    /// Run the benchmark grid and write metric tables and scatter data.
    Benchmark {
        /// Comma-separated surfaces.
        #[arg(long)]
        surfaces: Option<String>,
        /// Comma-separated noise levels.
        #[arg(long)]
        noise: Option<String>,
        /// Comma-separated seeds.
        #[arg(long)]
        seeds: Option<String>,
        /// Number of points.
        #[arg(short, long)]
        n: Option<String>,
        /// area or parameter.
        #[arg(long)]
        sampling: Option<String>,
        /// Output directory.
        #[arg(short, long, default_value = "benchmark-out")]
        out: PathBuf,
        #[command(flatten)]
        shared: Shared,
    },
}

#[derive(Args)]
struct Shared {
    /// Explained-variance bound for the tangent-frame radius, in (0, 1).
    #[arg(long)]
    gamma: Option<String>,
    /// Fraction of directional samples averaged at each extreme.
    #[arg(long)]
    extreme_fraction: Option<String>,
    /// gauss or epan.
    #[arg(long)]
    kernel: Option<String>,
    /// Truncated-Gaussian bandwidth relative to the radius.
    #[arg(long)]
    bandwidth: Option<String>,
    /// Number of radii in the sweep.
    #[arg(long)]
    grid_size: Option<String>,
    /// Largest sweep radius as a fraction of the cloud diameter.
    #[arg(long)]
    max_radius_factor: Option<String>,
    /// Fewest neighbors for a radius to count as valid.
    #[arg(long)]
    min_neighbors: Option<String>,
    /// Sampling and noise seed.
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<String>,
    /// key=value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Shared {
    fn entries(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("gamma", &self.gamma),
            ("extreme-fraction", &self.extreme_fraction),
            ("kernel", &self.kernel),
            ("bandwidth", &self.bandwidth),
            ("grid-size", &self.grid_size),
            ("max-radius-factor", &self.max_radius_factor),
            ("min-neighbors", &self.min_neighbors),
            ("seed", &self.seed),
            ("threads", &self.threads),
        ]
    }
}

fn resolve(shared: &Shared, extra: &[(&str, &Option<String>)]) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    if let Some(path) = &shared.config {
        config.merge_file(path)?;
    }
    for (key, value) in shared.entries().into_iter().chain(extra.iter().copied()) {
        if let Some(value) = value {
            config.set(key, value)?;
        }
    }
    Ok(config)
}

fn write_stdout(bytes: &[u8]) -> Result<()> {
    std::io::stdout()
        .write_all(bytes)
        .map_err(|e| Error::Io { path: "<stdout>".into(), message: e.to_string() })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { surface, n, sigma, sampling, out, shared } => {
            let config = resolve(
                &shared,
                &[("surface", &surface), ("n", &n), ("sigma", &sigma), ("sampling", &sampling)],
            )?;
            cli::with_threads(config.threads, || match &out {
                Some(path) => cli::cmd_generate(&config, path),
                None => write_stdout(cli::generate_csv(&config)?.as_bytes()),
            })
        }
        Command::Estimate { input, out, shared } => {
            let config = resolve(&shared, &[])?;
            cli::with_threads(config.threads, || match &out {
                Some(path) => cli::cmd_estimate(&input, &config, path),
                None => write_stdout(&cli::estimate_file(&input, &config)?),
            })
        }
        Command::Benchmark { surfaces, noise, seeds, n, sampling, out, shared } => {
            let config = resolve(
                &shared,
                &[
                    ("surfaces", &surfaces),
                    ("noise", &noise),
                    ("seeds", &seeds),
                    ("n", &n),
                    ("sampling", &sampling),
                ],
            )?;
            cli::with_threads(config.threads, || cli::cmd_benchmark(&config, &out).map(drop))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
