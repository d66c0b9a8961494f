//! Effective run configuration and its plain-text `key=value` format.
//!
//! Files hold one `key = value` per line; `#` starts a comment and blank
//! lines are ignored. List values are comma-separated. Command-line flags are
//! applied through the same [`RunConfig::set`] entry point after the file, so
//! flags take precedence over file entries, which take precedence over
//! defaults.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::curvature::CurvatureConfig;
use crate::error::{Error, Result};
use crate::geometry::{Kernel, KernelFamily};
use crate::metrics::BenchmarkConfig;
use crate::scale::SweepConfig;
use crate::surfaces::{SamplingMode, SurfaceSpec};

pub const TOOL_NAME: &str = "pointcurv";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Keys accepted in config files and by [`RunConfig::set`], in echo order.
pub const KEYS: [&str; 19] = [
    "gamma",
    "grid-size",
    "max-radius-factor",
    "min-neighbors",
    "extreme-fraction",
    "kernel",
    "bandwidth",
    "min-tau-neighbors",
    "surface",
    "n",
    "sigma",
    "seed",
    "sampling",
    "surfaces",
    "noise",
    "seeds",
    "input",
    "output",
    "threads",
];

/// Keys left out of output headers. Neither affects computed values, and
/// leaving them out keeps outputs identical across thread counts and
/// destinations.
const UNECHOED: [&str; 2] = ["output", "threads"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sweep: SweepConfig,
    pub extreme_fraction: f64,
    pub kernel: KernelFamily,
    /// Truncated-Gaussian bandwidth; unused by the Epanechnikov kernel.
    pub bandwidth: f64,
    pub min_tau_neighbors: usize,
    /// Surface for `generate`.
    pub surface: SurfaceSpec,
    pub n: usize,
    /// Noise level for `generate`.
    pub sigma: f64,
    /// Seed for `generate`.
    pub seed: u64,
    pub sampling: SamplingMode,
    /// Surfaces for `benchmark`.
    pub surfaces: Vec<SurfaceSpec>,
    /// Noise levels for `benchmark`.
    pub noise_levels: Vec<f64>,
    /// Seeds for `benchmark`.
    pub seeds: Vec<u64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Worker count; 0 means the number of available cores.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let curvature = CurvatureConfig::default();
        let bandwidth = match curvature.kernel {
            Kernel::TruncatedGaussian { bandwidth } => bandwidth,
            Kernel::Epanechnikov => 1.0,
        };
        RunConfig {
            sweep: SweepConfig::default(),
            extreme_fraction: curvature.extreme_fraction,
            kernel: KernelFamily::Gauss,
            bandwidth,
            min_tau_neighbors: curvature.min_tau_neighbors,
            surface: SurfaceSpec::default_torus(),
            n: 5000,
            sigma: 0.0,
            seed: 0,
            sampling: SamplingMode::AreaUniform,
            surfaces: vec![
                SurfaceSpec::default_torus(),
                SurfaceSpec::default_ellipsoid(),
                SurfaceSpec::default_saddle(),
            ],
            noise_levels: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            seeds: vec![0, 1, 2],
            input: None,
            output: None,
            threads: 0,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|item| parse_num(key, item))
        .collect()
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "gamma" => self.sweep.gamma = parse_num(key, value)?,
            "grid-size" => self.sweep.grid_size = parse_num(key, value)?,
            "max-radius-factor" => self.sweep.max_radius_factor = parse_num(key, value)?,
            "min-neighbors" => self.sweep.min_neighbors = parse_num(key, value)?,
            "extreme-fraction" => self.extreme_fraction = parse_num(key, value)?,
            "kernel" => self.kernel = value.parse()?,
            "bandwidth" => self.bandwidth = parse_num(key, value)?,
            "min-tau-neighbors" => self.min_tau_neighbors = parse_num(key, value)?,
            "surface" => self.surface = value.parse()?,
            "n" => self.n = parse_num(key, value)?,
            "sigma" => self.sigma = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "sampling" => self.sampling = value.parse()?,
            "surfaces" => {
                self.surfaces = value
                    .split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<SurfaceSpec>>>()?
            }
            "noise" => self.noise_levels = parse_list(key, value)?,
            "seeds" => self.seeds = parse_list(key, value)?,
            "input" => self.input = (!value.is_empty()).then(|| PathBuf::from(value)),
            "output" => self.output = (!value.is_empty()).then(|| PathBuf::from(value)),
            "threads" => self.threads = parse_num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Textual value of one key, or `None` for an unset path.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "gamma" => self.sweep.gamma.to_string(),
            "grid-size" => self.sweep.grid_size.to_string(),
            "max-radius-factor" => self.sweep.max_radius_factor.to_string(),
            "min-neighbors" => self.sweep.min_neighbors.to_string(),
            "extreme-fraction" => self.extreme_fraction.to_string(),
            "kernel" => self.kernel.to_string(),
            "bandwidth" => self.bandwidth.to_string(),
            "min-tau-neighbors" => self.min_tau_neighbors.to_string(),
            "surface" => self.surface.to_string(),
            "n" => self.n.to_string(),
            "sigma" => self.sigma.to_string(),
            "seed" => self.seed.to_string(),
            "sampling" => self.sampling.to_string(),
            "surfaces" => join(&self.surfaces),
            "noise" => join(&self.noise_levels),
            "seeds" => join(&self.seeds),
            "input" => self.input.as_ref()?.display().to_string(),
            "output" => self.output.as_ref()?.display().to_string(),
            "threads" => self.threads.to_string(),
            _ => return None,
        })
    }

    /// Applies the entries of a config text on top of `self`.
    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got '{line}'", i + 1))
            })?;
            self.set(key.trim(), value).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", i + 1)),
                other => Error::Config(format!("line {}: {other}", i + 1)),
            })?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.merge_str(&text)
    }

    pub fn from_str_config(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        config.merge_str(text)?;
        Ok(config)
    }

    /// Every set key as `key=value` lines, in [`KEYS`] order.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            if let Some(value) = self.get(key) {
                let _ = writeln!(out, "{key}={value}");
            }
        }
        out
    }

    /// Comment block that starts every output file: tool version, command
    /// and every value that influences the output.
    pub fn header(&self, command: &str) -> String {
        let mut out = format!("# {TOOL_NAME} {TOOL_VERSION}\n# command={command}\n");
        for key in KEYS.iter().filter(|k| !UNECHOED.contains(k)) {
            if let Some(value) = self.get(key) {
                let _ = writeln!(out, "# {key}={value}");
            }
        }
        out
    }

    /// Checks every value, including those the current command does not use.
    pub fn validate(&self) -> Result<()> {
        self.benchmark_config()?;
        self.surface.validate()?;
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise level must be finite and non-negative, got {}",
                self.sigma
            )));
        }
        if let Some(bad) = self.noise_levels.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "noise level must be finite and non-negative, got {bad}"
            )));
        }
        if self.surfaces.is_empty() || self.noise_levels.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config(
                "surfaces, noise and seeds need at least one entry each".into(),
            ));
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<Kernel> {
        match self.kernel {
            KernelFamily::Gauss => Kernel::truncated_gaussian(self.bandwidth),
            KernelFamily::Epan => Ok(Kernel::Epanechnikov),
        }
    }

    pub fn curvature_config(&self) -> Result<CurvatureConfig> {
        let config = CurvatureConfig {
            extreme_fraction: self.extreme_fraction,
            kernel: self.kernel()?,
            min_tau_neighbors: self.min_tau_neighbors,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        self.sweep.validate()?;
        Ok(self.sweep)
    }

    pub fn benchmark_config(&self) -> Result<BenchmarkConfig> {
        if self.n == 0 {
            return Err(Error::InvalidCount(0));
        }
        Ok(BenchmarkConfig {
            n: self.n,
            sweep: self.sweep_config()?,
            curvature: self.curvature_config()?,
            sampling: self.sampling,
        })
    }
}
