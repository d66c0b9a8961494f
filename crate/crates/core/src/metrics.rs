//! Accuracy metrics and the synthetic-surface benchmark.

use std::fmt;

use crate::curvature::{estimate_all, CurvatureConfig, CurvatureResult};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::scale::SweepConfig;
use crate::surfaces::{add_noise, sample_surface_with, GroundTruthPoint, SamplingMode, SurfaceSpec};

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidValue(i)),
        None => Ok(()),
    }
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_finite(a)?;
    check_finite(b)
}

pub fn rmse(estimated: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(estimated, truth)?;
    let sse: f64 = estimated
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t) * (e - t))
        .sum();
    Ok((sse / estimated.len() as f64).sqrt())
}

/// Sum of `|x_i - x_j|` over all ordered pairs of a sorted sample.
fn within_sum(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    2.0 * sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| x * (2.0 * k as f64 - n + 1.0))
        .sum::<f64>()
}

/// Sum of `|a_i - b_j|` over all pairs, `b` sorted.
fn cross_sum(a: &[f64], b_sorted: &[f64]) -> f64 {
    let mut prefix = Vec::with_capacity(b_sorted.len() + 1);
    prefix.push(0.0);
    for &x in b_sorted {
        prefix.push(prefix.last().unwrap() + x);
    }
    let total = prefix[b_sorted.len()];
    let m = b_sorted.len() as f64;
    a.iter()
        .map(|&x| {
            let j = b_sorted.partition_point(|&y| y <= x);
            let below = x * j as f64 - prefix[j];
            let above = (total - prefix[j]) - x * (m - j as f64);
            below + above
        })
        .sum()
}

/// Squared energy distance between two univariate samples (V-statistic):
/// `2 E|A - B| - E|A - A'| - E|B - B'|`, clamped at zero.
pub fn energy_distance(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_finite(sample_a)?;
    check_finite(sample_b)?;
    let mut a = sample_a.to_vec();
    let mut b = sample_b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let ab = cross_sum(&a, &b) / (n * m);
    let aa = within_sum(&a) / (n * n);
    let bb = within_sum(&b) / (m * m);
    Ok((2.0 * ab - aa - bb).max(0.0))
}

pub fn pearson(estimated: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(estimated, truth)?;
    if estimated.len() < 2 {
        return Err(Error::UndefinedCorrelation);
    }
    let n = estimated.len() as f64;
    let mx = estimated.iter().sum::<f64>() / n;
    let my = truth.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in estimated.iter().zip(truth) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Which estimated quantity is compared against which ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    /// Estimated `k1 * k2` against analytic Gaussian curvature.
    Gauss,
    /// Estimated `k1 + k2` against analytic `(k1 + k2) / 2`.
    MeanSum,
    /// Estimated `(k1 + k2) / 2` against analytic `(k1 + k2) / 2`.
    MeanHalf,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::Gauss, Quantity::MeanSum, Quantity::MeanHalf];

    /// Value of this quantity for an estimate whose normal has already been
    /// aligned with the reference normal.
    pub fn estimate(&self, r: &CurvatureResult) -> f64 {
        match self {
            Quantity::Gauss => r.gauss,
            Quantity::MeanSum => r.mean,
            Quantity::MeanHalf => r.mean_half(),
        }
    }

    pub fn truth(&self, t: &GroundTruthPoint) -> f64 {
        match self {
            Quantity::Gauss => t.gauss,
            Quantity::MeanSum | Quantity::MeanHalf => t.mean,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Gauss => "gauss",
            Quantity::MeanSum => "mean_sum",
            Quantity::MeanHalf => "mean_half",
        })
    }
}

/// Metrics for one (surface, noise, seed, quantity) combination. Missing
/// metrics (no valid points, constant input) are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub surface: SurfaceSpec,
    pub noise_sigma: f64,
    pub seed: u64,
    pub quantity: Quantity,
    pub rmse: Option<f64>,
    pub energy_distance: Option<f64>,
    pub pearson: Option<f64>,
    pub n_valid: usize,
    pub n_total: usize,
}

/// Compare estimates against ground truth over the valid points. Estimates
/// are re-expressed with respect to the reference normal first, which only
/// affects the sign of mean curvature.
pub fn compare(
    surface: SurfaceSpec,
    noise_sigma: f64,
    seed: u64,
    truth: &[GroundTruthPoint],
    results: &[CurvatureResult],
) -> Result<Vec<MetricReport>> {
    if truth.len() != results.len() {
        return Err(Error::ShapeMismatch(truth.len(), results.len()));
    }
    let pairs: Vec<(CurvatureResult, &GroundTruthPoint)> = results
        .iter()
        .zip(truth)
        .filter(|(r, _)| r.valid)
        .map(|(r, t)| (r.aligned_to(&t.normal), t))
        .collect();
    Ok(Quantity::ALL
        .iter()
        .map(|&quantity| {
            let est: Vec<f64> = pairs.iter().map(|(r, _)| quantity.estimate(r)).collect();
            let tru: Vec<f64> = pairs.iter().map(|(_, t)| quantity.truth(t)).collect();
            MetricReport {
                surface,
                noise_sigma,
                seed,
                quantity,
                rmse: rmse(&est, &tru).ok(),
                energy_distance: energy_distance(&est, &tru).ok(),
                pearson: pearson(&est, &tru).ok(),
                n_valid: pairs.len(),
                n_total: truth.len(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub n: usize,
    pub sweep: SweepConfig,
    pub curvature: CurvatureConfig,
    pub sampling: SamplingMode,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            n: 5000,
            sweep: SweepConfig::default(),
            curvature: CurvatureConfig::default(),
            sampling: SamplingMode::AreaUniform,
        }
    }
}

/// Everything produced by one (surface, noise, seed) run.
#[derive(Debug, Clone)]
pub struct BenchmarkJob {
    pub surface: SurfaceSpec,
    pub noise_sigma: f64,
    pub seed: u64,
    pub truth: Vec<GroundTruthPoint>,
    pub results: Vec<CurvatureResult>,
    pub reports: Vec<MetricReport>,
}

impl BenchmarkJob {
    pub fn report(&self, quantity: Quantity) -> &MetricReport {
        self.reports
            .iter()
            .find(|r| r.quantity == quantity)
            .expect("every quantity is reported")
    }
}

/// Sample, corrupt, estimate and score one combination. The clean sample
/// depends only on `seed`, so all noise levels of a seed share it.
pub fn run_job(
    surface: &SurfaceSpec,
    noise_sigma: f64,
    seed: u64,
    config: &BenchmarkConfig,
) -> Result<BenchmarkJob> {
    let clean = sample_surface_with(surface, config.n, seed, config.sampling)?;
    let truth = add_noise(&clean, noise_sigma, seed)?;
    let cloud = PointCloud::new(truth.iter().map(|t| t.noisy_position).collect())?;
    let results = estimate_all(&cloud, &config.sweep, &config.curvature)?;
    let reports = compare(*surface, noise_sigma, seed, &truth, &results)?;
    Ok(BenchmarkJob {
        surface: *surface,
        noise_sigma,
        seed,
        truth,
        results,
        reports,
    })
}

/// Seed-averaged view of a group of reports.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub surface: SurfaceSpec,
    pub noise_sigma: f64,
    pub quantity: Quantity,
    pub seeds: usize,
    pub rmse: Option<Spread>,
    pub energy_distance: Option<Spread>,
    pub pearson: Option<Spread>,
}

/// Mean over seeds and the max-min range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub spread: f64,
}

impl Spread {
    /// `None` if any seed lacks the value.
    fn of(values: impl Iterator<Item = Option<f64>>) -> Option<Spread> {
        let v: Option<Vec<f64>> = values.collect();
        let v = v?;
        if v.is_empty() {
            return None;
        }
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Spread { mean, spread: hi - lo })
    }
}

/// Group reports by (surface, noise, quantity), keeping first-seen order.
pub fn summarize(reports: &[MetricReport]) -> Vec<MetricSummary> {
    let mut keys: Vec<(SurfaceSpec, f64, Quantity)> = Vec::new();
    for r in reports {
        let key = (r.surface, r.noise_sigma, r.quantity);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(surface, noise_sigma, quantity)| {
            let group: Vec<&MetricReport> = reports
                .iter()
                .filter(|r| r.surface == surface && r.noise_sigma == noise_sigma && r.quantity == quantity)
                .collect();
            MetricSummary {
                surface,
                noise_sigma,
                quantity,
                seeds: group.len(),
                rmse: Spread::of(group.iter().map(|r| r.rmse)),
                energy_distance: Spread::of(group.iter().map(|r| r.energy_distance)),
                pearson: Spread::of(group.iter().map(|r| r.pearson)),
            }
        })
        .collect()
}

/// The mean-curvature convention with the lower seed-averaged RMSE for a
/// surface at a noise level.
pub fn better_mean_convention(summaries: &[MetricSummary], surface: &SurfaceSpec, noise_sigma: f64) -> Option<Quantity> {
    let rmse_of = |q: Quantity| {
        summaries
            .iter()
            .find(|s| s.surface == *surface && s.noise_sigma == noise_sigma && s.quantity == q)
            .and_then(|s| s.rmse)
            .map(|s| s.mean)
    };
    match (rmse_of(Quantity::MeanSum), rmse_of(Quantity::MeanHalf)) {
        (Some(a), Some(b)) => Some(if a <= b { Quantity::MeanSum } else { Quantity::MeanHalf }),
        (Some(_), None) => Some(Quantity::MeanSum),
        (None, Some(_)) => Some(Quantity::MeanHalf),
        (None, None) => None,
    }
}

/// Every (noise, seed) combination for one surface, in noise-major order.
pub fn run_benchmark(
    surface: &SurfaceSpec,
    noise_levels: &[f64],
    seeds: &[u64],
    config: &BenchmarkConfig,
) -> Result<Vec<BenchmarkJob>> {
    let mut jobs = Vec::with_capacity(noise_levels.len() * seeds.len());
    for &sigma in noise_levels {
        for &seed in seeds {
            jobs.push(run_job(surface, sigma, seed, config)?);
        }
    }
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 12.5f64.sqrt());
        assert_eq!(rmse(&[1.0], &[1.0, 2.0]).unwrap_err(), Error::ShapeMismatch(1, 2));
        assert_eq!(rmse(&[], &[]).unwrap_err(), Error::EmptyInput);
        assert_eq!(rmse(&[1.0, f64::NAN], &[1.0, 2.0]).unwrap_err(), Error::InvalidValue(1));
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy_distance(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(energy_distance(&[0.0, 1.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(energy_distance(&[3.0, -1.0, 2.0], &[2.0, 3.0, -1.0]).unwrap(), 0.0);
        assert_eq!(energy_distance(&[], &[1.0]).unwrap_err(), Error::EmptyInput);
        assert_eq!(energy_distance(&[f64::INFINITY], &[1.0]).unwrap_err(), Error::InvalidValue(0));
    }

    #[test]
    fn pearson_examples() {
        let x = [0.3, -1.0, 2.5, 4.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(pearson(&[1.0, 1.0], &[1.0, 2.0]).unwrap_err(), Error::UndefinedCorrelation);
        assert_eq!(pearson(&[1.0], &[2.0]).unwrap_err(), Error::UndefinedCorrelation);
    }

    #[test]
    fn summary_spread() {
        let mk = |seed, rmse| MetricReport {
            surface: SurfaceSpec::default_torus(),
            noise_sigma: 0.0,
            seed,
            quantity: Quantity::Gauss,
            rmse: Some(rmse),
            energy_distance: Some(0.1),
            pearson: None,
            n_valid: 10,
            n_total: 10,
        };
        let s = summarize(&[mk(0, 1.0), mk(1, 2.0), mk(2, 3.0)]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].rmse, Some(Spread { mean: 2.0, spread: 2.0 }));
        assert_eq!(s[0].pearson, None);
        assert_eq!(s[0].seeds, 3);
    }

    #[test]
    fn all_invalid_run_has_missing_metrics() {
        let truth = crate::surfaces::sample_surface(&SurfaceSpec::default_torus(), 3, 0).unwrap();
        let results: Vec<_> = (0..3)
            .map(|_| CurvatureResult::invalid(Error::NoUsableScale, None))
            .collect();
        let reports = compare(SurfaceSpec::default_torus(), 0.0, 0, &truth, &results).unwrap();
        assert_eq!(reports.len(), 3);
        for r in reports {
            assert_eq!((r.n_valid, r.n_total), (0, 3));
            assert!(r.rmse.is_none() && r.pearson.is_none() && r.energy_distance.is_none());
        }
    }
}
