// Benchmark grid on the torus over increasing noise, summarised over seeds
// in the same layout as the benchmark command's tables.

use pointcurv::metrics::{run_benchmark, summarize, BenchmarkConfig, MetricSummary, Quantity};
use pointcurv::surfaces::SurfaceSpec;
use pointcurv::Result;

pub fn run_example() -> Result<Vec<MetricSummary>> {
    let config = BenchmarkConfig { n: 1500, ..Default::default() };
    let jobs = run_benchmark(&SurfaceSpec::default_torus(), &[0.0, 0.02, 0.05], &[0, 1], &config)?;
    let reports: Vec<_> = jobs.iter().flat_map(|j| j.reports.clone()).collect();
    let summaries = summarize(&reports);
    println!("| noise | K rmse | K pearson | H (half) pearson |");
    println!("|---|---|---|---|");
    for s in summaries.iter().filter(|s| s.quantity == Quantity::Gauss) {
        let half = summaries
            .iter()
            .find(|h| h.noise_sigma == s.noise_sigma && h.quantity == Quantity::MeanHalf)
            .and_then(|h| h.pearson);
        let fmt = |v: Option<pointcurv::metrics::Spread>| {
            v.map_or("n/a".to_string(), |v| format!("{:.3} ± {:.3}", v.mean, v.spread))
        };
        println!("| {} | {} | {} | {} |", s.noise_sigma, fmt(s.rmse), fmt(s.pearson), fmt(half));
    }
    Ok(summaries)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(drop)
}
