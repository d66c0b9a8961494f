// Curvature of every point of a noiseless torus sample, scored against the
// closed-form Gaussian and mean curvature.

use pointcurv::metrics::{compare, MetricReport};
use pointcurv::surfaces::{sample_surface, SurfaceSpec};
use pointcurv::{estimate_all, CurvatureConfig, PointCloud, Result, SweepConfig};

pub fn run_example() -> Result<Vec<MetricReport>> {
    let torus = SurfaceSpec::default_torus();
    let truth = sample_surface(&torus, 3000, 1)?;
    let cloud = PointCloud::new(truth.iter().map(|t| t.position).collect())?;
    let results = estimate_all(&cloud, &SweepConfig::default(), &CurvatureConfig::default())?;

    for (t, r) in truth.iter().zip(&results).take(5) {
        let r = r.aligned_to(&t.normal);
        println!(
            "K est {:+.4} true {:+.4} | k1 {:+.4} k2 {:+.4} | eps {:.3} tau {:.3}",
            r.gauss, t.gauss, r.kappa1, r.kappa2, r.eps_pca, r.tau
        );
    }
    let reports = compare(torus, 0.0, 1, &truth, &results)?;
    for r in &reports {
        println!(
            "{:<9} rmse {:.4} energy {:.4} pearson {:.4} valid {}/{}",
            r.quantity.to_string(),
            r.rmse.unwrap_or(f64::NAN),
            r.energy_distance.unwrap_or(f64::NAN),
            r.pearson.unwrap_or(f64::NAN),
            r.n_valid,
            r.n_total
        );
    }
    Ok(reports)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(drop)
}
