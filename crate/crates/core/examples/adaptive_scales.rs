// Radius sweep of the explained-variance ratio at a few torus points and
// the PCA and curvature radii chosen from it.

use pointcurv::surfaces::{sample_surface, SurfaceSpec};
use pointcurv::{select_scales, variance_profile, Kernel, PointCloud, Result, ScalePair, SweepConfig};

pub fn run_example() -> Result<Vec<ScalePair>> {
    let torus = SurfaceSpec::default_torus();
    let truth = sample_surface(&torus, 3000, 5)?;
    let cloud = PointCloud::new(truth.iter().map(|t| t.position).collect())?;
    let sweep = SweepConfig::default();
    let kernel = Kernel::default();
    println!("data bound {:.4}, largest radius {:.4}", cloud.delta(), sweep.max_radius_factor * cloud.delta());

    let mut scales = Vec::new();
    for t in truth.iter().take(3) {
        let profile = variance_profile(&cloud, &t.position, &sweep, &kernel)?;
        let pair = select_scales(&profile, sweep.gamma)?;
        println!("\npoint {:?}, true K {:.4}", t.position.coords.as_slice(), t.gauss);
        for (r, rho) in profile.valid_entries().step_by(4) {
            println!("  r {r:.4}  rho {rho:.6}");
        }
        println!(
            "  eps_pca {:.4}  tau {:.4}  fallback {}",
            pair.eps_pca, pair.tau, pair.fallback_used
        );
        scales.push(pair);
    }
    Ok(scales)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(drop)
}
