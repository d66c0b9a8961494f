// Weighted local PCA on a sampled unit sphere: tangent frame, singular
// values and how far the estimated normals are from the true ones.

use pointcurv::surfaces::{sample_surface, SurfaceSpec};
use pointcurv::{weighted_local_pca, Kernel, PointCloud, Result};

#[derive(Debug)]
pub struct FrameReport {
    pub frames: usize,
    pub mean_angle_deg: f64,
    pub max_angle_deg: f64,
    pub outward_fraction: f64,
}

pub fn run_example() -> Result<FrameReport> {
    let sphere = SurfaceSpec::Sphere { radius: 1.0 };
    let truth = sample_surface(&sphere, 2000, 11)?;
    let cloud = PointCloud::new(truth.iter().map(|t| t.position).collect())?;
    let kernel = Kernel::default();
    let radius = 0.3;

    let first = weighted_local_pca(&cloud, &truth[0].position, radius, &kernel)?;
    println!("point      {:?}", truth[0].position.coords.as_slice());
    println!("sigma      {:?}", first.sigma);
    println!("normal     {:?}", first.normal.as_slice());
    println!("neighbors  {}", first.neighbor_count);
    println!("rho        {:.6}", first.explained_variance_ratio());

    let mut angles = Vec::new();
    let mut outward = 0;
    for t in truth.iter().step_by(10) {
        let frame = weighted_local_pca(&cloud, &t.position, radius, &kernel)?;
        let cos = frame.normal.dot(&t.normal);
        if cos > 0.0 {
            outward += 1;
        }
        angles.push(cos.abs().min(1.0).acos().to_degrees());
    }
    Ok(FrameReport {
        frames: angles.len(),
        mean_angle_deg: angles.iter().sum::<f64>() / angles.len() as f64,
        max_angle_deg: angles.iter().copied().fold(0.0, f64::max),
        outward_fraction: outward as f64 / angles.len() as f64,
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let report = run_example()?;
    println!("{report:#?}");
    Ok(())
}
