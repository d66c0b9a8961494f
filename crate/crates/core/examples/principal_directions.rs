// Principal directions near the saddle point of z = x^2 - y^2, where the
// bending-up direction is the x-axis and the bending-down one the y-axis.
// Directions are compared through their projection onto the xy-plane,
// since the tangent plane itself tilts away from it off the origin.

use pointcurv::surfaces::{sample_surface, SurfaceSpec};
use pointcurv::{estimate_point, CurvatureConfig, PointCloud, Result, SweepConfig, Vector3};

#[derive(Debug)]
pub struct DirectionReport {
    pub points: usize,
    pub within_15_deg: usize,
    pub median_kappa1: f64,
    pub median_kappa2: f64,
}

/// Unsigned angle between the xy-projection of `d` and `axis`.
fn axial_angle_deg(d: &Vector3, axis: &Vector3) -> f64 {
    let flat = Vector3::new(d.x, d.y, 0.0).normalize();
    flat.dot(axis).abs().min(1.0).acos().to_degrees()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

pub fn run_example() -> Result<DirectionReport> {
    let saddle = SurfaceSpec::default_saddle();
    let truth = sample_surface(&saddle, 4000, 3)?;
    let cloud = PointCloud::new(truth.iter().map(|t| t.position).collect())?;
    let (sweep, config) = (SweepConfig::default(), CurvatureConfig::default());

    let (mut points, mut good) = (0, 0);
    let (mut k1s, mut k2s) = (Vec::new(), Vec::new());
    for t in truth.iter().filter(|t| t.position.coords.norm() < 0.2) {
        let r = estimate_point(&cloud, &t.position, &sweep, &config).aligned_to(&Vector3::z());
        if !r.valid {
            continue;
        }
        points += 1;
        let (a1, a2) = (axial_angle_deg(&r.d1, &Vector3::x()), axial_angle_deg(&r.d2, &Vector3::y()));
        if a1 <= 15.0 && a2 <= 15.0 {
            good += 1;
        }
        k1s.push(r.kappa1);
        k2s.push(r.kappa2);
    }
    Ok(DirectionReport {
        points,
        within_15_deg: good,
        median_kappa1: median(k1s),
        median_kappa2: median(k2s),
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    println!("{:#?}", run_example()?);
    Ok(())
}
