//! Principal curvatures from directional curvature samples.
//!
//! Every neighbor `q` in the curvature neighborhood of `p` yields a sample
//! `kappa = 2 (n . v) / |v|^2` with `v = q - p`, the exact normal curvature of
//! the circle through `p` and `q` tangent to the estimated plane. The kernel
//! weighted means of the highest and lowest fractions of these samples give
//! the two principal curvatures; the corresponding displacement directions,
//! averaged and projected to the tangent plane, give the principal directions.
//!
//! Sign convention: curvature is positive when the surface bends towards the
//! oriented normal. Normals are oriented away from the neighborhood centroid,
//! so convex regions such as a sphere come out negative.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frames::{weighted_local_pca, LocalFrame};
use crate::geometry::{Kernel, Point3, PointCloud, Vector3};
use crate::scale::{select_scales, variance_profile, ScalePair, SweepConfig};

/// Projected directions shorter than this fall back to the frame axes.
const DIRECTION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureConfig {
    /// Fraction of samples averaged at each extreme.
    pub extreme_fraction: f64,
    pub kernel: Kernel,
    pub min_tau_neighbors: usize,
}

impl Default for CurvatureConfig {
    fn default() -> Self {
        CurvatureConfig {
            extreme_fraction: 0.2,
            kernel: Kernel::default(),
            min_tau_neighbors: 10,
        }
    }
}

impl CurvatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.extreme_fraction > 0.0 && self.extreme_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "extreme fraction must lie in (0, 1), got {}",
                self.extreme_fraction
            )));
        }
        if let Kernel::TruncatedGaussian { bandwidth } = self.kernel {
            Kernel::truncated_gaussian(bandwidth)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalSample {
    /// Displacement `q - p`.
    pub v: Vector3,
    pub kappa: f64,
    pub weight: f64,
}

/// Principal curvatures and directions before they are packed into a result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Principal {
    pub kappa1: f64,
    pub kappa2: f64,
    pub d1: Vector3,
    pub d2: Vector3,
    /// A direction collapsed under projection and was replaced by a frame axis.
    pub direction_fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureResult {
    pub kappa1: f64,
    pub kappa2: f64,
    /// `kappa1 * kappa2`.
    pub gauss: f64,
    /// `kappa1 + kappa2`; half of it is the conventional mean curvature.
    pub mean: f64,
    pub d1: Vector3,
    pub d2: Vector3,
    /// Oriented normal used for the directional samples.
    pub normal: Vector3,
    pub eps_pca: f64,
    pub tau: f64,
    pub valid: bool,
    pub scale_fallback: bool,
    pub direction_fallback: bool,
    /// Why the point is invalid, if it is.
    pub failure: Option<Error>,
}

impl CurvatureResult {
    pub fn invalid(failure: Error, scales: Option<ScalePair>) -> Self {
        let nan = Vector3::repeat(f64::NAN);
        CurvatureResult {
            kappa1: f64::NAN,
            kappa2: f64::NAN,
            gauss: f64::NAN,
            mean: f64::NAN,
            d1: nan,
            d2: nan,
            normal: nan,
            eps_pca: scales.map_or(f64::NAN, |s| s.eps_pca),
            tau: scales.map_or(f64::NAN, |s| s.tau),
            valid: false,
            scale_fallback: scales.is_some_and(|s| s.fallback_used),
            direction_fallback: false,
            failure: Some(failure),
        }
    }

    fn from_principal(pr: Principal, normal: Vector3, scales: ScalePair) -> Self {
        CurvatureResult {
            kappa1: pr.kappa1,
            kappa2: pr.kappa2,
            gauss: pr.kappa1 * pr.kappa2,
            mean: pr.kappa1 + pr.kappa2,
            d1: pr.d1,
            d2: pr.d2,
            normal,
            eps_pca: scales.eps_pca,
            tau: scales.tau,
            valid: true,
            scale_fallback: scales.fallback_used,
            direction_fallback: pr.direction_fallback,
            failure: None,
        }
    }

    /// Conventional mean curvature `(kappa1 + kappa2) / 2`.
    pub fn mean_half(&self) -> f64 {
        0.5 * self.mean
    }

    /// The result expressed with the opposite normal: curvatures negate and
    /// swap roles, the Gaussian curvature is unchanged.
    pub fn flipped(&self) -> CurvatureResult {
        CurvatureResult {
            kappa1: -self.kappa2,
            kappa2: -self.kappa1,
            gauss: (-self.kappa2) * (-self.kappa1),
            mean: -self.mean,
            d1: self.d2,
            d2: self.d1,
            normal: -self.normal,
            ..self.clone()
        }
    }

    /// Re-express the result so that its normal agrees in sign with `reference`.
    pub fn aligned_to(&self, reference: &Vector3) -> CurvatureResult {
        if self.valid && self.normal.dot(reference) < 0.0 {
            self.flipped()
        } else {
            self.clone()
        }
    }
}

/// One sample per neighbor of `p` strictly inside radius `tau`.
pub fn directional_samples(
    cloud: &PointCloud,
    p: &Point3,
    frame: &LocalFrame,
    tau: f64,
    config: &CurvatureConfig,
) -> Result<Vec<DirectionalSample>> {
    let neighbors = cloud.neighbors_within(p, tau)?;
    let required = config.min_tau_neighbors.max(1);
    if neighbors.len() < required {
        return Err(Error::InsufficientNeighbors {
            count: neighbors.len(),
            required,
        });
    }
    Ok(neighbors
        .indices
        .iter()
        .zip(&neighbors.distances)
        .map(|(&j, &d)| {
            let v = cloud.point(j) - p;
            DirectionalSample {
                v,
                kappa: 2.0 * frame.normal.dot(&v) / v.norm_squared(),
                weight: config.kernel.weight(d / tau),
            }
        })
        .collect())
}

/// Weighted means of the highest and lowest `extreme_fraction` of samples.
pub fn principal_from_samples(
    samples: &[DirectionalSample],
    frame: &LocalFrame,
    config: &CurvatureConfig,
) -> Result<Principal> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted: Vec<&DirectionalSample> = samples.iter().collect();
    sorted.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    let k = ((config.extreme_fraction * sorted.len() as f64).floor() as usize).max(1);
    let low = &sorted[..k];
    let high = &sorted[sorted.len() - k..];
    let kappa_low = weighted_mean(low)?;
    let kappa_high = weighted_mean(high)?;

    let (first, second) = if kappa_high >= kappa_low {
        ((kappa_high, high), (kappa_low, low))
    } else {
        ((kappa_low, low), (kappa_high, high))
    };
    let (d1, f1) = mean_direction(first.1, frame, frame.e1);
    let (d2, f2) = mean_direction(second.1, frame, frame.e2);
    Ok(Principal {
        kappa1: first.0,
        kappa2: second.0,
        d1,
        d2,
        direction_fallback: f1 || f2,
    })
}

fn weighted_mean(subset: &[&DirectionalSample]) -> Result<f64> {
    let wsum: f64 = subset.iter().map(|s| s.weight).sum();
    if !(wsum > 0.0) {
        return Err(Error::DegenerateWeights);
    }
    Ok(subset.iter().map(|s| s.kappa * s.weight).sum::<f64>() / wsum)
}

/// Weighted average of axial directions, sign-aligned to the first one, and
/// projected onto the tangent plane.
fn mean_direction(subset: &[&DirectionalSample], frame: &LocalFrame, fallback: Vector3) -> (Vector3, bool) {
    let reference = subset[0].v.normalize();
    let mut acc = Vector3::zeros();
    for s in subset {
        let u = s.v.normalize();
        let u = if u.dot(&reference) < 0.0 { -u } else { u };
        acc += u * s.weight;
    }
    let projected = frame.e1 * frame.e1.dot(&acc) + frame.e2 * frame.e2.dot(&acc);
    let norm = projected.norm();
    if norm > DIRECTION_EPS {
        (projected / norm, false)
    } else {
        (fallback, true)
    }
}

/// Curvature at `p` from an already oriented frame and chosen scales.
pub fn estimate_with_frame(
    cloud: &PointCloud,
    p: &Point3,
    frame: &LocalFrame,
    scales: ScalePair,
    config: &CurvatureConfig,
) -> CurvatureResult {
    let principal = directional_samples(cloud, p, frame, scales.tau, config)
        .and_then(|samples| principal_from_samples(&samples, frame, config));
    match principal {
        Ok(pr) => CurvatureResult::from_principal(pr, frame.normal, scales),
        Err(e) => CurvatureResult::invalid(e, Some(scales)),
    }
}

/// Full pipeline at one point: radius sweep, scale selection, oriented frame
/// at the PCA radius, directional samples at the curvature radius.
pub fn estimate_point(
    cloud: &PointCloud,
    p: &Point3,
    sweep: &SweepConfig,
    config: &CurvatureConfig,
) -> CurvatureResult {
    let scales = match variance_profile(cloud, p, sweep, &config.kernel)
        .and_then(|profile| select_scales(&profile, sweep.gamma))
    {
        Ok(s) => s,
        Err(e) => return CurvatureResult::invalid(e, None),
    };
    match weighted_local_pca(cloud, p, scales.eps_pca, &config.kernel) {
        Ok(frame) => estimate_with_frame(cloud, p, &frame, scales, config),
        Err(e) => CurvatureResult::invalid(e, Some(scales)),
    }
}

/// One result per cloud point, in input order, on the current rayon pool.
pub fn estimate_all(
    cloud: &PointCloud,
    sweep: &SweepConfig,
    config: &CurvatureConfig,
) -> Result<Vec<CurvatureResult>> {
    sweep.validate()?;
    config.validate()?;
    Ok(cloud
        .points()
        .par_iter()
        .map(|p| estimate_point(cloud, p, sweep, config))
        .collect())
}

/// [`estimate_all`] on a dedicated pool of `threads` workers (0 means the
/// number of available cores).
pub fn estimate_all_with_threads(
    cloud: &PointCloud,
    sweep: &SweepConfig,
    config: &CurvatureConfig,
    threads: usize,
) -> Result<Vec<CurvatureResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| estimate_all(cloud, sweep, config))
}
