//! Per-point radius sweep of the explained-variance ratio and the choice of
//! the PCA radius and the curvature radius from it.

use crate::error::{Error, Result};
use crate::frames::{frame_from_neighbors, MIN_FRAME_POINTS};
use crate::geometry::{Kernel, Point3, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// Ratio bound: the PCA radius is the largest grid radius whose ratio exceeds it.
    pub gamma: f64,
    pub grid_size: usize,
    /// Largest swept radius as a fraction of the data bound.
    pub max_radius_factor: f64,
    /// Minimum neighbor count for a grid entry to be usable.
    pub min_neighbors: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            gamma: 0.98,
            grid_size: 40,
            max_radius_factor: 0.2,
            min_neighbors: 10,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid size must be at least 2, got {}",
                self.grid_size
            )));
        }
        if !(self.max_radius_factor > 0.0 && self.max_radius_factor <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "max radius factor must lie in (0, 1], got {}",
                self.max_radius_factor
            )));
        }
        Ok(())
    }

    /// Evenly spaced radii `k * f * delta / n` for `k = 1..=n`.
    pub fn radii(&self, delta: f64) -> Vec<f64> {
        let max_r = self.max_radius_factor * delta;
        (1..=self.grid_size)
            .map(|k| max_r * k as f64 / self.grid_size as f64)
            .collect()
    }
}

/// Explained-variance ratio as a function of radius at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    pub radii: Vec<f64>,
    /// Ratio per radius; NaN where `valid` is false.
    pub rho: Vec<f64>,
    pub valid: Vec<bool>,
}

impl VarianceProfile {
    pub fn valid_entries(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.radii
            .iter()
            .zip(&self.rho)
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .map(|((&r, &rho), _)| (r, rho))
    }

    pub fn has_valid(&self) -> bool {
        self.valid.iter().any(|&v| v)
    }
}

/// PCA radius and curvature radius chosen at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalePair {
    pub eps_pca: f64,
    pub tau: f64,
    /// Set when no radius exceeded the ratio bound and the smallest usable
    /// radius was taken instead.
    pub fallback_used: bool,
}

pub fn variance_profile(
    cloud: &PointCloud,
    p: &Point3,
    config: &SweepConfig,
    kernel: &Kernel,
) -> Result<VarianceProfile> {
    config.validate()?;
    if !(cloud.delta() > 0.0) {
        return Err(Error::NoUsableScale);
    }
    let radii = config.radii(cloud.delta());
    let max_r = *radii.last().expect("grid has at least two radii");
    // One query at the largest radius; smaller radii use distance prefixes.
    let neighbors = cloud.neighbors_within(p, max_r)?;
    let required = config.min_neighbors.max(MIN_FRAME_POINTS);
    let mut rho = Vec::with_capacity(radii.len());
    let mut valid = Vec::with_capacity(radii.len());
    for &r in &radii {
        let value = if neighbors.count_within(r) < required {
            None
        } else {
            frame_from_neighbors(cloud, p, &neighbors, r, kernel)
                .ok()
                .map(|f| f.explained_variance_ratio())
        };
        rho.push(value.unwrap_or(f64::NAN));
        valid.push(value.is_some());
    }
    let profile = VarianceProfile { radii, rho, valid };
    if !profile.has_valid() {
        return Err(Error::NoUsableScale);
    }
    Ok(profile)
}

/// Largest valid radius with ratio strictly above `gamma`, and the valid
/// radius of minimal ratio (smallest radius on ties).
pub fn select_scales(profile: &VarianceProfile, gamma: f64) -> Result<ScalePair> {
    let mut smallest = None;
    let mut eps = None;
    let mut tau: Option<(f64, f64)> = None;
    for (r, rho) in profile.valid_entries() {
        smallest.get_or_insert(r);
        if rho > gamma {
            eps = Some(r);
        }
        match tau {
            Some((_, best)) if rho >= best => {}
            _ => tau = Some((r, rho)),
        }
    }
    let smallest = smallest.ok_or(Error::NoUsableScale)?;
    let (tau, _) = tau.ok_or(Error::NoUsableScale)?;
    Ok(match eps {
        Some(eps_pca) => ScalePair {
            eps_pca,
            tau,
            fallback_used: false,
        },
        None => ScalePair {
            eps_pca: smallest,
            tau,
            fallback_used: true,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(rho: &[f64]) -> VarianceProfile {
        VarianceProfile {
            radii: (1..=rho.len()).map(|k| k as f64 * 0.1).collect(),
            rho: rho.to_vec(),
            valid: rho.iter().map(|r| !r.is_nan()).collect(),
        }
    }

    #[test]
    fn reads_rule_directly() {
        let p = profile(&[0.99, 0.95, 0.80, 0.70, 0.75]);
        let s = select_scales(&p, 0.9).unwrap();
        assert_eq!(s.eps_pca, p.radii[1]);
        assert_eq!(s.tau, p.radii[3]);
        assert!(!s.fallback_used);
    }

    #[test]
    fn constant_profile_ties() {
        let p = profile(&[1.0; 6]);
        let s = select_scales(&p, 0.9).unwrap();
        assert_eq!(s.eps_pca, p.radii[5]);
        assert_eq!(s.tau, p.radii[0]);
    }

    #[test]
    fn fallback_when_nothing_exceeds_gamma() {
        let p = profile(&[f64::NAN, 0.5, 0.4, 0.6]);
        let s = select_scales(&p, 0.9).unwrap();
        assert!(s.fallback_used);
        assert_eq!(s.eps_pca, p.radii[1]);
        assert_eq!(s.tau, p.radii[2]);
    }

    #[test]
    fn strict_threshold() {
        let p = profile(&[0.95, 0.9, 0.9]);
        assert_eq!(select_scales(&p, 0.9).unwrap().eps_pca, p.radii[0]);
    }

    #[test]
    fn invalid_entries_are_skipped() {
        let p = profile(&[f64::NAN, 0.97, f64::NAN, 0.92, f64::NAN]);
        let s = select_scales(&p, 0.9).unwrap();
        assert_eq!(s.eps_pca, p.radii[3]);
        assert_eq!(s.tau, p.radii[3]);
        let none = profile(&[f64::NAN, f64::NAN]);
        assert_eq!(select_scales(&none, 0.9).unwrap_err(), Error::NoUsableScale);
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig::default().validate().is_ok());
        for bad in [
            SweepConfig { gamma: 1.0, ..Default::default() },
            SweepConfig { gamma: 0.0, ..Default::default() },
            SweepConfig { grid_size: 1, ..Default::default() },
            SweepConfig { max_radius_factor: 0.0, ..Default::default() },
            SweepConfig { max_radius_factor: 1.5, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
        let radii = SweepConfig::default().radii(5.0);
        assert_eq!(radii.len(), 40);
        assert_eq!(*radii.last().unwrap(), 1.0);
        assert!((radii[0] - 0.025).abs() < 1e-15);
    }

    #[test]
    fn single_point_cloud_has_no_scale() {
        let cloud = PointCloud::from_xyz(&[[0.0; 3]]).unwrap();
        let err = variance_profile(&cloud, &cloud.point(0), &SweepConfig::default(), &Kernel::default());
        assert_eq!(err.unwrap_err(), Error::NoUsableScale);
    }
}
