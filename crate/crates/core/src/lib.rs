//! Principal curvatures, principal directions and Gaussian/mean curvature of
//! surface-sampled 3-D point clouds.
//!
//! The estimator works point by point. A sweep over neighborhood radii records
//! how much of the kernel-weighted local variance the best-fit plane explains;
//! the largest radius where that ratio stays above a bound fixes the tangent
//! frame, and the radius where it bottoms out fixes the neighborhood in which
//! directional curvatures are sampled. The extremes of those samples are the
//! principal curvatures.
//!
//! ```no_run
//! use pointcurv::{estimate_all, CurvatureConfig, PointCloud, SweepConfig};
//! use pointcurv::surfaces::{sample_surface, SurfaceSpec};
//!
//! let truth = sample_surface(&SurfaceSpec::default_torus(), 5000, 0)?;
//! let cloud = PointCloud::new(truth.iter().map(|t| t.position).collect())?;
//! let results = estimate_all(&cloud, &SweepConfig::default(), &CurvatureConfig::default())?;
//! println!("K at point 0: {}", results[0].gauss);
//! # Ok::<(), pointcurv::Error>(())
//! ```

// Negated comparisons are used so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod curvature;
pub mod error;
pub mod frames;
pub mod geometry;
pub mod metrics;
pub mod scale;
pub mod surfaces;

pub use curvature::{
    estimate_all, estimate_all_with_threads, estimate_point, CurvatureConfig, CurvatureResult,
};
pub use error::{Error, Result};
pub use frames::{weighted_local_pca, LocalFrame};
pub use geometry::{Kernel, NeighborSet, Point3, PointCloud, Vector3};
pub use scale::{select_scales, variance_profile, ScalePair, SweepConfig, VarianceProfile};
