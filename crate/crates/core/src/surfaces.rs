//! Analytic benchmark surfaces with samplers and closed-form curvature.
//!
//! Curvatures follow the crate-wide sign convention: a normal curvature is
//! positive when the surface bends towards the reference normal. Reference
//! normals point outward for closed surfaces and towards `+z` for the saddle
//! and the plane. Under that convention the unit sphere has Gaussian
//! curvature 1 and mean curvature -1. The mean curvature reported here is the
//! conventional `(k1 + k2) / 2`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{Point3, Vector3};

const NOISE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceSpec {
    Torus { major: f64, minor: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// `z = x^2 / a^2 - y^2 / b^2` over `[-extent, extent]^2`.
    HyperbolicParaboloid { a: f64, b: f64, extent: f64 },
    Sphere { radius: f64 },
    /// `z = 0` over `[-extent, extent]^2`.
    Plane { extent: f64 },
}

impl SurfaceSpec {
    pub fn default_torus() -> Self {
        SurfaceSpec::Torus { major: 2.0, minor: 1.0 }
    }

    pub fn default_ellipsoid() -> Self {
        SurfaceSpec::Ellipsoid { a: 3.0, b: 2.0, c: 1.0 }
    }

    pub fn default_saddle() -> Self {
        SurfaceSpec::HyperbolicParaboloid { a: 1.0, b: 1.0, extent: 1.0 }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SurfaceSpec::Torus { .. } => "torus",
            SurfaceSpec::Ellipsoid { .. } => "ellipsoid",
            SurfaceSpec::HyperbolicParaboloid { .. } => "saddle",
            SurfaceSpec::Sphere { .. } => "sphere",
            SurfaceSpec::Plane { .. } => "plane",
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            SurfaceSpec::Torus { major, minor } => vec![major, minor],
            SurfaceSpec::Ellipsoid { a, b, c } => vec![a, b, c],
            SurfaceSpec::HyperbolicParaboloid { a, b, extent } => vec![a, b, extent],
            SurfaceSpec::Sphere { radius } => vec![radius],
            SurfaceSpec::Plane { extent } => vec![extent],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.params().iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidSurface(format!(
                "{self}: shape parameters must be positive and finite"
            )));
        }
        if let SurfaceSpec::Torus { major, minor } = *self {
            if major <= minor {
                return Err(Error::InvalidSurface(format!(
                    "{self}: torus needs major radius > minor radius"
                )));
            }
        }
        Ok(())
    }

    /// Position at surface parameters. Angles for torus `(u, v)` and
    /// ellipsoid/sphere `(azimuth, polar)`; plane coordinates `(x, y)` for the
    /// saddle and the plane.
    pub fn position(&self, u: f64, v: f64) -> Point3 {
        match *self {
            SurfaceSpec::Torus { major, minor } => {
                let ring = major + minor * v.cos();
                Point3::new(ring * u.cos(), ring * u.sin(), minor * v.sin())
            }
            SurfaceSpec::Ellipsoid { a, b, c } => {
                Point3::new(a * v.sin() * u.cos(), b * v.sin() * u.sin(), c * v.cos())
            }
            SurfaceSpec::Sphere { radius } => Point3::new(
                radius * v.sin() * u.cos(),
                radius * v.sin() * u.sin(),
                radius * v.cos(),
            ),
            SurfaceSpec::HyperbolicParaboloid { a, b, .. } => {
                Point3::new(u, v, u * u / (a * a) - v * v / (b * b))
            }
            SurfaceSpec::Plane { .. } => Point3::new(u, v, 0.0),
        }
    }

    /// Residual of the implicit equation (zero on the surface, in length units
    /// for the torus and saddle, dimensionless for the quadrics).
    pub fn implicit_residual(&self, p: &Point3) -> f64 {
        match *self {
            SurfaceSpec::Torus { major, minor } => {
                let rho = (p.x * p.x + p.y * p.y).sqrt() - major;
                (rho * rho + p.z * p.z).sqrt() - minor
            }
            SurfaceSpec::Ellipsoid { a, b, c } => {
                (p.x / a).powi(2) + (p.y / b).powi(2) + (p.z / c).powi(2) - 1.0
            }
            SurfaceSpec::Sphere { radius } => p.coords.norm() - radius,
            SurfaceSpec::HyperbolicParaboloid { a, b, .. } => {
                p.z - (p.x * p.x / (a * a) - p.y * p.y / (b * b))
            }
            SurfaceSpec::Plane { .. } => p.z,
        }
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        for v in self.params() {
            write!(f, ":{v}")?;
        }
        Ok(())
    }
}

impl FromStr for SurfaceSpec {
    type Err = Error;

    /// `kind[:p1[:p2...]]`, e.g. `torus:2:1`, `ellipsoid:3:2:1`, `saddle:1:1:1`,
    /// `sphere:1`, `plane:1`. A bare kind uses the default parameters.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or_default();
        let values = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidSurface(format!("'{s}': bad number '{p}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let arity = |n: usize| -> Result<()> {
            if values.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidSurface(format!(
                    "'{s}': {kind} takes {n} parameters, got {}",
                    values.len()
                )))
            }
        };
        let spec = match (kind, values.is_empty()) {
            ("torus", true) => SurfaceSpec::default_torus(),
            ("ellipsoid", true) => SurfaceSpec::default_ellipsoid(),
            ("saddle", true) => SurfaceSpec::default_saddle(),
            ("sphere", true) => SurfaceSpec::Sphere { radius: 1.0 },
            ("plane", true) => SurfaceSpec::Plane { extent: 1.0 },
            ("torus", false) => {
                arity(2)?;
                SurfaceSpec::Torus { major: values[0], minor: values[1] }
            }
            ("ellipsoid", false) => {
                arity(3)?;
                SurfaceSpec::Ellipsoid { a: values[0], b: values[1], c: values[2] }
            }
            ("saddle", false) => {
                arity(3)?;
                SurfaceSpec::HyperbolicParaboloid { a: values[0], b: values[1], extent: values[2] }
            }
            ("sphere", false) => {
                arity(1)?;
                SurfaceSpec::Sphere { radius: values[0] }
            }
            ("plane", false) => {
                arity(1)?;
                SurfaceSpec::Plane { extent: values[0] }
            }
            _ => return Err(Error::InvalidSurface(format!("unknown surface '{s}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    /// Density proportional to surface area.
    #[default]
    AreaUniform,
    /// Uniform in the surface parameters (angles or plane coordinates).
    ParameterUniform,
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "area" => Ok(SamplingMode::AreaUniform),
            "parameter" => Ok(SamplingMode::ParameterUniform),
            other => Err(Error::Config(format!(
                "unknown sampling mode '{other}' (expected area or parameter)"
            ))),
        }
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMode::AreaUniform => "area",
            SamplingMode::ParameterUniform => "parameter",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthPoint {
    pub position: Point3,
    pub gauss: f64,
    /// `(k1 + k2) / 2` with respect to `normal`.
    pub mean: f64,
    pub normal: Vector3,
    pub noisy_position: Point3,
}

/// Closed-form Gaussian curvature, mean curvature and reference normal at a
/// point known to lie on the surface.
fn curvature_at(spec: &SurfaceSpec, p: &Point3) -> (f64, f64, Vector3) {
    match *spec {
        SurfaceSpec::Torus { major, minor } => {
            let ring = (p.x * p.x + p.y * p.y).sqrt();
            let cos_v = (ring - major) / minor;
            let axis = Vector3::new(p.x / ring, p.y / ring, 0.0);
            let normal = (p.coords - axis * major).normalize();
            let gauss = cos_v / (minor * ring);
            let mean = -(major + 2.0 * minor * cos_v) / (2.0 * minor * ring);
            (gauss, mean, normal)
        }
        SurfaceSpec::Ellipsoid { a, b, c } => {
            let (a2, b2, c2) = (a * a, b * b, c * c);
            let grad = Vector3::new(p.x / a2, p.y / b2, p.z / c2);
            let h = grad.norm();
            let gauss = 1.0 / (a2 * b2 * c2 * h.powi(4));
            let mean = (p.coords.norm_squared() - a2 - b2 - c2) / (2.0 * a2 * b2 * c2 * h.powi(3));
            (gauss, mean, grad / h)
        }
        SurfaceSpec::Sphere { radius } => (1.0 / (radius * radius), -1.0 / radius, p.coords / radius),
        SurfaceSpec::HyperbolicParaboloid { a, b, .. } => {
            let (fx, fy) = (2.0 * p.x / (a * a), -2.0 * p.y / (b * b));
            let (fxx, fyy) = (2.0 / (a * a), -2.0 / (b * b));
            let w2 = 1.0 + fx * fx + fy * fy;
            let w = w2.sqrt();
            let gauss = fxx * fyy / (w2 * w2);
            let mean = ((1.0 + fy * fy) * fxx + (1.0 + fx * fx) * fyy) / (2.0 * w2 * w);
            (gauss, mean, Vector3::new(-fx, -fy, 1.0) / w)
        }
        SurfaceSpec::Plane { .. } => (0.0, 0.0, Vector3::z()),
    }
}

/// Closed-form `(gauss, mean, normal)` at surface parameters `(u, v)` (see
/// [`SurfaceSpec::position`] for the parametrization).
pub fn analytic_curvature(spec: &SurfaceSpec, u: f64, v: f64) -> Result<(f64, f64, Vector3)> {
    spec.validate()?;
    let out_of_domain = || Error::InvalidArgument(format!("parameters ({u}, {v}) outside the domain of {spec}"));
    if !(u.is_finite() && v.is_finite()) {
        return Err(out_of_domain());
    }
    match *spec {
        SurfaceSpec::Torus { .. } => {}
        SurfaceSpec::Ellipsoid { .. } | SurfaceSpec::Sphere { .. } => {
            if !(0.0..=PI).contains(&v) {
                return Err(out_of_domain());
            }
        }
        SurfaceSpec::HyperbolicParaboloid { extent, .. } | SurfaceSpec::Plane { extent } => {
            if u.abs() > extent || v.abs() > extent {
                return Err(out_of_domain());
            }
        }
    }
    Ok(curvature_at(spec, &spec.position(u, v)))
}

fn unit_gaussian_direction(rng: &mut ChaCha8Rng) -> Vector3 {
    loop {
        let v = Vector3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

fn draw(spec: &SurfaceSpec, mode: SamplingMode, rng: &mut ChaCha8Rng) -> Point3 {
    let area = mode == SamplingMode::AreaUniform;
    match *spec {
        SurfaceSpec::Torus { major, minor } => loop {
            let u = rng.random_range(0.0..TAU);
            let v = rng.random_range(0.0..TAU);
            // Area element is proportional to the ring radius.
            if !area || rng.random::<f64>() * (major + minor) < major + minor * v.cos() {
                return spec.position(u, v);
            }
        },
        SurfaceSpec::Ellipsoid { a, b, c } => {
            if !area {
                return spec.position(rng.random_range(0.0..TAU), rng.random_range(0.0..PI));
            }
            // Map of the unit sphere scales area by abc * |(x/a, y/b, z/c)|.
            let min_axis = a.min(b).min(c);
            loop {
                let s = unit_gaussian_direction(rng);
                let stretch = ((s.x / a).powi(2) + (s.y / b).powi(2) + (s.z / c).powi(2)).sqrt();
                if rng.random::<f64>() < min_axis * stretch {
                    return Point3::new(a * s.x, b * s.y, c * s.z);
                }
            }
        }
        SurfaceSpec::Sphere { radius } => {
            if area {
                Point3::from(unit_gaussian_direction(rng) * radius)
            } else {
                spec.position(rng.random_range(0.0..TAU), rng.random_range(0.0..PI))
            }
        }
        SurfaceSpec::HyperbolicParaboloid { a, b, extent } => {
            let slope = |x: f64, y: f64| {
                (1.0 + (2.0 * x / (a * a)).powi(2) + (2.0 * y / (b * b)).powi(2)).sqrt()
            };
            let w_max = slope(extent, extent);
            loop {
                let x = rng.random_range(-extent..=extent);
                let y = rng.random_range(-extent..=extent);
                if !area || rng.random::<f64>() * w_max < slope(x, y) {
                    return spec.position(x, y);
                }
            }
        }
        SurfaceSpec::Plane { extent } => spec.position(
            rng.random_range(-extent..=extent),
            rng.random_range(-extent..=extent),
        ),
    }
}

/// `n` area-uniform samples with ground truth. Point `i` is drawn from its
/// own stream of the seeded generator, so the output depends only on
/// `(spec, n, seed)`.
pub fn sample_surface(spec: &SurfaceSpec, n: usize, seed: u64) -> Result<Vec<GroundTruthPoint>> {
    sample_surface_with(spec, n, seed, SamplingMode::AreaUniform)
}

pub fn sample_surface_with(
    spec: &SurfaceSpec,
    n: usize,
    seed: u64,
    mode: SamplingMode,
) -> Result<Vec<GroundTruthPoint>> {
    if n == 0 {
        return Err(Error::InvalidCount(0));
    }
    spec.validate()?;
    Ok((0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let position = draw(spec, mode, &mut rng);
            let (gauss, mean, normal) = curvature_at(spec, &position);
            GroundTruthPoint {
                position,
                gauss,
                mean,
                normal,
                noisy_position: position,
            }
        })
        .collect())
}

/// Isotropic Gaussian noise with per-coordinate standard deviation `sigma`
/// added to the clean positions. Ground-truth fields are left untouched.
pub fn add_noise(points: &[GroundTruthPoint], sigma: f64, seed: u64) -> Result<Vec<GroundTruthPoint>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(points
            .iter()
            .map(|p| GroundTruthPoint { noisy_position: p.position, ..*p })
            .collect());
    }
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ NOISE_SALT);
            rng.set_stream(i as u64);
            let eps = Vector3::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            ) * sigma;
            GroundTruthPoint {
                noisy_position: p.position + eps,
                ..*p
            }
        })
        .collect())
}
