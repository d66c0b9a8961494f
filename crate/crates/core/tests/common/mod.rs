//! Helpers shared by the oracle and acceptance targets.

use std::f64::consts::{PI, TAU};

use pointcurv::surfaces::{analytic_curvature, SurfaceSpec};
use pointcurv::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gaussian curvature, mean curvature `(k1 + k2) / 2` and unit normal from
/// central differences of the parametrization, with the normal oriented by
/// `outward`.
pub fn fd_shape_operator(
    spec: &SurfaceSpec,
    u: f64,
    v: f64,
    outward: impl Fn(&Point3, &Vector3) -> bool,
) -> (f64, f64, Vector3) {
    let x = |a: f64, b: f64| spec.position(a, b).coords;
    let h = 1e-4;
    let xu = (x(u + h, v) - x(u - h, v)) / (2.0 * h);
    let xv = (x(u, v + h) - x(u, v - h)) / (2.0 * h);
    let xuu = (x(u + h, v) - 2.0 * x(u, v) + x(u - h, v)) / (h * h);
    let xvv = (x(u, v + h) - 2.0 * x(u, v) + x(u, v - h)) / (h * h);
    let xuv = (x(u + h, v + h) - x(u + h, v - h) - x(u - h, v + h) + x(u - h, v - h))
        / (4.0 * h * h);
    let mut n = xu.cross(&xv).normalize();
    if !outward(&spec.position(u, v), &n) {
        n = -n;
    }
    let (e, f, g) = (xu.dot(&xu), xu.dot(&xv), xv.dot(&xv));
    let (l, m, nn) = (xuu.dot(&n), xuv.dot(&n), xvv.dot(&n));
    let det = e * g - f * f;
    let gauss = (l * nn - m * m) / det;
    let mean = (e * nn - 2.0 * f * m + g * l) / (2.0 * det);
    (gauss, mean, n)
}

pub type Outward = Box<dyn Fn(&Point3, &Vector3) -> bool>;

/// A surface with its `u` and `v` parameter ranges and outward-normal test.
pub type FdCase = (SurfaceSpec, (f64, f64), (f64, f64), Outward);

pub fn fd_cases() -> Vec<FdCase> {
    vec![
        (
            SurfaceSpec::default_torus(),
            (0.0, TAU),
            (0.0, TAU),
            Box::new(|p: &Point3, n: &Vector3| {
                let ring = Vector3::new(p.x, p.y, 0.0).normalize() * 2.0;
                n.dot(&(p.coords - ring)) > 0.0
            }),
        ),
        (
            SurfaceSpec::Torus { major: 3.0, minor: 0.5 },
            (0.0, TAU),
            (0.0, TAU),
            Box::new(|p: &Point3, n: &Vector3| {
                let ring = Vector3::new(p.x, p.y, 0.0).normalize() * 3.0;
                n.dot(&(p.coords - ring)) > 0.0
            }),
        ),
        (
            SurfaceSpec::default_ellipsoid(),
            (0.0, TAU),
            (0.05, PI - 0.05),
            Box::new(|p: &Point3, n: &Vector3| n.dot(&p.coords) > 0.0),
        ),
        (
            SurfaceSpec::Sphere { radius: 1.5 },
            (0.0, TAU),
            (0.05, PI - 0.05),
            Box::new(|p: &Point3, n: &Vector3| n.dot(&p.coords) > 0.0),
        ),
        (
            SurfaceSpec::default_saddle(),
            (-1.0, 1.0),
            (-1.0, 1.0),
            Box::new(|_: &Point3, n: &Vector3| n.z > 0.0),
        ),
        (
            SurfaceSpec::HyperbolicParaboloid { a: 1.5, b: 0.8, extent: 1.0 },
            (-1.0, 1.0),
            (-1.0, 1.0),
            Box::new(|_: &Point3, n: &Vector3| n.z > 0.0),
        ),
        (
            SurfaceSpec::Plane { extent: 1.0 },
            (-1.0, 1.0),
            (-1.0, 1.0),
            Box::new(|_: &Point3, n: &Vector3| n.z > 0.0),
        ),
    ]
}

/// Largest relative disagreement between the closed-form curvatures and the
/// finite-difference oracle over `per_surface` random parameters per case,
/// together with the largest normal difference.
pub fn fd_max_error(per_surface: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut curv, mut normal) = (0.0f64, 0.0f64);
    for (spec, ur, vr, outward) in &fd_cases() {
        for _ in 0..per_surface {
            let u = rng.random_range(ur.0..ur.1);
            let v = rng.random_range(vr.0..vr.1);
            let (k, h, n) = analytic_curvature(spec, u, v).unwrap();
            let (fk, fh, fn_) = fd_shape_operator(spec, u, v, outward);
            curv = curv.max((k - fk).abs() / fk.abs().max(1.0)).max((h - fh).abs() / fh.abs().max(1.0));
            normal = normal.max((n - fn_).norm());
        }
    }
    (curv, normal)
}
