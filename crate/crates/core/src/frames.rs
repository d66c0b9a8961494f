//! Kernel-weighted local PCA: tangent plane and normal at a query point.
//!
//! The neighborhood matrix `X` has one column `x_j - p` per neighbor and is
//! reweighted per column by `sqrt(K(d_j / r))`. Its left singular vectors are
//! the eigenvectors of the weighted scatter `sum_j K(d_j / r) (x_j - p)(x_j - p)^T`,
//! and the singular values are the square roots of that matrix's eigenvalues,
//! which is how they are computed here.

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{Kernel, NeighborSet, Point3, PointCloud, Vector3};

/// Smallest neighborhood that can span a tangent plane.
pub const MIN_FRAME_POINTS: usize = 3;
/// A neighborhood is treated as collinear when `sigma2 < RANK_TOL * sigma1`.
pub const RANK_TOL: f64 = 1e-12;

/// Orthonormal frame `{e1, e2, normal}` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub e1: Vector3,
    pub e2: Vector3,
    pub normal: Vector3,
    /// Singular values in descending order.
    pub sigma: [f64; 3],
    pub neighbor_count: usize,
    /// Unweighted centroid of the neighborhood, used to orient the normal.
    pub centroid: Point3,
}

impl LocalFrame {
    /// Fraction of weighted variance captured by the tangent plane.
    pub fn explained_variance_ratio(&self) -> f64 {
        let [s1, s2, s3] = self.sigma;
        let top = s1 * s1 + s2 * s2;
        top / (top + s3 * s3)
    }

    /// Orthogonal projector onto the tangent plane.
    pub fn tangent_projector(&self) -> Matrix3<f64> {
        self.e1 * self.e1.transpose() + self.e2 * self.e2.transpose()
    }

    /// Same frame with the normal reversed.
    pub fn flipped(&self) -> LocalFrame {
        LocalFrame {
            normal: -self.normal,
            ..*self
        }
    }
}

/// Weighted PCA frame from the neighbors of `p` at radius `r`, with the normal
/// oriented away from the neighborhood centroid.
pub fn weighted_local_pca(
    cloud: &PointCloud,
    p: &Point3,
    r: f64,
    kernel: &Kernel,
) -> Result<LocalFrame> {
    let neighbors = cloud.neighbors_within(p, r)?;
    let frame = frame_from_neighbors(cloud, p, &neighbors, r, kernel)?;
    Ok(orient_normal(frame, p, &frame.centroid))
}

/// Unoriented frame from an already computed neighborhood. Only entries with
/// distance strictly below `r` are used.
pub fn frame_from_neighbors(
    cloud: &PointCloud,
    p: &Point3,
    neighbors: &NeighborSet,
    r: f64,
    kernel: &Kernel,
) -> Result<LocalFrame> {
    if !(r > 0.0) {
        return Err(Error::InvalidRadius(r));
    }
    let count = neighbors.count_within(r);
    if count < MIN_FRAME_POINTS {
        return Err(Error::InsufficientNeighbors {
            count,
            required: MIN_FRAME_POINTS,
        });
    }
    let mut scatter = Matrix3::<f64>::zeros();
    let mut weight_sum = 0.0;
    let mut centroid = Vector3::zeros();
    for (&j, &d) in neighbors.indices[..count].iter().zip(&neighbors.distances[..count]) {
        let v = cloud.point(j) - p;
        let w = kernel.weight(d / r);
        centroid += cloud.point(j).coords;
        weight_sum += w;
        scatter.ger(w, &v, &v, 1.0);
    }
    if !(weight_sum > 0.0) {
        return Err(Error::DegenerateWeights);
    }
    let mut frame = frame_from_scatter(scatter)?;
    frame.neighbor_count = count;
    frame.centroid = Point3::from(centroid / count as f64);
    Ok(frame)
}

fn frame_from_scatter(scatter: Matrix3<f64>) -> Result<LocalFrame> {
    let eigen = SymmetricEigen::new(scatter);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));
    let sigma = order.map(|k| eigen.eigenvalues[k].max(0.0).sqrt());
    if !(sigma[0] > 0.0) || sigma[1] < RANK_TOL * sigma[0] {
        return Err(Error::DegenerateNeighborhood);
    }
    let e1: Vector3 = eigen.eigenvectors.column(order[0]).normalize();
    let e2: Vector3 = eigen.eigenvectors.column(order[1]).normalize();
    // Re-orthogonalize e2 against e1 and complete with the cross product so
    // the frame is orthonormal to rounding.
    let e2 = (e2 - e1 * e1.dot(&e2)).normalize();
    let normal = e1.cross(&e2);
    Ok(LocalFrame {
        e1,
        e2,
        normal,
        sigma,
        neighbor_count: 0,
        centroid: Point3::origin(),
    })
}

/// Flip the normal so that `normal . (p - centroid) >= 0`; a zero dot product
/// leaves the frame unchanged.
pub fn orient_normal(frame: LocalFrame, p: &Point3, neighborhood_centroid: &Point3) -> LocalFrame {
    if frame.normal.dot(&(p - neighborhood_centroid)) < 0.0 {
        frame.flipped()
    } else {
        frame
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plane_cloud() -> PointCloud {
        let mut coords = Vec::new();
        for i in -5..=5 {
            for j in -5..=5 {
                coords.push([i as f64 * 0.1, j as f64 * 0.13, 0.0]);
            }
        }
        PointCloud::from_xyz(&coords).unwrap()
    }

    fn sphere_cloud(n: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n)
            .map(|_| loop {
                let v = Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                let n2 = v.norm_squared();
                if n2 > 1e-6 && n2 <= 1.0 {
                    break Point3::from(v / n2.sqrt());
                }
            })
            .collect();
        PointCloud::new(pts).unwrap()
    }

    fn assert_orthonormal(f: &LocalFrame) {
        let m = Matrix3::from_columns(&[f.e1, f.e2, f.normal]);
        let err = (m.transpose() * m - Matrix3::identity()).abs().max();
        assert!(err < 1e-10, "orthonormality error {err}");
        assert!(f.sigma[0] >= f.sigma[1] && f.sigma[1] >= f.sigma[2] && f.sigma[2] >= 0.0);
        assert!(f.neighbor_count >= 3);
    }

    #[test]
    fn planar_neighborhood() {
        let cloud = plane_cloud();
        let p = Point3::origin();
        let f = weighted_local_pca(&cloud, &p, 0.35, &Kernel::default()).unwrap();
        assert_orthonormal(&f);
        assert!((f.normal.z.abs() - 1.0).abs() < 1e-12);
        assert_eq!(f.sigma[2], 0.0);
        assert_eq!(f.explained_variance_ratio(), 1.0);
    }

    #[test]
    fn sphere_pole_normal() {
        let cloud = sphere_cloud(20_000, 5);
        let p = Point3::new(0.0, 0.0, 1.0);
        let f = weighted_local_pca(&cloud, &p, 0.2, &Kernel::default()).unwrap();
        assert_orthonormal(&f);
        let angle = f.normal.dot(&Vector3::z()).clamp(-1.0, 1.0).acos();
        assert!(angle < 5f64.to_radians(), "angle {angle}");
    }

    #[test]
    fn matches_dense_svd() {
        let cloud = sphere_cloud(3000, 8);
        let kernel = Kernel::default();
        for (i, r) in [(0usize, 0.15), (17, 0.3), (400, 0.5), (999, 0.8)] {
            let p = cloud.point(i);
            let nb = cloud.neighbors_within(&p, r).unwrap();
            let f = frame_from_neighbors(&cloud, &p, &nb, r, &kernel).unwrap();
            // Independent route: SVD of the 3 x N weighted data matrix.
            let mut b = DMatrix::<f64>::zeros(3, nb.len());
            for (c, (&j, &d)) in nb.indices.iter().zip(&nb.distances).enumerate() {
                let v = cloud.point(j) - p;
                let s = kernel.eval(d / r).unwrap().sqrt();
                for k in 0..3 {
                    b[(k, c)] = v[k] * s;
                }
            }
            let svd = b.svd(true, false);
            let u = svd.u.unwrap();
            let mut idx = [0usize, 1, 2];
            idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
            for (k, &i) in idx.iter().enumerate() {
                let sv = svd.singular_values[i];
                assert!((f.sigma[k] - sv).abs() < 1e-9 * svd.singular_values.max(), "sigma {k}");
            }
            let u1: Vector3 = u.column(idx[0]).into_owned().fixed_rows::<3>(0).into();
            let u2: Vector3 = u.column(idx[1]).into_owned().fixed_rows::<3>(0).into();
            let u3: Vector3 = u.column(idx[2]).into_owned().fixed_rows::<3>(0).into();
            let proj = u1 * u1.transpose() + u2 * u2.transpose();
            assert!((proj - f.tangent_projector()).abs().max() < 1e-8);
            assert!((u3.dot(&f.normal).abs() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn orientation_rule() {
        let frame = LocalFrame {
            e1: Vector3::x(),
            e2: Vector3::y(),
            normal: -Vector3::z(),
            sigma: [1.0, 1.0, 0.1],
            neighbor_count: 3,
            centroid: Point3::origin(),
        };
        let apex = Point3::new(0.0, 0.0, 1.0);
        let below = Point3::new(0.0, 0.0, 0.9);
        let oriented = orient_normal(frame, &apex, &below);
        assert_eq!(oriented.normal, Vector3::z());
        assert_eq!(oriented.e1, frame.e1);
        // Tie: p on the centroid keeps the SVD sign.
        assert_eq!(orient_normal(frame, &apex, &apex), frame);
    }

    #[test]
    fn sphere_normals_point_outward() {
        let cloud = sphere_cloud(5000, 21);
        let kernel = Kernel::default();
        let mut good = 0;
        let mut total = 0;
        for i in (0..cloud.len()).step_by(10) {
            let p = cloud.point(i);
            if let Ok(f) = weighted_local_pca(&cloud, &p, 0.3, &kernel) {
                total += 1;
                if f.normal.dot(&p.coords) > 0.0 {
                    good += 1;
                }
            }
        }
        assert!(total > 400);
        assert!(good as f64 >= 0.95 * total as f64, "{good}/{total}");
    }

    #[test]
    fn error_paths() {
        let cloud = PointCloud::from_xyz(&[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0]])
            .unwrap();
        let p = Point3::origin();
        assert_eq!(
            weighted_local_pca(&cloud, &p, 1.5, &Kernel::default()).unwrap_err(),
            Error::InsufficientNeighbors { count: 1, required: 3 }
        );
        assert_eq!(
            weighted_local_pca(&cloud, &p, 3.5, &Kernel::default()).unwrap_err(),
            Error::DegenerateNeighborhood
        );
    }
}
