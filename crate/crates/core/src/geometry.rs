//! Point clouds, exact fixed-radius neighbor queries and weighting kernels.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;

/// Clouds below this size are searched by linear scan.
const BRUTE_FORCE_BELOW: usize = 256;
/// Above this size the data bound falls back to the bounding-box diagonal.
pub const EXACT_BOUND_LIMIT: usize = 20_000;
const LEAF_SIZE: usize = 12;

/// Neighbors of a query point, sorted by increasing distance (ties by index).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NeighborSet {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of leading entries with distance strictly below `radius`.
    pub fn count_within(&self, radius: f64) -> usize {
        self.distances.partition_point(|&d| d < radius)
    }

    /// Restriction to distances strictly below `radius`.
    pub fn within(&self, radius: f64) -> NeighborSet {
        let n = self.count_within(radius);
        NeighborSet {
            indices: self.indices[..n].to_vec(),
            distances: self.distances[..n].to_vec(),
        }
    }

    fn sort(&mut self) {
        let mut pairs: Vec<(f64, usize)> = self
            .distances
            .iter()
            .copied()
            .zip(self.indices.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        self.distances = pairs.iter().map(|p| p.0).collect();
        self.indices = pairs.iter().map(|p| p.1).collect();
    }
}

/// Immutable point cloud with a static k-d tree and cached data bound.
#[derive(Debug, Clone)]
pub struct PointCloud {
    points: Vec<Point3>,
    tree: KdTree,
    delta: f64,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if let Some(index) = points
            .iter()
            .position(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
        {
            return Err(Error::InvalidCoordinate { index });
        }
        let delta = data_bound(&points);
        let tree = KdTree::build(&points);
        Ok(PointCloud {
            points,
            tree,
            delta,
        })
    }

    pub fn from_xyz(coords: &[[f64; 3]]) -> Result<Self> {
        Self::new(coords.iter().map(|c| Point3::new(c[0], c[1], c[2])).collect())
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Point3 {
        self.points[index]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Data bound: maximum pairwise distance (or its bounding-box upper bound
    /// for clouds larger than [`EXACT_BOUND_LIMIT`]).
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// All points `q` with `0 < |q - center| < radius`.
    pub fn neighbors_within(&self, center: &Point3, radius: f64) -> Result<NeighborSet> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidRadius(radius));
        }
        let mut out = NeighborSet::default();
        if self.points.len() < BRUTE_FORCE_BELOW {
            for (i, q) in self.points.iter().enumerate() {
                let d = distance(q, center);
                if d > 0.0 && d < radius {
                    out.indices.push(i);
                    out.distances.push(d);
                }
            }
        } else {
            self.tree
                .range(&self.points, center, radius, 0, self.points.len(), &mut out);
        }
        out.sort();
        Ok(out)
    }
}

#[inline]
pub(crate) fn distance(a: &Point3, b: &Point3) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Maximum pairwise distance for up to [`EXACT_BOUND_LIMIT`] points, otherwise
/// the diagonal of the axis-aligned bounding box (at most `sqrt(3)` times the
/// exact value).
pub fn data_bound(points: &[Point3]) -> f64 {
    if points.len() <= 1 {
        return 0.0;
    }
    if points.len() > EXACT_BOUND_LIMIT {
        let mut lo = points[0];
        let mut hi = points[0];
        for p in points {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        return distance(&lo, &hi);
    }
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            points[i + 1..]
                .iter()
                .map(|q| distance(p, q))
                .fold(0.0_f64, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Implicit balanced k-d tree: a permutation of point indices where the
/// median of every subrange splits it along `dims[mid]`.
#[derive(Debug, Clone)]
struct KdTree {
    order: Vec<usize>,
    dims: Vec<u8>,
}

impl KdTree {
    fn build(points: &[Point3]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut dims = vec![0u8; points.len()];
        if points.len() >= BRUTE_FORCE_BELOW {
            Self::build_range(points, &mut order, &mut dims, 0, points.len());
        }
        KdTree { order, dims }
    }

    fn build_range(points: &[Point3], order: &mut [usize], dims: &mut [u8], lo: usize, hi: usize) {
        if hi - lo <= LEAF_SIZE {
            return;
        }
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for &i in &order[lo..hi] {
            for k in 0..3 {
                min[k] = min[k].min(points[i][k]);
                max[k] = max[k].max(points[i][k]);
            }
        }
        let dim = (0..3)
            .max_by(|&a, &b| (max[a] - min[a]).total_cmp(&(max[b] - min[b])))
            .unwrap_or(0);
        let mid = lo + (hi - lo) / 2;
        order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            points[a][dim].total_cmp(&points[b][dim])
        });
        dims[mid] = dim as u8;
        Self::build_range(points, order, dims, lo, mid);
        Self::build_range(points, order, dims, mid + 1, hi);
    }

    fn range(
        &self,
        points: &[Point3],
        center: &Point3,
        radius: f64,
        lo: usize,
        hi: usize,
        out: &mut NeighborSet,
    ) {
        if hi - lo <= LEAF_SIZE {
            for &i in &self.order[lo..hi] {
                self.test(points, i, center, radius, out);
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let split_index = self.order[mid];
        let dim = self.dims[mid] as usize;
        let split = points[split_index][dim];
        self.test(points, split_index, center, radius, out);
        // Slack keeps pruning conservative under rounding; membership is
        // decided by the exact distance test only.
        let reach = radius * (1.0 + 1e-12) + f64::EPSILON;
        if center[dim] - reach <= split {
            self.range(points, center, radius, lo, mid, out);
        }
        if center[dim] + reach >= split {
            self.range(points, center, radius, mid + 1, hi, out);
        }
    }

    #[inline]
    fn test(&self, points: &[Point3], i: usize, center: &Point3, radius: f64, out: &mut NeighborSet) {
        let d = distance(&points[i], center);
        if d > 0.0 && d < radius {
            out.indices.push(i);
            out.distances.push(d);
        }
    }
}

/// Weighting kernel supported on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `exp(-u^2 / (2 h^2))` on `[0, 1]`, zero beyond.
    TruncatedGaussian { bandwidth: f64 },
    /// `1 - u^2` on `[0, 1]`, zero beyond.
    Epanechnikov,
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::TruncatedGaussian { bandwidth: 1.0 }
    }
}

impl Kernel {
    pub fn truncated_gaussian(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "kernel bandwidth must lie in (0, 1], got {bandwidth}"
            )));
        }
        Ok(Kernel::TruncatedGaussian { bandwidth })
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kernel argument must be non-negative, got {u}"
            )));
        }
        Ok(self.weight(u))
    }

    /// Unchecked evaluation for `u >= 0`.
    #[inline]
    pub(crate) fn weight(&self, u: f64) -> f64 {
        if u > 1.0 {
            return 0.0;
        }
        match *self {
            Kernel::TruncatedGaussian { bandwidth } => (-u * u / (2.0 * bandwidth * bandwidth)).exp(),
            Kernel::Epanechnikov => 1.0 - u * u,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::TruncatedGaussian { .. } => "gauss",
            Kernel::Epanechnikov => "epan",
        }
    }
}

/// Kernel family without parameters, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Gauss,
    Epan,
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss" => Ok(KernelFamily::Gauss),
            "epan" => Ok(KernelFamily::Epan),
            other => Err(Error::Config(format!(
                "unknown kernel '{other}' (expected gauss or epan)"
            ))),
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelFamily::Gauss => "gauss",
            KernelFamily::Epan => "epan",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(points: &[Point3], c: &Point3, r: f64) -> Vec<usize> {
        let mut v: Vec<usize> = (0..points.len())
            .filter(|&i| {
                let d = distance(&points[i], c);
                d > 0.0 && d < r
            })
            .collect();
        v.sort();
        v
    }

    fn random_points(n: usize, seed: u64) -> Vec<Point3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Point3::new(rng.random(), rng.random(), rng.random()))
            .collect()
    }

    #[test]
    fn single_point_has_zero_bound() {
        let cloud = PointCloud::from_xyz(&[[0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(cloud.len(), 1);
        assert_eq!(cloud.delta(), 0.0);
    }

    #[test]
    fn pythagorean_pair() {
        let cloud = PointCloud::from_xyz(&[[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]]).unwrap();
        assert_eq!(cloud.delta(), 5.0);
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert_eq!(PointCloud::new(vec![]).unwrap_err(), Error::EmptyCloud);
        let err = PointCloud::from_xyz(&[[0.0, 0.0, 0.0], [f64::NAN, 0.0, 0.0]]).unwrap_err();
        assert_eq!(err, Error::InvalidCoordinate { index: 1 });
        let err = PointCloud::from_xyz(&[[0.0, f64::INFINITY, 0.0]]).unwrap_err();
        assert_eq!(err, Error::InvalidCoordinate { index: 0 });
    }

    #[test]
    fn bound_of_segment_and_cube() {
        let seg: Vec<Point3> = (0..=10).map(|i| Point3::new(i as f64 / 10.0, 0.0, 0.0)).collect();
        assert_eq!(data_bound(&seg), 1.0);
        let mut cube = Vec::new();
        for i in 0..8 {
            cube.push(Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        assert!((data_bound(&cube) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn large_cloud_bound_is_box_diagonal() {
        let pts = random_points(EXACT_BOUND_LIMIT + 1, 3);
        let b = data_bound(&pts);
        // Exact diameter of a few thousand points is already close to the
        // unit-cube diagonal, so the box bound must sit just above it.
        let exact = data_bound(&pts[..4000]);
        assert!(b >= exact && b <= 3f64.sqrt() * exact);
    }

    #[test]
    fn grid_axis_neighbors() {
        let mut coords = Vec::new();
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    coords.push([i as f64, j as f64, k as f64]);
                }
            }
        }
        let cloud = PointCloud::from_xyz(&coords).unwrap();
        assert!(cloud.len() >= BRUTE_FORCE_BELOW);
        let n = cloud
            .neighbors_within(&Point3::new(3.0, 3.0, 3.0), 1.1)
            .unwrap();
        assert_eq!(n.len(), 6);
        assert!(n.distances.iter().all(|&d| d == 1.0));
        let empty = cloud
            .neighbors_within(&Point3::new(3.0, 3.0, 3.0), 0.9)
            .unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn rejects_bad_radius() {
        let cloud = PointCloud::from_xyz(&[[0.0, 0.0, 0.0]]).unwrap();
        let c = Point3::origin();
        assert_eq!(cloud.neighbors_within(&c, 0.0).unwrap_err(), Error::InvalidRadius(0.0));
        assert!(cloud.neighbors_within(&c, -1.0).is_err());
        assert!(cloud.neighbors_within(&c, f64::NAN).is_err());
    }

    #[test]
    fn duplicates_of_query_are_excluded() {
        let cloud = PointCloud::from_xyz(&[[0.0; 3], [0.0; 3], [0.5, 0.0, 0.0]]).unwrap();
        let n = cloud.neighbors_within(&Point3::origin(), 1.0).unwrap();
        assert_eq!(n.indices, vec![2]);
    }

    #[test]
    fn tree_matches_linear_scan() {
        let pts = random_points(1000, 11);
        let cloud = PointCloud::new(pts.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for q in 0..200 {
            let center = if q % 2 == 0 {
                pts[rng.random_range(0..pts.len())]
            } else {
                Point3::new(rng.random(), rng.random(), rng.random())
            };
            let r = rng.random_range(0.01..0.6);
            let got = cloud.neighbors_within(&center, r).unwrap();
            let mut idx = got.indices.clone();
            idx.sort();
            assert_eq!(idx, brute(&pts, &center, r));
            assert!(got.distances.windows(2).all(|w| w[0] <= w[1]));
            assert!(got.distances.iter().all(|&d| d > 0.0 && d < r));
        }
    }

    #[test]
    fn kernel_values() {
        let epan = Kernel::Epanechnikov;
        assert_eq!(epan.eval(0.0).unwrap(), 1.0);
        assert_eq!(epan.eval(1.5).unwrap(), 0.0);
        let g = Kernel::truncated_gaussian(0.4).unwrap();
        assert!((g.eval(0.4).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(g.eval(1.5).unwrap(), 0.0);
        assert!(g.eval(-0.1).is_err());
        assert!(Kernel::truncated_gaussian(0.0).is_err());
        assert!(Kernel::truncated_gaussian(1.5).is_err());
    }

    #[test]
    fn kernel_family_parse() {
        assert_eq!("gauss".parse::<KernelFamily>().unwrap(), KernelFamily::Gauss);
        assert_eq!("epan".parse::<KernelFamily>().unwrap(), KernelFamily::Epan);
        assert!("cosine".parse::<KernelFamily>().is_err());
    }
}
