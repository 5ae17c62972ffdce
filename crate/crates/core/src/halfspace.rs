//! Tukey halfspace depth.
//!
//! Exact kernels for `p = 1` (counting) and `p = 2` (angular sweep around the
//! query, `O(n log n)`), a random-direction approximation for `p >= 3`, and
//! the volume of the trimmed region `{x : D(x) > beta}`.
//!
//! Halfspaces are closed and a query that coincides with cloud points counts
//! those points on both sides, so the deepest sample point always has
//! positive depth.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// A finite sample of `p`-vectors, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub p: usize,
    pub points: Vec<f64>,
}

impl PointCloud {
    pub fn new(p: usize, points: Vec<f64>) -> Self {
        assert!(p > 0, "dimension must be positive");
        assert_eq!(points.len() % p, 0, "point buffer is not a multiple of p");
        Self { p, points }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let p = rows.first().map_or(1, Vec::len);
        Self::new(p, rows.iter().flatten().copied().collect())
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.p
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.p..(i + 1) * self.p]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.p)
    }
}

/// `min(#{y <= x}, #{y >= x}) / n`.
pub fn depth_1d(x: f64, cloud: &[f64]) -> f64 {
    if cloud.is_empty() {
        return 0.0;
    }
    let le = cloud.iter().filter(|&&y| y <= x).count();
    let ge = cloud.iter().filter(|&&y| y >= x).count();
    le.min(ge) as f64 / cloud.len() as f64
}

fn depth_1d_sorted(x: f64, sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    let le = sorted.partition_point(|&y| y <= x);
    let ge = n - sorted.partition_point(|&y| y < x);
    le.min(ge) as f64 / n as f64
}

#[inline]
fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Monotone surrogate of the polar angle on `[0, 4)`.
#[inline]
fn pseudo_angle(v: [f64; 2]) -> f64 {
    let r = v[1] / (v[0].abs() + v[1].abs());
    if v[0] < 0.0 {
        2.0 - r
    } else if v[1] < 0.0 {
        4.0 + r
    } else {
        r
    }
}

/// `b` lies in the half-open angular window `[angle(a), angle(a) + pi)`.
#[inline]
fn in_window(a: [f64; 2], b: [f64; 2]) -> bool {
    let c = cross(a, b);
    c > 0.0 || (c == 0.0 && dot(a, b) > 0.0)
}

#[inline]
fn same_direction(a: [f64; 2], b: [f64; 2]) -> bool {
    cross(a, b) == 0.0 && dot(a, b) > 0.0
}

/// Reusable buffers for repeated bivariate depth queries.
#[derive(Debug, Default)]
pub struct SweepScratch {
    dirs: Vec<(f64, [f64; 2])>,
}

/// Exact bivariate halfspace depth of `x` in `cloud`.
pub fn depth_2d_exact(x: [f64; 2], cloud: &[[f64; 2]]) -> f64 {
    depth_2d_with(x, cloud, &mut SweepScratch::default())
}

/// [`depth_2d_exact`] reusing caller-provided buffers.
///
/// The minimal closed halfplane through `x` holds every point except those
/// in the fullest open halfplane whose boundary passes through `x`. Sorting
/// the directions `y - x` by angle, the fullest open halfplane is found by a
/// two-pointer sweep over windows `[theta, theta + pi)` that start at each
/// distinct direction. Points equal to `x` lie in every halfplane.
pub fn depth_2d_with(x: [f64; 2], cloud: &[[f64; 2]], scratch: &mut SweepScratch) -> f64 {
    let n = cloud.len();
    if n == 0 {
        return 0.0;
    }
    let dirs = &mut scratch.dirs;
    dirs.clear();
    for y in cloud {
        let v = [y[0] - x[0], y[1] - x[1]];
        if v[0] != 0.0 || v[1] != 0.0 {
            dirs.push((pseudo_angle(v), v));
        }
    }
    let m = dirs.len();
    if m == 0 {
        return 1.0;
    }
    dirs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut max_open = 0usize;
    let mut end = 0usize;
    let mut start = 0usize;
    while start < m {
        let a = dirs[start].1;
        end = end.max(start + 1);
        while end < start + m && in_window(a, dirs[end % m].1) {
            end += 1;
        }
        max_open = max_open.max(end - start);
        let mut next = start + 1;
        while next < m && same_direction(a, dirs[next].1) {
            next += 1;
        }
        start = next;
    }
    (n - max_open) as f64 / n as f64
}

/// Random-direction approximation: the minimum univariate depth over
/// `n_dirs` uniformly distributed unit directions. Never below the exact depth.
pub fn depth_nd_approx(x: &[f64], cloud: &PointCloud, n_dirs: usize, seed: u64) -> f64 {
    Reference::new(cloud, Kernel::Random { n_dirs, seed }).depth(x)
}

/// Unit directions drawn from the normalised standard Gaussian.
pub fn random_directions(p: usize, n_dirs: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seed::rng(seed);
    let mut out = Vec::with_capacity(n_dirs);
    while out.len() < n_dirs {
        let v: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            out.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    out
}

/// How depth is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Kernel {
    /// Exact for `p <= 2`; panics if used with `p >= 3`.
    Exact,
    Random { n_dirs: usize, seed: u64 },
}

impl Kernel {
    /// Exact where available, otherwise 500 random directions.
    pub fn auto(p: usize, seed: u64) -> Kernel {
        if p <= 2 {
            Kernel::Exact
        } else {
            Kernel::Random { n_dirs: 500, seed }
        }
    }
}

#[derive(Debug, Clone)]
enum Prepared {
    Sorted1d(Vec<f64>),
    Planar(Vec<[f64; 2]>),
    Projected {
        dirs: Vec<Vec<f64>>,
        sorted: Vec<Vec<f64>>,
    },
}

/// A cloud preprocessed for many depth queries.
#[derive(Debug, Clone)]
pub struct Reference {
    p: usize,
    n: usize,
    prepared: Prepared,
}

impl Reference {
    pub fn new(cloud: &PointCloud, kernel: Kernel) -> Self {
        let p = cloud.p;
        let prepared = match (kernel, p) {
            (Kernel::Exact, 1) => {
                let mut v = cloud.points.clone();
                v.sort_by(f64::total_cmp);
                Prepared::Sorted1d(v)
            }
            (Kernel::Exact, 2) => Prepared::Planar(cloud.iter().map(|y| [y[0], y[1]]).collect()),
            (Kernel::Exact, _) => panic!("exact halfspace depth is implemented for p <= 2 only"),
            (Kernel::Random { n_dirs, seed }, _) => {
                let dirs = random_directions(p, n_dirs.max(1), seed);
                let sorted = dirs
                    .iter()
                    .map(|u| {
                        let mut proj: Vec<f64> =
                            cloud.iter().map(|y| y.iter().zip(u).map(|(a, b)| a * b).sum()).collect();
                        proj.sort_by(f64::total_cmp);
                        proj
                    })
                    .collect();
                Prepared::Projected { dirs, sorted }
            }
        };
        Self {
            p,
            n: cloud.len(),
            prepared,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn depth(&self, x: &[f64]) -> f64 {
        self.depth_with(x, &mut SweepScratch::default())
    }

    pub fn depth_with(&self, x: &[f64], scratch: &mut SweepScratch) -> f64 {
        debug_assert_eq!(x.len(), self.p);
        match &self.prepared {
            Prepared::Sorted1d(v) => depth_1d_sorted(x[0], v),
            Prepared::Planar(pts) => depth_2d_with([x[0], x[1]], pts, scratch),
            Prepared::Projected { dirs, sorted } => dirs
                .iter()
                .zip(sorted)
                .map(|(u, proj)| {
                    let px: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
                    depth_1d_sorted(px, proj)
                })
                .fold(1.0, f64::min),
        }
    }
}

/// Depth of every cloud point with respect to the cloud itself.
pub fn sample_depths(cloud: &PointCloud, kernel: Kernel) -> Vec<f64> {
    let reference = Reference::new(cloud, kernel);
    let mut scratch = SweepScratch::default();
    cloud.iter().map(|y| reference.depth_with(y, &mut scratch)).collect()
}

/// Volume of the trimmed region `{x : D(x) > beta}`, estimated from the
/// sample points whose depth exceeds `beta`: their range for `p = 1`, the
/// area of their convex hull for `p = 2`.
pub fn region_volume(cloud: &PointCloud, beta: f64) -> Result<f64> {
    if cloud.p > 2 {
        return Err(Error::InvalidParameter(format!(
            "region volume is available for p <= 2, got p = {}",
            cloud.p
        )));
    }
    let depths = sample_depths(cloud, Kernel::Exact);
    region_volume_from_depths(cloud, &depths, beta)
}

/// [`region_volume`] with precomputed sample depths.
pub fn region_volume_from_depths(cloud: &PointCloud, depths: &[f64], beta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("beta must lie in [0, 1), got {beta}")));
    }
    let inner: Vec<&[f64]> = cloud
        .iter()
        .zip(depths)
        .filter(|(_, &d)| d > beta)
        .map(|(y, _)| y)
        .collect();
    if inner.is_empty() {
        return Ok(0.0);
    }
    match cloud.p {
        1 => {
            let (lo, hi) = inner
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y[0]), hi.max(y[0])));
            Ok(hi - lo)
        }
        2 => {
            let pts: Vec<[f64; 2]> = inner.iter().map(|y| [y[0], y[1]]).collect();
            Ok(polygon_area(&convex_hull(&pts)))
        }
        p => Err(Error::InvalidParameter(format!(
            "region volume is available for p <= 2, got p = {p}"
        ))),
    }
}

/// Convex hull in counter-clockwise order (Andrew's monotone chain).
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| cross([a[0] - o[0], a[1] - o[1]], [b[0] - o[0], b[1] - o[1]]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let s: f64 = (0..poly.len())
        .map(|i| cross(poly[i], poly[(i + 1) % poly.len()]))
        .sum();
    0.5 * s.abs()
}
