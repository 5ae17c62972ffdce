//! Binwise location/scatter estimation and whitening.
//!
//! Each observation is mapped to `Q_k^{-1/2} (y - c_k)` using the centre and
//! scatter of its bin, after which all bins share one reference cloud.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::binning::BinGrid;
use crate::error::{Error, Result};
use crate::model::{Dataset, MultiCurve};
use crate::seed;

/// Consistency factor of the MAD at the Gaussian.
const MAD_SCALE: f64 = 1.482_602_218_505_602;

/// Candidate directions examined per projection-pursuit step.
pub const MAX_PP_CANDIDATES: usize = 256;

/// Pooled subsample size cap used for global pointwise depths.
pub const DEFAULT_POOL_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    /// Binwise mean and `1/n` covariance.
    Plain,
    /// Coordinatewise median and projection-pursuit scatter.
    #[default]
    Robust,
}

/// Centre and scatter of one bin. `scatter` is `p x p`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub center: Vec<f64>,
    pub scatter: Vec<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinMoments {
    pub p: usize,
    pub kind: MomentKind,
    pub bins: Vec<Moment>,
}

/// A dataset after binwise whitening; ids and times are unchanged.
pub type NormalizedDataset = Dataset;

/// Whitened observations, optionally subsampled.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalPool {
    pub p: usize,
    pub points: Vec<f64>,
}

fn bin_points<'a>(dataset: &'a Dataset, grid: &BinGrid) -> Vec<Vec<&'a [f64]>> {
    let mut bins: Vec<Vec<&[f64]>> = vec![Vec::new(); grid.n_bins()];
    for c in &dataset.curves {
        for (k, &t) in c.times.iter().enumerate() {
            bins[grid.assign(t)].push(c.y(k));
        }
    }
    bins
}

/// Plain binwise moments: mean and the mean of products minus the product
/// of means.
pub fn bin_moments(dataset: &Dataset, grid: &BinGrid) -> Result<BinMoments> {
    let p = dataset.p;
    let bins = bin_points(dataset, grid)
        .into_iter()
        .enumerate()
        .map(|(b, pts)| {
            if pts.len() < 2 {
                return Err(Error::BinTooSmall {
                    bin: b,
                    count: pts.len(),
                    required: 2,
                });
            }
            Ok(plain_moment(&pts, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinMoments {
        p,
        kind: MomentKind::Plain,
        bins,
    })
}

fn plain_moment(pts: &[&[f64]], p: usize) -> Moment {
    let n = pts.len() as f64;
    let mut mean = vec![0.0; p];
    for y in pts {
        for (m, v) in mean.iter_mut().zip(y.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut cov = vec![0.0; p * p];
    for y in pts {
        for l in 0..p {
            for m in 0..p {
                cov[l * p + m] += y[l] * y[m];
            }
        }
    }
    for l in 0..p {
        for m in 0..p {
            cov[l * p + m] = cov[l * p + m] / n - mean[l] * mean[m];
        }
    }
    Moment {
        center: mean,
        scatter: cov,
        count: pts.len(),
    }
}

/// Robust binwise moments: coordinatewise median centre and a
/// projection-pursuit scatter built from the directions of maximal MAD.
pub fn robust_bin_moments(dataset: &Dataset, grid: &BinGrid) -> Result<BinMoments> {
    let p = dataset.p;
    let bins = bin_points(dataset, grid)
        .into_iter()
        .enumerate()
        .map(|(b, pts)| {
            if pts.len() < p + 1 {
                return Err(Error::BinTooSmall {
                    bin: b,
                    count: pts.len(),
                    required: p + 1,
                });
            }
            Ok(robust_moment(&pts, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinMoments {
        p,
        kind: MomentKind::Robust,
        bins,
    })
}

pub fn moments(dataset: &Dataset, grid: &BinGrid, kind: MomentKind) -> Result<BinMoments> {
    match kind {
        MomentKind::Plain => bin_moments(dataset, grid),
        MomentKind::Robust => robust_bin_moments(dataset, grid),
    }
}

fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    let (_, &mut hi, _) = v.select_nth_unstable_by(n / 2, f64::total_cmp);
    if n % 2 == 1 {
        hi
    } else {
        let lo = v[..n / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

/// Consistency-scaled median absolute deviation.
pub fn mad(values: &[f64]) -> f64 {
    let mut buf = values.to_vec();
    mad_in_place(&mut buf)
}

fn mad_in_place(buf: &mut [f64]) -> f64 {
    if buf.is_empty() {
        return 0.0;
    }
    let med = median_in_place(buf);
    buf.iter_mut().for_each(|v| *v = (*v - med).abs());
    MAD_SCALE * median_in_place(buf)
}

pub fn median(values: &[f64]) -> f64 {
    let mut buf = values.to_vec();
    median_in_place(&mut buf)
}

fn robust_moment(pts: &[&[f64]], p: usize) -> Moment {
    let n = pts.len();
    let center: Vec<f64> = (0..p)
        .map(|j| median(&pts.iter().map(|y| y[j]).collect::<Vec<_>>()))
        .collect();
    let centered: Vec<Vec<f64>> = pts
        .iter()
        .map(|y| y.iter().zip(&center).map(|(a, c)| a - c).collect())
        .collect();
    let mut residual = centered.clone();
    let mut found: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut scales: Vec<f64> = Vec::with_capacity(p);
    let mut proj = vec![0.0; n];
    let project = |dir: &[f64], rows: &[Vec<f64>], out: &mut [f64]| {
        for (o, r) in out.iter_mut().zip(rows) {
            *o = r.iter().zip(dir).map(|(a, b)| a * b).sum();
        }
    };

    // evenly strided rows as candidate directions
    let stride = n.div_ceil(MAX_PP_CANDIDATES).max(1);
    for step in 0..p {
        let mut best: Option<(f64, Vec<f64>)> = None;
        // the last direction is fixed by the previous ones
        let candidates: &[Vec<f64>] = if step + 1 == p && p > 1 { &[] } else { &residual };
        for r in candidates.iter().step_by(stride) {
            let norm = r.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm <= 1e-12 {
                continue;
            }
            let dir: Vec<f64> = r.iter().map(|a| a / norm).collect();
            project(&dir, &residual, &mut proj);
            let s = mad_in_place(&mut proj);
            if best.as_ref().is_none_or(|(bs, _)| s > *bs) {
                best = Some((s, dir));
            }
        }
        let dir = match best {
            Some((_, d)) => orthonormalize(d, &found),
            None => None,
        }
        .or_else(|| complement_direction(&found, p))
        .expect("an orthonormal basis of R^p always has a free direction");
        project(&dir, &centered, &mut proj);
        let s = mad_in_place(&mut proj);
        for r in residual.iter_mut() {
            let c: f64 = r.iter().zip(&dir).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(&dir).for_each(|(a, b)| *a -= c * b);
        }
        scales.push(s * s);
        found.push(dir);
    }

    let mut scatter = vec![0.0; p * p];
    for (dir, lambda) in found.iter().zip(&scales) {
        for l in 0..p {
            for m in 0..p {
                scatter[l * p + m] += lambda * dir[l] * dir[m];
            }
        }
    }
    symmetrize(&mut scatter, p);
    Moment {
        center,
        scatter,
        count: n,
    }
}

fn orthonormalize(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for b in basis {
        let c: f64 = v.iter().zip(b).map(|(a, e)| a * e).sum();
        v.iter_mut().zip(b).for_each(|(a, e)| *a -= c * e);
    }
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    (norm > 1e-9).then(|| v.into_iter().map(|a| a / norm).collect())
}

fn complement_direction(basis: &[Vec<f64>], p: usize) -> Option<Vec<f64>> {
    (0..p).find_map(|j| {
        let mut e = vec![0.0; p];
        e[j] = 1.0;
        orthonormalize(e, basis)
    })
}

fn symmetrize(m: &mut [f64], p: usize) {
    for l in 0..p {
        for k in (l + 1)..p {
            let avg = 0.5 * (m[l * p + k] + m[k * p + l]);
            m[l * p + k] = avg;
            m[k * p + l] = avg;
        }
    }
}

/// Inverse square root of a symmetric matrix (row-major `p x p`).
///
/// Eigenvalues below `1e-8 * trace / p` are raised to that floor. A zero
/// matrix maps to the identity.
pub fn inv_sqrt(cov: &[f64], p: usize) -> Result<Vec<f64>> {
    assert_eq!(cov.len(), p * p);
    let scale = cov.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut asym = 0.0_f64;
    for l in 0..p {
        for k in 0..p {
            asym = asym.max((cov[l * p + k] - cov[k * p + l]).abs());
        }
    }
    if asym > 1e-10 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let trace: f64 = (0..p).map(|l| cov[l * p + l]).sum();
    if trace <= 0.0 {
        let mut id = vec![0.0; p * p];
        (0..p).for_each(|l| id[l * p + l] = 1.0);
        return Ok(id);
    }
    let floor = 1e-8 * trace / p as f64;
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(p, p, cov));
    let d = eig.eigenvalues.map(|l| 1.0 / l.max(floor).sqrt());
    let v = &eig.eigenvectors;
    let m = v * DMatrix::from_diagonal(&d) * v.transpose();
    let mut out = vec![0.0; p * p];
    for l in 0..p {
        for k in 0..p {
            out[l * p + k] = 0.5 * (m[(l, k)] + m[(k, l)]);
        }
    }
    Ok(out)
}

/// Whitening matrices `Q_k^{-1/2}` for every bin.
pub fn whitening(moments: &BinMoments) -> Result<Vec<Vec<f64>>> {
    moments.bins.iter().map(|m| inv_sqrt(&m.scatter, moments.p)).collect()
}

/// Replace each observation by `Q^{-1/2} (y - c)` for the moments of its bin.
pub fn normalize_dataset(dataset: &Dataset, grid: &BinGrid, moments: &BinMoments) -> Result<NormalizedDataset> {
    if moments.bins.len() != grid.n_bins() {
        return Err(Error::InvalidParameter(format!(
            "{} moments for {} bins",
            moments.bins.len(),
            grid.n_bins()
        )));
    }
    let white = whitening(moments)?;
    let p = dataset.p;
    let curves = dataset
        .curves
        .iter()
        .map(|c| {
            let mut values = Vec::with_capacity(c.values.len());
            for (k, &t) in c.times.iter().enumerate() {
                let b = grid.assign(t);
                let m = &white[b];
                let centre = &moments.bins[b].center;
                let y = c.y(k);
                for l in 0..p {
                    values.push((0..p).map(|s| m[l * p + s] * (y[s] - centre[s])).sum());
                }
            }
            MultiCurve::new(c.id.clone(), p, c.times.clone(), values)
        })
        .collect();
    Ok(Dataset::new(p, curves))
}

/// Rotate each bin of a whitened dataset into a frame built by Gram-Schmidt
/// from its observations, taken in dataset order.
///
/// Whitening fixes each bin only up to an orthogonal map, and that map differs
/// between bins after an affine change of the data. The frame moves with the
/// data, so the oriented values are unchanged by such maps and the pooled
/// cloud is well defined.
pub fn orient_dataset(normalized: &NormalizedDataset, grid: &BinGrid) -> Dataset {
    let p = normalized.p;
    if p == 1 {
        return normalized.clone();
    }
    let mut frames: Vec<Vec<Vec<f64>>> = vec![Vec::new(); grid.n_bins()];
    for c in &normalized.curves {
        for k in 0..c.len() {
            let frame = &mut frames[grid.assign(c.times[k])];
            if frame.len() < p {
                if let Some(e) = orthonormalize(c.y(k).to_vec(), frame) {
                    frame.push(e);
                }
            }
        }
    }
    for frame in frames.iter_mut() {
        while frame.len() < p {
            let e = complement_direction(frame, p).expect("basis is incomplete");
            frame.push(e);
        }
    }
    let curves = normalized
        .curves
        .iter()
        .map(|c| {
            c.map_values(|t, y| {
                let frame = &frames[grid.assign(t)];
                let z = y.to_vec();
                for (l, e) in frame.iter().enumerate() {
                    y[l] = e.iter().zip(&z).map(|(a, b)| a * b).sum();
                }
            })
        })
        .collect();
    Dataset::new(p, curves)
}

impl GlobalPool {
    pub fn from_dataset(normalized: &NormalizedDataset) -> Self {
        Self {
            p: normalized.p,
            points: normalized.curves.iter().flat_map(|c| c.values.iter().copied()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.p
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Default subsample size: the whole pool below 1000 points, else 1000.
    pub fn default_size(&self) -> usize {
        self.len().min(DEFAULT_POOL_CAP)
    }

    /// Uniform sample without replacement; `None` uses [`GlobalPool::default_size`].
    pub fn subsample(&self, n_s: Option<usize>, seed: u64) -> Result<GlobalPool> {
        let size = n_s.unwrap_or_else(|| self.default_size());
        let n = self.len();
        if size > n {
            return Err(Error::InvalidParameter(format!("subsample of {size} from a pool of {n}")));
        }
        if size == n {
            return Ok(self.clone());
        }
        let mut rng = seed::rng(seed);
        let mut picked = index::sample(&mut rng, n, size).into_vec();
        picked.sort_unstable();
        let p = self.p;
        let points = picked
            .iter()
            .flat_map(|&i| self.points[i * p..(i + 1) * p].iter().copied())
            .collect();
        Ok(GlobalPool { p, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::BinCount;

    fn matmul(a: &[f64], b: &[f64], p: usize) -> Vec<f64> {
        let mut out = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                out[i * p + j] = (0..p).map(|k| a[i * p + k] * b[k * p + j]).sum();
            }
        }
        out
    }

    #[test]
    fn two_point_moments() {
        let pts: Vec<&[f64]> = vec![&[0.0, 0.0], &[2.0, 2.0]];
        let m = plain_moment(&pts, 2);
        assert_eq!(m.center, vec![1.0, 1.0]);
        assert_eq!(m.scatter, vec![1.0, 1.0, 1.0, 1.0]);
        let r = robust_moment(&pts, 2);
        assert_eq!(r.center, vec![1.0, 1.0]);
    }

    #[test]
    fn constant_bin_has_zero_scatter_and_identity_whitening() {
        let pts: Vec<&[f64]> = vec![&[3.0, 1.0]; 4];
        let m = plain_moment(&pts, 2);
        assert_eq!(m.scatter, vec![0.0; 4]);
        assert_eq!(inv_sqrt(&m.scatter, 2).unwrap(), vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn inv_sqrt_examples() {
        assert_eq!(inv_sqrt(&[1.0, 0.0, 0.0, 1.0], 2).unwrap(), vec![1.0, 0.0, 0.0, 1.0]);
        let m = inv_sqrt(&[4.0, 0.0, 0.0, 9.0], 2).unwrap();
        assert!((m[0] - 0.5).abs() < 1e-14 && (m[3] - 1.0 / 3.0).abs() < 1e-14);
        assert!(m[1].abs() < 1e-14);
        assert!(matches!(inv_sqrt(&[1.0, 0.5, 0.0, 1.0], 2), Err(Error::NotSymmetric(_))));
        // singular matrix gets floored rather than producing infinities
        let s = inv_sqrt(&[1.0, 1.0, 1.0, 1.0], 2).unwrap();
        assert!(s.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn inv_sqrt_whitens_spd() {
        let a = [2.0, 0.3, -0.1, 0.3, 1.5, 0.2, -0.1, 0.2, 0.7];
        let m = inv_sqrt(&a, 3).unwrap();
        let r = matmul(&matmul(&m, &a, 3), &m, 3);
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((r[i * 3 + j] - target).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mad_and_median() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!((mad(&[1.0, 2.0, 3.0, 4.0, 100.0]) - MAD_SCALE).abs() < 1e-12);
    }

    #[test]
    fn subsample_rules() {
        let pool = GlobalPool {
            p: 2,
            points: (0..1600).map(f64::from).collect(),
        };
        assert_eq!(pool.subsample(None, 1).unwrap().len(), 800);
        let big = GlobalPool {
            p: 1,
            points: (0..10_000).map(f64::from).collect(),
        };
        let a = big.subsample(None, 5).unwrap();
        assert_eq!(a.len(), 1000);
        assert_eq!(a, big.subsample(None, 5).unwrap());
        assert_ne!(a, big.subsample(None, 6).unwrap());
        assert!(big.subsample(Some(20_000), 1).is_err());
    }

    #[test]
    fn bin_undersize_is_an_error() {
        let ds = Dataset::new(1, vec![MultiCurve::new("a", 1, vec![0.0, 1.0], vec![0.0, 1.0])]);
        let grid = BinGrid::build(&ds, BinCount::Fixed(2)).unwrap();
        assert!(matches!(bin_moments(&ds, &grid), Err(Error::BinTooSmall { .. })));
    }

    #[test]
    fn orientation_undoes_rotations() {
        let pts = [[1.0, 2.0], [-0.5, 0.3], [2.0, -1.0]];
        let make = |theta: f64, flip: f64| {
            let (c, s) = (theta.cos(), theta.sin());
            let curves = pts
                .iter()
                .enumerate()
                .map(|(i, y)| MultiCurve::new(i.to_string(), 2, vec![0.0], vec![c * y[0] - s * y[1], flip * (s * y[0] + c * y[1])]))
                .collect();
            Dataset::new(2, curves)
        };
        let base = make(0.0, 1.0);
        let grid = BinGrid::from_boundaries(vec![0.0, 1.0], &base).unwrap();
        let want = orient_dataset(&base, &grid);
        // first point lands on the positive first axis
        assert!(want.curves[0].value(0, 1).abs() < 1e-12 && want.curves[0].value(0, 0) > 0.0);
        for (theta, flip) in [(0.7, 1.0), (2.5, -1.0)] {
            let got = orient_dataset(&make(theta, flip), &grid);
            for (a, b) in got.curves.iter().zip(&want.curves) {
                assert!(a.values.iter().zip(&b.values).all(|(x, y)| (x - y).abs() < 1e-12));
            }
        }
    }
}
