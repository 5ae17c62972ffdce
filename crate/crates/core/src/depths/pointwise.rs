use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::BinGrid;
use crate::error::{Error, Result};
use crate::halfspace::{Kernel, PointCloud, Reference, SweepScratch};
use crate::model::Dataset;
use crate::normalize::GlobalPool;

/// Local: each observation against its own bin. Global: whitened
/// observations against one pooled cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Local,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointDepth {
    pub t: f64,
    pub bin: usize,
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseDepths {
    pub mode: Mode,
    pub curves: Vec<Vec<PointDepth>>,
}

impl PointwiseDepths {
    pub fn n(&self) -> usize {
        self.curves.len()
    }
}

/// Flat list of `(curve, observation)` addresses.
fn addresses(dataset: &Dataset) -> Vec<(usize, usize)> {
    dataset
        .curves
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..c.len()).map(move |k| (i, k)))
        .collect()
}

fn regroup(dataset: &Dataset, mode: Mode, flat: Vec<PointDepth>) -> PointwiseDepths {
    let mut it = flat.into_iter();
    let curves = dataset
        .curves
        .iter()
        .map(|c| it.by_ref().take(c.len()).collect())
        .collect();
    PointwiseDepths { mode, curves }
}

fn eval<F>(addrs: &[(usize, usize)], parallel: bool, f: F) -> Vec<PointDepth>
where
    F: Fn(usize, usize, &mut SweepScratch) -> PointDepth + Sync,
{
    if parallel {
        addrs
            .par_iter()
            .map_init(SweepScratch::default, |s, &(i, k)| f(i, k, s))
            .collect()
    } else {
        let mut s = SweepScratch::default();
        addrs.iter().map(|&(i, k)| f(i, k, &mut s)).collect()
    }
}

/// Per-bin point clouds (observations assigned to each bin).
pub fn bin_clouds(dataset: &Dataset, grid: &BinGrid) -> Vec<PointCloud> {
    let mut buffers = vec![Vec::new(); grid.n_bins()];
    for c in &dataset.curves {
        for (k, &t) in c.times.iter().enumerate() {
            buffers[grid.assign(t)].extend_from_slice(c.y(k));
        }
    }
    buffers.into_iter().map(|b| PointCloud::new(dataset.p, b)).collect()
}

/// Binwise depths: every observation against the cloud of its own bin.
///
/// Nonempty bins must hold at least `p + 1` observations.
pub fn pointwise_local(dataset: &Dataset, grid: &BinGrid, kernel: Kernel, parallel: bool) -> Result<PointwiseDepths> {
    let p = dataset.p;
    let clouds = bin_clouds(dataset, grid);
    for (b, c) in clouds.iter().enumerate() {
        if !c.is_empty() && c.len() < p + 1 {
            return Err(Error::BinTooSmall {
                bin: b,
                count: c.len(),
                required: p + 1,
            });
        }
    }
    let refs: Vec<Reference> = clouds.iter().map(|c| Reference::new(c, kernel)).collect();
    let bins = grid.assign_dataset(dataset);
    let flat = eval(&addresses(dataset), parallel, |i, k, s| {
        let c = &dataset.curves[i];
        let b = bins[i][k];
        PointDepth {
            t: c.times[k],
            bin: b,
            depth: refs[b].depth_with(c.y(k), s),
        }
    });
    Ok(regroup(dataset, Mode::Local, flat))
}

/// Global depths: each whitened observation against the (sub)sampled pool.
pub fn pointwise_global(
    normalized: &Dataset,
    grid: &BinGrid,
    pool: &GlobalPool,
    kernel: Kernel,
    parallel: bool,
) -> Result<PointwiseDepths> {
    if pool.is_empty() {
        return Err(Error::InvalidParameter("empty reference pool".into()));
    }
    let reference = Reference::new(&PointCloud::new(pool.p, pool.points.clone()), kernel);
    let bins = grid.assign_dataset(normalized);
    let flat = eval(&addresses(normalized), parallel, |i, k, s| {
        let c = &normalized.curves[i];
        PointDepth {
            t: c.times[k],
            bin: bins[i][k],
            depth: reference.depth_with(c.y(k), s),
        }
    });
    Ok(regroup(normalized, Mode::Global, flat))
}
