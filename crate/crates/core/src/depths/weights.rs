use crate::binning::BinGrid;
use crate::error::Result;
use crate::halfspace::{region_volume_from_depths, PointCloud};
use crate::model::Dataset;

use super::pointwise::PointwiseDepths;

/// Trimming level of the depth regions behind the region-volume weights.
pub const DEFAULT_BETA: f64 = 0.25;

fn normalized(mut w: Vec<f64>) -> Option<Vec<f64>> {
    let s: f64 = w.iter().sum();
    if s > 0.0 && s.is_finite() {
        w.iter_mut().for_each(|x| *x /= s);
        Some(w)
    } else {
        None
    }
}

/// Time-density weights: `w_k ∝ g_{N,k} * (b_{k+1} - b_k)`.
pub fn weights_time(grid: &BinGrid) -> Vec<f64> {
    let td = grid.time_density();
    let raw = td.density.iter().zip(&td.lengths).map(|(g, l)| g * l).collect();
    normalized(raw).unwrap_or_else(|| {
        // every nonempty bin has zero length: fall back to the density alone
        normalized(td.density.clone()).unwrap_or_else(|| vec![1.0 / grid.n_bins() as f64; grid.n_bins()])
    })
}

/// Central-difference spacing `b_{k+1} - b_{k-1}` around each bin's left
/// boundary, with `b_{-1} = b_0`.
pub fn central_spacing(grid: &BinGrid) -> Vec<f64> {
    let b = &grid.boundaries;
    (0..grid.n_bins())
        .map(|k| b[k + 1] - b[k.saturating_sub(1)])
        .collect()
}

/// Region-volume weights: `w_k ∝ vol_k * (b_{k+1} - b_{k-1})`.
///
/// Falls back to [`weights_time`] (with a warning) when every product is zero.
pub fn weights_region(grid: &BinGrid, volumes: &[f64]) -> Vec<f64> {
    let raw = volumes
        .iter()
        .zip(central_spacing(grid))
        .map(|(v, s)| v * s)
        .collect();
    normalized(raw).unwrap_or_else(|| {
        log::warn!("all depth-region volumes vanish; using time-density weights");
        weights_time(grid)
    })
}

/// Region volumes of every bin in local mode, using the local pointwise
/// depths as the sample depths of each bin's cloud. `None` when the
/// dimension has no volume estimator.
pub fn local_region_volumes(
    dataset: &Dataset,
    grid: &BinGrid,
    local: &PointwiseDepths,
    beta: f64,
) -> Result<Option<Vec<f64>>> {
    if dataset.p > 2 {
        return Ok(None);
    }
    let k = grid.n_bins();
    let mut pts = vec![Vec::new(); k];
    let mut deps = vec![Vec::new(); k];
    for (c, pw) in dataset.curves.iter().zip(&local.curves) {
        for (idx, d) in pw.iter().enumerate() {
            pts[d.bin].extend_from_slice(c.y(idx));
            deps[d.bin].push(d.depth);
        }
    }
    let vols = pts
        .into_iter()
        .zip(deps)
        .map(|(p, d)| {
            if d.is_empty() {
                Ok(0.0)
            } else {
                region_volume_from_depths(&PointCloud::new(dataset.p, p), &d, beta)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(vols))
}
