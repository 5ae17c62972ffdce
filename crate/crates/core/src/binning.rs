//! Empirical-quantile bin grids over pooled observation times.
//!
//! Separation points are type-1 (left-continuous inverse) empirical
//! quantiles of the pooled times at levels `j / K`. Bin `k` is
//! `[b_k, b_{k+1}]`; a time equal to an interior boundary belongs to the bin
//! on its left.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Dataset;

/// Number of bins: `Auto` uses `round(mean T_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinCount {
    #[default]
    Auto,
    Fixed(usize),
}

impl BinCount {
    pub fn resolve(self, dataset: &Dataset) -> usize {
        match self {
            BinCount::Fixed(k) => k,
            BinCount::Auto => (dataset.mean_obs().round() as usize).max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinGrid {
    /// `K + 1` nondecreasing separation points.
    pub boundaries: Vec<f64>,
    /// Pooled observation count per bin.
    pub counts: Vec<usize>,
}

/// Result of placing a time on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub bin: usize,
    pub clamped: bool,
}

/// Empirical time density `g_{N,k} = d_k / sum d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDensity {
    pub density: Vec<f64>,
    pub lengths: Vec<f64>,
}

impl BinGrid {
    /// Quantile grid with `n_bins` bins over the pooled times of `dataset`.
    pub fn build(dataset: &Dataset, n_bins: BinCount) -> Result<Self> {
        let times = dataset.sorted_times();
        let k = n_bins.resolve(dataset);
        if k == 0 {
            return Err(Error::InvalidParameter("n_bins must be positive".into()));
        }
        if times.len() < k {
            return Err(Error::TooManyBins {
                requested: k,
                available: times.len(),
            });
        }
        let (lo, hi) = (times[0], times[times.len() - 1]);
        if hi <= lo {
            return Err(Error::ZeroSpan);
        }
        let n = times.len();
        let mut boundaries = Vec::with_capacity(k + 1);
        boundaries.push(lo);
        for j in 1..k {
            // smallest x with F_N(x) >= j / k
            let idx = (j * n).div_ceil(k) - 1;
            boundaries.push(times[idx]);
        }
        boundaries.push(hi);
        let mut grid = BinGrid {
            boundaries,
            counts: vec![0; k],
        };
        for &t in &times {
            let b = grid.locate(t).bin;
            grid.counts[b] += 1;
        }
        Ok(grid)
    }

    /// Grid from explicit boundaries, counting the observations of `dataset`.
    pub fn from_boundaries(boundaries: Vec<f64>, dataset: &Dataset) -> Result<Self> {
        if boundaries.len() < 2 || boundaries.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "boundaries must contain at least two nondecreasing values".into(),
            ));
        }
        let k = boundaries.len() - 1;
        let mut grid = BinGrid {
            boundaries,
            counts: vec![0; k],
        };
        for c in &dataset.curves {
            for &t in &c.times {
                let b = grid.locate(t).bin;
                grid.counts[b] += 1;
            }
        }
        Ok(grid)
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.boundaries[0], self.boundaries[self.n_bins()])
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Bin index of `t`, clamping times outside the span to the end bins.
    pub fn locate(&self, t: f64) -> Placement {
        let k = self.n_bins();
        let (lo, hi) = self.span();
        let clamped = t < lo || t > hi;
        let bin = self.boundaries[1..].partition_point(|&b| b < t).min(k - 1);
        Placement { bin, clamped }
    }

    /// As [`BinGrid::locate`], logging a warning when `t` is clamped.
    pub fn assign(&self, t: f64) -> usize {
        let pl = self.locate(t);
        if pl.clamped {
            let (lo, hi) = self.span();
            log::warn!("time {t} outside grid span [{lo}, {hi}], clamped to bin {}", pl.bin);
        }
        pl.bin
    }

    /// Bin index of every observation, per curve.
    pub fn assign_dataset(&self, dataset: &Dataset) -> Vec<Vec<usize>> {
        dataset
            .curves
            .iter()
            .map(|c| c.times.iter().map(|&t| self.assign(t)).collect())
            .collect()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Fraction of bins without any observation (diagnostic for disjoint designs).
    pub fn empty_fraction(&self) -> f64 {
        self.counts.iter().filter(|&&c| c == 0).count() as f64 / self.n_bins() as f64
    }

    pub fn time_density(&self) -> TimeDensity {
        let total = self.total() as f64;
        let density = self
            .counts
            .iter()
            .map(|&d| if total > 0.0 { d as f64 / total } else { 0.0 })
            .collect();
        TimeDensity {
            density,
            lengths: self.lengths(),
        }
    }

    /// Merge undersized bins until every bin holds at least `min_count`
    /// observations.
    ///
    /// The smallest offending bin is merged with whichever neighbour holds
    /// fewer observations (the left one on a tie); this repeats until the
    /// floor holds.
    pub fn merge_sparse(&self, min_count: usize) -> Result<BinGrid> {
        if min_count == 0 {
            return Err(Error::InvalidParameter("min_count must be positive".into()));
        }
        let total = self.total();
        if total < min_count {
            return Err(Error::NotEnoughObservations { total, min_count });
        }
        let mut bounds = self.boundaries.clone();
        let mut counts = self.counts.clone();
        loop {
            let target = counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c < min_count)
                .min_by_key(|(i, &c)| (c, *i))
                .map(|(i, _)| i);
            let Some(i) = target else { break };
            let left = i.checked_sub(1).map(|l| counts[l]);
            let right = counts.get(i + 1).copied();
            let into_left = match (left, right) {
                (Some(l), Some(r)) => l <= r,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if into_left {
                counts[i - 1] += counts[i];
                counts.remove(i);
                bounds.remove(i);
            } else {
                counts[i + 1] += counts[i];
                counts.remove(i);
                bounds.remove(i + 1);
            }
        }
        Ok(BinGrid {
            boundaries: bounds,
            counts,
        })
    }
}

/// Default per-bin floor for local depths: `max(p + 1, 5)`.
pub fn default_min_count(p: usize) -> usize {
    (p + 1).max(5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MultiCurve;

    fn single_curve(times: Vec<f64>) -> Dataset {
        let n = times.len();
        Dataset::new(1, vec![MultiCurve::new("a", 1, times, vec![0.0; n])])
    }

    fn grid_from_counts(counts: Vec<usize>) -> BinGrid {
        let k = counts.len();
        BinGrid {
            boundaries: (0..=k).map(|i| i as f64).collect(),
            counts,
        }
    }

    #[test]
    fn uniform_quartiles() {
        // 1..=400 / 400: type-1 quantiles are exact multiples of 0.25
        let ds = single_curve((1..=400).map(|i| i as f64 / 400.0).collect());
        let g = BinGrid::build(&ds, BinCount::Fixed(4)).unwrap();
        assert_eq!(g.boundaries, vec![0.0025, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.counts, vec![100, 100, 100, 100]);
    }

    #[test]
    fn quantiles_follow_mass() {
        let mut t: Vec<f64> = (0..100).map(|i| i as f64 * 0.005).collect();
        t.push(1.0);
        let ds = single_curve(t);
        let g = BinGrid::build(&ds, BinCount::Fixed(2)).unwrap();
        assert!(g.boundaries[1] <= 0.5);
    }

    #[test]
    fn auto_bins_use_mean_count() {
        let curves = (0..200)
            .map(|i| MultiCurve::new(i.to_string(), 1, (0..50).map(|k| k as f64 / 49.0).collect(), vec![0.0; 50]))
            .collect();
        let ds = Dataset::new(1, curves);
        let g = BinGrid::build(&ds, BinCount::Auto).unwrap();
        assert_eq!(g.n_bins(), 50);
        assert_eq!(g.total(), 10_000);
    }

    #[test]
    fn zero_span_and_too_many_bins() {
        let ds = single_curve(vec![0.3]);
        assert_eq!(BinGrid::build(&ds, BinCount::Fixed(1)), Err(Error::ZeroSpan));
        let ds = single_curve(vec![0.1, 0.2]);
        assert!(matches!(BinGrid::build(&ds, BinCount::Fixed(3)), Err(Error::TooManyBins { .. })));
    }

    #[test]
    fn assignment_ties_go_left() {
        let g = grid_from_counts(vec![1, 1, 1]);
        assert_eq!(g.assign(1.0), 0);
        assert_eq!(g.assign(2.0), 1);
        assert_eq!(g.assign(3.0), 2);
        assert_eq!(g.assign(0.0), 0);
        assert_eq!(g.assign(1.5), 1);
        let pl = g.locate(3.0001);
        assert!(pl.clamped);
        assert_eq!(pl.bin, 2);
        assert!(g.locate(-0.1).clamped);
        assert!(!g.locate(3.0).clamped);
    }

    #[test]
    fn density() {
        let g = grid_from_counts(vec![10, 30, 60]);
        assert_eq!(g.time_density().density, vec![0.1, 0.3, 0.6]);
        let g = grid_from_counts(vec![4; 5]);
        assert!(g.time_density().density.iter().all(|&x| (x - 0.2).abs() < 1e-15));
        let g = grid_from_counts(vec![4, 0, 4]);
        assert_eq!(g.time_density().density[1], 0.0);
        assert!((g.empty_fraction() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn merge_examples() {
        let g = grid_from_counts(vec![1, 9]).merge_sparse(3).unwrap();
        assert_eq!(g.counts, vec![10]);
        assert_eq!(g.boundaries, vec![0.0, 2.0]);

        let g0 = grid_from_counts(vec![5, 6, 7]);
        assert_eq!(g0.merge_sparse(5).unwrap(), g0);

        let g = grid_from_counts(vec![2, 2, 2]).merge_sparse(5).unwrap();
        assert!(3 - g.n_bins() <= 2);
        assert_eq!(g.total(), 6);
        assert!(g.counts.iter().all(|&c| c >= 5));

        assert!(grid_from_counts(vec![1, 1]).merge_sparse(3).is_err());
    }
}
