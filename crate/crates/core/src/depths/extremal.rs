//! Depth-cdf ordering for extremal depths.
//!
//! `Ψ_X(r)` is the weighted share of the curve's observed time with
//! pointwise depth at most `r`. A curve is more extreme than another when,
//! at the first level where their cdfs differ, its cdf is larger.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::pointwise::{PointDepth, PointwiseDepths};

/// Cdf values are compared on a grid of this resolution.
pub const CDF_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthCdf {
    /// Distinct depth levels in increasing order.
    pub levels: Vec<f64>,
    /// `Ψ(levels[i])`; the last entry is exactly 1.
    pub cumulative: Vec<f64>,
    #[serde(skip)]
    quantized: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremity {
    MoreExtreme,
    Equivalent,
    LessExtreme,
}

fn quantize(v: f64) -> i64 {
    (v / CDF_TOLERANCE).round() as i64
}

impl DepthCdf {
    /// Step function with a jump of `mass` at each `depth`. Masses are
    /// normalized; if they sum to zero every observation gets equal mass.
    pub fn from_masses(pairs: &[(f64, f64)]) -> Self {
        assert!(!pairs.is_empty(), "depth cdf needs at least one observation");
        let mut v: Vec<(f64, f64)> = pairs.to_vec();
        let total: f64 = v.iter().map(|x| x.1).sum();
        if total <= 0.0 || !total.is_finite() {
            let m = 1.0 / v.len() as f64;
            v.iter_mut().for_each(|x| x.1 = m);
        } else {
            v.iter_mut().for_each(|x| x.1 /= total);
        }
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut levels: Vec<f64> = Vec::new();
        let mut cumulative: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for (d, m) in v {
            acc += m;
            if levels.last() == Some(&d) {
                *cumulative.last_mut().unwrap() = acc;
            } else {
                levels.push(d);
                cumulative.push(acc);
            }
        }
        *cumulative.last_mut().unwrap() = 1.0;
        let quantized = cumulative.iter().map(|&c| quantize(c)).collect();
        Self {
            levels,
            cumulative,
            quantized,
        }
    }

    /// `Ψ(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        let i = self.levels.partition_point(|&l| l <= r);
        if i == 0 {
            0.0
        } else {
            self.cumulative[i - 1]
        }
    }

    fn eval_q(&self, r: f64) -> i64 {
        let i = self.levels.partition_point(|&l| l <= r);
        if i == 0 {
            0
        } else {
            self.quantized[i - 1]
        }
    }
}

/// Cdf of one curve: each observation carries its bin weight split evenly
/// among the curve's observations in that bin.
pub fn depth_cdf(obs: &[PointDepth], weights: &[f64]) -> DepthCdf {
    let mut per_bin = std::collections::HashMap::new();
    for d in obs {
        *per_bin.entry(d.bin).or_insert(0usize) += 1;
    }
    let pairs: Vec<(f64, f64)> = obs
        .iter()
        .map(|d| (d.depth, weights[d.bin] / per_bin[&d.bin] as f64))
        .collect();
    DepthCdf::from_masses(&pairs)
}

/// Ordering with the most extreme cdf first.
fn order(a: &DepthCdf, b: &DepthCdf) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        let r = match (a.levels.get(i), b.levels.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => return Ordering::Equal,
        };
        if r >= 1.0 {
            return Ordering::Equal;
        }
        match a.eval_q(r).cmp(&b.eval_q(r)) {
            Ordering::Equal => {}
            // larger cdf means more extreme, which sorts first
            o => return o.reverse(),
        }
        while a.levels.get(i).is_some_and(|&x| x <= r) {
            i += 1;
        }
        while b.levels.get(j).is_some_and(|&y| y <= r) {
            j += 1;
        }
    }
}

pub fn extremal_compare(a: &DepthCdf, b: &DepthCdf) -> Extremity {
    match order(a, b) {
        Ordering::Less => Extremity::MoreExtreme,
        Ordering::Equal => Extremity::Equivalent,
        Ordering::Greater => Extremity::LessExtreme,
    }
}

/// Extremal depth of each cdf: the fraction of curves it is at least as
/// central as, itself included.
pub fn extremal_from_cdfs(cdfs: &[DepthCdf]) -> Vec<f64> {
    let n = cdfs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| order(&cdfs[a], &cdfs[b]));
    let mut depths = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && order(&cdfs[idx[start]], &cdfs[idx[end]]) == Ordering::Equal {
            end += 1;
        }
        for &k in &idx[start..end] {
            depths[k] = end as f64 / n as f64;
        }
        start = end;
    }
    depths
}

pub fn extremal_depths(pw: &PointwiseDepths, weights: &[f64]) -> Vec<f64> {
    let cdfs: Vec<DepthCdf> = pw.curves.iter().map(|c| depth_cdf(c, weights)).collect();
    extremal_from_cdfs(&cdfs)
}
