//! Outlier pipeline and simplified sparse functional boxplots.
//!
//! Domain outliers are found from the curves' time-interval lengths,
//! potential outliers from the bottom decile of GMFID and GMFED, and
//! functional outliers from 1.5-range fences around the 50% central region
//! of the remaining curves. All envelopes are binwise over raw
//! observations, so nothing is interpolated.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::binning::BinGrid;
use crate::depths::{DepthConfig, DepthEngine, DepthReport, Method};
use crate::error::{Error, Result};
use crate::model::Dataset;

/// Tukey's five-number summary (the hinges used by R's boxplot).
pub fn fivenum(values: &[f64]) -> [f64; 5] {
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    assert!(n > 0, "fivenum of an empty sample");
    let n4 = ((n + 3) / 2) as f64 / 2.0;
    let d = [1.0, n4, (n as f64 + 1.0) / 2.0, n as f64 + 1.0 - n4, n as f64];
    d.map(|p| 0.5 * (x[p.floor() as usize - 1] + x[p.ceil() as usize - 1]))
}

/// Indices outside `[h1 - coef * IQR, h3 + coef * IQR]`.
pub fn boxplot_outliers(values: &[f64], coef: f64) -> Vec<usize> {
    if values.is_empty() {
        return Vec::new();
    }
    let f = fivenum(values);
    let iqr = f[3] - f[1];
    let (lo, hi) = (f[1] - coef * iqr, f[3] + coef * iqr);
    (0..values.len()).filter(|&i| values[i] < lo || values[i] > hi).collect()
}

/// Curves whose interval length `I_i`, or `log I_i`, is a boxplot outlier.
/// Curves with `I_i = 0` are always flagged.
pub fn domain_outliers(dataset: &Dataset) -> Vec<usize> {
    let d = dataset.durations();
    let mut out: BTreeSet<usize> = boxplot_outliers(&d.lengths, 1.5).into_iter().collect();
    let (idx, logs): (Vec<usize>, Vec<f64>) = d
        .log_lengths
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|v| (i, v)))
        .unzip();
    out.extend(boxplot_outliers(&logs, 1.5).into_iter().map(|k| idx[k]));
    out.extend(d.log_lengths.iter().enumerate().filter(|(_, l)| l.is_none()).map(|(i, _)| i));
    out.into_iter().collect()
}

/// The `⌊N/10⌋` shallowest curves of a report.
pub fn bottom_decile(report: &DepthReport) -> BTreeSet<usize> {
    report.shallowest_first().into_iter().take(report.n() / 10).collect()
}

/// `(O_p1, O_p2)`: the intersection of the two bottom deciles and the rest
/// of their union.
pub fn potential_outliers(gmfid: &DepthReport, gmfed: &DepthReport) -> (Vec<usize>, Vec<usize>) {
    let (bi, be) = (bottom_decile(gmfid), bottom_decile(gmfed));
    let p1: Vec<usize> = bi.intersection(&be).copied().collect();
    let p2: Vec<usize> = bi.symmetric_difference(&be).copied().collect();
    (p1, p2)
}

/// Binwise envelope per component: `lower[j][k]`, `upper[j][k]`; `NaN`
/// where none of the member curves is observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
}

impl Envelope {
    pub fn range(&self) -> Vec<Vec<f64>> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l.iter().zip(u).map(|(a, b)| b - a).collect())
            .collect()
    }
}

/// Envelope of the raw observations of `members` on `grid`.
pub fn observation_envelope(dataset: &Dataset, members: &[usize], grid: &BinGrid) -> Envelope {
    let (p, k) = (dataset.p, grid.n_bins());
    let mut lower = vec![vec![f64::INFINITY; k]; p];
    let mut upper = vec![vec![f64::NEG_INFINITY; k]; p];
    for &i in members {
        let c = &dataset.curves[i];
        for (idx, &t) in c.times.iter().enumerate() {
            let b = grid.locate(t).bin;
            for j in 0..p {
                let v = c.value(idx, j);
                lower[j][b] = lower[j][b].min(v);
                upper[j][b] = upper[j][b].max(v);
            }
        }
    }
    for j in 0..p {
        for b in 0..k {
            if lower[j][b] > upper[j][b] {
                lower[j][b] = f64::NAN;
                upper[j][b] = f64::NAN;
            }
        }
    }
    Envelope { lower, upper }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralRegion {
    pub bounds: Envelope,
    /// `R_0.5` per component and bin.
    pub range: Vec<Vec<f64>>,
    /// Index (into the dataset the region was built on) of the deepest curve.
    pub median: usize,
    /// Curves whose observations span the region.
    pub members: Vec<usize>,
}

/// Region spanned by the `⌈N/2⌉` deepest curves of `report`.
pub fn central_region(dataset: &Dataset, report: &DepthReport, grid: &BinGrid) -> CentralRegion {
    let members = crate::metrics::central_members(report);
    let bounds = observation_envelope(dataset, &members, grid);
    let range = bounds.range();
    CentralRegion {
        bounds,
        range,
        median: report.median(),
        members,
    }
}

/// Curves with an observation above `ub + coef * R` or below
/// `lb - coef * R` in its own bin.
pub fn functional_outliers(dataset: &Dataset, candidates: &[usize], region: &CentralRegion, grid: &BinGrid, coef: f64) -> Vec<usize> {
    let p = dataset.p;
    candidates
        .iter()
        .copied()
        .filter(|&i| {
            let c = &dataset.curves[i];
            c.times.iter().enumerate().any(|(idx, &t)| {
                let b = grid.locate(t).bin;
                (0..p).any(|j| {
                    let (lb, ub, r) = (region.bounds.lower[j][b], region.bounds.upper[j][b], region.range[j][b]);
                    if lb.is_nan() {
                        return false;
                    }
                    let v = c.value(idx, j);
                    v > ub + coef * r || v < lb - coef * r
                })
            })
        })
        .collect()
}

/// Three-point centred moving average that skips missing values.
pub fn smooth3(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            if x[i].is_nan() {
                return f64::NAN;
            }
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(x.len() - 1);
            let vals: Vec<f64> = x[lo..=hi].iter().copied().filter(|v| !v.is_nan()).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseBoxplotData {
    /// `T_l` equidistant separation points.
    pub local_edges: Vec<f64>,
    /// Observed proportion per local bin, clipped at 1.
    pub local_proportion: Vec<f64>,
    /// Proportion assigned to each region bin (via the bin midpoint).
    pub proportion: Vec<f64>,
    /// `lb + p * R` per component and region bin, before smoothing.
    pub proportion_line_raw: Vec<Vec<f64>>,
    /// Smoothed and kept inside the region.
    pub proportion_line: Vec<Vec<f64>>,
    pub half_line: Vec<Vec<f64>>,
}

/// Observed proportions on `n_local` equidistant local bins and the
/// proportion lines inside `region`.
pub fn sparse_boxplot(dataset: &Dataset, members: &[usize], region: &CentralRegion, grid: &BinGrid, n_local: usize) -> Result<SparseBoxplotData> {
    if n_local == 0 {
        return Err(Error::InvalidParameter("sparse boxplot needs at least one local bin".into()));
    }
    let (lo, hi) = grid.span();
    let width = (hi - lo) / n_local as f64;
    let local_edges: Vec<f64> = (0..=n_local).map(|w| lo + w as f64 * width).collect();
    let local_of = |t: f64| -> usize {
        if width > 0.0 {
            (((t - lo) / width).floor().max(0.0) as usize).min(n_local - 1)
        } else {
            0
        }
    };
    let mut counts = vec![0usize; n_local];
    for &i in members {
        for &t in &dataset.curves[i].times {
            counts[local_of(t)] += 1;
        }
    }
    let n = members.len().max(1) as f64;
    let local_proportion: Vec<f64> = counts.iter().map(|&c| (c as f64 / n).min(1.0)).collect();
    let proportion: Vec<f64> = grid.midpoints().iter().map(|&t| local_proportion[local_of(t)]).collect();
    let p = dataset.p;
    let line_at = |frac: &dyn Fn(usize) -> f64| -> Vec<Vec<f64>> {
        (0..p)
            .map(|j| {
                (0..grid.n_bins())
                    .map(|k| region.bounds.lower[j][k] + frac(k) * region.range[j][k])
                    .collect()
            })
            .collect()
    };
    let clamp_inside = |lines: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        lines
            .into_iter()
            .enumerate()
            .map(|(j, l)| {
                smooth3(&l)
                    .into_iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let (a, b) = (region.bounds.lower[j][k], region.bounds.upper[j][k]);
                        if v.is_nan() {
                            v
                        } else {
                            v.clamp(a, b)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let raw = line_at(&|k| proportion[k]);
    let half = line_at(&|_| 0.5);
    Ok(SparseBoxplotData {
        local_edges,
        local_proportion,
        proportion,
        proportion_line: clamp_inside(raw.clone()),
        proportion_line_raw: raw,
        half_line: clamp_inside(half),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensitySurface {
    pub component: usize,
    pub t_grid: Vec<f64>,
    pub y_grid: Vec<f64>,
    /// `λ̄_o`, row-major over `(y, t)`; `NaN` outside the region.
    pub observed: Vec<f64>,
    /// `1 - λ̄_o`.
    pub sparseness: Vec<f64>,
    pub bandwidth: [f64; 2],
    pub n_points: usize,
}

fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let (i, f) = (h.floor() as usize, h - h.floor());
    if i + 1 < sorted.len() {
        sorted[i] + f * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Silverman's rule `0.9 min(sd, IQR / 1.34) n^{-1/5}`, with fallbacks for
/// degenerate samples.
pub fn silverman(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let iqr = (quantile(&s, 0.75) - quantile(&s, 0.25)) / 1.34;
    let spread = match (sd > 0.0, iqr > 0.0) {
        (true, true) => sd.min(iqr),
        (true, false) => sd,
        (false, true) => iqr,
        (false, false) => 0.1 * (mean.abs() + 1.0),
    };
    0.9 * spread * n.powf(-0.2)
}

/// Kernel mass of a Gaussian at `(t, y)` that falls inside the region of component `j`.
fn region_mass(region: &CentralRegion, grid: &BinGrid, j: usize, t: f64, y: f64, h: [f64; 2]) -> f64 {
    let b = &grid.boundaries;
    (0..grid.n_bins())
        .filter(|&k| !region.bounds.lower[j][k].is_nan())
        .map(|k| {
            let mt = phi((b[k + 1] - t) / h[0]) - phi((b[k] - t) / h[0]);
            let my = phi((region.bounds.upper[j][k] - y) / h[1]) - phi((region.bounds.lower[j][k] - y) / h[1]);
            mt * my
        })
        .sum()
}

/// Edge-corrected Gaussian intensity of the observations of `members`
/// inside the region, on an `nt x ny` raster; one surface per component.
pub fn intensity_boxplot(
    dataset: &Dataset,
    members: &[usize],
    region: &CentralRegion,
    grid: &BinGrid,
    raster: (usize, usize),
    bandwidth: Option<[f64; 2]>,
) -> Result<Vec<IntensitySurface>> {
    let (nt, ny) = raster;
    if nt < 2 || ny < 2 {
        return Err(Error::InvalidParameter("intensity raster needs at least 2 x 2 cells".into()));
    }
    (0..dataset.p)
        .into_par_iter()
        .map(|j| {
            let inside = |b: usize, v: f64| {
                let (lb, ub) = (region.bounds.lower[j][b], region.bounds.upper[j][b]);
                !lb.is_nan() && v >= lb && v <= ub
            };
            let mut pts: Vec<[f64; 2]> = Vec::new();
            for &i in members {
                let c = &dataset.curves[i];
                for (idx, &t) in c.times.iter().enumerate() {
                    let v = c.value(idx, j);
                    if inside(grid.locate(t).bin, v) {
                        pts.push([t, v]);
                    }
                }
            }
            if pts.is_empty() {
                return Err(Error::EmptyRegion);
            }
            let h = bandwidth.unwrap_or_else(|| {
                let ts: Vec<f64> = pts.iter().map(|p| p[0]).collect();
                let ys: Vec<f64> = pts.iter().map(|p| p[1]).collect();
                [silverman(&ts), silverman(&ys)]
            });
            let raw = |t: f64, y: f64| -> f64 {
                let s: f64 = pts
                    .iter()
                    .map(|p| {
                        let (u, v) = ((p[0] - t) / h[0], (p[1] - y) / h[1]);
                        (-0.5 * (u * u + v * v)).exp()
                    })
                    .sum::<f64>()
                    / (2.0 * std::f64::consts::PI * h[0] * h[1]);
                let mass = region_mass(region, grid, j, t, y, h);
                let e = if mass > 1e-12 { 1.0 / mass } else { 1.0 };
                e * s
            };
            let norm = pts.iter().map(|p| raw(p[0], p[1])).fold(0.0, f64::max);
            let (t0, t1) = grid.span();
            let y0 = region.bounds.lower[j].iter().copied().filter(|v| !v.is_nan()).fold(f64::INFINITY, f64::min);
            let y1 = region.bounds.upper[j].iter().copied().filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max);
            let t_grid: Vec<f64> = (0..nt).map(|a| t0 + (t1 - t0) * a as f64 / (nt - 1) as f64).collect();
            let y_grid: Vec<f64> = (0..ny).map(|a| y0 + (y1 - y0) * a as f64 / (ny - 1) as f64).collect();
            let mut observed = Vec::with_capacity(nt * ny);
            for &y in &y_grid {
                for &t in &t_grid {
                    let b = grid.locate(t).bin;
                    observed.push(if inside(b, y) && norm > 0.0 {
                        (raw(t, y) / norm).clamp(0.0, 1.0)
                    } else {
                        f64::NAN
                    });
                }
            }
            let sparseness = observed.iter().map(|v| 1.0 - v).collect();
            Ok(IntensitySurface {
                component: j,
                t_grid,
                y_grid,
                observed,
                sparseness,
                bandwidth: h,
                n_points: pts.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoxplotConfig {
    pub depth: DepthConfig,
    /// Method ranking the remaining curves for the central region.
    pub method: Method,
    /// Remove potential outliers (bottom deciles of GMFID and GMFED) first.
    pub potential: bool,
    pub fence: f64,
    /// Local bins of the proportion line; `None` uses the grid's bin count.
    pub local_bins: Option<usize>,
    pub raster: (usize, usize),
    pub bandwidth: Option<[f64; 2]>,
    pub intensity: bool,
}

impl Default for BoxplotConfig {
    fn default() -> Self {
        Self {
            depth: DepthConfig::default(),
            method: Method::GmfidWt,
            potential: true,
            fence: 1.5,
            local_bins: None,
            raster: (100, 100),
            bandwidth: None,
            intensity: true,
        }
    }
}

/// Outlier sets as indices into the input dataset.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutlierSets {
    pub domain: Vec<usize>,
    pub potential_1: Vec<usize>,
    pub potential_2: Vec<usize>,
    pub functional: Vec<usize>,
}

impl OutlierSets {
    pub fn all(&self) -> BTreeSet<usize> {
        self.domain
            .iter()
            .chain(&self.potential_1)
            .chain(&self.potential_2)
            .chain(&self.functional)
            .copied()
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub ids: Vec<String>,
    pub method: Method,
    pub grid: BinGrid,
    pub outliers: OutlierSets,
    /// Index into the input dataset.
    pub median: usize,
    /// Region with `median` and `members` mapped back to input indices.
    pub region: CentralRegion,
    pub nonoutlying: Envelope,
    pub sparse: SparseBoxplotData,
    pub intensity: Vec<IntensitySurface>,
}

/// Run the three-stage pipeline and build both boxplot data products.
pub fn run_boxplot(dataset: &Dataset, config: &BoxplotConfig) -> Result<BoxplotSummary> {
    let n = dataset.n();
    let all: BTreeSet<usize> = (0..n).collect();
    let domain = domain_outliers(dataset);
    let after_domain: Vec<usize> = dataset.complement(&domain.iter().copied().collect());

    let (mut potential_1, mut potential_2) = (Vec::new(), Vec::new());
    if config.potential {
        let s1 = dataset.select(&after_domain);
        let engine = DepthEngine::new(&s1, config.depth.clone())?;
        let (p1, p2) = potential_outliers(&engine.compute(Method::GmfidWt)?, &engine.compute(Method::Gmfed)?);
        potential_1 = p1.into_iter().map(|i| after_domain[i]).collect();
        potential_2 = p2.into_iter().map(|i| after_domain[i]).collect();
    }
    let removed: BTreeSet<usize> = domain.iter().chain(&potential_1).chain(&potential_2).copied().collect();
    let kept: Vec<usize> = all.difference(&removed).copied().collect();
    if kept.len() < 2 {
        return Err(Error::InvalidDataset(format!("only {} curves remain after outlier removal", kept.len())));
    }
    let s_prime = dataset.select(&kept);
    let engine = DepthEngine::new(&s_prime, config.depth.clone())?;
    let report = engine.compute(config.method)?;
    let grid = engine.grid().clone();
    let local: Vec<usize> = (0..kept.len()).collect();
    let region = central_region(&s_prime, &report, &grid);
    let functional: Vec<usize> = functional_outliers(&s_prime, &local, &region, &grid, config.fence)
        .into_iter()
        .map(|i| kept[i])
        .collect();
    let outliers = OutlierSets {
        domain,
        potential_1,
        potential_2,
        functional,
    };
    let o = outliers.all();
    let clean: Vec<usize> = all.difference(&o).copied().collect();
    let nonoutlying = observation_envelope(dataset, &clean, &grid);
    let n_local = config.local_bins.unwrap_or(grid.n_bins());
    let sparse = sparse_boxplot(&s_prime, &local, &region, &grid, n_local)?;
    let intensity = if config.intensity {
        intensity_boxplot(&s_prime, &local, &region, &grid, config.raster, config.bandwidth)?
    } else {
        Vec::new()
    };
    let region = CentralRegion {
        median: kept[region.median],
        members: region.members.iter().map(|&i| kept[i]).collect(),
        ..region
    };
    Ok(BoxplotSummary {
        ids: dataset.curves.iter().map(|c| c.id.clone()).collect(),
        method: config.method,
        grid,
        outliers,
        median: region.median,
        region,
        nonoutlying,
        sparse,
        intensity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MultiCurve;

    #[test]
    fn fivenum_matches_tukey() {
        assert_eq!(fivenum(&[1.0, 2.0, 3.0, 4.0, 5.0]), [1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(fivenum(&[1.0, 2.0, 3.0, 4.0]), [1.0, 1.5, 2.5, 3.5, 4.0]);
        assert_eq!(fivenum(&[7.0]), [7.0; 5]);
    }

    fn span_curve(id: usize, t0: f64, t1: f64) -> MultiCurve {
        MultiCurve::new(id.to_string(), 1, vec![t0, t1], vec![0.0, 0.0])
    }

    #[test]
    fn domain_rules() {
        let ds = Dataset::new(1, (0..20).map(|i| span_curve(i, 0.0, 10.0)).collect());
        assert!(domain_outliers(&ds).is_empty());
        let mut curves: Vec<MultiCurve> = (0..20).map(|i| span_curve(i, 0.0, 10.0 + (i % 5) as f64 * 0.1)).collect();
        curves.push(span_curve(20, 0.0, 1000.0));
        curves.push(MultiCurve::new("single", 1, vec![3.0], vec![0.0]));
        let out = domain_outliers(&Dataset::new(1, curves));
        assert_eq!(out, vec![20, 21]);
    }

    #[test]
    fn potential_sets() {
        let ids: Vec<String> = (0..20).map(|i| format!("{i:02}")).collect();
        let a = DepthReport::new(Method::GmfidWt, None, ids.clone(), (0..20).map(f64::from).collect(), vec![]);
        let (p1, p2) = potential_outliers(&a, &a);
        assert_eq!(p1, vec![0, 1]);
        assert!(p2.is_empty());
        let b = DepthReport::new(Method::Gmfed, None, ids, (0..20).map(|i| f64::from(20 - i)).collect(), vec![]);
        let (p1, p2) = potential_outliers(&a, &b);
        assert!(p1.is_empty());
        assert_eq!(p2, vec![0, 1, 18, 19]);
    }

    #[test]
    fn smoothing() {
        let s = smooth3(&[0.0, 3.0, 0.0, f64::NAN, 6.0]);
        assert_eq!(s[0], 1.5);
        assert_eq!(s[1], 1.0);
        assert_eq!(s[2], 1.5);
        assert!(s[3].is_nan());
        assert_eq!(s[4], 6.0);
    }

    fn toy() -> (Dataset, BinGrid) {
        // 9 curves on a common grid, values 0..8 shifted per curve
        let times: Vec<f64> = (0..6).map(|k| k as f64).collect();
        let curves = (0..9)
            .map(|i| MultiCurve::new(format!("{i}"), 1, times.clone(), times.iter().map(|t| i as f64 + 0.1 * t).collect()))
            .collect();
        let ds = Dataset::new(1, curves);
        let grid = BinGrid::build(&ds, crate::binning::BinCount::Auto).unwrap();
        (ds, grid)
    }

    #[test]
    fn region_and_fences() {
        let (ds, grid) = toy();
        let depths: Vec<f64> = (0..9).map(|i| 1.0 - (i as f64 - 4.0).abs() / 5.0).collect();
        let ids = ds.curves.iter().map(|c| c.id.clone()).collect();
        let rep = DepthReport::new(Method::GmfidWt, None, ids, depths, vec![]);
        let reg = central_region(&ds, &rep, &grid);
        assert_eq!(reg.median, 4);
        // five deepest: curves 2..=6
        assert_eq!(reg.members.len(), 5);
        for k in 0..grid.n_bins() {
            assert!((reg.range[0][k] - 4.0).abs() < 1e-12);
        }
        let all: Vec<usize> = (0..9).collect();
        assert!(functional_outliers(&ds, &all, &reg, &grid, 1.5).is_empty());
        assert_eq!(functional_outliers(&ds, &all, &reg, &grid, 0.3), vec![0, 8]);

        let sb = sparse_boxplot(&ds, &all, &reg, &grid, 6).unwrap();
        assert!(sb.local_proportion.iter().all(|&p| p == 1.0));
        for k in 1..grid.n_bins() {
            assert!((sb.proportion_line_raw[0][k] - reg.bounds.upper[0][k]).abs() < 1e-12);
        }
    }

    #[test]
    fn intensity_is_normalized() {
        let (ds, grid) = toy();
        let depths: Vec<f64> = (0..9).map(|i| 1.0 - (i as f64 - 4.0).abs() / 5.0).collect();
        let ids = ds.curves.iter().map(|c| c.id.clone()).collect();
        let rep = DepthReport::new(Method::GmfidWt, None, ids, depths, vec![]);
        let reg = central_region(&ds, &rep, &grid);
        let all: Vec<usize> = (0..9).collect();
        let s = intensity_boxplot(&ds, &all, &reg, &grid, (20, 20), None).unwrap();
        assert_eq!(s.len(), 1);
        let v: Vec<f64> = s[0].observed.iter().copied().filter(|x| !x.is_nan()).collect();
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
        assert!(s[0].sparseness.iter().filter(|x| !x.is_nan()).all(|x| (0.0..=1.0).contains(x)));
    }
}
