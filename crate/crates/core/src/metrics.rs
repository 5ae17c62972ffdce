//! Assessment criteria for depth methods and the simulation benchmark.
//!
//! Curves are compared on a probe grid given by the bins of the clean
//! sample's grid; a curve's value at a probe is the mean of its
//! observations in that bin (`NaN` when it has none).

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::BinGrid;
use crate::depths::{DepthConfig, DepthEngine, DepthReport, Method};
use crate::error::Result;
use crate::model::Dataset;
use crate::seed;
use crate::simulate::{
    simulate, ContaminationSpec, ModelId, ModelSpec, OutlierType, Scenario, SparsenessSpec, SparsenessType,
    SparsityLevel,
};

/// Binwise mean values: `values[i][k * p + j]` for curve `i`, bin `k`,
/// component `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Binned {
    pub p: usize,
    pub n_bins: usize,
    pub values: Vec<Vec<f64>>,
}

impl Binned {
    pub fn new(dataset: &Dataset, grid: &BinGrid) -> Self {
        let (p, k) = (dataset.p, grid.n_bins());
        let values = dataset
            .curves
            .iter()
            .map(|c| {
                let mut sum = vec![0.0; k * p];
                let mut cnt = vec![0usize; k];
                for (idx, &t) in c.times.iter().enumerate() {
                    let b = grid.assign(t);
                    cnt[b] += 1;
                    for j in 0..p {
                        sum[b * p + j] += c.value(idx, j);
                    }
                }
                for b in 0..k {
                    for j in 0..p {
                        sum[b * p + j] = if cnt[b] > 0 { sum[b * p + j] / cnt[b] as f64 } else { f64::NAN };
                    }
                }
                sum
            })
            .collect();
        Self { p, n_bins: k, values }
    }

    pub fn curve(&self, i: usize) -> &[f64] {
        &self.values[i]
    }
}

/// Pointwise envelope of a set of curves at each probe and component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Band {
    /// `upper - lower`; `NaN` where no curve is observed.
    pub fn range(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).collect()
    }
}

/// Envelope of the curves in `members`, ignoring missing values.
pub fn envelope(binned: &Binned, members: &[usize]) -> Band {
    let len = binned.n_bins * binned.p;
    let mut lower = vec![f64::INFINITY; len];
    let mut upper = vec![f64::NEG_INFINITY; len];
    for &i in members {
        for (q, &v) in binned.values[i].iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            lower[q] = lower[q].min(v);
            upper[q] = upper[q].max(v);
        }
    }
    for q in 0..len {
        if lower[q] > upper[q] {
            lower[q] = f64::NAN;
            upper[q] = f64::NAN;
        }
    }
    Band { lower, upper }
}

/// The `⌈N/2⌉` deepest curves.
pub fn central_members(report: &DepthReport) -> Vec<usize> {
    let m = report.n().div_ceil(2);
    report.deepest_first().into_iter().take(m).collect()
}

/// 50% central region: envelope of the `⌈N/2⌉` deepest curves.
pub fn central_region(binned: &Binned, report: &DepthReport) -> Band {
    envelope(binned, &central_members(report))
}

/// Mean over valid probes of `((m_c - m) / R)^2`. Probes with a missing
/// value or a nonpositive `R` are skipped.
pub fn ase_median(m_c: &[f64], m: &[f64], r: &[f64]) -> Option<f64> {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for ((a, b), s) in m_c.iter().zip(m).zip(r) {
        if a.is_nan() || b.is_nan() || !(*s > 0.0) {
            skipped += 1;
            continue;
        }
        sum += ((a - b) / s).powi(2);
        used += 1;
    }
    if skipped > 0 {
        log::warn!("ase_median: skipped {skipped} probes without data or with zero spread");
    }
    (used > 0).then(|| sum / used as f64)
}

/// Mean over valid probes of `log(R_c / R)^2`.
pub fn ase_central(r_c: &[f64], r: &[f64]) -> Option<f64> {
    let mut sum = 0.0;
    let mut used = 0usize;
    for (a, b) in r_c.iter().zip(r) {
        if !(*a > 0.0 && *b > 0.0) {
            continue;
        }
        sum += (a / b).ln().powi(2);
        used += 1;
    }
    (used > 0).then(|| sum / used as f64)
}

/// Share of true outliers among the `N - ⌈9N/10⌉` shallowest curves,
/// normalised by `⌊N/10⌋`. `None` without outliers or for `N < 10`.
pub fn outlier_capture(report: &DepthReport, outliers: &[usize]) -> Option<f64> {
    let n = report.n();
    let denom = n / 10;
    if outliers.is_empty() || denom == 0 {
        return None;
    }
    let cut = n - (9 * n).div_ceil(10);
    let bottom: BTreeSet<usize> = report.shallowest_first().into_iter().take(cut).collect();
    let hits = outliers.iter().filter(|i| bottom.contains(i)).count();
    Some(hits as f64 / denom as f64)
}

/// Correlation of two rank vectors restricted to the curves outside
/// `outliers`. `None` when either restricted vector is constant.
pub fn spearman_nonoutliers(clean: &[f64], contaminated: &[f64], outliers: &[usize]) -> Option<f64> {
    let out: BTreeSet<usize> = outliers.iter().copied().collect();
    let keep: Vec<usize> = (0..clean.len()).filter(|i| !out.contains(i)).collect();
    if keep.is_empty() {
        return None;
    }
    let m = keep.len() as f64;
    let ma = keep.iter().map(|&i| clean[i]).sum::<f64>() / m;
    let mb = keep.iter().map(|&i| contaminated[i]).sum::<f64>() / m;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for &i in &keep {
        let (a, b) = (clean[i] - ma, contaminated[i] - mb);
        sab += a * b;
        saa += a * a;
        sbb += b * b;
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

/// Reference centre used by the median error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CleanCenter {
    /// Deepest clean curve under the same method.
    #[default]
    DeepestCurve,
    /// Binwise average of the clean curves outside the outlier set.
    NonOutlierMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub ase_median: Option<f64>,
    pub ase_central: Option<f64>,
    pub capture: Option<f64>,
    pub spearman: Option<f64>,
    pub runtime_s: f64,
}

fn mean_curve(binned: &Binned, members: &[usize]) -> Vec<f64> {
    let len = binned.n_bins * binned.p;
    (0..len)
        .map(|q| {
            let vals: Vec<f64> = members.iter().map(|&i| binned.values[i][q]).filter(|v| !v.is_nan()).collect();
            if vals.is_empty() {
                f64::NAN
            } else {
                vals.iter().sum::<f64>() / vals.len() as f64
            }
        })
        .collect()
}

/// Score one method on a clean sample and its contaminated, sparsified
/// counterpart. Only the depth computation on `observed` is timed.
pub fn assess(
    clean: &Dataset,
    observed: &Dataset,
    outliers: &[usize],
    method: Method,
    config: &DepthConfig,
    center: CleanCenter,
) -> Result<Assessment> {
    let clean_engine = DepthEngine::new(clean, config.clone())?;
    let clean_report = clean_engine.compute(method)?;
    let start = Instant::now();
    let report = DepthEngine::new(observed, config.clone())?.compute(method)?;
    let runtime_s = start.elapsed().as_secs_f64();

    let grid = clean_engine.grid();
    let clean_b = Binned::new(clean, grid);
    let obs_b = Binned::new(observed, grid);
    let r = central_region(&clean_b, &clean_report).range();
    let r_c = central_region(&obs_b, &report).range();
    let m = match center {
        CleanCenter::DeepestCurve => clean_b.curve(clean_report.median()).to_vec(),
        CleanCenter::NonOutlierMean => {
            let drop: BTreeSet<usize> = outliers.iter().copied().collect();
            mean_curve(&clean_b, &clean.complement(&drop))
        }
    };
    let m_c = obs_b.curve(report.median());
    Ok(Assessment {
        ase_median: ase_median(m_c, &m, &r),
        ase_central: ase_central(&r_c, &r),
        capture: outlier_capture(&report, outliers),
        spearman: spearman_nonoutliers(&clean_report.ranks, &report.ranks, outliers),
        runtime_s,
    })
}

/// Full factorial benchmark design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkPlan {
    pub models: Vec<ModelId>,
    pub outliers: Vec<OutlierType>,
    pub sparseness: Vec<SparsenessType>,
    pub levels: Vec<SparsityLevel>,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub n: usize,
    pub t: usize,
    pub rate: f64,
    pub p_s: f64,
    pub seed: u64,
    pub depth: DepthConfig,
    pub center: CleanCenter,
    /// Run replicates concurrently; depth calls themselves stay sequential.
    pub parallel: bool,
}

impl Default for BenchmarkPlan {
    fn default() -> Self {
        Self {
            models: vec![ModelId::I],
            outliers: vec![OutlierType::MagnitudeI],
            sparseness: vec![SparsenessType::Point],
            levels: vec![SparsityLevel::Dense, SparsityLevel::High],
            methods: Method::ALL.to_vec(),
            replicates: 10,
            n: 200,
            t: 50,
            rate: 0.1,
            p_s: 1.0,
            seed: 0,
            depth: DepthConfig::default(),
            center: CleanCenter::DeepestCurve,
            parallel: true,
        }
    }
}

/// One benchmark row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentRow {
    pub model: ModelId,
    pub outlier_type: OutlierType,
    pub sparseness_type: SparsenessType,
    pub p_curve_level: SparsityLevel,
    pub method: Method,
    pub replicate: usize,
    pub ase_median: Option<f64>,
    pub ase_central: Option<f64>,
    pub capture: Option<f64>,
    pub spearman: Option<f64>,
    pub runtime_s: Option<f64>,
    /// Failure message when the cell could not be evaluated.
    pub error: Option<String>,
}

impl BenchmarkPlan {
    pub fn scenario(&self, model: ModelId, outlier: OutlierType, sparse: SparsenessType, level: SparsityLevel) -> Scenario {
        Scenario {
            model: ModelSpec {
                model,
                n: self.n,
                t: self.t,
                jitter: 0.0,
            },
            contamination: ContaminationSpec {
                kind: outlier,
                rate: self.rate,
            },
            sparseness: SparsenessSpec {
                kind: sparse,
                level,
                p_s: self.p_s,
            },
        }
    }
}

struct Cell {
    model: ModelId,
    outlier: OutlierType,
    sparse: SparsenessType,
    level: SparsityLevel,
    replicate: usize,
}

impl Cell {
    fn key(&self) -> String {
        format!("{}/{}/{}/{}", self.model, self.outlier, self.sparse, self.level)
    }
}

fn run_cell(plan: &BenchmarkPlan, cell: &Cell) -> Vec<AssessmentRow> {
    let data_seed = seed::derive_indexed(seed::derive(plan.seed, &cell.key()), "replicate", cell.replicate as u64);
    let mut cfg = plan.depth.clone();
    cfg.parallel = false;
    cfg.seed = seed::derive(data_seed, "depth");
    let row = |method: Method, a: Option<Assessment>, error: Option<String>| AssessmentRow {
        model: cell.model,
        outlier_type: cell.outlier,
        sparseness_type: cell.sparse,
        p_curve_level: cell.level,
        method,
        replicate: cell.replicate,
        ase_median: a.as_ref().and_then(|a| a.ase_median),
        ase_central: a.as_ref().and_then(|a| a.ase_central),
        capture: a.as_ref().and_then(|a| a.capture),
        spearman: a.as_ref().and_then(|a| a.spearman),
        runtime_s: a.as_ref().map(|a| a.runtime_s),
        error,
    };
    let sim = match simulate(&plan.scenario(cell.model, cell.outlier, cell.sparse, cell.level), data_seed) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("cell {} replicate {} failed: {e}", cell.key(), cell.replicate);
            return plan.methods.iter().map(|&m| row(m, None, Some(e.to_string()))).collect();
        }
    };
    plan.methods
        .iter()
        .map(|&m| match assess(&sim.clean, &sim.observed, &sim.outliers, m, &cfg, plan.center) {
            Ok(a) => row(m, Some(a), None),
            Err(e) => {
                log::warn!("cell {} replicate {} method {m} failed: {e}", cell.key(), cell.replicate);
                row(m, None, Some(e.to_string()))
            }
        })
        .collect()
}

/// Execute every cell of `plan`, one row per cell, replicate and method.
pub fn run_benchmark(plan: &BenchmarkPlan) -> Vec<AssessmentRow> {
    let mut cells = Vec::new();
    for &model in &plan.models {
        for &outlier in &plan.outliers {
            for &sparse in &plan.sparseness {
                for &level in &plan.levels {
                    for replicate in 0..plan.replicates {
                        cells.push(Cell {
                            model,
                            outlier,
                            sparse,
                            level,
                            replicate,
                        });
                    }
                }
            }
        }
    }
    let rows: Vec<Vec<AssessmentRow>> = if plan.parallel {
        cells.par_iter().map(|c| run_cell(plan, c)).collect()
    } else {
        cells.iter().map(|c| run_cell(plan, c)).collect()
    };
    rows.into_iter().flatten().collect()
}
