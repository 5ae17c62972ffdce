use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::binning::{default_min_count, BinCount, BinGrid};
use crate::error::{Error, Result};
use crate::halfspace::Kernel;
use crate::model::Dataset;
use crate::normalize::{moments, normalize_dataset, orient_dataset, GlobalPool, MomentKind};
use crate::seed;

use super::extremal::extremal_depths;
use super::integrated::integrated_depth;
use super::pointwise::{pointwise_global, pointwise_local, PointwiseDepths};
use super::report::{DepthReport, Method};
use super::weights::{local_region_volumes, weights_region, weights_time, DEFAULT_BETA};

/// Size of the pooled reference cloud for global depths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolSize {
    /// `min(pool size, 1000)`.
    #[default]
    Default,
    /// Every normalized observation.
    Full,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DepthConfig {
    pub n_bins: BinCount,
    /// Per-bin floor enforced by merging; `None` uses `max(p + 1, 5)`.
    pub min_count: Option<usize>,
    pub beta: f64,
    pub moments: MomentKind,
    pub pool: PoolSize,
    pub seed: u64,
    /// Random directions for `p >= 3`.
    pub n_dirs: usize,
    /// Put each whitened bin into a data-driven frame before pooling.
    pub orient: bool,
    pub parallel: bool,
}

impl Default for DepthConfig {
    fn default() -> Self {
        Self {
            n_bins: BinCount::Auto,
            min_count: None,
            beta: DEFAULT_BETA,
            moments: MomentKind::Robust,
            pool: PoolSize::Default,
            seed: 0,
            n_dirs: 500,
            orient: true,
            parallel: true,
        }
    }
}

impl DepthConfig {
    pub fn kernel(&self, p: usize) -> Kernel {
        let s = seed::derive(self.seed, "directions");
        match Kernel::auto(p, s) {
            Kernel::Random { seed, .. } => Kernel::Random {
                n_dirs: self.n_dirs,
                seed,
            },
            k => k,
        }
    }
}

/// Shared grid and cached pointwise depths for computing several methods on
/// one dataset.
#[derive(Debug)]
pub struct DepthEngine<'a> {
    dataset: &'a Dataset,
    config: DepthConfig,
    grid: BinGrid,
    local: OnceLock<PointwiseDepths>,
    global: OnceLock<PointwiseDepths>,
}

impl<'a> DepthEngine<'a> {
    pub fn new(dataset: &'a Dataset, config: DepthConfig) -> Result<Self> {
        let violations = dataset.validate();
        if let Some(v) = violations.first() {
            return Err(Error::InvalidDataset(format!("{v} ({} violations)", violations.len())));
        }
        if !(0.0..1.0).contains(&config.beta) {
            return Err(Error::InvalidParameter(format!("beta must lie in [0, 1), got {}", config.beta)));
        }
        let min_count = config.min_count.unwrap_or_else(|| default_min_count(dataset.p));
        let grid = BinGrid::build(dataset, config.n_bins)?.merge_sparse(min_count)?;
        Ok(Self {
            dataset,
            config,
            grid,
            local: OnceLock::new(),
            global: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &BinGrid {
        &self.grid
    }

    pub fn config(&self) -> &DepthConfig {
        &self.config
    }

    pub fn dataset(&self) -> &Dataset {
        self.dataset
    }

    pub fn local(&self) -> Result<&PointwiseDepths> {
        if let Some(v) = self.local.get() {
            return Ok(v);
        }
        let kernel = self.config.kernel(self.dataset.p);
        let pw = pointwise_local(self.dataset, &self.grid, kernel, self.config.parallel)?;
        Ok(self.local.get_or_init(|| pw))
    }

    pub fn global(&self) -> Result<&PointwiseDepths> {
        if let Some(v) = self.global.get() {
            return Ok(v);
        }
        let m = moments(self.dataset, &self.grid, self.config.moments)?;
        let mut normalized = normalize_dataset(self.dataset, &self.grid, &m)?;
        if self.config.orient {
            normalized = orient_dataset(&normalized, &self.grid);
        }
        let full = GlobalPool::from_dataset(&normalized);
        let size = match self.config.pool {
            PoolSize::Default => None,
            PoolSize::Full => Some(full.len()),
            PoolSize::Fixed(n) => Some(n.min(full.len())),
        };
        let pool = full.subsample(size, seed::derive(self.config.seed, "pool"))?;
        let kernel = self.config.kernel(self.dataset.p);
        let pw = pointwise_global(&normalized, &self.grid, &pool, kernel, self.config.parallel)?;
        Ok(self.global.get_or_init(|| pw))
    }

    /// Per-bin weights used by `method`.
    pub fn weights(&self, method: Method) -> Result<Vec<f64>> {
        let k = self.grid.n_bins();
        match method {
            Method::GmfidWt | Method::LmfidWt | Method::Gmfed | Method::Lmfed => Ok(weights_time(&self.grid)),
            // one pooled cloud: the shared volume cancels
            Method::GmfidWd => Ok(weights_region(&self.grid, &vec![1.0; k])),
            Method::LmfidWd => {
                let vols = local_region_volumes(self.dataset, &self.grid, self.local()?, self.config.beta)?
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "LMFID_wd needs region volumes, which are available for p <= 2 (p = {})",
                            self.dataset.p
                        ))
                    })?;
                Ok(weights_region(&self.grid, &vols))
            }
        }
    }

    pub fn pointwise(&self, method: Method) -> Result<&PointwiseDepths> {
        if method.is_global() {
            self.global()
        } else {
            self.local()
        }
    }

    pub fn compute(&self, method: Method) -> Result<DepthReport> {
        let pw = self.pointwise(method)?;
        let w = self.weights(method)?;
        let ids = self.dataset.curves.iter().map(|c| c.id.clone()).collect();
        let beta = method.uses_region_weights().then_some(self.config.beta);
        if method.is_extremal() {
            Ok(DepthReport::new(method, beta, ids, extremal_depths(pw, &w), Vec::new()))
        } else {
            let r = integrated_depth(pw, &w);
            if !r.unrankable.is_empty() {
                log::warn!("{} curves carry no weighted observation under {method}", r.unrankable.len());
            }
            Ok(DepthReport::new(method, beta, ids, r.depths, r.unrankable))
        }
    }
}

/// One-shot depth computation.
pub fn compute(dataset: &Dataset, method: Method, config: &DepthConfig) -> Result<DepthReport> {
    DepthEngine::new(dataset, config.clone())?.compute(method)
}
