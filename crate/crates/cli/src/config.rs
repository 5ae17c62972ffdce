//! Run configuration: a TOML file, then command-line flags on top.
//!
//! ```toml
//! seed = 7
//! methods = ["GMFID_wt", "GMFED"]
//!
//! [depth]
//! beta = 0.25
//! moments = "plain"
//!
//! [simulate.model]
//! model = "III"
//! n = 100
//! ```
//!
//! The top-level `seed` and `[depth]` table apply to every command; the
//! `depth` and `seed` entries nested in `[benchmark]` and `[boxplot]` are
//! replaced by them.

use std::path::{Path, PathBuf};

use mfdepth::boxplot::BoxplotConfig;
use mfdepth::metrics::BenchmarkPlan;
use mfdepth::simulate::Scenario;
use mfdepth::{DepthConfig, Method};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "MFDEPTH_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    pub output: PathBuf,
    /// Methods reported by `depth`.
    pub methods: Vec<Method>,
    pub depth: DepthConfig,
    pub simulate: Scenario,
    pub benchmark: BenchmarkPlan,
    pub boxplot: BoxplotConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            threads: None,
            output: PathBuf::from("mfdepth-out"),
            methods: vec![Method::GmfidWt],
            depth: DepthConfig::default(),
            simulate: Scenario::default(),
            benchmark: BenchmarkPlan::default(),
            boxplot: BoxplotConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Push the shared seed and depth settings into the per-command sections.
    pub fn resolve(&mut self) {
        self.depth.seed = self.seed;
        self.benchmark.seed = self.seed;
        self.benchmark.depth = self.depth.clone();
        self.boxplot.depth = self.depth.clone();
    }

    /// Worker count from, in order, the flag, the environment and the config.
    pub fn worker_threads(&self, flag: Option<usize>) -> Result<Option<usize>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .map(Some)
                .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}='{v}' is not a positive integer"))),
            Err(_) => Ok(self.threads),
        }
    }

    /// What a command's output depends on: the config minus where it is written
    /// and how many threads computed it.
    pub fn identity(&self) -> RunConfig {
        RunConfig { threads: None, output: PathBuf::new(), ..self.clone() }
    }
}
