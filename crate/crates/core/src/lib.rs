//! Global and local depths for irregularly observed multivariate functional
//! data, with simulation, benchmarking and sparse boxplot tools.

pub mod binning;
pub mod boxplot;
pub mod depths;
pub mod error;
pub mod halfspace;
pub mod metrics;
pub mod model;
pub mod normalize;
pub mod seed;
pub mod simulate;

pub use binning::{BinCount, BinGrid};
pub use depths::{compute, DepthConfig, DepthEngine, DepthReport, Method, PoolSize};
pub use error::{Error, Result};
pub use halfspace::{Kernel, PointCloud};
pub use model::{Dataset, MultiCurve};
pub use normalize::MomentKind;
