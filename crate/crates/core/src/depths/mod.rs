//! Global and local multivariate functional depths.
//!
//! Local variants evaluate every observation against the cloud of its own
//! bin. Global variants whiten each bin first and evaluate against a single
//! pooled cloud. Integrated depths average pointwise depths over time;
//! extremal depths order curves by their depth cdfs.

pub mod engine;
pub mod extremal;
pub mod integrated;
pub mod pointwise;
pub mod report;
pub mod weights;

pub use engine::{compute, DepthConfig, DepthEngine, PoolSize};
pub use extremal::{depth_cdf, extremal_compare, extremal_depths, extremal_from_cdfs, DepthCdf, Extremity};
pub use integrated::{curve_integrated, integrated_depth, Integrated};
pub use pointwise::{bin_clouds, pointwise_global, pointwise_local, Mode, PointDepth, PointwiseDepths};
pub use report::{rank, DepthReport, Method};
pub use weights::{central_spacing, local_region_volumes, weights_region, weights_time, DEFAULT_BETA};
