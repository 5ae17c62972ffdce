//! Command-line front end for `mfdepth`: file formats, run configuration,
//! provenance records and SVG output.

pub mod app;
pub mod config;
pub mod error;
pub mod io;
pub mod provenance;
pub mod svg;

pub use app::{effective_config, run, run_from, Cli, Command};
pub use config::RunConfig;
pub use error::{CliError, Result};
pub use provenance::Provenance;
