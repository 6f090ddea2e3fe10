//! Command-line front end for principal subsimplex analysis: CSV ingestion,
//! method dispatch, result files, run manifests and SVG plots.

pub mod args;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;
pub mod run;
pub mod svg;

pub use config::{Method, RunConfig, Source};
pub use error::{CliError, Result};
pub use run::{run, Manifest};
