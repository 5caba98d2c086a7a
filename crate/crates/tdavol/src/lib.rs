//! Stages of the return-series analysis pipeline and their file formats.
//!
//! The `tdavol` binary is a thin wrapper: each subcommand builds an
//! [`AnalysisConfig`] and calls the matching function in [`stages`].

pub mod config;
pub mod error;
pub mod ingest;
pub mod manifest;
pub mod stages;
pub mod svg;
pub mod tables;

pub use config::{AnalysisConfig, ChangepointMode};
pub use error::{PipelineError, Result};
