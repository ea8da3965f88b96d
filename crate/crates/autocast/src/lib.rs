//! Batch forecasting pipeline on top of `autocast-core`: CSV ingestion,
//! configuration, parallel validation and forecasting, and file export.

pub mod config;
pub mod csv_io;
mod error;
pub mod evaluate;
pub mod export;
pub mod pipeline;
pub mod svg;
pub mod synth_spec;

pub use config::{parse_config, PipelineConfig};
pub use error::{AppError, AppResult};
pub use pipeline::{finalize_and_forecast, run_validation};
