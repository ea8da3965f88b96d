//! Forecasting core for small-business sales planning.
//!
//! Everything in this crate is a pure function over immutable values and
//! needs only `alloc`: period arithmetic, ingestion of already-parsed
//! records, error metrics, the per-product model zoo, the shared-weight
//! dilated convolutional network, evaluation statistics and the synthetic
//! sales generator. File formats, the worker pool and the command line live
//! in the `autocast` crate.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cnn;
mod error;
pub mod eval;
pub mod metrics;
pub mod models;
pub(crate) mod num;
pub mod optim;
pub mod period;
pub mod report;
pub mod rng;
pub mod series;
pub mod synth;
pub mod zoo;

pub use error::{Error, Result};
pub use metrics::MetricSet;
pub use models::ModelId;
pub use period::{Date, Frequency, Period};
pub use series::{ForecastResult, SalesSeries, Validity};
