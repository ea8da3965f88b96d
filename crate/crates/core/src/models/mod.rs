//! The per-product model zoo.
//!
//! Every model turns a [`SalesSeries`](crate::SalesSeries) into a
//! [`ForecastResult`](crate::ForecastResult) of a requested horizon. Naive,
//! exponential smoothing, ARIMA and GAM forecast in closed form; the boosted
//! trees and the CNN are one-step predictors driven by
//! [`iterate_one_step`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub mod arima;
/// Median ensemble of member forecasts.
pub mod ensemble;
pub mod gam;
pub mod hwes;
/// Recursive multi-step forecasting from one-step predictors.
pub mod iterate;
pub mod lasso;
mod linalg;
/// Seasonal-mean baseline.
pub mod naive;
pub mod trees;

pub use arima::{arima_forecast, fit_arima, fit_arima_order, ArimaConfig, ArimaFit, ArimaOrder};
pub use ensemble::{ensemble_forecast, ensemble_forecast_with, Aggregate};
pub use gam::{fit_gam, GamDecomposition, GamDesign, GamOptions, Penalty};
pub use hwes::{fit_hwes, fit_ses, hwes_forecast, HwesKind, HwesState};
pub use iterate::iterate_one_step;
pub use lasso::{lasso_coordinate_descent, select_lambda, LassoFit};
pub use naive::naive_forecast;
pub use trees::{fit_boosted_trees, make_window_features, BoostParams, BoostedTrees, WindowFeatures};

/// Identifier of a forecasting model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelId {
    /// Mean of the same calendar period in previous years.
    Naive,
    /// Simple exponential smoothing.
    #[serde(rename = "SES")]
    Ses,
    /// Additive Holt-Winters exponential smoothing.
    #[serde(rename = "HWES")]
    Hwes,
    /// Non-seasonal ARIMA.
    #[serde(rename = "ARIMA")]
    Arima,
    /// Seasonal ARIMA.
    #[serde(rename = "SARIMA")]
    Sarima,
    /// Lasso-fitted additive decomposition.
    #[serde(rename = "GAM")]
    Gam,
    /// Gradient-boosted regression trees on lag windows, shared across products.
    BoostedTree,
    /// Dilated causal CNN, shared across products.
    #[serde(rename = "CNN")]
    Cnn,
    /// Elementwise median of the ensemble members.
    EnsembleMedian,
}

impl ModelId {
    /// Every model, in tie-break priority order (most preferred first).
    pub const BY_PRIORITY: [ModelId; 9] = [
        ModelId::Hwes,
        ModelId::Ses,
        ModelId::Gam,
        ModelId::Sarima,
        ModelId::Arima,
        ModelId::BoostedTree,
        ModelId::Cnn,
        ModelId::EnsembleMedian,
        ModelId::Naive,
    ];

    /// Default ensemble members.
    pub const ENSEMBLE_MEMBERS: [ModelId; 4] =
        [ModelId::Hwes, ModelId::Gam, ModelId::Arima, ModelId::BoostedTree];

    /// Rank in the tie-break order; lower wins.
    pub fn priority(self) -> usize {
        Self::BY_PRIORITY
            .iter()
            .position(|m| *m == self)
            .expect("every model is ranked")
    }

    /// Canonical name used in files.
    pub const fn as_str(self) -> &'static str {
        match self {
            ModelId::Naive => "Naive",
            ModelId::Ses => "SES",
            ModelId::Hwes => "HWES",
            ModelId::Arima => "ARIMA",
            ModelId::Sarima => "SARIMA",
            ModelId::Gam => "GAM",
            ModelId::BoostedTree => "BoostedTree",
            ModelId::Cnn => "CNN",
            ModelId::EnsembleMedian => "EnsembleMedian",
        }
    }

    /// Models trained once on windows pooled over the corpus.
    pub const fn is_shared(self) -> bool {
        matches!(self, ModelId::BoostedTree | ModelId::Cnn)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::BY_PRIORITY
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidValue(alloc::format!("unknown model '{s}'")))
    }
}

/// External regressors aligned with a series.
///
/// Row `i` belongs to the `i`-th period from the series start; columns must
/// extend far enough to cover any forecast horizon they are used with.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Regressors {
    /// Column names.
    pub names: Vec<String>,
    /// One vector per column.
    pub columns: Vec<Vec<f64>>,
}

impl Regressors {
    /// Number of columns.
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub(crate) fn check_rows(&self, rows: usize) -> Result<()> {
        for (name, col) in self.names.iter().zip(&self.columns) {
            if col.len() < rows {
                return Err(Error::Length { expected: rows, actual: col.len() });
            }
            if col[..rows].iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(alloc::format!("regressor '{name}'")));
            }
        }
        if self.names.len() != self.columns.len() {
            return Err(Error::Length { expected: self.columns.len(), actual: self.names.len() });
        }
        Ok(())
    }
}
