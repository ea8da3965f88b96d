//! Validation reports and forecast bundles.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::models::{GamDecomposition, ModelId};
use crate::{ForecastResult, Frequency, MetricSet, Validity};

/// Holdout metrics of one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    /// Model scored.
    pub model_id: ModelId,
    /// Metrics on the holdout.
    pub metrics: MetricSet,
}

/// A model that could not be fitted or forecast for a product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFailure {
    /// Model skipped.
    pub model_id: ModelId,
    /// Why.
    pub reason: String,
}

/// Validation outcome for one product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductValidation {
    /// Product identifier.
    pub product_id: String,
    /// History length class.
    pub validity: Validity,
    /// Number of periods in the history.
    pub length: usize,
    /// Holdout length used (0 when excluded).
    pub holdout: usize,
    /// Scores of the models that produced a holdout forecast, by priority.
    pub scores: Vec<ModelScore>,
    /// Models that were skipped.
    pub failures: Vec<ModelFailure>,
    /// Recommended model; `None` for excluded products.
    pub recommended: Option<ModelId>,
    /// Every enabled model failed and the naive baseline was substituted.
    pub no_model: bool,
}

impl ProductValidation {
    /// Whether the product was excluded from the automatic analysis.
    pub fn is_excluded(&self) -> bool {
        self.validity == Validity::Excluded
    }

    /// Holdout metrics of `model`, if it was scored.
    pub fn score(&self, model: ModelId) -> Option<&MetricSet> {
        self.scores.iter().find(|s| s.model_id == model).map(|s| &s.metrics)
    }
}

/// Validation outcome for a corpus, products in id order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Frequency of the corpus.
    pub frequency: Frequency,
    /// Configured holdout for full-history products.
    pub holdout: usize,
    /// One entry per product.
    pub products: Vec<ProductValidation>,
}

impl ValidationReport {
    /// Entry for `product_id`.
    pub fn product(&self, product_id: &str) -> Option<&ProductValidation> {
        self.products
            .binary_search_by(|p| p.product_id.as_str().cmp(product_id))
            .ok()
            .map(|i| &self.products[i])
    }

    /// Number of recommendations per model over non-excluded products.
    pub fn recommendation_histogram(&self) -> alloc::collections::BTreeMap<ModelId, usize> {
        let mut hist = alloc::collections::BTreeMap::new();
        for model in self.products.iter().filter_map(|p| p.recommended) {
            *hist.entry(model).or_insert(0) += 1;
        }
        hist
    }
}

/// Final forecasts for one product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductForecast {
    /// Product identifier.
    pub product_id: String,
    /// One forecast per fitted model, by priority.
    pub forecasts: Vec<ForecastResult>,
    /// Model recommended during validation.
    pub recommended: ModelId,
    /// Component paths of the GAM fitted to the full history.
    pub decomposition: Option<GamDecomposition>,
    /// Models whose refit failed, forecast from the validation-stage fit.
    pub reused: Vec<ModelId>,
    /// Models with no final forecast.
    pub failures: Vec<ModelFailure>,
}

impl ProductForecast {
    /// Forecast of `model`, if present.
    pub fn forecast(&self, model: ModelId) -> Option<&ForecastResult> {
        self.forecasts.iter().find(|f| f.model_id == model)
    }

    /// Forecast of the recommended model.
    pub fn recommended_forecast(&self) -> Option<&ForecastResult> {
        self.forecast(self.recommended)
    }
}

/// Final forecasts for a corpus, products in id order. Excluded products are
/// absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastBundle {
    /// Frequency of the corpus.
    pub frequency: Frequency,
    /// Periods forecast.
    pub horizon: usize,
    /// One entry per forecast product.
    pub products: Vec<ProductForecast>,
}

impl ForecastBundle {
    /// Entry for `product_id`.
    pub fn product(&self, product_id: &str) -> Option<&ProductForecast> {
        self.products
            .binary_search_by(|p| p.product_id.as_str().cmp(product_id))
            .ok()
            .map(|i| &self.products[i])
    }
}

/// Picks the lowest holdout RMSE.
///
/// RMSEs within `tolerance` of the minimum count as tied and the tie goes to
/// the higher-priority model.
pub fn recommend(scores: &[ModelScore], tolerance: f64) -> Option<ModelId> {
    let best = scores.iter().map(|s| s.metrics.rmse).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    scores
        .iter()
        .filter(|s| s.metrics.rmse <= best + tolerance)
        .map(|s| s.model_id)
        .min_by_key(|m| m.priority())
}

/// Tie tolerance for RMSEs computed against `actual`: a relative 1e-9 of the
/// data's magnitude, which absorbs rounding noise only.
pub fn tie_tolerance(actual: &[f64]) -> f64 {
    1e-9 * (1.0 + actual.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn score(model_id: ModelId, rmse: f64) -> ModelScore {
        ModelScore { model_id, metrics: MetricSet { rmse, nrmse: None, mape: None, mape_skipped: 0 } }
    }

    #[test]
    fn lowest_rmse_wins() {
        let s = [score(ModelId::Naive, 3.0), score(ModelId::Gam, 2.0), score(ModelId::Arima, 2.5)];
        assert_eq!(recommend(&s, 0.0), Some(ModelId::Gam));
    }

    #[test]
    fn ties_follow_priority() {
        let s = [score(ModelId::Naive, 2.0), score(ModelId::Cnn, 2.0), score(ModelId::Hwes, 2.0 + 1e-12)];
        assert_eq!(recommend(&s, 0.0), Some(ModelId::Cnn));
        assert_eq!(recommend(&s, 1e-9), Some(ModelId::Hwes));
    }

    #[test]
    fn nothing_to_recommend() {
        assert_eq!(recommend(&[], 0.0), None);
    }
}
