//! Running every model on a product: holdout validation with a
//! recommendation, and the final refit on the full history.
//!
//! Work is split so a caller can parallelize over products. Shared models
//! (boosted trees and the CNN) are trained first with [`train_shared`] on all
//! histories; [`validate_product`] and [`forecast_product`] then only read
//! them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cnn::{cnn_forecast, train_shared_cnn, CnnConfig, NormStats, TrainedCnn};
use crate::models::arima::arima_forecast;
use crate::models::gam::GamOptions;
use crate::models::trees::{fit_boosted_matrix, make_window_features_with, BoostParams, WindowScaling};
use crate::models::{
    ensemble_forecast, fit_arima, fit_gam, fit_hwes, fit_ses, hwes_forecast, iterate_one_step, naive_forecast,
    ArimaConfig, BoostedTrees, GamDesign, ModelId, Penalty, WindowFeatures,
};
use crate::report::{recommend, tie_tolerance, ModelFailure, ModelScore, ProductForecast, ProductValidation};
use crate::series::{check_validity, split_holdout};
use crate::{Error, ForecastResult, Frequency, MetricSet, Result, SalesSeries, Validity};

/// Settings shared by validation and forecasting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZooConfig {
    /// Corpus frequency.
    pub frequency: Frequency,
    /// Periods to forecast.
    pub horizon: usize,
    /// Holdout for products with two or more seasons of history.
    pub holdout: usize,
    /// Models to run, besides the always-present naive baseline.
    pub models: Vec<ModelId>,
    /// Members of the median ensemble.
    pub ensemble_members: Vec<ModelId>,
    /// GAM penalty selection.
    pub gam_penalty: Penalty,
    /// Seed for the stochastic models.
    pub seed: u64,
}

impl ZooConfig {
    /// Defaults for `frequency`: every model, the default horizon and holdout.
    pub fn new(frequency: Frequency, seed: u64) -> Self {
        Self {
            frequency,
            horizon: frequency.default_horizon(),
            holdout: frequency.default_holdout(),
            models: ModelId::BY_PRIORITY.to_vec(),
            ensemble_members: ModelId::ENSEMBLE_MEMBERS.to_vec(),
            gam_penalty: Penalty::Grid(crate::models::lasso::default_lambda_ratios()),
            seed,
        }
    }

    /// Checks ranges and that ensemble members are enabled.
    pub fn check(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidValue(String::from("horizon must be at least 1")));
        }
        if self.holdout < 3 {
            return Err(Error::InvalidValue(String::from("holdout must be at least 3")));
        }
        if let Some(m) = self.ensemble_members.iter().find(|m| !self.models.contains(m)) {
            return Err(Error::InvalidValue(format!("ensemble member {m} is not an enabled model")));
        }
        if self.ensemble_members.contains(&ModelId::EnsembleMedian) {
            return Err(Error::InvalidValue(String::from("the ensemble cannot be its own member")));
        }
        Ok(())
    }

    /// Whether `model` is run.
    pub fn enabled(&self, model: ModelId) -> bool {
        model == ModelId::Naive || self.models.contains(&model)
    }

    /// CNN settings for this frequency and seed.
    pub fn cnn_config(&self) -> CnnConfig {
        CnnConfig::for_frequency(self.frequency, self.seed)
    }
}

/// A product's history cut for validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSplit {
    /// Product identifier.
    pub product_id: String,
    /// History class.
    pub validity: Validity,
    /// Full history length.
    pub length: usize,
    /// Holdout length, 0 when excluded.
    pub holdout: usize,
    /// Training prefix and holdout; `None` when excluded.
    pub parts: Option<(SalesSeries, SalesSeries)>,
}

/// Holdout length for a history: the configured one for full histories,
/// `max(3, n - m)` for short ones.
pub fn holdout_for(len: usize, validity: Validity, config: &ZooConfig) -> usize {
    let m = config.frequency.season_length();
    match validity {
        Validity::Excluded => 0,
        Validity::FullPipeline if config.holdout + m <= len => config.holdout,
        _ => 3.max(len.saturating_sub(m)),
    }
}

/// Classifies a product and splits off its holdout.
pub fn plan_validation(series: &SalesSeries, config: &ZooConfig) -> Result<ValidationSplit> {
    if series.frequency() != config.frequency {
        return Err(Error::FrequencyMismatch);
    }
    let validity = check_validity(series);
    let holdout = holdout_for(series.len(), validity, config);
    let parts = if validity == Validity::Excluded { None } else { Some(split_holdout(series, holdout)?) };
    Ok(ValidationSplit { product_id: series.product_id().to_string(), validity, length: series.len(), holdout, parts })
}

/// Boosted trees fitted on lag windows pooled across products, each product
/// divided by its own scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedTrees {
    /// The ensemble of trees.
    pub model: BoostedTrees,
    /// Season length used for the lag window.
    pub season_length: usize,
}

/// Fits [`SharedTrees`] on every history with more than one season.
pub fn train_shared_trees(histories: &[SalesSeries]) -> Result<SharedTrees> {
    let mut features = Vec::new();
    let mut targets = Vec::new();
    let mut m = 0;
    for s in histories {
        m = s.frequency().season_length();
        let scaling = WindowScaling { scale: NormStats::from_values(s.values()).scale, log1p: false };
        for (w, y) in make_window_features_with(s, &scaling) {
            features.push(w.to_vec());
            targets.push(y);
        }
    }
    if targets.is_empty() {
        return Err(Error::TooShort { needed: m + 1, got: histories.iter().map(|s| s.len()).max().unwrap_or(0) });
    }
    let model = fit_boosted_matrix(&features, &targets, BoostParams::default())?;
    Ok(SharedTrees { model, season_length: m })
}

/// Iterated forecast from [`SharedTrees`].
pub fn shared_trees_forecast(trees: &SharedTrees, train: &SalesSeries, horizon: usize) -> Result<ForecastResult> {
    let m = trees.season_length;
    if train.len() < m {
        return Err(Error::TooShort { needed: m, got: train.len() });
    }
    let scale = NormStats::from_values(train.values()).scale;
    let mut scaled = Vec::with_capacity(m);
    iterate_one_step(
        |history, period| {
            scaled.clear();
            scaled.extend(history[history.len() - m..].iter().map(|v| v / scale));
            let x = WindowFeatures::for_next(&scaled, period.season(), m).to_vec();
            Ok(trees.model.predict(&x) * scale)
        },
        train,
        horizon,
        ModelId::BoostedTree,
    )
}

/// Shared models, or why each could not be trained.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedModels {
    /// Pooled boosted trees, if enabled.
    pub trees: Option<core::result::Result<SharedTrees, String>>,
    /// Pooled CNN, if enabled.
    pub cnn: Option<core::result::Result<TrainedCnn, String>>,
}

impl SharedModels {
    /// No shared models.
    pub fn none() -> Self {
        Self { trees: None, cnn: None }
    }
}

/// Trains the enabled shared models on `histories`.
pub fn train_shared(histories: &[SalesSeries], config: &ZooConfig) -> SharedModels {
    let trees = config
        .enabled(ModelId::BoostedTree)
        .then(|| train_shared_trees(histories).map_err(|e| e.to_string()));
    let cnn = config
        .enabled(ModelId::Cnn)
        .then(|| train_shared_cnn(histories, &config.cnn_config()).map_err(|e| e.to_string()));
    SharedModels { trees, cnn }
}

/// Result of fitting every enabled model to one history.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidates {
    /// Forecasts in priority order.
    pub forecasts: Vec<ForecastResult>,
    /// Models that produced nothing.
    pub failures: Vec<ModelFailure>,
    /// The GAM fit, kept for its decomposition.
    pub gam: Option<GamDesign>,
}

fn shared_result<T>(slot: &Option<core::result::Result<T, String>>) -> Result<&T> {
    match slot {
        Some(Ok(model)) => Ok(model),
        Some(Err(e)) => Err(Error::Fit(format!("shared model unavailable: {e}"))),
        None => Err(Error::Fit(String::from("shared model not trained"))),
    }
}

fn single_forecast(
    model: ModelId,
    train: &SalesSeries,
    horizon: usize,
    shared: &SharedModels,
    config: &ZooConfig,
    gam: &mut Option<GamDesign>,
) -> Result<ForecastResult> {
    let start = train.end().offset(1);
    let wrap = |values: Vec<f64>| ForecastResult::new(train.product_id(), model, start, values);
    match model {
        ModelId::Naive => naive_forecast(train, horizon),
        ModelId::Ses => wrap(hwes_forecast(&fit_ses(train)?, horizon)),
        ModelId::Hwes => wrap(hwes_forecast(&fit_hwes(train)?, horizon)),
        ModelId::Arima | ModelId::Sarima => {
            let arima = ArimaConfig { seasonal: model == ModelId::Sarima, regressors: None };
            wrap(arima_forecast(&fit_arima(train, &arima)?, horizon)?)
        }
        ModelId::Gam => {
            let options = GamOptions { penalty: config.gam_penalty.clone(), ..GamOptions::default() };
            let fit = fit_gam(train, &options)?;
            let values = fit.forecast(horizon)?;
            *gam = Some(fit);
            wrap(values)
        }
        ModelId::BoostedTree => shared_trees_forecast(shared_result(&shared.trees)?, train, horizon),
        ModelId::Cnn => cnn_forecast(shared_result(&shared.cnn)?, train, horizon),
        ModelId::EnsembleMedian => Err(Error::Fit(String::from("the ensemble is built from members"))),
    }
}

/// Fits every enabled model (plus the naive baseline) to `train` and
/// forecasts `horizon` periods. The ensemble is the median of whichever
/// members succeeded, provided at least two did.
pub fn fit_candidates(train: &SalesSeries, horizon: usize, shared: &SharedModels, config: &ZooConfig) -> Candidates {
    let mut forecasts = Vec::new();
    let mut failures = Vec::new();
    let mut gam = None;
    for model in ModelId::BY_PRIORITY {
        if !config.enabled(model) {
            continue;
        }
        let result = if model == ModelId::EnsembleMedian {
            let members: Vec<ForecastResult> = forecasts
                .iter()
                .filter(|f: &&ForecastResult| config.ensemble_members.contains(&f.model_id))
                .cloned()
                .collect();
            ensemble_forecast(&members)
        } else {
            single_forecast(model, train, horizon, shared, config, &mut gam)
        };
        match result {
            Ok(f) => forecasts.push(f),
            Err(e) => failures.push(ModelFailure { model_id: model, reason: e.to_string() }),
        }
    }
    Candidates { forecasts, failures, gam }
}

/// Scores every model on the product's holdout and recommends the one with
/// the lowest RMSE. Models that fail are recorded and skipped; when none but
/// the naive baseline survives the product is flagged and naive recommended.
pub fn validate_product(split: &ValidationSplit, shared: &SharedModels, config: &ZooConfig) -> ProductValidation {
    let mut out = ProductValidation {
        product_id: split.product_id.clone(),
        validity: split.validity,
        length: split.length,
        holdout: split.holdout,
        scores: Vec::new(),
        failures: Vec::new(),
        recommended: None,
        no_model: false,
    };
    let Some((train, test)) = &split.parts else {
        return out;
    };
    let candidates = fit_candidates(train, test.len(), shared, config);
    out.failures = candidates.failures;
    for f in &candidates.forecasts {
        match MetricSet::compute(test.values(), f.values()) {
            Ok(metrics) => out.scores.push(ModelScore { model_id: f.model_id, metrics }),
            Err(e) => out.failures.push(ModelFailure { model_id: f.model_id, reason: e.to_string() }),
        }
    }
    out.no_model = !out.scores.iter().any(|s| s.model_id != ModelId::Naive)
        && config.models.iter().any(|m| *m != ModelId::Naive);
    out.recommended = if out.no_model {
        Some(ModelId::Naive)
    } else {
        recommend(&out.scores, tie_tolerance(test.values()))
    };
    out
}

/// Refits every model on the full history and forecasts the configured
/// horizon. A model that fails here but was scored in validation is refitted
/// on the validation training prefix instead and its forecast trimmed to the
/// same periods. Returns `None` for excluded products.
pub fn forecast_product(
    series: &SalesSeries,
    validation: &ProductValidation,
    shared: &SharedModels,
    config: &ZooConfig,
) -> Option<ProductForecast> {
    let recommended = validation.recommended?;
    let horizon = config.horizon;
    let Candidates { mut forecasts, failures, gam } = fit_candidates(series, horizon, shared, config);
    let mut reused = Vec::new();
    let mut still_failed = Vec::new();
    for failure in failures {
        let scored = validation.score(failure.model_id).is_some() && !failure.model_id.is_shared();
        let retry = scored
            .then(|| {
                let (train, _) = split_holdout(series, validation.holdout).ok()?;
                let c = fit_candidates(&train, validation.holdout + horizon, shared, config);
                let f = c.forecasts.into_iter().find(|f| f.model_id == failure.model_id)?;
                ForecastResult::new(
                    f.product_id.clone(),
                    f.model_id,
                    series.end().offset(1),
                    f.values()[validation.holdout..].to_vec(),
                )
                .ok()
            })
            .flatten();
        match retry {
            Some(f) => {
                reused.push(f.model_id);
                forecasts.push(f);
            }
            None => still_failed.push(failure),
        }
    }
    forecasts.sort_by_key(|f| f.model_id.priority());
    let decomposition = gam
        .or_else(|| fit_gam(series, &GamOptions { penalty: config.gam_penalty.clone(), ..GamOptions::default() }).ok())
        .map(|g| g.decompose(series));
    let recommended = if forecasts.iter().any(|f| f.model_id == recommended) { recommended } else { ModelId::Naive };
    Some(ProductForecast {
        product_id: series.product_id().to_string(),
        forecasts,
        recommended,
        decomposition,
        reused,
        failures: still_failed,
    })
}
