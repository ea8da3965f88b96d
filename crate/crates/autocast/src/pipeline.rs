//! Validation and final forecasting over a corpus on a bounded thread pool.
//!
//! Shared models are trained first (trees and CNN side by side); products
//! are then processed independently. Results are collected in product-id
//! order, so the output does not depend on the number of workers.

use std::collections::BTreeSet;

use autocast_core::report::{ForecastBundle, ValidationReport};
use autocast_core::zoo::{forecast_product, plan_validation, train_shared, validate_product, SharedModels, ZooConfig};
use autocast_core::SalesSeries;
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::{AppError, AppResult};

fn pool(workers: usize) -> AppResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AppError::Internal(format!("cannot start worker pool: {e}")))
}

fn sorted_corpus<'a>(corpus: &'a [SalesSeries], config: &PipelineConfig) -> AppResult<Vec<&'a SalesSeries>> {
    let mut seen = BTreeSet::new();
    for s in corpus {
        if s.frequency() != config.frequency {
            return Err(AppError::Input(format!(
                "product '{}' is {} but the run is {}",
                s.product_id(),
                s.frequency().as_str(),
                config.frequency.as_str()
            )));
        }
        if !seen.insert(s.product_id()) {
            return Err(AppError::Input(format!("duplicate product '{}'", s.product_id())));
        }
    }
    let mut sorted: Vec<&SalesSeries> = corpus.iter().collect();
    sorted.sort_by(|a, b| a.product_id().cmp(b.product_id()));
    Ok(sorted)
}

fn train_shared_parallel(histories: &[SalesSeries], zoo: &ZooConfig) -> SharedModels {
    let only = |keep: autocast_core::ModelId| {
        let mut c = zoo.clone();
        c.models.retain(|m| *m == keep);
        c
    };
    let (trees, cnn) = rayon::join(
        || train_shared(histories, &only(autocast_core::ModelId::BoostedTree)).trees,
        || train_shared(histories, &only(autocast_core::ModelId::Cnn)).cnn,
    );
    SharedModels { trees, cnn }
}

/// Splits every product, trains shared models on the training prefixes and
/// scores every enabled model on each holdout.
pub fn run_validation(corpus: &[SalesSeries], config: &PipelineConfig) -> AppResult<ValidationReport> {
    config.check()?;
    let zoo = config.zoo();
    let sorted = sorted_corpus(corpus, config)?;
    let splits = sorted
        .iter()
        .map(|s| plan_validation(s, &zoo))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| AppError::Input(e.to_string()))?;
    let trains: Vec<SalesSeries> = splits.iter().filter_map(|s| s.parts.as_ref().map(|p| p.0.clone())).collect();
    let products = pool(config.workers)?.install(|| {
        let shared = train_shared_parallel(&trains, &zoo);
        splits.par_iter().map(|split| validate_product(split, &shared, &zoo)).collect()
    });
    Ok(ValidationReport { frequency: config.frequency, holdout: config.holdout, products })
}

/// Refits every model on each full history and forecasts the horizon.
/// Excluded products are skipped.
pub fn finalize_and_forecast(
    corpus: &[SalesSeries],
    report: &ValidationReport,
    config: &PipelineConfig,
) -> AppResult<ForecastBundle> {
    config.check()?;
    let zoo = config.zoo();
    let sorted = sorted_corpus(corpus, config)?;
    let ids: Vec<&str> = sorted.iter().map(|s| s.product_id()).collect();
    let reported: Vec<&str> = report.products.iter().map(|p| p.product_id.as_str()).collect();
    if ids != reported {
        return Err(AppError::Internal("validation report does not match the corpus".into()));
    }
    let active: Vec<(usize, &SalesSeries)> =
        sorted.iter().enumerate().filter(|(i, _)| !report.products[*i].is_excluded()).map(|(i, s)| (i, *s)).collect();
    let histories: Vec<SalesSeries> = active.iter().map(|(_, s)| (*s).clone()).collect();
    let products = pool(config.workers)?.install(|| {
        let shared = train_shared_parallel(&histories, &zoo);
        active
            .par_iter()
            .filter_map(|(i, s)| forecast_product(s, &report.products[*i], &shared, &zoo))
            .collect()
    });
    Ok(ForecastBundle { frequency: config.frequency, horizon: config.horizon, products })
}
