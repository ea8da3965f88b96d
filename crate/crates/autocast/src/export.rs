//! Writing pipeline results to an output directory.

use std::collections::BTreeMap;
use std::path::Path;

use autocast_core::models::ModelId;
use autocast_core::report::{ForecastBundle, ValidationReport};
use autocast_core::rng::fnv1a;
use autocast_core::{SalesSeries, Validity};
use serde_json::{json, Value};

use crate::config::PipelineConfig;
use crate::csv_io::{forecasts_csv, validation_csv};
use crate::error::{write_file, AppError, AppResult};
use crate::svg::decomposition_svg;

/// File-name-safe version of a product id. Ids that need changing get a hash
/// suffix so distinct ids never collide.
pub fn sanitize_id(id: &str) -> String {
    let clean: String =
        id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    if clean == id && !id.is_empty() {
        clean
    } else {
        format!("{clean}_{:08x}", fnv1a(id) as u32)
    }
}

fn create_dir(dir: &Path) -> AppResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::write(dir, e))
}

/// Corpus statistics, recommendation histogram, per-product flags and the
/// configuration echo.
pub fn summary_json(report: &ValidationReport, bundle: Option<&ForecastBundle>, config: &PipelineConfig) -> Value {
    let count = |v: Validity| report.products.iter().filter(|p| p.validity == v).count();
    let mut histogram: BTreeMap<&str, usize> = ModelId::BY_PRIORITY.iter().map(|m| (m.as_str(), 0)).collect();
    for (m, n) in report.recommendation_histogram() {
        histogram.insert(m.as_str(), n);
    }
    let mut failures: BTreeMap<&str, usize> = BTreeMap::new();
    let mut nrmse: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for p in &report.products {
        for f in &p.failures {
            *failures.entry(f.model_id.as_str()).or_insert(0) += 1;
        }
        for s in &p.scores {
            if let Some(v) = s.metrics.nrmse {
                let e = nrmse.entry(s.model_id.as_str()).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
    }
    let mean_nrmse: BTreeMap<&str, f64> = nrmse.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect();
    let details: Vec<Value> = report
        .products
        .iter()
        .map(|p| {
            let forecast = bundle.and_then(|b| b.product(&p.product_id));
            json!({
                "product_id": p.product_id,
                "validity": p.validity,
                "length": p.length,
                "holdout": p.holdout,
                "recommended": p.recommended.map(|m| m.as_str()),
                "no_model": p.no_model,
                "validation_failures": p.failures.iter().map(|f| json!({"model_id": f.model_id.as_str(), "reason": f.reason})).collect::<Vec<_>>(),
                "forecast_failures": forecast.map(|f| f.failures.iter().map(|x| json!({"model_id": x.model_id.as_str(), "reason": x.reason})).collect::<Vec<_>>()),
                "reused_validation_fit": forecast.map(|f| f.reused.iter().map(|m| m.as_str()).collect::<Vec<_>>()),
            })
        })
        .collect();
    json!({
        "products": {
            "total": report.products.len(),
            "full_pipeline": count(Validity::FullPipeline),
            "short_history": count(Validity::ShortHistory),
            "excluded": count(Validity::Excluded),
            "no_model": report.products.iter().filter(|p| p.no_model).count(),
            "forecast": bundle.map(|b| b.products.len()),
        },
        "excluded": report.products.iter().filter(|p| p.is_excluded()).map(|p| json!({"product_id": p.product_id, "length": p.length})).collect::<Vec<_>>(),
        "recommendation_histogram": histogram,
        "mean_holdout_nrmse": mean_nrmse,
        "model_failures": failures,
        "product_details": details,
        "config": config.echo(),
        "seed": config.seed,
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes `validation.csv` and `summary.json`.
pub fn export_validation(report: &ValidationReport, config: &PipelineConfig, dir: &Path) -> AppResult<()> {
    create_dir(dir)?;
    write_file(&dir.join("validation.csv"), &validation_csv(report))?;
    write_file(&dir.join("summary.json"), &pretty(&summary_json(report, None, config)))
}

/// Writes `forecasts.csv`, `validation.csv`, `summary.json` and one
/// `decomposition_<product>.svg` per forecast product.
pub fn export_bundle(
    bundle: &ForecastBundle,
    report: &ValidationReport,
    corpus: &[SalesSeries],
    config: &PipelineConfig,
    dir: &Path,
) -> AppResult<()> {
    create_dir(dir)?;
    write_file(&dir.join("forecasts.csv"), &forecasts_csv(bundle))?;
    write_file(&dir.join("validation.csv"), &validation_csv(report))?;
    write_file(&dir.join("summary.json"), &pretty(&summary_json(report, Some(bundle), config)))?;
    for p in &bundle.products {
        let Some(series) = corpus.iter().find(|s| s.product_id() == p.product_id) else { continue };
        let (trend, seasonal) = match &p.decomposition {
            Some(d) => (d.trend.as_slice(), d.seasonal.as_slice()),
            None => (&[][..], &[][..]),
        };
        let svg = decomposition_svg(
            &p.product_id,
            &series.start().label(),
            &series.end().label(),
            series.values(),
            trend,
            seasonal,
        );
        write_file(&dir.join(format!("decomposition_{}.svg", sanitize_id(&p.product_id))), &svg)?;
    }
    Ok(())
}
