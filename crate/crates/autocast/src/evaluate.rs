//! Scoring an exported forecast directory against later actuals.

use std::path::Path;

use autocast_core::eval::{summarize, Alternative, EvaluationSummary};
use autocast_core::models::ModelId;
use autocast_core::report::{ForecastBundle, ProductForecast, ProductValidation, ValidationReport};
use autocast_core::{SalesSeries, Validity};
use serde_json::Value;

use crate::csv_io::{csv_field, read_forecasts, read_sales, read_validation};
use crate::error::{read_to_string, write_file, AppError, AppResult};
use crate::svg::boxplot_svg;

/// Ratios above this are drawn at the edge of the box plot.
pub const BOXPLOT_CLIP: f64 = 3.5;

/// Rebuilds the validation report and bundle from an output directory.
pub fn load_results(dir: &Path) -> AppResult<(ValidationReport, ForecastBundle)> {
    let (frequency, forecasts) = read_forecasts(&dir.join("forecasts.csv"))?;
    let mut validation = read_validation(&dir.join("validation.csv"))?;
    let summary_path = dir.join("summary.json");
    let details: Vec<Value> = if summary_path.exists() {
        let v: Value = serde_json::from_str(&read_to_string(&summary_path)?)
            .map_err(|e| AppError::input(&summary_path, e))?;
        v.get("product_details").and_then(Value::as_array).cloned().unwrap_or_default()
    } else {
        Vec::new()
    };
    let mut products = Vec::new();
    for d in &details {
        let Some(id) = d.get("product_id").and_then(Value::as_str) else { continue };
        let validity = serde_json::from_value(d.get("validity").cloned().unwrap_or(Value::Null))
            .unwrap_or(Validity::FullPipeline);
        let (scores, recommended) = validation.remove(id).unwrap_or_default();
        products.push(ProductValidation {
            product_id: id.to_string(),
            validity,
            length: d.get("length").and_then(Value::as_u64).unwrap_or(0) as usize,
            holdout: d.get("holdout").and_then(Value::as_u64).unwrap_or(0) as usize,
            scores,
            failures: Vec::new(),
            recommended,
            no_model: d.get("no_model").and_then(Value::as_bool).unwrap_or(false),
        });
    }
    for (id, (scores, recommended)) in validation {
        products.push(ProductValidation {
            product_id: id,
            validity: Validity::FullPipeline,
            length: 0,
            holdout: 0,
            scores,
            failures: Vec::new(),
            recommended,
            no_model: false,
        });
    }
    products.sort_by(|a, b| a.product_id.cmp(&b.product_id));
    let report = ValidationReport { frequency, holdout: 0, products };

    let mut horizon = 0;
    let mut bundle_products = Vec::new();
    for (id, list) in forecasts {
        horizon = horizon.max(list.iter().map(|f| f.horizon()).max().unwrap_or(0));
        let recommended = report.product(&id).and_then(|p| p.recommended).unwrap_or(ModelId::Naive);
        bundle_products.push(ProductForecast {
            product_id: id,
            forecasts: list,
            recommended,
            decomposition: None,
            reused: Vec::new(),
            failures: Vec::new(),
        });
    }
    Ok((report, ForecastBundle { frequency, horizon, products: bundle_products }))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// One row per scored product with both ratios.
pub fn ratios_csv(summary: &EvaluationSummary) -> String {
    let mut out = String::from(
        "product_id,recommended,best,recommended_nrmse,best_nrmse,naive_nrmse,recommended_ratio,best_ratio\n",
    );
    for p in &summary.products {
        let nrmse = |m: ModelId| p.metrics.get(&m).and_then(|s| s.nrmse);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            csv_field(&p.product_id),
            p.recommended,
            p.best,
            opt(nrmse(p.recommended)),
            opt(nrmse(p.best)),
            opt(nrmse(ModelId::Naive)),
            opt(p.recommended_ratio),
            opt(p.best_ratio)
        ));
    }
    out
}

/// Scores `forecasts_dir` against `actuals` and writes `evaluation.json`,
/// `ratios.csv` and `boxplot.svg` into `out_dir`.
pub fn run_evaluation(
    forecasts_dir: &Path,
    actuals: &Path,
    out_dir: &Path,
    alternative: Alternative,
) -> AppResult<EvaluationSummary> {
    let (report, bundle) = load_results(forecasts_dir)?;
    let actual_series: Vec<SalesSeries> = read_sales(actuals, bundle.frequency)?;
    let summary =
        summarize(&report, &bundle, &actual_series, alternative).map_err(|e| AppError::Input(e.to_string()))?;
    std::fs::create_dir_all(out_dir).map_err(|e| AppError::write(out_dir, e))?;
    let mut json = serde_json::to_string_pretty(&summary).map_err(|e| AppError::Internal(e.to_string()))?;
    json.push('\n');
    write_file(&out_dir.join("evaluation.json"), &json)?;
    write_file(&out_dir.join("ratios.csv"), &ratios_csv(&summary))?;
    let groups = vec![
        ("recommended".to_string(), summary.products.iter().filter_map(|p| p.recommended_ratio).collect()),
        ("best".to_string(), summary.products.iter().filter_map(|p| p.best_ratio).collect()),
    ];
    write_file(
        &out_dir.join("boxplot.svg"),
        &boxplot_svg("nRMSE ratio to the naive baseline", &groups, BOXPLOT_CLIP),
    )?;
    Ok(summary)
}
