//! CSV files: sales input, forecasts and validation scores.

use std::collections::BTreeMap;
use std::path::Path;

use autocast_core::models::ModelId;
use autocast_core::report::{ForecastBundle, ModelScore, ValidationReport};
use autocast_core::series::ingest_sales;
use autocast_core::{Error as CoreError, ForecastResult, Frequency, MetricSet, Period, SalesSeries};

use crate::error::{write_file, AppError, AppResult};

fn open(path: &Path) -> AppResult<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| AppError::read(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn columns<const N: usize>(
    path: &Path,
    reader: &mut csv::Reader<std::fs::File>,
    names: [&str; N],
) -> AppResult<[usize; N]> {
    let headers = reader.headers().map_err(|e| AppError::input(path, e))?.clone();
    let mut out = [0; N];
    for (slot, name) in out.iter_mut().zip(names) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| AppError::input(path, format!("missing column '{name}'")))?;
    }
    Ok(out)
}

fn line_of(record: &csv::StringRecord, fallback: usize) -> u64 {
    record.position().map_or(fallback as u64, |p| p.line())
}

/// Reads `product_id,date,quantity` records and aggregates them per product
/// and period. Errors name the file line.
pub fn read_sales(path: &Path, frequency: Frequency) -> AppResult<Vec<SalesSeries>> {
    let mut reader = open(path)?;
    let [pi, di, qi] = columns(path, &mut reader, ["product_id", "date", "quantity"])?;
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| AppError::input(path, e))?;
        let line = line_of(&row, i + 2);
        let field = |k: usize| row.get(k).unwrap_or("");
        let quantity: f64 = field(qi)
            .parse()
            .map_err(|_| AppError::input(path, format!("line {line}: invalid quantity '{}'", field(qi))))?;
        records.push((field(pi).to_string(), field(di).to_string(), quantity));
        lines.push(line);
    }
    ingest_sales(&records, frequency).map_err(|e| match e {
        CoreError::Ingestion { row, reason } => AppError::input(path, format!("line {}: {reason}", lines[row])),
        other => AppError::input(path, other),
    })
}

/// Writes series as sales records, one per period, dated at the period start.
pub fn write_sales(path: &Path, corpus: &[SalesSeries]) -> AppResult<()> {
    let mut out = String::from("product_id,date,quantity\n");
    for s in corpus {
        for (k, v) in s.values().iter().enumerate() {
            let d = s.start().offset(k).start_date();
            out.push_str(&format!("{},{:04}-{:02}-{:02},{}\n", csv_field(s.product_id()), d.year, d.month, d.day, v));
        }
    }
    write_file(path, &out)
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// `product_id,model_id,period,value` with values to six decimals.
pub fn forecasts_csv(bundle: &ForecastBundle) -> String {
    let mut out = String::from("product_id,model_id,period,value\n");
    for p in &bundle.products {
        let id = csv_field(&p.product_id);
        for f in &p.forecasts {
            for (k, v) in f.values().iter().enumerate() {
                out.push_str(&format!("{id},{},{},{v:.6}\n", f.model_id, f.start.offset(k).label()));
            }
        }
    }
    out
}

/// `product_id,model_id,rmse,nrmse,mape,recommended`, `NA` for undefined
/// metrics. Excluded products have no rows.
pub fn validation_csv(report: &ValidationReport) -> String {
    let mut out = String::from("product_id,model_id,rmse,nrmse,mape,recommended\n");
    for p in &report.products {
        let id = csv_field(&p.product_id);
        for s in &p.scores {
            let m = &s.metrics;
            let rec = u8::from(p.recommended == Some(s.model_id));
            out.push_str(&format!("{id},{},{},{},{},{rec}\n", s.model_id, m.rmse, opt(m.nrmse), opt(m.mape)));
        }
    }
    out
}

/// Frequency implied by a period label.
pub fn label_frequency(label: &str) -> Frequency {
    if label.contains('W') {
        Frequency::Weekly
    } else {
        Frequency::Monthly
    }
}

/// Forecasts read back from `forecasts.csv`, grouped by product in file
/// order, plus the file's frequency (monthly when the file is empty).
pub fn read_forecasts(path: &Path) -> AppResult<(Frequency, BTreeMap<String, Vec<ForecastResult>>)> {
    let mut reader = open(path)?;
    let [pi, mi, li, vi] = columns(path, &mut reader, ["product_id", "model_id", "period", "value"])?;
    let mut frequency = None;
    let mut series: BTreeMap<String, Vec<(ModelId, Period, Vec<f64>)>> = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| AppError::input(path, e))?;
        let line = line_of(&row, i + 2);
        let bad = |msg: String| AppError::input(path, format!("line {line}: {msg}"));
        let field = |k: usize| row.get(k).unwrap_or("");
        let label = field(li);
        let freq = *frequency.get_or_insert(label_frequency(label));
        let period = Period::parse_label(freq, label).map_err(|e| bad(e.to_string()))?;
        let model: ModelId = field(mi).parse().map_err(|e: CoreError| bad(e.to_string()))?;
        let value: f64 = field(vi).parse().map_err(|_| bad(format!("invalid value '{}'", field(vi))))?;
        let entry = series.entry(field(pi).to_string()).or_default();
        match entry.last_mut() {
            Some((m, start, values)) if *m == model => {
                if start.offset(values.len()) != period {
                    return Err(bad(format!("period {label} does not follow the previous row")));
                }
                values.push(value);
            }
            _ => {
                if entry.iter().any(|(m, _, _)| *m == model) {
                    return Err(bad(format!("rows for {model} are not contiguous")));
                }
                entry.push((model, period, vec![value]));
            }
        }
    }
    let mut out = BTreeMap::new();
    for (id, list) in series {
        let forecasts = list
            .into_iter()
            .map(|(m, start, values)| ForecastResult::new(id.clone(), m, start, values))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| AppError::input(path, e))?;
        out.insert(id, forecasts);
    }
    Ok((frequency.unwrap_or(Frequency::Monthly), out))
}

/// Scores and recommended model per product from `validation.csv`.
pub fn read_validation(path: &Path) -> AppResult<BTreeMap<String, (Vec<ModelScore>, Option<ModelId>)>> {
    let mut reader = open(path)?;
    let idx = columns(path, &mut reader, ["product_id", "model_id", "rmse", "nrmse", "mape", "recommended"])?;
    let mut out: BTreeMap<String, (Vec<ModelScore>, Option<ModelId>)> = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| AppError::input(path, e))?;
        let line = line_of(&row, i + 2);
        let bad = |msg: String| AppError::input(path, format!("line {line}: {msg}"));
        let field = |k: usize| row.get(idx[k]).unwrap_or("");
        let num = |k: usize| -> AppResult<Option<f64>> {
            match field(k) {
                "NA" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(format!("invalid number '{s}'"))),
            }
        };
        let model: ModelId = field(1).parse().map_err(|e: CoreError| bad(e.to_string()))?;
        let rmse = num(2)?.ok_or_else(|| bad("rmse is required".into()))?;
        let metrics = MetricSet { rmse, nrmse: num(3)?, mape: num(4)?, mape_skipped: 0 };
        let entry = out.entry(field(0).to_string()).or_default();
        entry.0.push(ModelScore { model_id: model, metrics });
        if field(5) == "1" {
            entry.1 = Some(model);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("x\"y"), "\"x\"\"y\"");
        assert_eq!(csv_field("plain"), "plain");
    }

    #[test]
    fn label_frequency_detection() {
        assert_eq!(label_frequency("2023-W05"), Frequency::Weekly);
        assert_eq!(label_frequency("2023-05"), Frequency::Monthly);
    }
}
