//! `spec.json` for the synthetic generator.
//!
//! Either an array of product specs or an object `{"seed": N, "products":
//! [...]}`. Each product needs `product_id` and `kind`; `frequency`, `start`
//! (a period label such as `2015-01`), `length`, `level`, `amplitude`,
//! `trend`, `noise` and `seed` fall back to the archetype's defaults.

use std::path::Path;

use autocast_core::synth::{ArchetypeKind, ArchetypeSpec};
use autocast_core::{Frequency, Period};
use serde::Deserialize;

use crate::error::{read_to_string, AppError, AppResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductEntry {
    product_id: String,
    kind: ArchetypeKind,
    frequency: Option<Frequency>,
    start: Option<String>,
    length: Option<usize>,
    level: Option<f64>,
    amplitude: Option<f64>,
    trend: Option<f64>,
    noise: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpecFile {
    List(Vec<ProductEntry>),
    Corpus {
        seed: Option<u64>,
        products: Vec<ProductEntry>,
    },
}

/// Parsed generator input.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Corpus seed from the file, if given.
    pub seed: Option<u64>,
    /// One spec per product.
    pub products: Vec<ArchetypeSpec>,
}

fn resolve(entry: ProductEntry, index: usize) -> AppResult<ArchetypeSpec> {
    let mut spec = ArchetypeSpec::new(entry.product_id, entry.kind, index as u64);
    let frequency = entry.frequency.unwrap_or(Frequency::Monthly);
    if frequency == Frequency::Weekly {
        spec.frequency = frequency;
        spec.start = Period::new(frequency, 0);
        spec.length = if entry.kind == ArchetypeKind::ShortHistory { 78 } else { 416 };
    }
    if let Some(label) = entry.start {
        spec.start = Period::parse_label(frequency, &label)
            .map_err(|e| AppError::Input(format!("product '{}': start: {e}", spec.product_id)))?;
    }
    spec.length = entry.length.unwrap_or(spec.length);
    spec.level = entry.level.unwrap_or(spec.level);
    spec.amplitude = entry.amplitude.unwrap_or(spec.amplitude);
    spec.trend = entry.trend.unwrap_or(spec.trend);
    spec.noise = entry.noise.unwrap_or(spec.noise);
    spec.seed = entry.seed.unwrap_or(spec.seed);
    spec.validate().map_err(|e| AppError::Input(e.to_string()))?;
    Ok(spec)
}

/// Parses spec JSON text.
pub fn parse_synth_spec(text: &str) -> AppResult<SynthSpec> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| AppError::Input(format!("invalid spec: {e}")))?;
    let (seed, entries) = match file {
        SpecFile::List(list) => (None, list),
        SpecFile::Corpus { seed, products } => (seed, products),
    };
    let products = entries.into_iter().enumerate().map(|(i, e)| resolve(e, i)).collect::<AppResult<_>>()?;
    Ok(SynthSpec { seed, products })
}

/// Reads a spec file.
pub fn read_synth_spec(path: &Path) -> AppResult<SynthSpec> {
    parse_synth_spec(&read_to_string(path)?).map_err(|e| match e {
        AppError::Input(msg) => AppError::input(path, msg),
        other => other,
    })
}
