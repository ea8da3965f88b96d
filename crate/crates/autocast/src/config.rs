//! Pipeline configuration from a JSON object.
//!
//! Recognized keys: `frequency` ("monthly" | "weekly"), `horizon`, `holdout`,
//! `models`, `ensemble_members`, `seed`, `gam_lambda_ratios`, `input`,
//! `output`, `workers` (0 picks the number of CPUs). Missing keys take their
//! defaults; `horizon` and `holdout` default by frequency. Unknown keys are
//! rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use autocast_core::models::lasso::default_lambda_ratios;
use autocast_core::models::{ModelId, Penalty};
use autocast_core::zoo::ZooConfig;
use autocast_core::Frequency;
use serde_json::{json, Map, Value};

use crate::error::{read_to_string, AppError, AppResult};

/// Everything a pipeline run needs besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Period granularity of the run.
    pub frequency: Frequency,
    /// Periods forecast.
    pub horizon: usize,
    /// Validation holdout for full histories.
    pub holdout: usize,
    /// Enabled models.
    pub models: Vec<ModelId>,
    /// Members of the median ensemble.
    pub ensemble_members: Vec<ModelId>,
    /// Seed for the CNN.
    pub seed: u64,
    /// GAM penalty grid as fractions of the largest useful penalty.
    pub gam_lambda_ratios: Vec<f64>,
    /// Sales CSV.
    pub input: Option<PathBuf>,
    /// Output directory.
    pub output: Option<PathBuf>,
    /// Worker threads; 0 means one per CPU.
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::for_frequency(Frequency::Monthly)
    }
}

fn key_error(key: &str, msg: impl std::fmt::Display) -> AppError {
    AppError::Input(format!("config key '{key}': {msg}"))
}

fn as_usize(key: &str, v: &Value) -> AppResult<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| key_error(key, "expected a non-negative integer"))
}

fn as_models(key: &str, v: &Value) -> AppResult<Vec<ModelId>> {
    let items = v.as_array().ok_or_else(|| key_error(key, "expected an array of model names"))?;
    let mut out = Vec::new();
    for item in items {
        let name = item.as_str().ok_or_else(|| key_error(key, "expected model names as strings"))?;
        let model = ModelId::from_str(name).map_err(|e| key_error(key, e))?;
        if !out.contains(&model) {
            out.push(model);
        }
    }
    out.sort_by_key(|m: &ModelId| m.priority());
    Ok(out)
}

impl PipelineConfig {
    /// Defaults for a frequency.
    pub fn for_frequency(frequency: Frequency) -> Self {
        Self {
            frequency,
            horizon: frequency.default_horizon(),
            holdout: frequency.default_holdout(),
            models: ModelId::BY_PRIORITY.to_vec(),
            ensemble_members: ModelId::ENSEMBLE_MEMBERS.to_vec(),
            seed: 0,
            gam_lambda_ratios: default_lambda_ratios(),
            input: None,
            output: None,
            workers: 0,
        }
    }

    /// Parses a JSON object.
    pub fn from_json_str(text: &str) -> AppResult<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| AppError::Input(format!("config is not valid JSON: {e}")))?;
        let Value::Object(map) = value else {
            return Err(AppError::Input("config must be a JSON object".into()));
        };
        Self::from_map(&map)
    }

    fn from_map(map: &Map<String, Value>) -> AppResult<Self> {
        let frequency = match map.get("frequency") {
            None => Frequency::Monthly,
            Some(v) => match v.as_str().map(str::to_ascii_lowercase).as_deref() {
                Some("monthly") => Frequency::Monthly,
                Some("weekly") => Frequency::Weekly,
                _ => return Err(key_error("frequency", "expected \"monthly\" or \"weekly\"")),
            },
        };
        let mut c = Self::for_frequency(frequency);
        for (key, v) in map {
            match key.as_str() {
                "frequency" => {}
                "horizon" => c.horizon = as_usize(key, v)?,
                "holdout" => c.holdout = as_usize(key, v)?,
                "models" => c.models = as_models(key, v)?,
                "ensemble_members" => c.ensemble_members = as_models(key, v)?,
                "seed" => c.seed = v.as_u64().ok_or_else(|| key_error(key, "expected a non-negative integer"))?,
                "gam_lambda_ratios" => {
                    let items = v.as_array().ok_or_else(|| key_error(key, "expected an array of numbers"))?;
                    c.gam_lambda_ratios = items
                        .iter()
                        .map(|x| x.as_f64().filter(|r| r.is_finite() && *r > 0.0))
                        .collect::<Option<Vec<f64>>>()
                        .ok_or_else(|| key_error(key, "ratios must be positive numbers"))?;
                }
                "input" => c.input = Some(v.as_str().ok_or_else(|| key_error(key, "expected a path"))?.into()),
                "output" => c.output = Some(v.as_str().ok_or_else(|| key_error(key, "expected a path"))?.into()),
                "workers" => c.workers = as_usize(key, v)?,
                other => return Err(key_error(other, "unknown key")),
            }
        }
        if !map.contains_key("ensemble_members") {
            let models = c.models.clone();
            c.ensemble_members.retain(|m| models.contains(m));
        }
        c.check()?;
        Ok(c)
    }

    /// Validates ranges and cross-key constraints.
    pub fn check(&self) -> AppResult<()> {
        if self.horizon == 0 {
            return Err(key_error("horizon", "must be at least 1"));
        }
        if self.holdout < 3 {
            return Err(key_error("holdout", "must be at least 3"));
        }
        if self.gam_lambda_ratios.is_empty() {
            return Err(key_error("gam_lambda_ratios", "must not be empty"));
        }
        if self.ensemble_members.contains(&ModelId::EnsembleMedian) {
            return Err(key_error("ensemble_members", "the ensemble cannot be its own member"));
        }
        if let Some(m) = self.ensemble_members.iter().find(|m| !self.models.contains(m)) {
            return Err(key_error("ensemble_members", format!("{m} is not in models")));
        }
        Ok(())
    }

    /// Settings for the model zoo.
    pub fn zoo(&self) -> ZooConfig {
        ZooConfig {
            frequency: self.frequency,
            horizon: self.horizon,
            holdout: self.holdout,
            models: self.models.clone(),
            ensemble_members: self.ensemble_members.clone(),
            gam_penalty: Penalty::Grid(self.gam_lambda_ratios.clone()),
            seed: self.seed,
        }
    }

    /// The settings that affect results, as JSON (paths and worker count are
    /// left out so outputs do not depend on them).
    pub fn echo(&self) -> Value {
        let names = |ms: &[ModelId]| ms.iter().map(|m| m.as_str()).collect::<Vec<_>>();
        json!({
            "frequency": self.frequency.as_str(),
            "horizon": self.horizon,
            "holdout": self.holdout,
            "models": names(&self.models),
            "ensemble_members": names(&self.ensemble_members),
            "seed": self.seed,
            "gam_lambda_ratios": self.gam_lambda_ratios,
        })
    }
}

/// Reads a configuration file.
pub fn parse_config(path: &Path) -> AppResult<PipelineConfig> {
    PipelineConfig::from_json_str(&read_to_string(path)?).map_err(|e| match e {
        AppError::Input(msg) => AppError::input(path, msg),
        other => other,
    })
}
