use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::network::{Adam, Network, Scratch};
use super::{CnnConfig, NormStats};
use crate::models::{iterate_one_step, ModelId};
use crate::rng::SplitMix64;
use crate::{Error, ForecastResult, Result, SalesSeries};

/// Patience counter on a validation loss.
///
/// An epoch counts as a non-improvement when its loss is not strictly below
/// the best so far; training stops once `patience` of them occur in a row.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    best_epoch: usize,
    epoch: usize,
    waited: usize,
}

impl EarlyStopping {
    /// New counter.
    pub fn new(patience: usize) -> Self {
        Self { patience, best: f64::INFINITY, best_epoch: 0, epoch: 0, waited: 0 }
    }

    /// Records one epoch's loss and returns whether it improved on the best.
    pub fn observe(&mut self, loss: f64) -> bool {
        self.epoch += 1;
        if loss < self.best {
            self.best = loss;
            self.best_epoch = self.epoch;
            self.waited = 0;
            true
        } else {
            self.waited += 1;
            false
        }
    }

    /// True once `patience` consecutive epochs failed to improve.
    pub fn should_stop(&self) -> bool {
        self.waited >= self.patience
    }

    /// Lowest loss seen.
    pub fn best(&self) -> f64 {
        self.best
    }

    /// 1-based epoch of the lowest loss, 0 before any observation.
    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

/// What happened during training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Training windows.
    pub train_windows: usize,
    /// Validation windows.
    pub validation_windows: usize,
    /// Epochs run before stopping.
    pub epochs_run: usize,
    /// Epoch whose weights were kept (0 means the initial weights).
    pub best_epoch: usize,
    /// Training loss; entry 0 is before the first update, later entries are
    /// the mean batch loss of each epoch.
    pub train_loss: Vec<f64>,
    /// Validation loss per epoch (entry 0 is before training).
    pub validation_loss: Vec<f64>,
}

/// A trained shared network with the scales of the products it saw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedCnn {
    /// Configuration used, including the seed.
    pub config: CnnConfig,
    /// Weights of the kept epoch.
    pub network: Network,
    /// Scale per training product.
    pub stats: BTreeMap<String, NormStats>,
    /// Training record.
    pub report: TrainReport,
}

struct Window {
    product: usize,
    end: usize,
}

fn mse(net: &Network, data: &[Vec<f64>], windows: &[Window], width: usize, scratch: &mut Scratch) -> f64 {
    if windows.is_empty() {
        return f64::NAN;
    }
    let mut total = 0.0;
    for w in windows {
        let series = &data[w.product];
        let e = net.forward_with(&series[w.end - width..w.end], scratch) - series[w.end];
        total += e * e;
    }
    total / windows.len() as f64
}

/// Trains one network on windows pooled from every product in `corpus`.
///
/// Windows are ordered by the period of their target; the latest
/// `validation_fraction` of them drive early stopping and the best epoch's
/// weights are returned.
pub fn train_shared_cnn(corpus: &[SalesSeries], config: &CnnConfig) -> Result<TrainedCnn> {
    let width = config.input_window;
    if width < config.receptive_field() || config.batch_size == 0 {
        return Err(Error::Fit(String::from("input window shorter than receptive field")));
    }
    if let Some(first) = corpus.first() {
        if corpus.iter().any(|s| s.frequency() != first.frequency()) {
            return Err(Error::FrequencyMismatch);
        }
    }
    let mut stats = BTreeMap::new();
    let mut data = Vec::with_capacity(corpus.len());
    let mut windows = Vec::new();
    for (p, series) in corpus.iter().enumerate() {
        let norm = NormStats::from_values(series.values());
        stats.insert(String::from(series.product_id()), norm);
        data.push(series.values().iter().map(|v| v / norm.scale).collect::<Vec<f64>>());
        for end in width..series.len() {
            windows.push(Window { product: p, end });
        }
    }
    if windows.is_empty() {
        return Err(Error::TooShort { needed: width + 1, got: corpus.iter().map(|s| s.len()).max().unwrap_or(0) });
    }
    windows.sort_by_key(|w| (corpus[w.product].start().index + w.end as u32, w.product));
    let n = windows.len();
    let n_val = if n < 2 { 0 } else { ((n as f64 * config.validation_fraction) as usize).clamp(1, n - 1) };
    let (train, val) = windows.split_at(n - n_val);

    let mut rng = SplitMix64::new(config.seed);
    let target_mean = train.iter().map(|w| data[w.product][w.end]).sum::<f64>() / train.len() as f64;
    let mut net = Network::init(config, &mut rng, target_mean);
    let mut grads = net.zeros_like();
    let mut adam = Adam::new(config.learning_rate, net.param_count());
    let mut scratch = Scratch::default();
    let check = if val.is_empty() { train } else { val };

    let initial = mse(&net, &data, train, width, &mut scratch);
    if !initial.is_finite() {
        return Err(Error::NonFinite(String::from("cnn")));
    }
    let mut train_loss = alloc::vec![initial];
    let mut validation_loss = alloc::vec![mse(&net, &data, check, width, &mut scratch)];
    let mut stopper = EarlyStopping::new(config.patience);
    stopper.observe(validation_loss[0]);
    let mut best = net.clone();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut epochs_run = 0;

    for _ in 0..config.max_epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            grads.clear();
            let scale = 2.0 / batch.len() as f64;
            for &i in batch {
                let w = &train[i];
                let series = &data[w.product];
                let e = net.forward_with(&series[w.end - width..w.end], &mut scratch) - series[w.end];
                epoch_loss += e * e;
                net.backward(&mut scratch, scale * e, &mut grads);
            }
            adam.step(&mut net, &grads);
        }
        epochs_run += 1;
        let v = mse(&net, &data, check, width, &mut scratch);
        train_loss.push(epoch_loss / train.len() as f64);
        validation_loss.push(v);
        if !v.is_finite() {
            break;
        }
        if stopper.observe(v) {
            best.clone_from(&net);
        }
        if stopper.should_stop() {
            break;
        }
    }

    let report = TrainReport {
        train_windows: train.len(),
        validation_windows: val.len(),
        epochs_run,
        best_epoch: stopper.best_epoch() - 1,
        train_loss,
        validation_loss,
    };
    Ok(TrainedCnn { config: config.clone(), network: best, stats, report })
}

/// Forecasts `horizon` steps by feeding predictions back as inputs.
///
/// The scale is recomputed from `train`, so multiplying a history by a
/// constant multiplies the forecast by the same constant.
pub fn cnn_forecast(model: &TrainedCnn, train: &SalesSeries, horizon: usize) -> Result<ForecastResult> {
    let width = model.config.input_window;
    if train.len() < width {
        return Err(Error::TooShort { needed: width, got: train.len() });
    }
    let norm = NormStats::from_values(train.values());
    let mut scratch = Scratch::default();
    let mut input = Vec::with_capacity(width);
    iterate_one_step(
        |history, _| {
            input.clear();
            input.extend(history[history.len() - width..].iter().map(|v| v / norm.scale));
            let y = model.network.forward_with(&input, &mut scratch) * norm.scale;
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::NonFinite(String::from("cnn")))
            }
        },
        train,
        horizon,
        ModelId::Cnn,
    )
}
