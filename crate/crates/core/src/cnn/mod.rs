//! Dilated causal convolutional network trained with shared weights.
//!
//! Four causal convolutions (kernel 2, dilations 1, 2, 4, 8, 16 channels,
//! ReLU) feed a dense head that reads the last time step and emits the next
//! value. Each product's window is divided by its own scale (mean of its
//! training history, at least 1) so one network can be trained on windows
//! pooled from the whole corpus.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::Frequency;

mod network;
mod tensor;
mod train;

pub use network::{Gradients, Network};
pub use tensor::{conv1d_dilated_forward, ConvLayer, Tensor};
pub use train::{cnn_forecast, train_shared_cnn, EarlyStopping, TrainReport, TrainedCnn};

/// Architecture and training settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnnConfig {
    /// Periods of history fed to the network.
    pub input_window: usize,
    /// Channels of every convolution.
    pub channels: usize,
    /// Convolution kernel size.
    pub kernel: usize,
    /// Dilation of each convolution, first layer first.
    pub dilations: Vec<usize>,
    /// Adam step size.
    pub learning_rate: f64,
    /// Windows per gradient step.
    pub batch_size: usize,
    /// Epoch cap.
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    /// Fraction of windows (latest in time) held out for early stopping.
    pub validation_fraction: f64,
    /// Seed for initialization and epoch shuffles.
    pub seed: u64,
}

impl CnnConfig {
    /// Default configuration for a frequency: 24 monthly or 104 weekly inputs.
    pub fn for_frequency(frequency: Frequency, seed: u64) -> Self {
        Self {
            input_window: match frequency {
                Frequency::Monthly => 24,
                Frequency::Weekly => 104,
            },
            channels: 16,
            kernel: 2,
            dilations: vec![1, 2, 4, 8],
            learning_rate: 1e-3,
            batch_size: 32,
            max_epochs: 100,
            patience: 5,
            validation_fraction: 0.1,
            seed,
        }
    }

    /// `1 + Σ (kernel - 1) · dilation`.
    pub fn receptive_field(&self) -> usize {
        1 + self.dilations.iter().map(|d| (self.kernel - 1) * d).sum::<usize>()
    }
}

/// Per-product normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    /// Divisor applied to inputs and multiplier applied to outputs.
    pub scale: f64,
}

impl NormStats {
    /// Mean of `values`, floored at 1.
    pub fn from_values(values: &[f64]) -> Self {
        Self { scale: crate::num::mean(values).max(1.0) }
    }
}
