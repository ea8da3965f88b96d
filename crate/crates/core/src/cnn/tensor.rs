use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A `channels × len` tensor, channel-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    /// Number of channels.
    pub channels: usize,
    /// Time steps.
    pub len: usize,
    /// `data[c * len + t]`.
    pub data: Vec<f64>,
}

impl Tensor {
    /// All-zero tensor.
    pub fn zeros(channels: usize, len: usize) -> Self {
        Self { channels, len, data: vec![0.0; channels * len] }
    }

    /// Single-channel tensor from a series.
    pub fn from_series(values: &[f64]) -> Self {
        Self { channels: 1, len: values.len(), data: values.to_vec() }
    }

    /// Value at channel `c`, time `t`.
    pub fn at(&self, c: usize, t: usize) -> f64 {
        self.data[c * self.len + t]
    }

    /// One channel as a slice.
    pub fn channel(&self, c: usize) -> &[f64] {
        &self.data[c * self.len..(c + 1) * self.len]
    }
}

/// A causal dilated convolution.
///
/// `out[o][t] = bias[o] + Σᵢ Σₖ w[o][i][k] · x[i][t - (K-1-k)·dilation]`,
/// with zeros before the start of the input. Tap `K-1` reads the current
/// step, so weights `[0, 1]` pass the input through unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvLayer {
    /// Input channels.
    pub in_channels: usize,
    /// Output channels.
    pub out_channels: usize,
    /// Taps per filter.
    pub kernel: usize,
    /// Spacing between taps.
    pub dilation: usize,
    /// `weight[(o * in_channels + i) * kernel + k]`.
    pub weight: Vec<f64>,
    /// One bias per output channel.
    pub bias: Vec<f64>,
}

impl ConvLayer {
    /// Zero-initialized layer.
    pub fn zeros(in_channels: usize, out_channels: usize, kernel: usize, dilation: usize) -> Self {
        Self {
            in_channels,
            out_channels,
            kernel,
            dilation,
            weight: vec![0.0; out_channels * in_channels * kernel],
            bias: vec![0.0; out_channels],
        }
    }

    #[inline]
    pub(crate) fn w(&self, o: usize, i: usize, k: usize) -> f64 {
        self.weight[(o * self.in_channels + i) * self.kernel + k]
    }

    /// Backward shift of tap `k`.
    #[inline]
    pub(crate) fn shift(&self, k: usize) -> usize {
        (self.kernel - 1 - k) * self.dilation
    }

    pub(crate) fn forward_into(&self, x: &Tensor, out: &mut Tensor) {
        let len = x.len;
        out.channels = self.out_channels;
        out.len = len;
        out.data.resize(self.out_channels * len, 0.0);
        for o in 0..self.out_channels {
            let row = &mut out.data[o * len..(o + 1) * len];
            row.iter_mut().for_each(|v| *v = self.bias[o]);
            for i in 0..self.in_channels {
                let xi = x.channel(i);
                for k in 0..self.kernel {
                    let w = self.w(o, i, k);
                    let s = self.shift(k);
                    if w == 0.0 || s >= len {
                        continue;
                    }
                    for (r, xv) in row[s..].iter_mut().zip(&xi[..len - s]) {
                        *r += w * xv;
                    }
                }
            }
        }
    }
}

/// Applies one causal dilated convolution; output length equals input length.
pub fn conv1d_dilated_forward(input: &Tensor, layer: &ConvLayer) -> Result<Tensor> {
    if input.channels != layer.in_channels {
        return Err(Error::Length { expected: layer.in_channels, actual: input.channels });
    }
    if input.data.len() != input.channels * input.len {
        return Err(Error::Length { expected: input.channels * input.len, actual: input.data.len() });
    }
    let span = (layer.kernel - 1) * layer.dilation;
    if input.len <= span {
        return Err(Error::TooShort { needed: span + 1, got: input.len });
    }
    let mut out = Tensor::zeros(layer.out_channels, input.len);
    layer.forward_into(input, &mut out);
    Ok(out)
}
