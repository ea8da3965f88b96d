use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tensor::{ConvLayer, Tensor};
use super::CnnConfig;
use crate::num::sqrt;
use crate::rng::SplitMix64;

/// Convolution stack plus a dense head on the last time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    /// Convolutions, each followed by ReLU.
    pub layers: Vec<ConvLayer>,
    /// Head weights, one per channel of the last layer.
    pub head_weight: Vec<f64>,
    /// Head bias.
    pub head_bias: f64,
}

/// Parameter derivatives, shaped like a [`Network`].
pub type Gradients = Network;

/// Activations kept from a forward pass for backpropagation.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    acts: Vec<Tensor>,
    grad: Tensor,
    grad_in: Tensor,
}

impl Default for Tensor {
    fn default() -> Self {
        Tensor::zeros(0, 0)
    }
}

impl Network {
    /// He-uniform initialization from `rng`; the head bias starts at `head_bias`.
    pub fn init(config: &CnnConfig, rng: &mut SplitMix64, head_bias: f64) -> Self {
        let mut layers = Vec::with_capacity(config.dilations.len());
        let mut in_ch = 1;
        for &d in &config.dilations {
            let mut layer = ConvLayer::zeros(in_ch, config.channels, config.kernel, d);
            let bound = sqrt(6.0 / (in_ch * config.kernel) as f64);
            for w in &mut layer.weight {
                *w = rng.uniform(-bound, bound);
            }
            layers.push(layer);
            in_ch = config.channels;
        }
        let bound = sqrt(6.0 / in_ch as f64);
        let head_weight = (0..in_ch).map(|_| rng.uniform(-bound, bound) * 0.1).collect();
        Self { layers, head_weight, head_bias }
    }

    /// Same shape, all parameters zero.
    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| ConvLayer::zeros(l.in_channels, l.out_channels, l.kernel, l.dilation))
                .collect(),
            head_weight: vec![0.0; self.head_weight.len()],
            head_bias: 0.0,
        }
    }

    /// Total number of trainable parameters.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum::<usize>()
            + self.head_weight.len()
            + 1
    }

    /// Steps of input that can influence the output.
    pub fn receptive_field(&self) -> usize {
        1 + self.layers.iter().map(|l| (l.kernel - 1) * l.dilation).sum::<usize>()
    }

    /// Output of the convolution stack (after the final ReLU) for every step.
    pub fn conv_stack(&self, input: &[f64]) -> Tensor {
        let mut scratch = Scratch::default();
        self.run(input, &mut scratch);
        scratch.acts.pop().unwrap_or_default()
    }

    /// Prediction for the step after `input`.
    pub fn forward(&self, input: &[f64]) -> f64 {
        let mut scratch = Scratch::default();
        self.forward_with(input, &mut scratch)
    }

    /// Forward pass that keeps activations in `scratch`. Only the trailing
    /// receptive field is evaluated; earlier steps cannot reach the head.
    pub(crate) fn forward_with(&self, input: &[f64], scratch: &mut Scratch) -> f64 {
        let keep = self.receptive_field().min(input.len());
        self.run(&input[input.len() - keep..], scratch);
        let last = scratch.acts.last().expect("at least the input");
        let t = last.len - 1;
        self.head_bias
            + self.head_weight.iter().enumerate().map(|(c, w)| w * last.at(c, t)).sum::<f64>()
    }

    fn run(&self, input: &[f64], scratch: &mut Scratch) {
        scratch.acts.resize_with(self.layers.len() + 1, Tensor::default);
        let first = &mut scratch.acts[0];
        first.channels = 1;
        first.len = input.len();
        first.data.clear();
        first.data.extend_from_slice(input);
        for (l, layer) in self.layers.iter().enumerate() {
            let (done, rest) = scratch.acts.split_at_mut(l + 1);
            let out = &mut rest[0];
            layer.forward_into(&done[l], out);
            out.data.iter_mut().for_each(|v| *v = v.max(0.0));
        }
    }

    /// Adds `d_out · ∂output/∂θ` to `grads`, using activations from the last
    /// [`forward_with`](Self::forward_with) on `scratch`.
    pub(crate) fn backward(&self, scratch: &mut Scratch, d_out: f64, grads: &mut Gradients) {
        let Scratch { acts, grad, grad_in } = scratch;
        let top = acts.last().expect("forward ran");
        let (channels, len) = (top.channels, top.len);
        grads.head_bias += d_out;
        *grad = Tensor::zeros(channels, len);
        for c in 0..channels {
            grads.head_weight[c] += d_out * top.at(c, len - 1);
            grad.data[c * len + len - 1] = d_out * self.head_weight[c];
        }
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let g = &mut grads.layers[l];
            let out = &acts[l + 1];
            let x = &acts[l];
            for (d, a) in grad.data.iter_mut().zip(&out.data) {
                if *a <= 0.0 {
                    *d = 0.0;
                }
            }
            let need_input = l > 0;
            if need_input {
                *grad_in = Tensor::zeros(x.channels, len);
            }
            for o in 0..layer.out_channels {
                let dz = &grad.data[o * len..(o + 1) * len];
                let first = match dz.iter().position(|v| *v != 0.0) {
                    Some(p) => p,
                    None => continue,
                };
                g.bias[o] += dz[first..].iter().sum::<f64>();
                for i in 0..layer.in_channels {
                    let xi = x.channel(i);
                    for k in 0..layer.kernel {
                        let s = layer.shift(k);
                        let start = first.max(s);
                        if start >= len {
                            continue;
                        }
                        let mut acc = 0.0;
                        for t in start..len {
                            acc += dz[t] * xi[t - s];
                        }
                        g.weight[(o * layer.in_channels + i) * layer.kernel + k] += acc;
                        if need_input {
                            let w = layer.w(o, i, k);
                            let gi = &mut grad_in.data[i * len..(i + 1) * len];
                            for t in start..len {
                                gi[t - s] += w * dz[t];
                            }
                        }
                    }
                }
            }
            if need_input {
                core::mem::swap(grad, grad_in);
            }
        }
    }

    /// Squared error `(forward(input) - target)²` and its gradient.
    pub fn loss_gradient(&self, input: &[f64], target: f64) -> (f64, Gradients) {
        let mut scratch = Scratch::default();
        let e = self.forward_with(input, &mut scratch) - target;
        let mut grads = self.zeros_like();
        self.backward(&mut scratch, 2.0 * e, &mut grads);
        (e * e, grads)
    }

    /// Every parameter flattened: each layer's weights then biases, first
    /// layer first, then the head weights and bias.
    pub fn parameters(&self) -> Vec<f64> {
        self.params().into_iter().flatten().copied().collect()
    }

    /// Inverse of [`parameters`](Self::parameters).
    pub fn set_parameters(&mut self, values: &[f64]) -> crate::Result<()> {
        let expected = self.param_count();
        if values.len() != expected {
            return Err(crate::Error::Length { expected, actual: values.len() });
        }
        let mut it = values.iter();
        for slot in self.params_mut().into_iter().flatten() {
            *slot = *it.next().expect("length checked");
        }
        Ok(())
    }

    /// Index range within [`parameters`](Self::parameters) of each layer
    /// (`conv1`, `conv2`, ..., `head`).
    pub fn parameter_groups(&self) -> Vec<(alloc::string::String, core::ops::Range<usize>)> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, l) in self.layers.iter().enumerate() {
            let end = start + l.weight.len() + l.bias.len();
            out.push((alloc::format!("conv{}", i + 1), start..end));
            start = end;
        }
        out.push((alloc::string::String::from("head"), start..start + self.head_weight.len() + 1));
        out
    }

    /// Parameter slices in a fixed order.
    pub(crate) fn params_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for l in &mut self.layers {
            out.push(&mut l.weight);
            out.push(&mut l.bias);
        }
        out.push(&mut self.head_weight);
        out.push(core::slice::from_mut(&mut self.head_bias));
        out
    }

    pub(crate) fn params(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for l in &self.layers {
            out.push(&l.weight);
            out.push(&l.bias);
        }
        out.push(&self.head_weight);
        out.push(core::slice::from_ref(&self.head_bias));
        out
    }

    pub(crate) fn clear(&mut self) {
        for s in self.params_mut() {
            s.iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

/// Adam optimizer state.
#[derive(Debug, Clone)]
pub(crate) struct Adam {
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    pub(crate) fn new(lr: f64, params: usize) -> Self {
        Self { lr, m: vec![0.0; params], v: vec![0.0; params], t: 0 }
    }

    pub(crate) fn step(&mut self, net: &mut Network, grads: &Gradients) {
        self.t += 1;
        let c1 = 1.0 - crate::num::powi(Self::BETA1, self.t);
        let c2 = 1.0 - crate::num::powi(Self::BETA2, self.t);
        let mut idx = 0;
        for (p, g) in net.params_mut().into_iter().zip(grads.params()) {
            for (pv, gv) in p.iter_mut().zip(g) {
                let m = &mut self.m[idx];
                let v = &mut self.v[idx];
                *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * gv;
                *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * gv * gv;
                *pv -= self.lr * (*m / c1) / (sqrt(*v / c2) + Self::EPS);
                idx += 1;
            }
        }
    }
}
