//! Dense layers, forward passes, and backpropagation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::dropout::DropoutMask;
use crate::error::{Error, Result};

/// Elementwise activation applied after a layer's affine map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let a = 1.0 / (1.0 + (-z).exp());
                // float saturation must not leave the open interval (0,1)
                a.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
            }
        }
    }

    /// Derivative with respect to the pre-activation `z`.
    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let a = 1.0 / (1.0 + (-z).exp());
                a * (1.0 - a)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Identity => "identity",
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "identity" => Some(Activation::Identity),
            "relu" => Some(Activation::Relu),
            "sigmoid" => Some(Activation::Sigmoid),
            _ => None,
        }
    }
}

/// One fully-connected layer: `activation(W x + b)`.
#[derive(Debug, Clone)]
pub struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major `out_dim × in_dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        DenseLayer {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
            activation,
        }
    }

    /// He-style uniform initialization scaled by fan-in; biases start at zero.
    pub fn init(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut ChaCha8Rng) -> Self {
        let limit = (6.0 / in_dim as f64).sqrt();
        let mut layer = DenseLayer::zeros(in_dim, out_dim, activation);
        for w in &mut layer.weights {
            *w = rng.random_range(-limit..limit);
        }
        layer
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.in_dim..(i + 1) * self.in_dim]
    }
}

/// An ordered stack of dense layers with chained dimensions.
#[derive(Debug, Clone)]
pub struct NetworkParams {
    pub layers: Vec<DenseLayer>,
}

/// Per-layer activations cached by [`NetworkParams::forward`] for backprop.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    input: Vec<f64>,
    /// Pre-activations; entries of dropped units are never computed (left 0).
    pre: Vec<Vec<f64>>,
    /// Post-activations after mask scaling; layer outputs as seen downstream.
    post: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.post.last().expect("cache has at least one layer")
    }
}

/// Gradients of a scalar loss with respect to every parameter, plus the
/// gradient with respect to the network input (used to chain encoder and
/// decoder during training).
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
    pub input: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LayerGrad {
    pub d_weights: Vec<f64>,
    pub d_bias: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(net: &NetworkParams) -> Self {
        Gradients {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrad {
                    d_weights: vec![0.0; l.weights.len()],
                    d_bias: vec![0.0; l.bias.len()],
                })
                .collect(),
            input: vec![0.0; net.input_dim()],
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (acc, g) in self.layers.iter_mut().zip(&other.layers) {
            for (a, b) in acc.d_weights.iter_mut().zip(&g.d_weights) {
                *a += b;
            }
            for (a, b) in acc.d_bias.iter_mut().zip(&g.d_bias) {
                *a += b;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for layer in &mut self.layers {
            for g in &mut layer.d_weights {
                *g *= factor;
            }
            for g in &mut layer.d_bias {
                *g *= factor;
            }
        }
    }
}

/// Reusable buffers for the allocation-free forward path.
#[derive(Debug, Default)]
pub struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl NetworkParams {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        let net = NetworkParams { layers };
        net.validate()?;
        Ok(net)
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.in_dim)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.out_dim)
    }

    /// Dimension chaining and parameter finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::dimension("network has no layers"));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.weights.len() != layer.in_dim * layer.out_dim
                || layer.bias.len() != layer.out_dim
            {
                return Err(Error::dimension(format!(
                    "layer {i}: parameter buffers disagree with {}×{}",
                    layer.out_dim, layer.in_dim
                )));
            }
            if i + 1 < self.layers.len() && self.layers[i + 1].in_dim != layer.out_dim {
                return Err(Error::dimension(format!(
                    "layer {i} emits {} values but layer {} expects {}",
                    layer.out_dim,
                    i + 1,
                    self.layers[i + 1].in_dim
                )));
            }
            if layer.weights.iter().chain(&layer.bias).any(|v| !v.is_finite()) {
                return Err(Error::dimension(format!("layer {i} has non-finite parameters")));
            }
        }
        Ok(())
    }

    /// Mask layout for decoder-style dropout: every hidden layer is masked,
    /// the output layer never is.
    pub fn hidden_mask_layout(&self) -> Vec<Option<usize>> {
        let last = self.layers.len() - 1;
        self.layers
            .iter()
            .enumerate()
            .map(|(i, l)| if i == last { None } else { Some(l.out_dim) })
            .collect()
    }

    fn check_mask(&self, mask: &DropoutMask) -> Result<()> {
        if mask.layer_count() != self.layers.len() {
            return Err(Error::dimension(format!(
                "mask covers {} layers, network has {}",
                mask.layer_count(),
                self.layers.len()
            )));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if let Some(scales) = mask.layer(i) {
                if scales.len() != layer.out_dim {
                    return Err(Error::dimension(format!(
                        "mask layer {i} has {} entries, layer emits {}",
                        scales.len(),
                        layer.out_dim
                    )));
                }
            }
        }
        Ok(())
    }

    /// Layer-by-layer affine + activation; post-activations of masked layers
    /// are multiplied elementwise by the mask. Returns the output along with
    /// the cache needed by [`NetworkParams::backward`].
    pub fn forward(&self, x: &[f64], mask: Option<&DropoutMask>) -> Result<(Vec<f64>, ForwardCache)> {
        if x.len() != self.input_dim() {
            return Err(Error::dimension(format!(
                "input has {} values, network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        if let Some(m) = mask {
            self.check_mask(m)?;
        }
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len());
        let mut current: &[f64] = x;
        for (l, layer) in self.layers.iter().enumerate() {
            let scales = mask.and_then(|m| m.layer(l));
            let mut z = vec![0.0; layer.out_dim];
            let mut a = vec![0.0; layer.out_dim];
            for i in 0..layer.out_dim {
                // A dropped unit contributes nothing downstream; skip its dot product.
                let scale = scales.map_or(1.0, |s| s[i]);
                if scale == 0.0 {
                    continue;
                }
                let mut acc = layer.bias[i];
                for (w, v) in layer.row(i).iter().zip(current) {
                    acc += w * v;
                }
                z[i] = acc;
                a[i] = layer.activation.apply(acc) * scale;
            }
            pre.push(z);
            post.push(a);
            current = post.last().expect("just pushed");
        }
        let output = post.last().expect("validated non-empty").clone();
        Ok((
            output,
            ForwardCache {
                input: x.to_vec(),
                pre,
                post,
            },
        ))
    }

    /// Allocation-free forward pass for generation hot loops. `out` is
    /// resized to the output width.
    pub fn forward_into(
        &self,
        x: &[f64],
        mask: Option<&DropoutMask>,
        scratch: &mut Scratch,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::dimension(format!(
                "input has {} values, network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        if let Some(m) = mask {
            self.check_mask(m)?;
        }
        let last = self.layers.len() - 1;
        scratch.a.clear();
        scratch.a.extend_from_slice(x);
        for (l, layer) in self.layers.iter().enumerate() {
            let scales = mask.and_then(|m| m.layer(l));
            let target = if l == last { &mut *out } else { &mut scratch.b };
            target.clear();
            target.resize(layer.out_dim, 0.0);
            for i in 0..layer.out_dim {
                let scale = scales.map_or(1.0, |s| s[i]);
                if scale == 0.0 {
                    continue;
                }
                let mut acc = layer.bias[i];
                for (w, v) in layer.row(i).iter().zip(scratch.a.iter()) {
                    acc += w * v;
                }
                target[i] = layer.activation.apply(acc) * scale;
            }
            if l != last {
                std::mem::swap(&mut scratch.a, &mut scratch.b);
            }
        }
        Ok(())
    }

    /// Backpropagate `d_output` (gradient of the loss with respect to the
    /// network output) through the cached forward pass. The mask must be the
    /// one used in that forward call; it is applied symmetrically here.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        mask: Option<&DropoutMask>,
        d_output: &[f64],
    ) -> Result<Gradients> {
        if cache.post.len() != self.layers.len() || cache.input.len() != self.input_dim() {
            return Err(Error::dimension(
                "forward cache does not match this network".to_string(),
            ));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if cache.pre[l].len() != layer.out_dim {
                return Err(Error::dimension(format!(
                    "forward cache layer {l} width {} does not match layer output {}",
                    cache.pre[l].len(),
                    layer.out_dim
                )));
            }
        }
        if d_output.len() != self.output_dim() {
            return Err(Error::dimension(format!(
                "output gradient has {} values, network emits {}",
                d_output.len(),
                self.output_dim()
            )));
        }
        if let Some(m) = mask {
            self.check_mask(m)?;
        }

        let mut grads = Gradients::zeros_like(self);
        // delta = dL/d(post-activations of the current layer)
        let mut delta = d_output.to_vec();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let scales = mask.and_then(|m| m.layer(l));
            let prev: &[f64] = if l == 0 { &cache.input } else { &cache.post[l - 1] };
            let mut d_prev = vec![0.0; layer.in_dim];
            let grad = &mut grads.layers[l];
            for i in 0..layer.out_dim {
                let scale = scales.map_or(1.0, |s| s[i]);
                if scale == 0.0 {
                    continue;
                }
                let dz = delta[i] * scale * layer.activation.derivative(cache.pre[l][i]);
                if dz == 0.0 {
                    continue;
                }
                grad.d_bias[i] = dz;
                let w_row = layer.row(i);
                let g_row = &mut grad.d_weights[i * layer.in_dim..(i + 1) * layer.in_dim];
                for j in 0..layer.in_dim {
                    g_row[j] = dz * prev[j];
                    d_prev[j] += dz * w_row[j];
                }
            }
            delta = d_prev;
        }
        grads.input = delta;
        Ok(grads)
    }
}
