//! Adam optimizer with bias correction.

use super::layer::{Gradients, NetworkParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamConfig {
            learning_rate,
            ..AdamConfig::default()
        }
    }
}

/// First/second moment accumulators mirroring a network's parameter shapes.
#[derive(Debug, Clone)]
pub struct AdamState {
    config: AdamConfig,
    t: u64,
    layers: Vec<LayerMoments>,
}

#[derive(Debug, Clone)]
struct LayerMoments {
    m_w: Vec<f64>,
    v_w: Vec<f64>,
    m_b: Vec<f64>,
    v_b: Vec<f64>,
}

impl AdamState {
    pub fn new(net: &NetworkParams, config: AdamConfig) -> Self {
        AdamState {
            config,
            t: 0,
            layers: net
                .layers
                .iter()
                .map(|l| LayerMoments {
                    m_w: vec![0.0; l.weights.len()],
                    v_w: vec![0.0; l.weights.len()],
                    m_b: vec![0.0; l.bias.len()],
                    v_b: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One Adam update; deterministic, mutating parameters and state in place.
pub fn adam_step(state: &mut AdamState, params: &mut NetworkParams, grads: &Gradients) -> Result<()> {
    if state.layers.len() != params.layers.len() || grads.layers.len() != params.layers.len() {
        return Err(Error::dimension(
            "optimizer state / gradients do not match network".to_string(),
        ));
    }
    for ((moments, layer), grad) in state.layers.iter().zip(&params.layers).zip(&grads.layers) {
        if moments.m_w.len() != layer.weights.len()
            || grad.d_weights.len() != layer.weights.len()
            || grad.d_bias.len() != layer.bias.len()
        {
            return Err(Error::dimension(
                "optimizer state / gradients do not match network".to_string(),
            ));
        }
    }

    state.t += 1;
    let AdamConfig {
        learning_rate,
        beta1,
        beta2,
        epsilon,
    } = state.config;
    let bias1 = 1.0 - beta1.powi(state.t as i32);
    let bias2 = 1.0 - beta2.powi(state.t as i32);

    for ((moments, layer), grad) in state
        .layers
        .iter_mut()
        .zip(&mut params.layers)
        .zip(&grads.layers)
    {
        update(
            &mut layer.weights,
            &grad.d_weights,
            &mut moments.m_w,
            &mut moments.v_w,
            learning_rate,
            beta1,
            beta2,
            epsilon,
            bias1,
            bias2,
        );
        update(
            &mut layer.bias,
            &grad.d_bias,
            &mut moments.m_b,
            &mut moments.v_b,
            learning_rate,
            beta1,
            beta2,
            epsilon,
            bias1,
            bias2,
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    bias1: f64,
    bias2: f64,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let m_hat = m[i] / bias1;
        let v_hat = v[i] / bias2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + epsilon);
    }
}
