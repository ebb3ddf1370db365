//! Minimal dense-network numerical core.
//!
//! Forward/backward passes over stacks of fully-connected layers, inverted
//! dropout, the reconstruction/KL losses, and the Adam optimizer. Everything
//! is `f64`, allocation-light, and deterministic given explicit seeds; this
//! is the only place in the crate that touches network weights directly.

mod adam;
mod dropout;
mod layer;
mod loss;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use dropout::{sample_mask, sample_mask_with, DropoutMask};
pub use layer::{Activation, DenseLayer, ForwardCache, Gradients, LayerGrad, NetworkParams, Scratch};
pub use loss::{binary_cross_entropy, gaussian_kl, mse_loss, sum_squared_loss};
