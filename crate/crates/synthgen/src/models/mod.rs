//! The three trainable models: AE, VAE, and their MC-dropout variants.
//!
//! An encoder compresses `[0,1]`-encoded rows through hidden widths M and N
//! into an L-dimensional latent code (2L outputs for the VAE: means followed
//! by log-variances). The decoder mirrors it back through N and M with a
//! sigmoid output, so decoded values always lie in (0,1). Dropout, when
//! enabled, lives in the decoder's hidden layers only; the encoder is always
//! deterministic.

mod persist;

pub use persist::{load_model, save_model};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::nn::{
    adam_step, binary_cross_entropy, gaussian_kl, sample_mask_with, sum_squared_loss, Activation,
    AdamConfig, AdamState, DenseLayer, DropoutMask, Gradients, NetworkParams, Scratch,
};
use crate::seed::{derive_seed, rng_from};

/// Log-variance head is clamped to this symmetric range before
/// exponentiation; gradients are gated to zero where the clamp is active.
const LOG_VAR_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Ae,
    Vae,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ae => "ae",
            ModelKind::Vae => "vae",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "ae" => Some(ModelKind::Ae),
            "vae" => Some(ModelKind::Vae),
            _ => None,
        }
    }
}

/// Reconstruction term of the training objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReconLoss {
    /// Summed squared error (default).
    #[default]
    Mse,
    /// Summed binary cross-entropy.
    CrossEntropy,
}

impl ReconLoss {
    pub fn name(self) -> &'static str {
        match self {
            ReconLoss::Mse => "mse",
            ReconLoss::CrossEntropy => "cross-entropy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "mse" => Some(ReconLoss::Mse),
            "cross-entropy" => Some(ReconLoss::CrossEntropy),
            _ => None,
        }
    }
}

/// Architecture and training hyperparameters for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureConfig {
    pub input_width: usize,
    /// First (wider) hidden size.
    pub hidden_m: usize,
    /// Second hidden size.
    pub hidden_n: usize,
    /// Latent size L.
    pub latent: usize,
    /// Dropout keep probability for the MCD decoder.
    pub keep_rate: f64,
    pub model_kind: ModelKind,
    pub mcd_decoder: bool,
    pub recon_loss: ReconLoss,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl ArchitectureConfig {
    /// Defaults for a dataset of encoded width `input_width` that originally
    /// had `attribute_count` attributes: hidden sizes 512/256 shrunk to
    /// 8w/4w for narrow tables, and L = max(1, ⌊attributes/2⌋).
    pub fn for_dataset(
        input_width: usize,
        attribute_count: usize,
        model_kind: ModelKind,
        mcd_decoder: bool,
    ) -> Self {
        ArchitectureConfig {
            input_width,
            hidden_m: 512.min(8 * input_width),
            hidden_n: 256.min(4 * input_width),
            latent: (attribute_count / 2).max(1),
            keep_rate: 0.8,
            model_kind,
            mcd_decoder,
            recon_loss: ReconLoss::default(),
            epochs: 200,
            learning_rate: 1e-3,
            batch_size: 32,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_width == 0 {
            return Err(Error::invalid("input width must be at least 1"));
        }
        if !(self.hidden_m >= self.hidden_n && self.hidden_n >= self.latent && self.latent >= 1) {
            return Err(Error::invalid(format!(
                "sizes must satisfy M ≥ N ≥ L ≥ 1, got {} ≥ {} ≥ {}",
                self.hidden_m, self.hidden_n, self.latent
            )));
        }
        if !(self.keep_rate > 0.0 && self.keep_rate <= 1.0) {
            return Err(Error::invalid(format!(
                "keep_rate must be in (0, 1], got {}",
                self.keep_rate
            )));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::invalid("epochs and batch_size must be at least 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        Ok(())
    }

    /// Width of the encoder's output layer: L for AE, 2L (μ ∥ log_var) for VAE.
    fn encoder_output_width(&self) -> usize {
        match self.model_kind {
            ModelKind::Ae => self.latent,
            ModelKind::Vae => 2 * self.latent,
        }
    }
}

/// Per-instance latent Gaussian produced by a VAE encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentGaussian {
    pub mu: Vec<f64>,
    pub log_var: Vec<f64>,
}

impl LatentGaussian {
    /// σ = exp(log_var / 2).
    pub fn sigma(&self) -> Vec<f64> {
        self.log_var.iter().map(|lv| (0.5 * lv).exp()).collect()
    }
}

/// Encoder output: a plain latent point (AE) or a latent Gaussian (VAE).
#[derive(Debug, Clone, PartialEq)]
pub enum LatentCode {
    Point(Vec<f64>),
    Gaussian(LatentGaussian),
}

/// The reparameterization `z = μ + σ·ε` with `σ = exp(log_var/2)` and an
/// independent ε per latent coordinate. With ε = 0 the result equals μ
/// exactly; this is the path used both in training and in VAE generation.
pub fn reparameterize(mu: &[f64], log_var: &[f64], eps: &[f64]) -> Vec<f64> {
    mu.iter()
        .zip(log_var)
        .zip(eps)
        .map(|((&m, &lv), &e)| m + (0.5 * lv).exp() * e)
        .collect()
}

/// An immutable trained model.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub config: ArchitectureConfig,
    pub encoder: NetworkParams,
    pub decoder: NetworkParams,
    /// Fingerprint of the schema the training data was encoded with.
    pub schema_fingerprint: String,
    /// Mean training loss per epoch.
    pub loss_trace: Vec<f64>,
}

impl TrainedModel {
    /// Deterministic encoder forward; the encoder has no dropout path at all.
    pub fn encode(&self, x: &[f64]) -> Result<LatentCode> {
        let (out, _) = self.encoder.forward(x, None)?;
        Ok(match self.config.model_kind {
            ModelKind::Ae => LatentCode::Point(out),
            ModelKind::Vae => {
                let (mu, lv) = out.split_at(self.config.latent);
                LatentCode::Gaussian(LatentGaussian {
                    mu: mu.to_vec(),
                    log_var: lv
                        .iter()
                        .map(|v| v.clamp(-LOG_VAR_LIMIT, LOG_VAR_LIMIT))
                        .collect(),
                })
            }
        })
    }

    /// Decoder forward with sigmoid output; the mask is applied only when
    /// supplied.
    pub fn decode(&self, z: &[f64], mask: Option<&DropoutMask>) -> Result<Vec<f64>> {
        let (out, _) = self.decoder.forward(z, mask)?;
        Ok(out)
    }

    /// Allocation-free decode for generation hot loops.
    pub fn decode_into(
        &self,
        z: &[f64],
        mask: Option<&DropoutMask>,
        scratch: &mut Scratch,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        self.decoder.forward_into(z, mask, scratch, out)
    }

    /// Mask layout for the decoder's hidden layers.
    pub fn decoder_mask_layout(&self) -> Vec<Option<usize>> {
        self.decoder.hidden_mask_layout()
    }
}

fn build_encoder(config: &ArchitectureConfig, rng: &mut rand_chacha::ChaCha8Rng) -> Result<NetworkParams> {
    NetworkParams::new(vec![
        DenseLayer::init(config.input_width, config.hidden_m, Activation::Relu, rng),
        DenseLayer::init(config.hidden_m, config.hidden_n, Activation::Relu, rng),
        DenseLayer::init(config.hidden_n, config.encoder_output_width(), Activation::Identity, rng),
    ])
}

fn build_decoder(config: &ArchitectureConfig, rng: &mut rand_chacha::ChaCha8Rng) -> Result<NetworkParams> {
    NetworkParams::new(vec![
        DenseLayer::init(config.latent, config.hidden_n, Activation::Relu, rng),
        DenseLayer::init(config.hidden_n, config.hidden_m, Activation::Relu, rng),
        DenseLayer::init(config.hidden_m, config.input_width, Activation::Sigmoid, rng),
    ])
}

/// Train a model on encoded rows (the generator training split).
///
/// The AE minimizes reconstruction error; the VAE minimizes reconstruction
/// plus the KL of the latent Gaussian from the standard normal (weight 1),
/// sampling `z = μ + σ·ε` each step. With `mcd_decoder` a fresh dropout mask
/// is drawn for the decoder on every training step. Identical seeds give
/// bitwise-identical models.
pub fn train(
    rows: &[Vec<f64>],
    config: &ArchitectureConfig,
    schema_fingerprint: impl Into<String>,
) -> Result<TrainedModel> {
    config.validate()?;
    if rows.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 training rows, got {}",
            rows.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != config.input_width {
            return Err(Error::dimension(format!(
                "training row {i} has {} values, config expects {}",
                row.len(),
                config.input_width
            )));
        }
    }

    let mut encoder = build_encoder(config, &mut rng_from(derive_seed(config.seed, "init/encoder")))?;
    let mut decoder = build_decoder(config, &mut rng_from(derive_seed(config.seed, "init/decoder")))?;
    let mut enc_state = AdamState::new(&encoder, AdamConfig::with_learning_rate(config.learning_rate));
    let mut dec_state = AdamState::new(&decoder, AdamConfig::with_learning_rate(config.learning_rate));

    let mut shuffle_rng = rng_from(derive_seed(config.seed, "shuffle"));
    let mut eps_rng = rng_from(derive_seed(config.seed, "epsilon"));
    let mut mask_rng = rng_from(derive_seed(config.seed, "dropout"));

    let latent = config.latent;
    let mask_layout = decoder.hidden_mask_layout();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut loss_trace = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        use rand::seq::SliceRandom;
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;

        for batch in order.chunks(config.batch_size) {
            let mut enc_acc = Gradients::zeros_like(&encoder);
            let mut dec_acc = Gradients::zeros_like(&decoder);

            for &i in batch {
                let x = &rows[i];
                let (enc_out, enc_cache) = encoder.forward(x, None)?;

                // Latent code and, for the VAE, the reparameterized sample.
                let (z, vae_parts) = match config.model_kind {
                    ModelKind::Ae => (enc_out, None),
                    ModelKind::Vae => {
                        let (mu_raw, lv_raw) = enc_out.split_at(latent);
                        let clamped: Vec<bool> =
                            lv_raw.iter().map(|v| v.abs() > LOG_VAR_LIMIT).collect();
                        let lv: Vec<f64> = lv_raw
                            .iter()
                            .map(|v| v.clamp(-LOG_VAR_LIMIT, LOG_VAR_LIMIT))
                            .collect();
                        let eps: Vec<f64> = (0..latent)
                            .map(|_| StandardNormal.sample(&mut eps_rng))
                            .collect();
                        let z = reparameterize(mu_raw, &lv, &eps);
                        (z, Some((mu_raw.to_vec(), lv, eps, clamped)))
                    }
                };

                let mask = if config.mcd_decoder {
                    Some(sample_mask_with(&mask_layout, config.keep_rate, &mut mask_rng)?)
                } else {
                    None
                };
                let (x_hat, dec_cache) = decoder.forward(&z, mask.as_ref())?;

                let (recon, d_xhat) = match config.recon_loss {
                    ReconLoss::Mse => sum_squared_loss(&x_hat, x)?,
                    ReconLoss::CrossEntropy => binary_cross_entropy(&x_hat, x)?,
                };
                let mut sample_loss = recon;

                let dec_grads = decoder.backward(&dec_cache, mask.as_ref(), &d_xhat)?;
                let d_z = &dec_grads.input;

                let d_enc_out = match &vae_parts {
                    None => d_z.clone(),
                    Some((mu, lv, eps, clamped)) => {
                        let (kl, d_mu_kl, d_lv_kl) = gaussian_kl(mu, lv)?;
                        sample_loss += kl;
                        let mut d_out = Vec::with_capacity(2 * latent);
                        for i in 0..latent {
                            d_out.push(d_z[i] + d_mu_kl[i]);
                        }
                        for i in 0..latent {
                            let sigma = (0.5 * lv[i]).exp();
                            let through_z = d_z[i] * eps[i] * 0.5 * sigma;
                            d_out.push(if clamped[i] { 0.0 } else { through_z + d_lv_kl[i] });
                        }
                        d_out
                    }
                };
                let enc_grads = encoder.backward(&enc_cache, None, &d_enc_out)?;

                enc_acc.add_assign(&enc_grads);
                dec_acc.add_assign(&dec_grads);
                epoch_loss += sample_loss;
            }

            let scale = 1.0 / batch.len() as f64;
            enc_acc.scale(scale);
            dec_acc.scale(scale);
            adam_step(&mut enc_state, &mut encoder, &enc_acc)?;
            adam_step(&mut dec_state, &mut decoder, &dec_acc)?;
        }

        let mean_loss = epoch_loss / rows.len() as f64;
        if !mean_loss.is_finite() {
            return Err(Error::Training {
                epoch,
                message: format!("mean loss is {mean_loss}"),
            });
        }
        loss_trace.push(mean_loss);
    }

    Ok(TrainedModel {
        config: config.clone(),
        encoder,
        decoder,
        schema_fingerprint: schema_fingerprint.into(),
        loss_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot_rows(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    fn small_config(kind: ModelKind, mcd: bool, w: usize, latent: usize) -> ArchitectureConfig {
        ArchitectureConfig {
            input_width: w,
            hidden_m: 16,
            hidden_n: 8,
            latent,
            keep_rate: 0.9,
            model_kind: kind,
            mcd_decoder: mcd,
            recon_loss: ReconLoss::default(),
            epochs: 50,
            learning_rate: 1e-3,
            batch_size: 4,
            seed: 7,
        }
    }

    #[test]
    fn config_defaults_and_validation() {
        let config = ArchitectureConfig::for_dataset(10, 9, ModelKind::Vae, false);
        assert_eq!((config.hidden_m, config.hidden_n, config.latent), (80, 40, 4));
        config.validate().unwrap();

        let wide = ArchitectureConfig::for_dataset(100, 30, ModelKind::Ae, true);
        assert_eq!((wide.hidden_m, wide.hidden_n, wide.latent), (512, 256, 15));

        let mut bad = config.clone();
        bad.hidden_n = bad.hidden_m + 1;
        assert!(bad.validate().is_err());
        bad = config.clone();
        bad.latent = 0;
        assert!(bad.validate().is_err());
        bad = config;
        bad.keep_rate = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn ae_reconstructs_one_hot_rows() {
        // Identity-capable architecture: L = w, plenty of hidden capacity.
        let mut config = small_config(ModelKind::Ae, false, 4, 4);
        config.epochs = 1500;
        config.learning_rate = 5e-3;
        let rows = one_hot_rows(4);
        let model = train(&rows, &config, "test").unwrap();
        let mut total = 0.0;
        for row in &rows {
            let z = match model.encode(row).unwrap() {
                LatentCode::Point(z) => z,
                LatentCode::Gaussian(_) => panic!("AE emits points"),
            };
            let out = model.decode(&z, None).unwrap();
            let (mse, _) = crate::nn::mse_loss(&out, row).unwrap();
            total += mse;
        }
        let mean_mse = total / rows.len() as f64;
        assert!(mean_mse < 1e-2, "mean reconstruction MSE {mean_mse}");
        // the optimized objective went down
        assert!(model.loss_trace.last().unwrap() <= model.loss_trace.first().unwrap());
    }

    #[test]
    fn vae_on_prior_distributed_data_centers_mu_at_zero() {
        // 1-D standard normal rows are already the latent prior, so the mean
        // posterior mean over the data must sit near 0.
        let mut rng = rng_from(99);
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![StandardNormal.sample(&mut rng)])
            .collect();
        let mut config = small_config(ModelKind::Vae, false, 1, 1);
        config.hidden_m = 8;
        config.hidden_n = 4;
        config.epochs = 200;
        let model = train(&rows, &config, "test").unwrap();
        let mut mean_mu = 0.0;
        for row in &rows {
            match model.encode(row).unwrap() {
                LatentCode::Gaussian(g) => mean_mu += g.mu[0],
                LatentCode::Point(_) => panic!("VAE emits gaussians"),
            }
        }
        mean_mu /= rows.len() as f64;
        assert!(mean_mu.abs() < 0.3, "mean μ = {mean_mu}");
    }

    #[test]
    fn keep_rate_one_trains_identically_to_no_dropout() {
        let rows = one_hot_rows(4);
        let mut with_mcd = small_config(ModelKind::Vae, true, 4, 2);
        with_mcd.keep_rate = 1.0;
        let mut without = with_mcd.clone();
        without.mcd_decoder = false;
        let a = train(&rows, &with_mcd, "test").unwrap();
        let b = train(&rows, &without, "test").unwrap();
        assert_eq!(a.loss_trace, b.loss_trace);
    }

    #[test]
    fn encode_is_deterministic_and_shaped() {
        let rows = one_hot_rows(4);
        let config = small_config(ModelKind::Vae, true, 4, 2);
        let model = train(&rows, &config, "test").unwrap();
        let a = model.encode(&rows[0]).unwrap();
        let b = model.encode(&rows[0]).unwrap();
        assert_eq!(a, b);
        match a {
            LatentCode::Gaussian(g) => {
                assert_eq!(g.mu.len(), 2);
                assert_eq!(g.log_var.len(), 2);
                assert!(g.log_var.iter().all(|lv| (0.5 * lv).exp() > 0.0));
            }
            LatentCode::Point(_) => panic!("VAE emits gaussians"),
        }
    }

    #[test]
    fn ae_latent_matches_brute_force_forward_oracle() {
        let rows = one_hot_rows(3);
        let mut config = small_config(ModelKind::Ae, false, 3, 2);
        config.epochs = 5;
        let model = train(&rows, &config, "test").unwrap();
        let x = &rows[1];
        let z = match model.encode(x).unwrap() {
            LatentCode::Point(z) => z,
            LatentCode::Gaussian(_) => unreachable!(),
        };
        // independent per-neuron recomputation
        let mut values = x.clone();
        for layer in &model.encoder.layers {
            let mut next = vec![0.0; layer.out_dim];
            for i in 0..layer.out_dim {
                let mut acc = layer.bias[i];
                for j in 0..layer.in_dim {
                    acc += layer.weights[i * layer.in_dim + j] * values[j];
                }
                next[i] = match layer.activation {
                    Activation::Identity => acc,
                    Activation::Relu => acc.max(0.0),
                    Activation::Sigmoid => 1.0 / (1.0 + (-acc).exp()),
                };
            }
            values = next;
        }
        for (a, b) in z.iter().zip(&values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn decode_stays_in_the_open_unit_interval() {
        let rows = one_hot_rows(4);
        let config = small_config(ModelKind::Vae, true, 4, 2);
        let model = train(&rows, &config, "test").unwrap();
        for z in [vec![0.0, 0.0], vec![5.0, -5.0], vec![100.0, 100.0]] {
            let out = model.decode(&z, None).unwrap();
            assert!(out.iter().all(|&v| v > 0.0 && v < 1.0), "{out:?}");
        }
        // all-ones mask equals mask-free decode
        let mask = crate::nn::sample_mask(&model.decoder_mask_layout(), 1.0, 3).unwrap();
        let z = vec![0.3, -0.4];
        assert_eq!(model.decode(&z, None).unwrap(), model.decode(&z, Some(&mask)).unwrap());
    }

    #[test]
    fn reparameterize_with_zero_epsilon_is_mu_exactly() {
        let mu = vec![0.123456789, -4.2, 17.5];
        let lv = vec![0.4, -1.0, 2.0];
        let z = reparameterize(&mu, &lv, &[0.0, 0.0, 0.0]);
        assert_eq!(z, mu);
    }

    #[test]
    fn training_rejects_bad_inputs() {
        let config = small_config(ModelKind::Ae, false, 4, 2);
        assert!(train(&one_hot_rows(1), &config, "t").is_err());
        let mismatched = vec![vec![0.0; 3], vec![1.0; 3]];
        assert!(train(&mismatched, &config, "t").is_err());
    }

    #[test]
    fn same_seed_trains_bitwise_identical_models() {
        let rows = one_hot_rows(4);
        let config = small_config(ModelKind::Vae, true, 4, 2);
        let a = train(&rows, &config, "test").unwrap();
        let b = train(&rows, &config, "test").unwrap();
        for (la, lb) in a.encoder.layers.iter().zip(&b.encoder.layers) {
            assert_eq!(la.weights, lb.weights);
            assert_eq!(la.bias, lb.bias);
        }
        for (la, lb) in a.decoder.layers.iter().zip(&b.decoder.layers) {
            assert_eq!(la.weights, lb.weights);
            assert_eq!(la.bias, lb.bias);
        }
        assert_eq!(a.loss_trace, b.loss_trace);
    }
}
