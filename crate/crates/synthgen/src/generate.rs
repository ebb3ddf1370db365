//! Seeded generation: VAE resampling and the two MCD-decoder procedures.
//!
//! Every generated replicate draws from its own counter-keyed RNG stream,
//! keyed by (request seed, seed index, replicate index). Streams are
//! independent of iteration order, so generating across seeds in parallel
//! yields output identical to sequential execution.

use rand_distr::{Distribution, StandardNormal};

use crate::data::{decode, RawTable, Schema};
use crate::error::{Error, Result};
use crate::models::{reparameterize, LatentCode, LatentGaussian, ModelKind, TrainedModel};
use crate::nn::{sample_mask_with, Scratch};
use crate::seed::counter_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Vae,
    McdVae,
    McdAe,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 3] = [GeneratorKind::Vae, GeneratorKind::McdVae, GeneratorKind::McdAe];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Vae => "vae",
            GeneratorKind::McdVae => "mcd-vae",
            GeneratorKind::McdAe => "mcd-ae",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "vae" => Some(GeneratorKind::Vae),
            "mcd-vae" => Some(GeneratorKind::McdVae),
            "mcd-ae" => Some(GeneratorKind::McdAe),
            _ => None,
        }
    }

    /// Model kind and mcd flag this generator requires.
    pub fn model_requirements(self) -> (ModelKind, bool) {
        match self {
            GeneratorKind::Vae => (ModelKind::Vae, false),
            GeneratorKind::McdVae => (ModelKind::Vae, true),
            GeneratorKind::McdAe => (ModelKind::Ae, true),
        }
    }
}

/// Origin of one generated row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub seed_index: usize,
    pub replicate_index: usize,
}

/// One generation job: a trained model, the seeding rows, and `t` new
/// instances per seed.
#[derive(Debug, Clone)]
pub struct GenerationRequest<'a> {
    pub model: &'a TrainedModel,
    pub seeds: &'a [Vec<f64>],
    pub t: usize,
    pub rng_seed: u64,
    /// Test hook: force ε = 0 in the VAE's latent resampling.
    pub zero_epsilon: bool,
}

impl<'a> GenerationRequest<'a> {
    pub fn new(model: &'a TrainedModel, seeds: &'a [Vec<f64>], t: usize, rng_seed: u64) -> Self {
        GenerationRequest {
            model,
            seeds,
            t,
            rng_seed,
            zero_epsilon: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::invalid("t must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("seeding set is empty"));
        }
        let width = self.model.config.input_width;
        for (i, row) in self.seeds.iter().enumerate() {
            if row.len() != width {
                return Err(Error::dimension(format!(
                    "seed row {i} has {} values, model expects {width}",
                    row.len()
                )));
            }
        }
        Ok(())
    }
}

/// Rows generated from a seeding set, in seed-major replicate order.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSet {
    pub rows: Vec<Vec<f64>>,
    pub provenance: Vec<Provenance>,
    pub generator_kind: GeneratorKind,
}

impl GeneratedSet {
    /// Decode back to the original schema; the class attribute decodes like
    /// any other categorical.
    pub fn materialize(&self, schema: &Schema) -> Result<RawTable> {
        decode(&self.rows, schema)
    }
}

fn expect_kind(model: &TrainedModel, generator: GeneratorKind) -> Result<()> {
    let (kind, needs_mcd) = generator.model_requirements();
    if model.config.model_kind != kind {
        return Err(Error::invalid(format!(
            "{} generation needs a {} model, got {}",
            generator.name(),
            kind.name(),
            model.config.model_kind.name()
        )));
    }
    if needs_mcd {
        if !model.config.mcd_decoder {
            return Err(Error::invalid(format!(
                "{} generation needs a model trained with an MCD decoder",
                generator.name()
            )));
        }
        if model.config.keep_rate == 1.0 {
            log::warn!(
                "{} with keep_rate=1 is degenerate: all replicates of a seed are identical",
                generator.name()
            );
        }
    }
    Ok(())
}

fn gaussian_of(model: &TrainedModel, seed_row: &[f64]) -> Result<LatentGaussian> {
    match model.encode(seed_row)? {
        LatentCode::Gaussian(g) => Ok(g),
        LatentCode::Point(_) => Err(Error::invalid("model emitted a point latent, expected gaussian")),
    }
}

/// The VAE's per-replicate latent draw: `z = μ + σ·ε` with ε fresh from the
/// (master, seed, replicate) counter stream.
fn vae_latent(gaussian: &LatentGaussian, master: u64, seed_index: usize, replicate: usize, zero_epsilon: bool) -> Vec<f64> {
    if zero_epsilon {
        return gaussian.mu.clone();
    }
    let mut rng = counter_rng(master, seed_index as u64, replicate as u64);
    let eps: Vec<f64> = (0..gaussian.mu.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    reparameterize(&gaussian.mu, &gaussian.log_var, &eps)
}

/// Resample each seed's latent Gaussian `t` times and decode without
/// dropout.
pub fn vae_generate(request: &GenerationRequest) -> Result<GeneratedSet> {
    expect_kind(request.model, GeneratorKind::Vae)?;
    request.validate()?;
    let mut rows = Vec::with_capacity(request.seeds.len() * request.t);
    let mut provenance = Vec::with_capacity(rows.capacity());
    let mut scratch = Scratch::default();
    for (i, seed_row) in request.seeds.iter().enumerate() {
        let gaussian = gaussian_of(request.model, seed_row)?;
        for j in 0..request.t {
            let z = vae_latent(&gaussian, request.rng_seed, i, j, request.zero_epsilon);
            let mut out = Vec::new();
            request.model.decode_into(&z, None, &mut scratch, &mut out)?;
            rows.push(out);
            provenance.push(Provenance {
                seed_index: i,
                replicate_index: j,
            });
        }
    }
    Ok(GeneratedSet {
        rows,
        provenance,
        generator_kind: GeneratorKind::Vae,
    })
}

fn mcd_generate(request: &GenerationRequest, generator: GeneratorKind) -> Result<GeneratedSet> {
    expect_kind(request.model, generator)?;
    request.validate()?;
    let model = request.model;
    let layout = model.decoder_mask_layout();
    let keep_rate = model.config.keep_rate;
    let mut rows = Vec::with_capacity(request.seeds.len() * request.t);
    let mut provenance = Vec::with_capacity(rows.capacity());
    let mut scratch = Scratch::default();
    for (i, seed_row) in request.seeds.iter().enumerate() {
        // MCD-VAE keeps only the posterior means; σ plays no role here.
        let latent = match generator {
            GeneratorKind::McdVae => {
                let gaussian = gaussian_of(model, seed_row)?;
                log::debug!(
                    "seed {i}: discarding σ {:?} for mcd-vae generation",
                    gaussian.sigma()
                );
                gaussian.mu
            }
            GeneratorKind::McdAe => match model.encode(seed_row)? {
                LatentCode::Point(z) => z,
                LatentCode::Gaussian(_) => {
                    return Err(Error::invalid("model emitted a gaussian latent, expected point"))
                }
            },
            GeneratorKind::Vae => unreachable!("handled by vae_generate"),
        };
        for j in 0..request.t {
            let mut rng = counter_rng(request.rng_seed, i as u64, j as u64);
            let mask = sample_mask_with(&layout, keep_rate, &mut rng)?;
            let mut out = Vec::new();
            model.decode_into(&latent, Some(&mask), &mut scratch, &mut out)?;
            rows.push(out);
            provenance.push(Provenance {
                seed_index: i,
                replicate_index: j,
            });
        }
    }
    Ok(GeneratedSet {
        rows,
        provenance,
        generator_kind: generator,
    })
}

/// Push each seed's posterior mean through the dropout-active decoder `t`
/// times, a fresh mask per pass; no ε noise anywhere.
pub fn mcd_vae_generate(request: &GenerationRequest) -> Result<GeneratedSet> {
    mcd_generate(request, GeneratorKind::McdVae)
}

/// As [`mcd_vae_generate`] but seeded with the plain autoencoder's latent
/// codes, which carry no distributional constraints.
pub fn mcd_ae_generate(request: &GenerationRequest) -> Result<GeneratedSet> {
    mcd_generate(request, GeneratorKind::McdAe)
}

/// Dispatch by generator kind.
pub fn generate(kind: GeneratorKind, request: &GenerationRequest) -> Result<GeneratedSet> {
    match kind {
        GeneratorKind::Vae => vae_generate(request),
        GeneratorKind::McdVae => mcd_vae_generate(request),
        GeneratorKind::McdAe => mcd_ae_generate(request),
    }
}
