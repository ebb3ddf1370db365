use std::time::Instant;
use synthgen::models::{train, ArchitectureConfig, ModelKind, ReconLoss};
use synthgen::nn::{sample_mask_with, Scratch};
use synthgen::seed::{counter_rng, rng_from};
use rand::Rng;
use rand::RngCore;

fn main() {
    let w = 10usize;
    let mut rng = rng_from(1);
    let rows: Vec<Vec<f64>> = (0..192).map(|_| (0..w).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
    let base = ArchitectureConfig { input_width: w, hidden_m: 80, hidden_n: 40, latent: 4,
        keep_rate: 0.8, model_kind: ModelKind::Vae, mcd_decoder: true, recon_loss: ReconLoss::Mse,
        epochs: 5, learning_rate: 1e-3, batch_size: 32, seed: 3 };
    let model = train(&rows, &base, "p").unwrap();
    let layout = model.decoder_mask_layout();
    let z = vec![0.3, -0.2, 0.8, 0.1];
    let n = 200_000usize;
    let mut scratch = Scratch::default();
    let mut out = Vec::new();

    // plain decode
    let t0 = Instant::now();
    for i in 0..n { let _ = i; model.decode_into(&z, None, &mut scratch, &mut out).unwrap(); }
    println!("decode (no mask):        {:>7.1} ns/rep", t0.elapsed().as_nanos() as f64 / n as f64);

    // counter_rng construction + 1 draw
    let t0 = Instant::now();
    let mut acc = 0u64;
    for i in 0..n { let mut r = counter_rng(9, i as u64, 0); acc ^= r.next_u64(); }
    println!("counter_rng + 1 draw:    {:>7.1} ns/rep (acc {acc})", t0.elapsed().as_nanos() as f64 / n as f64);

    // counter_rng + mask sampling
    let t0 = Instant::now();
    for i in 0..n {
        let mut r = counter_rng(9, i as u64, 0);
        let m = sample_mask_with(&layout, 0.8, &mut r).unwrap();
        std::hint::black_box(&m);
    }
    println!("rng + sample_mask:       {:>7.1} ns/rep", t0.elapsed().as_nanos() as f64 / n as f64);

    // full masked decode
    let t0 = Instant::now();
    for i in 0..n {
        let mut r = counter_rng(9, i as u64, 0);
        let m = sample_mask_with(&layout, 0.8, &mut r).unwrap();
        model.decode_into(&z, Some(&m), &mut scratch, &mut out).unwrap();
    }
    println!("rng + mask + decode:     {:>7.1} ns/rep", t0.elapsed().as_nanos() as f64 / n as f64);

    // VAE-style: rng + 4 normals + reparam + decode
    use rand_distr::{Distribution, StandardNormal};
    let mu = vec![0.3, -0.2, 0.8, 0.1];
    let lv = vec![-0.5, 0.1, -1.0, 0.2];
    let t0 = Instant::now();
    for i in 0..n {
        let mut r = counter_rng(9, i as u64, 0);
        let eps: Vec<f64> = (0..4).map(|_| StandardNormal.sample(&mut r)).collect();
        let zz = synthgen::models::reparameterize(&mu, &lv, &eps);
        model.decode_into(&zz, None, &mut scratch, &mut out).unwrap();
    }
    println!("rng + eps + decode:      {:>7.1} ns/rep", t0.elapsed().as_nanos() as f64 / n as f64);
}
