//! Wall-clock generation timing.
//!
//! Each timed run performs the full generation procedure (encoder passes on
//! the seeding rows plus `t` resample/decode or MCD passes per seed) with a
//! run-specific derived seed. Training and file output stay outside the
//! timed region, and a warm-up run is discarded. Runs execute strictly
//! sequentially on the calling thread.

use std::time::Instant;

use crate::error::Result;
use crate::generate::{generate, GenerationRequest, GeneratorKind};
use crate::models::TrainedModel;
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub generator_kind: GeneratorKind,
    pub dataset: String,
    pub repetitions: usize,
    pub t: usize,
    pub mean_seconds: f64,
    pub sd_seconds: f64,
    pub per_run_seconds: Vec<f64>,
}

impl TimingReport {
    /// Population mean/sd recomputed from the raw runs.
    pub fn recompute(&self) -> (f64, f64) {
        mean_sd(&self.per_run_seconds)
    }
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Time `repetitions` full generation runs.
pub fn time_generation(
    model: &TrainedModel,
    kind: GeneratorKind,
    seeds: &[Vec<f64>],
    t: usize,
    repetitions: usize,
    rng_seed: u64,
    dataset: impl Into<String>,
) -> Result<TimingReport> {
    let run = |label: &str| -> Result<f64> {
        let request = GenerationRequest::new(model, seeds, t, derive_seed(rng_seed, label));
        let start = Instant::now();
        let set = generate(kind, &request)?;
        let elapsed = start.elapsed().as_secs_f64();
        debug_assert_eq!(set.rows.len(), seeds.len() * t);
        Ok(elapsed)
    };

    run("warmup")?;
    let mut per_run_seconds = Vec::with_capacity(repetitions);
    for r in 0..repetitions {
        per_run_seconds.push(run(&format!("run/{r}"))?);
    }
    let (mean_seconds, sd_seconds) = mean_sd(&per_run_seconds);
    Ok(TimingReport {
        generator_kind: kind,
        dataset: dataset.into(),
        repetitions,
        t,
        mean_seconds,
        sd_seconds,
        per_run_seconds,
    })
}

/// Render reports as a per-dataset table with one `mean [s.d.]` column per
/// generator.
pub fn render_timing_table(reports: &[TimingReport]) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    for report in reports {
        if !datasets.contains(&report.dataset.as_str()) {
            datasets.push(&report.dataset);
        }
    }
    let mut out = String::new();
    out.push_str(&format!(
        "{:<20} {:>16} {:>16} {:>16}\n",
        "dataset", "VAE [s.d.]", "MCD-VAE [s.d.]", "MCD-AE [s.d.]"
    ));
    for dataset in datasets {
        let cell = |kind: GeneratorKind| {
            reports
                .iter()
                .find(|r| r.dataset == dataset && r.generator_kind == kind)
                .map_or("-".to_string(), |r| {
                    format!("{:.3} [{:.3}]", r.mean_seconds, r.sd_seconds)
                })
        };
        out.push_str(&format!(
            "{:<20} {:>16} {:>16} {:>16}\n",
            dataset,
            cell(GeneratorKind::Vae),
            cell(GeneratorKind::McdVae),
            cell(GeneratorKind::McdAe),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{train, ArchitectureConfig, ModelKind, ReconLoss};

    fn model(kind: ModelKind, mcd: bool) -> TrainedModel {
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|i| (0..6).map(|j| ((i * 7 + j * 3) % 10) as f64 / 10.0).collect())
            .collect();
        let config = ArchitectureConfig {
            input_width: 6,
            hidden_m: 32,
            hidden_n: 16,
            latent: 3,
            keep_rate: 0.8,
            model_kind: kind,
            mcd_decoder: mcd,
            recon_loss: ReconLoss::default(),
            epochs: 3,
            learning_rate: 1e-3,
            batch_size: 4,
            seed: 2,
        };
        train(&rows, &config, "bench").unwrap()
    }

    #[test]
    fn report_counts_and_degenerate_sd() {
        let m = model(ModelKind::Vae, false);
        let seeds = vec![vec![0.5; 6]; 4];
        let report =
            time_generation(&m, GeneratorKind::Vae, &seeds, 5, 1, 3, "toy").unwrap();
        assert_eq!(report.per_run_seconds.len(), 1);
        assert_eq!(report.sd_seconds, 0.0);

        let report =
            time_generation(&m, GeneratorKind::Vae, &seeds, 5, 7, 3, "toy").unwrap();
        assert_eq!(report.per_run_seconds.len(), 7);
        let (mean, sd) = report.recompute();
        assert!((mean - report.mean_seconds).abs() < 1e-9);
        assert!((sd - report.sd_seconds).abs() < 1e-9);
    }

    #[test]
    fn doubling_t_increases_generation_time() {
        let m = model(ModelKind::Ae, true);
        let seeds = vec![vec![0.5; 6]; 64];
        let median = |t: usize, seed: u64| {
            let report =
                time_generation(&m, GeneratorKind::McdAe, &seeds, t, 3, seed, "toy").unwrap();
            let mut runs = report.per_run_seconds.clone();
            runs.sort_by(f64::total_cmp);
            runs[1]
        };
        assert!(median(800, 1) < median(1600, 2));
    }

    #[test]
    fn table_layout_mirrors_per_dataset_rows() {
        let m = model(ModelKind::Vae, true);
        let seeds = vec![vec![0.5; 6]; 2];
        let vae = time_generation(&m, GeneratorKind::Vae, &seeds, 2, 2, 3, "alpha").unwrap();
        let mcd = time_generation(&m, GeneratorKind::McdVae, &seeds, 2, 2, 3, "alpha").unwrap();
        let table = render_timing_table(&[vae, mcd]);
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].contains("VAE [s.d.]") && lines[0].contains("MCD-AE [s.d.]"));
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("alpha"));
        assert!(lines[1].trim_end().ends_with('-')); // no MCD-AE measurement
    }
}
