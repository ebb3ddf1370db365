//! Training losses with analytic gradients.

use crate::error::{Error, Result};

fn check_lengths(a: &[f64], b: &[f64], what: &str) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::dimension(format!(
            "{what}: lengths {} and {} differ",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::dimension(format!("{what}: empty vectors")));
    }
    Ok(())
}

/// Mean squared error; gradient `2(p − t)/w`.
pub fn mse_loss(prediction: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_lengths(prediction, target, "mse_loss")?;
    let w = prediction.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(prediction.len());
    for (p, t) in prediction.iter().zip(target) {
        let diff = p - t;
        loss += diff * diff;
        grad.push(2.0 * diff / w);
    }
    Ok((loss / w, grad))
}

/// Sum of squared errors (the reconstruction term used in training, where it
/// sits on the same scale as the summed KL term); gradient `2(p − t)`.
pub fn sum_squared_loss(prediction: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_lengths(prediction, target, "sum_squared_loss")?;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(prediction.len());
    for (p, t) in prediction.iter().zip(target) {
        let diff = p - t;
        loss += diff * diff;
        grad.push(2.0 * diff);
    }
    Ok((loss, grad))
}

/// Summed binary cross-entropy for targets in `[0,1]`; predictions are
/// clamped away from {0, 1} before the logs.
pub fn binary_cross_entropy(prediction: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_lengths(prediction, target, "binary_cross_entropy")?;
    const EPS: f64 = 1e-7;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(prediction.len());
    for (p, t) in prediction.iter().zip(target) {
        let p = p.clamp(EPS, 1.0 - EPS);
        loss -= t * p.ln() + (1.0 - t) * (1.0 - p).ln();
        grad.push((p - t) / (p * (1.0 - p)));
    }
    Ok((loss, grad))
}

/// KL divergence of `N(μ, diag(exp(log_var)))` from the standard normal:
/// `½ Σᵢ (exp(log_varᵢ) + μᵢ² − 1 − log_varᵢ)`, with gradients for both
/// parameter vectors.
pub fn gaussian_kl(mu: &[f64], log_var: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    check_lengths(mu, log_var, "gaussian_kl")?;
    if mu.iter().chain(log_var).any(|v| !v.is_finite()) {
        return Err(Error::invalid("gaussian_kl: non-finite input".to_string()));
    }
    let mut kl = 0.0;
    let mut d_mu = Vec::with_capacity(mu.len());
    let mut d_log_var = Vec::with_capacity(mu.len());
    for (&m, &lv) in mu.iter().zip(log_var) {
        let var = lv.exp();
        kl += 0.5 * (var + m * m - 1.0 - lv);
        d_mu.push(m);
        d_log_var.push(0.5 * (var - 1.0));
    }
    Ok((kl, d_mu, d_log_var))
}
