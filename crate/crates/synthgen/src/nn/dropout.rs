//! Inverted dropout masks.
//!
//! Mask entries are 0 (dropped) or `1/keep_rate` (kept), so the expected
//! masked forward pass equals the mask-free pass and Monte-Carlo passes need
//! no separate rescaling.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::seed::rng_from;

/// Per-layer keep/scale vectors, parallel to a network's layers.
#[derive(Debug, Clone)]
pub struct DropoutMask {
    keep_rate: f64,
    scales: Vec<Option<Vec<f64>>>,
}

impl DropoutMask {
    pub fn keep_rate(&self) -> f64 {
        self.keep_rate
    }

    pub fn layer_count(&self) -> usize {
        self.scales.len()
    }

    /// Scale vector for layer `l`, or `None` if that layer is unmasked.
    pub fn layer(&self, l: usize) -> Option<&[f64]> {
        self.scales.get(l).and_then(|s| s.as_deref())
    }
}

/// Sample a mask for the given layout (one `Some(width)` per masked layer).
///
/// Entries are i.i.d. Bernoulli(`keep_rate`) scaled by `1/keep_rate`;
/// identical seeds produce identical masks. `keep_rate` must lie in (0, 1].
pub fn sample_mask(layout: &[Option<usize>], keep_rate: f64, rng_seed: u64) -> Result<DropoutMask> {
    sample_mask_with(layout, keep_rate, &mut rng_from(rng_seed))
}

/// As [`sample_mask`], drawing from an existing stream.
pub fn sample_mask_with<R: RngCore>(
    layout: &[Option<usize>],
    keep_rate: f64,
    rng: &mut R,
) -> Result<DropoutMask> {
    if !(keep_rate > 0.0 && keep_rate <= 1.0) {
        return Err(Error::invalid(format!(
            "keep_rate must be in (0, 1], got {keep_rate}"
        )));
    }
    let scales = if keep_rate == 1.0 {
        layout
            .iter()
            .map(|w| w.map(|width| vec![1.0; width]))
            .collect()
    } else {
        let scale = 1.0 / keep_rate;
        // Threshold comparison on raw u64s: exact to one part in 2^53.
        let threshold = (keep_rate * u64::MAX as f64) as u64;
        layout
            .iter()
            .map(|w| {
                w.map(|width| {
                    (0..width)
                        .map(|_| if rng.next_u64() <= threshold { scale } else { 0.0 })
                        .collect()
                })
            })
            .collect()
    };
    Ok(DropoutMask { keep_rate, scales })
}
