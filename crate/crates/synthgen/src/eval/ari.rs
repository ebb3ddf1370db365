//! Adjusted Rand index between two labelings of the same points.

use crate::error::{Error, Result};

/// Pair-counting ARI from the contingency table with expected-index
/// correction. 1 means identical partitions, values near 0 mean chance-level
/// agreement; small negatives (down to −0.5) are worse-than-chance.
///
/// Degenerate case: when both partitions are all-singletons or single-cluster
/// the index is defined as 1 (the partitions are identical).
pub fn adjusted_rand_index(labels_a: &[usize], labels_b: &[usize]) -> Result<f64> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::dimension(format!(
            "label vectors have lengths {} and {}",
            labels_a.len(),
            labels_b.len()
        )));
    }
    let n = labels_a.len();
    if n < 2 {
        return Err(Error::invalid("need at least 2 labeled points"));
    }

    let ka = labels_a.iter().max().unwrap() + 1;
    let kb = labels_b.iter().max().unwrap() + 1;
    let mut contingency = vec![0usize; ka * kb];
    let mut a_margin = vec![0usize; ka];
    let mut b_margin = vec![0usize; kb];
    for (&a, &b) in labels_a.iter().zip(labels_b) {
        contingency[a * kb + b] += 1;
        a_margin[a] += 1;
        b_margin[b] += 1;
    }

    let c2 = |x: usize| (x * x.saturating_sub(1)) as f64 / 2.0;
    let sum_cells: f64 = contingency.iter().map(|&c| c2(c)).sum();
    let sum_a: f64 = a_margin.iter().map(|&c| c2(c)).sum();
    let sum_b: f64 = b_margin.iter().map(|&c| c2(c)).sum();
    let expected = sum_a * sum_b / c2(n);
    let max_index = 0.5 * (sum_a + sum_b);
    if max_index == expected {
        return Ok(1.0);
    }
    Ok((sum_cells - expected) / (max_index - expected))
}
