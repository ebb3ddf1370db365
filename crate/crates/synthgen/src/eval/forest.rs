//! Random forest classifier: CART-style trees, Gini impurity splits,
//! bootstrap sampling, √F candidate features per node.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed::counter_rng;

/// How many candidate features each node considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeatureSubset {
    /// √(feature count), the forest default.
    #[default]
    Sqrt,
    /// Every feature at every node (single-tree/CART behaviour).
    All,
}

#[derive(Debug, Clone)]
pub struct ForestConfig {
    pub trees: usize,
    pub bootstrap: bool,
    pub feature_subset: FeatureSubset,
    pub seed: u64,
}

impl ForestConfig {
    pub fn new(trees: usize, seed: u64) -> Self {
        ForestConfig {
            trees,
            bootstrap: true,
            feature_subset: FeatureSubset::Sqrt,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn predict(&self, row: &[f64]) -> usize {
        match self {
            Node::Leaf { class } => *class,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.predict(row)
                } else {
                    right.predict(row)
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<Node>,
    pub classes: usize,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum::<f64>()
}

/// Majority class, ties to the lowest class index.
fn majority(counts: &[usize]) -> usize {
    let mut best = 0usize;
    for (c, &count) in counts.iter().enumerate() {
        if count > counts[best] {
            best = c;
        }
    }
    best
}

struct TreeBuilder<'a> {
    features: &'a [Vec<f64>],
    labels: &'a [usize],
    classes: usize,
    n_candidates: usize,
}

impl TreeBuilder<'_> {
    fn grow(&self, rows: &[usize], rng: &mut ChaCha8Rng) -> Node {
        let mut counts = vec![0usize; self.classes];
        for &r in rows {
            counts[self.labels[r]] += 1;
        }
        let impurity = gini(&counts, rows.len());
        // Grown until pure or fewer than 2 samples.
        if rows.len() < 2 || impurity == 0.0 {
            return Node::Leaf {
                class: majority(&counts),
            };
        }

        let n_features = self.features[0].len();
        // Seeded draw of candidate features (partial Fisher-Yates).
        let mut pool: Vec<usize> = (0..n_features).collect();
        for i in 0..self.n_candidates.min(n_features) {
            let j = rng.random_range(i..n_features);
            pool.swap(i, j);
        }
        let candidates = &pool[..self.n_candidates.min(n_features)];

        let mut best: Option<(f64, usize, f64)> = None; // (weighted impurity, feature, threshold)
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
        for &f in candidates {
            sorted.clear();
            sorted.extend(rows.iter().map(|&r| (self.features[r][f], self.labels[r])));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

            let mut left_counts = vec![0usize; self.classes];
            let total = rows.len();
            let right_counts_full = counts.clone();
            let mut right_counts = right_counts_full;
            for i in 0..total - 1 {
                let (value, label) = sorted[i];
                left_counts[label] += 1;
                right_counts[label] -= 1;
                let next_value = sorted[i + 1].0;
                if value == next_value {
                    continue;
                }
                let left_n = i + 1;
                let right_n = total - left_n;
                let weighted = (left_n as f64 * gini(&left_counts, left_n)
                    + right_n as f64 * gini(&right_counts, right_n))
                    / total as f64;
                let better = match best {
                    None => weighted < impurity,
                    Some((best_weighted, _, _)) => weighted < best_weighted,
                };
                if better {
                    best = Some((weighted, f, 0.5 * (value + next_value)));
                }
            }
        }

        let Some((_, feature, threshold)) = best else {
            // No candidate split reduces impurity (e.g. constant features).
            return Node::Leaf {
                class: majority(&counts),
            };
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.features[r][feature] <= threshold);
        Node::Split {
            feature,
            threshold,
            left: Box::new(self.grow(&left_rows, rng)),
            right: Box::new(self.grow(&right_rows, rng)),
        }
    }
}

/// Train a forest of `config.trees` CART-style trees on bootstrap samples.
/// Each tree derives its own RNG stream from `(config.seed, tree index)`, so
/// parallel and sequential training produce identical forests.
pub fn random_forest_train(
    features: &[Vec<f64>],
    labels: &[usize],
    classes: usize,
    config: &ForestConfig,
) -> Result<RandomForest> {
    if features.len() != labels.len() {
        return Err(Error::dimension(format!(
            "{} feature rows vs {} labels",
            features.len(),
            labels.len()
        )));
    }
    if features.len() < 5 {
        return Err(Error::invalid(format!(
            "need at least 5 training rows, got {}",
            features.len()
        )));
    }
    if config.trees == 0 {
        return Err(Error::invalid("forest needs at least one tree"));
    }
    let distinct: std::collections::HashSet<usize> = labels.iter().copied().collect();
    if distinct.len() < 2 {
        return Err(Error::invalid("single-class training data"));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
        return Err(Error::invalid(format!(
            "label {bad} outside 0..{classes}"
        )));
    }

    let n_features = features[0].len();
    let n_candidates = match config.feature_subset {
        FeatureSubset::Sqrt => (n_features as f64).sqrt().floor().max(1.0) as usize,
        FeatureSubset::All => n_features,
    };
    let builder = TreeBuilder {
        features,
        labels,
        classes,
        n_candidates,
    };

    let n = features.len();
    let trees: Vec<Node> = (0..config.trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = counter_rng(config.seed, t as u64, 0);
            let rows: Vec<usize> = if config.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            builder.grow(&rows, &mut rng)
        })
        .collect();

    Ok(RandomForest {
        trees,
        classes,
    })
}

impl RandomForest {
    /// Majority vote over the trees, ties to the lowest class index.
    pub fn predict(&self, row: &[f64]) -> usize {
        let mut votes = vec![0usize; self.classes];
        for tree in &self.trees {
            votes[tree.predict(row)] += 1;
        }
        majority(&votes)
    }

    pub fn accuracy(&self, features: &[Vec<f64>], labels: &[usize]) -> f64 {
        if features.is_empty() {
            return 0.0;
        }
        let hits = features
            .iter()
            .zip(labels)
            .filter(|(row, &label)| self.predict(row) == label)
            .count();
        hits as f64 / features.len() as f64
    }
}
