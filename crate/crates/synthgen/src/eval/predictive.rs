//! Predictive similarity: random forest accuracy transfer between datasets.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::forest::{random_forest_train, ForestConfig};
use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from};

/// The four train/test accuracies and the headline difference
/// Δacc = m2d1 − m1d1 (model trained on generated data, tested on original,
/// against the all-original baseline).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveReport {
    pub m1d1: f64,
    pub m1d2: f64,
    pub m2d1: f64,
    pub m2d2: f64,
    pub delta_acc: f64,
}

/// Stratified 50/50 split: within each class, a seeded shuffle sends the
/// first ⌈half⌉ to the training half and the rest to the test half.
fn stratified_half_split(labels: &[usize], rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        // seeded Fisher-Yates
        for i in (1..members.len()).rev() {
            let j = rng.random_range(0..=i);
            members.swap(i, j);
        }
        let half = members.len().div_ceil(2);
        train.extend_from_slice(&members[..half]);
        test.extend_from_slice(&members[half..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn view(rows: &[Vec<f64>], labels: &[usize], idx: &[usize]) -> (Vec<Vec<f64>>, Vec<usize>) {
    (
        idx.iter().map(|&i| rows[i].clone()).collect(),
        idx.iter().map(|&i| labels[i]).collect(),
    )
}

/// Split both datasets 50/50 (seeded, stratified by class), train forests m1
/// on d1's half and m2 on d2's half with identical derived seeds, and score
/// each model on both test halves.
pub fn predictive_compare(
    d1: &EncodedDataset,
    d2: &EncodedDataset,
    trees: usize,
    rng_seed: u64,
) -> Result<PredictiveReport> {
    if d1.schema != d2.schema {
        return Err(Error::schema(
            "predictive_compare: datasets have different schemas",
        ));
    }
    let classes = d1.schema.class_count();
    let (x1, y1) = d1.features_and_labels();
    let (x2, y2) = d2.features_and_labels();
    for (name, labels) in [("d1", &y1), ("d2", &y2)] {
        let distinct: std::collections::HashSet<usize> = labels.iter().copied().collect();
        if distinct.len() < 2 {
            return Err(Error::invalid(format!(
                "predictive_compare: {name} has fewer than 2 classes"
            )));
        }
    }

    // The same derived split/forest seeds are applied to both datasets, so
    // identical datasets produce identical models and Δacc exactly 0.
    let split_seed = derive_seed(rng_seed, "split");
    let (train1, test1) = stratified_half_split(&y1, &mut rng_from(split_seed));
    let (train2, test2) = stratified_half_split(&y2, &mut rng_from(split_seed));

    for (name, labels, train) in [("d1", &y1, &train1), ("d2", &y2, &train2)] {
        let mut present = vec![false; classes];
        for &i in train.iter() {
            present[labels[i]] = true;
        }
        for (class, &ok) in present.iter().enumerate() {
            let in_data = labels.contains(&class);
            if in_data && !ok {
                return Err(Error::invalid(format!(
                    "predictive_compare: class {class} of {name} is absent from its training half"
                )));
            }
        }
    }

    let forest_config = ForestConfig::new(trees, derive_seed(rng_seed, "forest"));
    let (x1_train, y1_train) = view(&x1, &y1, &train1);
    let (x2_train, y2_train) = view(&x2, &y2, &train2);
    let m1 = random_forest_train(&x1_train, &y1_train, classes, &forest_config)?;
    let m2 = random_forest_train(&x2_train, &y2_train, classes, &forest_config)?;

    let (x1_test, y1_test) = view(&x1, &y1, &test1);
    let (x2_test, y2_test) = view(&x2, &y2, &test2);
    let m1d1 = m1.accuracy(&x1_test, &y1_test);
    let m1d2 = m1.accuracy(&x2_test, &y2_test);
    let m2d1 = m2.accuracy(&x1_test, &y1_test);
    let m2d2 = m2.accuracy(&x2_test, &y2_test);

    Ok(PredictiveReport {
        m1d1,
        m1d2,
        m2d1,
        m2d2,
        delta_acc: m2d1 - m1d1,
    })
}
