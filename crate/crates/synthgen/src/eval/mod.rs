//! Dataset comparison framework: statistical, structural, and predictive
//! similarity between two tables over the same schema.
//!
//! All three comparisons run on the encoded `[0,1]` representation. Results
//! are deterministic given the inputs and the rng seed.

mod ari;
mod forest;
mod kmedoids;
mod predictive;

pub use ari::adjusted_rand_index;
pub use forest::{random_forest_train, FeatureSubset, ForestConfig, RandomForest};
pub use kmedoids::{assign_to_medoids, kmedoids, Clustering};
pub use predictive::{predictive_compare, PredictiveReport};

use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Signed per-attribute statistic differences (generated − original).
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeDelta {
    pub name: String,
    pub delta_mean: f64,
    pub delta_std: f64,
}

/// How the per-attribute deltas are summarized into headline numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SummaryRule {
    #[default]
    Median,
    Mean,
}

/// Statistical comparison over the numeric attributes; categorical
/// attributes are excluded, and a dataset without numeric attributes has no
/// summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct StatReport {
    pub per_attribute: Vec<AttributeDelta>,
    pub summary_rule: SummaryRule,
    pub median_delta_mean: Option<f64>,
    pub median_delta_std: Option<f64>,
    pub mean_delta_mean: Option<f64>,
    pub mean_delta_std: Option<f64>,
}

impl StatReport {
    /// Headline Δmean under the report's summary rule.
    pub fn summary_delta_mean(&self) -> Option<f64> {
        match self.summary_rule {
            SummaryRule::Median => self.median_delta_mean,
            SummaryRule::Mean => self.mean_delta_mean,
        }
    }

    /// Headline Δstd under the report's summary rule.
    pub fn summary_delta_std(&self) -> Option<f64> {
        match self.summary_rule {
            SummaryRule::Median => self.median_delta_std,
            SummaryRule::Mean => self.mean_delta_std,
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn population_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Per-numeric-attribute signed differences of mean and population standard
/// deviation, `statistic(d2) − statistic(d1)`, with median (headline) and
/// mean summaries.
pub fn stats_compare(d1: &EncodedDataset, d2: &EncodedDataset) -> Result<StatReport> {
    if d1.schema != d2.schema {
        return Err(Error::schema("stats_compare: datasets have different schemas"));
    }
    if d1.is_empty() || d2.is_empty() {
        return Err(Error::invalid("stats_compare: empty dataset"));
    }
    let cols1 = d1.numeric_columns();
    let cols2 = d2.numeric_columns();
    let per_attribute: Vec<AttributeDelta> = cols1
        .iter()
        .zip(&cols2)
        .map(|((name, a), (_, b))| AttributeDelta {
            name: name.clone(),
            delta_mean: mean(b) - mean(a),
            delta_std: population_std(b) - population_std(a),
        })
        .collect();

    let (median_delta_mean, median_delta_std, mean_delta_mean, mean_delta_std) =
        if per_attribute.is_empty() {
            (None, None, None, None)
        } else {
            let d_means: Vec<f64> = per_attribute.iter().map(|d| d.delta_mean).collect();
            let d_stds: Vec<f64> = per_attribute.iter().map(|d| d.delta_std).collect();
            (
                Some(median(&d_means)),
                Some(median(&d_stds)),
                Some(mean(&d_means)),
                Some(mean(&d_stds)),
            )
        };

    Ok(StatReport {
        per_attribute,
        summary_rule: SummaryRule::default(),
        median_delta_mean,
        median_delta_std,
        mean_delta_mean,
        mean_delta_std,
    })
}

/// Structural comparison: both datasets are clustered separately, instances
/// of each are assigned to the other's medoids, and the two combined
/// clusterings are scored with the adjusted Rand index.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    pub k: usize,
    pub ari: f64,
    /// Medoid row indices into d1 / d2.
    pub medoids_1: Vec<usize>,
    pub medoids_2: Vec<usize>,
    /// Combined labelings over d1 ∥ d2 (clustering A: d1 by its own labels,
    /// d2 by nearest d1-medoid; clustering B the other way around).
    pub labels_a: Vec<usize>,
    pub labels_b: Vec<usize>,
}

pub fn cluster_compare(
    d1: &EncodedDataset,
    d2: &EncodedDataset,
    k: usize,
    rng_seed: u64,
) -> Result<ClusterReport> {
    if d1.width() != d2.width() {
        return Err(Error::dimension(format!(
            "cluster_compare: widths {} and {} differ",
            d1.width(),
            d2.width()
        )));
    }
    // One derived seed for both clusterings: identical inputs then produce
    // identical partitions (and ARI exactly 1).
    let seed = derive_seed(rng_seed, "kmedoids");
    let c1 = kmedoids(&d1.matrix, k, seed)?;
    let c2 = kmedoids(&d2.matrix, k, seed)?;

    let m1_rows: Vec<&Vec<f64>> = c1.medoids.iter().map(|&i| &d1.matrix[i]).collect();
    let m2_rows: Vec<&Vec<f64>> = c2.medoids.iter().map(|&i| &d2.matrix[i]).collect();

    // A: d1 keeps its own labels, d2 joins via d1's medoids.
    let mut labels_a = c1.labels.clone();
    labels_a.extend(assign_to_medoids(&d2.matrix, &m1_rows));
    // B: d1 joins via d2's medoids, d2 keeps its own labels.
    let mut labels_b = assign_to_medoids(&d1.matrix, &m2_rows);
    labels_b.extend(c2.labels.iter().copied());

    let ari = adjusted_rand_index(&labels_a, &labels_b)?;
    Ok(ClusterReport {
        k,
        ari,
        medoids_1: c1.medoids,
        medoids_2: c2.medoids,
        labels_a,
        labels_b,
    })
}

/// The full three-part comparison: Δmean/Δstd, ARI, and the four random
/// forest accuracies with Δacc.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub stats: StatReport,
    pub cluster: ClusterReport,
    pub predictive: PredictiveReport,
}

impl ComparisonReport {
    /// Machine-readable key/value lines mirroring the report columns.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x}"));
        vec![
            ("delta_mean".to_string(), opt(self.stats.summary_delta_mean())),
            ("delta_std".to_string(), opt(self.stats.summary_delta_std())),
            ("ari".to_string(), format!("{}", self.cluster.ari)),
            ("delta_acc".to_string(), format!("{}", self.predictive.delta_acc)),
            ("m1d1".to_string(), format!("{}", self.predictive.m1d1)),
            ("m1d2".to_string(), format!("{}", self.predictive.m1d2)),
            ("m2d1".to_string(), format!("{}", self.predictive.m2d1)),
            ("m2d2".to_string(), format!("{}", self.predictive.m2d2)),
        ]
    }
}

/// Compare original `d1` with generated `d2`: statistics, clustering
/// structure (k clusters), and predictive behaviour (`trees`-tree forests).
pub fn compare_datasets(
    d1: &EncodedDataset,
    d2: &EncodedDataset,
    k: usize,
    trees: usize,
    rng_seed: u64,
) -> Result<ComparisonReport> {
    Ok(ComparisonReport {
        stats: stats_compare(d1, d2)?,
        cluster: cluster_compare(d1, d2, k, derive_seed(rng_seed, "cluster"))?,
        predictive: predictive_compare(d1, d2, trees, derive_seed(rng_seed, "predictive"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{fit_encode, AttributeSpec, Cell, RawTable, Schema};
    use rand::Rng;

    pub(crate) fn labeled_dataset(n_per: usize, seed: u64) -> EncodedDataset {
        let schema = Schema::new(
            vec![
                AttributeSpec::numeric("a"),
                AttributeSpec::numeric("b"),
                AttributeSpec::categorical("class", vec!["lo".into(), "hi".into()]),
            ],
            2,
        )
        .unwrap();
        let mut rng = crate::seed::rng_from(seed);
        let mut rows = Vec::new();
        for c in 0..2usize {
            let center = if c == 0 { 2.0 } else { 8.0 };
            let label = if c == 0 { "lo" } else { "hi" };
            for _ in 0..n_per {
                rows.push(vec![
                    Cell::Number(center + rng.random_range(-1.0..1.0)),
                    Cell::Number(center + rng.random_range(-1.0..1.0)),
                    Cell::Label(label.into()),
                ]);
            }
        }
        fit_encode(&RawTable::new(schema, rows).unwrap()).unwrap()
    }

    #[test]
    fn stats_compare_identity_is_zero() {
        let d = labeled_dataset(30, 1);
        let report = stats_compare(&d, &d).unwrap();
        assert_eq!(report.per_attribute.len(), 2);
        for delta in &report.per_attribute {
            assert_eq!(delta.delta_mean, 0.0);
            assert_eq!(delta.delta_std, 0.0);
        }
        assert_eq!(report.summary_delta_mean(), Some(0.0));
        assert_eq!(report.summary_delta_std(), Some(0.0));
        assert_eq!(report.mean_delta_mean, Some(0.0));
    }

    #[test]
    fn stats_compare_signed_shift() {
        // d1 column mean 0.5, d2 column mean 0.4 → Δmean = −0.1
        let schema = Schema::new(
            vec![
                AttributeSpec::numeric("x"),
                AttributeSpec::categorical("class", vec!["p".into(), "q".into()]),
            ],
            1,
        )
        .unwrap();
        let build = |values: &[f64]| {
            let rows = values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    vec![
                        Cell::Number(v),
                        Cell::Label(if i % 2 == 0 { "p".into() } else { "q".into() }),
                    ]
                })
                .collect();
            RawTable::new(schema.clone(), rows).unwrap()
        };
        let d1 = fit_encode(&build(&[0.0, 1.0, 0.5, 0.5])).unwrap();
        // same fitted scale: encode d2 with d1's schema
        let d2 = crate::data::encode_with(&build(&[0.0, 1.0, 0.3, 0.3]), &d1.schema).unwrap();
        let report = stats_compare(&d1, &d2).unwrap();
        assert!((report.per_attribute[0].delta_mean + 0.1).abs() < 1e-12);
    }

    #[test]
    fn all_categorical_dataset_has_no_numeric_summaries() {
        let schema = Schema::new(
            vec![
                AttributeSpec::categorical("c1", vec!["x".into(), "o".into(), "b".into()]),
                AttributeSpec::categorical("class", vec!["win".into(), "lose".into()]),
            ],
            1,
        )
        .unwrap();
        let rows = vec![
            vec![Cell::Label("x".into()), Cell::Label("win".into())],
            vec![Cell::Label("o".into()), Cell::Label("lose".into())],
            vec![Cell::Label("b".into()), Cell::Label("win".into())],
        ];
        let d = fit_encode(&RawTable::new(schema, rows).unwrap()).unwrap();
        let report = stats_compare(&d, &d).unwrap();
        assert!(report.per_attribute.is_empty());
        assert_eq!(report.summary_delta_mean(), None);
        assert_eq!(report.summary_delta_std(), None);
    }

    #[test]
    fn cluster_compare_identity_is_one() {
        let d = labeled_dataset(25, 2);
        let report = cluster_compare(&d, &d, 2, 77).unwrap();
        assert_eq!(report.ari, 1.0);
        assert_eq!(report.medoids_1, report.medoids_2);
    }

    #[test]
    fn cluster_compare_width_mismatch_errors() {
        let d1 = labeled_dataset(10, 3);
        let mut d2 = d1.clone();
        for row in &mut d2.matrix {
            row.pop();
        }
        d2.column_map.pop();
        assert!(cluster_compare(&d1, &d2, 2, 1).is_err());
    }

    #[test]
    fn cluster_compare_hand_sized_instance_matches_pair_oracle() {
        // 6+6 points, k=2: the report's combined labelings must reproduce
        // the closed-form pair-counting ARI.
        let d1 = labeled_dataset(3, 4); // 6 rows
        let d2 = labeled_dataset(3, 5);
        let report = cluster_compare(&d1, &d2, 2, 9).unwrap();
        let oracle = super::ari::tests::ari_by_pair_enumeration(&report.labels_a, &report.labels_b);
        assert!((report.ari - oracle).abs() < 1e-12);
    }

    #[test]
    fn compare_datasets_identity_suite() {
        let d = labeled_dataset(20, 6);
        let report = compare_datasets(&d, &d, 2, 25, 123).unwrap();
        assert_eq!(report.stats.summary_delta_mean(), Some(0.0));
        assert_eq!(report.cluster.ari, 1.0);
        assert_eq!(report.predictive.delta_acc, 0.0);
        // deterministic end to end
        let again = compare_datasets(&d, &d, 2, 25, 123).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn ari_is_near_zero_under_the_permutation_null() {
        // Chance-correction calibration: a labeling scored against an
        // independently permuted copy of itself sits near 0.
        let mut rng = crate::seed::rng_from(19);
        for run in 0..10 {
            let labels: Vec<usize> = (0..200).map(|i| (i < 100) as usize).collect();
            let mut permuted = labels.clone();
            for i in (1..permuted.len()).rev() {
                let j = rng.random_range(0..=i);
                permuted.swap(i, j);
            }
            let ari = adjusted_rand_index(&labels, &permuted).unwrap();
            assert!(ari.abs() < 0.1, "run {run}: ARI {ari}");
        }
    }

    #[test]
    fn noise_scores_well_below_structured_identity() {
        // d2 is independent uniform noise over the same cube. The combined
        // cross-assignment partitions are both spatial, so they retain some
        // geometric correlation (two Voronoi splits of one point cloud are
        // not independent labelings); the score must still sit far below
        // the identity value of 1.
        let d1 = labeled_dataset(100, 7);
        let mut noise = d1.clone();
        let mut rng = crate::seed::rng_from(8);
        for row in &mut noise.matrix {
            for v in row.iter_mut() {
                *v = rng.random_range(0.0..1.0);
            }
        }
        let mut total = 0.0;
        for run in 0..10u64 {
            let report = cluster_compare(&d1, &noise, 2, run).unwrap();
            assert!(report.ari < 0.7, "run {run}: ARI {}", report.ari);
            total += report.ari;
        }
        assert!(total / 10.0 < 0.5, "mean noise ARI {}", total / 10.0);
    }
}
