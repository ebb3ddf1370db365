//! k-medoids clustering: alternating assignment/update on Euclidean
//! distance, seeded initialization, deterministic per seed.

use crate::error::{Error, Result};
use crate::seed::rng_from;

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Row indices serving as cluster centers, in cluster-id order.
    pub medoids: Vec<usize>,
    /// Cluster id per row, consistent with the final medoids.
    pub labels: Vec<usize>,
    /// Total Euclidean distance of rows to their medoids.
    pub cost: f64,
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Nearest index into `medoids` by distance matrix row, ties to the lowest
/// medoid position.
fn nearest(dist: &[f64], n: usize, row: usize, medoids: &[usize]) -> usize {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (m, &medoid) in medoids.iter().enumerate() {
        let d = dist[row * n + medoid];
        if d < best_d {
            best_d = d;
            best = m;
        }
    }
    best
}

fn assign(dist: &[f64], n: usize, medoids: &[usize]) -> (Vec<usize>, f64) {
    let mut labels = vec![0usize; n];
    let mut cost = 0.0;
    for row in 0..n {
        let m = nearest(dist, n, row, medoids);
        labels[row] = m;
        cost += dist[row * n + medoids[m]];
    }
    (labels, cost)
}

/// Cluster rows into `k` groups around actual data rows. Seeded random
/// initialization, then alternating assignment/update until the total cost
/// stops decreasing. All ties (nearest medoid, medoid update) break to the
/// lowest index, so duplicate rows never behave nondeterministically.
pub fn kmedoids(rows: &[Vec<f64>], k: usize, rng_seed: u64) -> Result<Clustering> {
    let n = rows.len();
    if k < 2 || k > n {
        return Err(Error::invalid(format!("k must satisfy 2 ≤ k ≤ {n}, got {k}")));
    }

    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(&rows[i], &rows[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    // Seeded draw of k distinct rows (partial Fisher-Yates).
    let mut rng = rng_from(rng_seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        use rand::Rng;
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    let mut medoids: Vec<usize> = pool[..k].to_vec();

    let (mut labels, mut cost) = assign(&dist, n, &medoids);
    for _ in 0..100 {
        // Update: each cluster's new medoid is the member minimizing total
        // distance to the other members. An empty cluster (possible when
        // duplicate rows were drawn as two medoids) is repaired with the row
        // farthest from its assigned medoid; ties break to the lowest index.
        let mut next = medoids.clone();
        let mut claimed = vec![false; n];
        for c in 0..k {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            if members.is_empty() {
                continue;
            }
            let mut best = members[0];
            let mut best_total = f64::INFINITY;
            for &candidate in &members {
                let total: f64 = members.iter().map(|&m| dist[candidate * n + m]).sum();
                if total < best_total {
                    best_total = total;
                    best = candidate;
                }
            }
            next[c] = best;
            claimed[best] = true;
        }
        for c in 0..k {
            if (0..n).any(|i| labels[i] == c) {
                continue;
            }
            let mut farthest = None;
            let mut far_d = -1.0;
            for row in 0..n {
                if claimed[row] {
                    continue;
                }
                let d = dist[row * n + next[labels[row]]];
                if d > far_d {
                    far_d = d;
                    farthest = Some(row);
                }
            }
            if let Some(row) = farthest {
                next[c] = row;
                claimed[row] = true;
            }
        }
        let (new_labels, new_cost) = assign(&dist, n, &next);
        if new_cost < cost {
            medoids = next;
            labels = new_labels;
            cost = new_cost;
        } else {
            break;
        }
    }

    Ok(Clustering { medoids, labels, cost })
}

/// Assign every row of `rows` to the nearest of the given `medoid_rows`
/// (ties to the lowest medoid position); used for cross-dataset assignment.
pub fn assign_to_medoids(rows: &[Vec<f64>], medoid_rows: &[&Vec<f64>]) -> Vec<usize> {
    rows.iter()
        .map(|row| {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (m, medoid) in medoid_rows.iter().enumerate() {
                let d = euclidean(row, medoid);
                if d < best_d {
                    best_d = d;
                    best = m;
                }
            }
            best
        })
        .collect()
}
