//! Small clustering utilities used to score embedding quality:
//! seeded k-means, cluster purity and silhouette.

use rand::Rng;

use crate::{seeds, Error, Result};

/// Lloyd's algorithm with k-means++ seeding; deterministic given `seed`.
/// `data` is row-major `n × dim`; returns one cluster id per row.
pub fn kmeans(
    data: &[f64],
    n: usize,
    dim: usize,
    k: usize,
    max_iters: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if data.len() != n * dim {
        return Err(Error::shape(format!("{} values", n * dim), format!("{}", data.len())));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k = {k} out of range for {n} points")));
    }
    let mut rng = seeds::rng(seed, "kmeans", &[]);
    let dist2 = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    };

    // k-means++ seeding.
    let mut centers: Vec<f64> = Vec::with_capacity(k * dim);
    let first = rng.gen_range(0..n);
    centers.extend_from_slice(&data[first * dim..(first + 1) * dim]);
    let mut min_d2: Vec<f64> =
        (0..n).map(|i| dist2(&data[i * dim..(i + 1) * dim], &centers[0..dim])).collect();
    for _ in 1..k {
        let total: f64 = min_d2.iter().sum();
        let next = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut pick = n - 1;
            for (i, &d) in min_d2.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        };
        let c0 = centers.len();
        centers.extend_from_slice(&data[next * dim..(next + 1) * dim]);
        for i in 0..n {
            let d = dist2(&data[i * dim..(i + 1) * dim], &centers[c0..c0 + dim]);
            if d < min_d2[i] {
                min_d2[i] = d;
            }
        }
    }

    let mut assign = vec![0usize; n];
    for _ in 0..max_iters {
        let mut changed = false;
        for i in 0..n {
            let row = &data[i * dim..(i + 1) * dim];
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let d = dist2(row, &centers[c * dim..(c + 1) * dim]);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        let mut counts = vec![0usize; k];
        let mut sums = vec![0.0f64; k * dim];
        for i in 0..n {
            counts[assign[i]] += 1;
            for d in 0..dim {
                sums[assign[i] * dim + d] += data[i * dim + d];
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for d in 0..dim {
                    centers[c * dim + d] = sums[c * dim + d] / counts[c] as f64;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(assign)
}

/// Fraction of points whose cluster's majority label matches their own.
pub fn cluster_purity(
    assignments: &[usize],
    labels: &[usize],
    k: usize,
    n_labels: usize,
) -> Result<f64> {
    if assignments.len() != labels.len() || assignments.is_empty() {
        return Err(Error::InvalidInput("assignments and labels must align".into()));
    }
    let mut counts = vec![0usize; k * n_labels];
    for (&a, &l) in assignments.iter().zip(labels) {
        if a >= k || l >= n_labels {
            return Err(Error::InvalidInput(format!("cluster {a} or label {l} out of range")));
        }
        counts[a * n_labels + l] += 1;
    }
    let majority: usize =
        (0..k).map(|c| counts[c * n_labels..(c + 1) * n_labels].iter().max().copied().unwrap_or(0)).sum();
    Ok(majority as f64 / labels.len() as f64)
}

/// Mean silhouette coefficient over all points (O(n²)); positive values
/// mean within-class distances are smaller than between-class distances.
pub fn silhouette(data: &[f64], n: usize, dim: usize, labels: &[usize]) -> Result<f64> {
    if data.len() != n * dim || labels.len() != n {
        return Err(Error::InvalidInput("data and labels must align".into()));
    }
    let n_labels = labels.iter().max().map(|&m| m + 1).unwrap_or(0);
    let dist = |a: usize, b: usize| -> f64 {
        data[a * dim..(a + 1) * dim]
            .iter()
            .zip(&data[b * dim..(b + 1) * dim])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let mut total = 0.0f64;
    let mut counted = 0usize;
    for i in 0..n {
        let mut sums = vec![0.0f64; n_labels];
        let mut counts = vec![0usize; n_labels];
        for j in 0..n {
            if i == j {
                continue;
            }
            sums[labels[j]] += dist(i, j);
            counts[labels[j]] += 1;
        }
        if counts[labels[i]] == 0 {
            continue;
        }
        let a = sums[labels[i]] / counts[labels[i]] as f64;
        let b = (0..n_labels)
            .filter(|&l| l != labels[i] && counts[l] > 0)
            .map(|l| sums[l] / counts[l] as f64)
            .fold(f64::INFINITY, f64::min);
        if !b.is_finite() {
            continue;
        }
        total += (b - a) / a.max(b);
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::DegenerateInput("silhouette needs at least two populated classes".into()));
    }
    Ok(total / counted as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kmeans_recovers_obvious_clusters() {
        let mut data = Vec::new();
        let mut labels = Vec::new();
        for c in 0..3usize {
            for i in 0..20usize {
                data.push(c as f64 * 10.0 + (i % 5) as f64 * 0.01);
                data.push(c as f64 * -10.0);
                labels.push(c);
            }
        }
        let assign = kmeans(&data, 60, 2, 3, 50, 1).unwrap();
        assert_eq!(cluster_purity(&assign, &labels, 3, 3).unwrap(), 1.0);
    }

    #[test]
    fn silhouette_positive_for_separated_negative_for_shuffled() {
        let mut data = Vec::new();
        let mut labels = Vec::new();
        for c in 0..2usize {
            for i in 0..10usize {
                data.push(c as f64 * 100.0 + i as f64 * 0.1);
                labels.push(c);
            }
        }
        assert!(silhouette(&data, 20, 1, &labels).unwrap() > 0.9);
        let mixed: Vec<usize> = (0..20).map(|i| i % 2).collect();
        assert!(silhouette(&data, 20, 1, &mixed).unwrap() < 0.0);
    }
}
