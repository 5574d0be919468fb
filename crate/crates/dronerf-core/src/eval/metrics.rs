//! Classification metrics: confusion matrices, accuracy, balanced
//! accuracy (mean per-class recall) and per-SNR curves.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    n_classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        ConfusionMatrix { n_classes, counts: vec![0; n_classes * n_classes] }
    }

    pub fn from_pairs(preds: &[usize], labels: &[usize], n_classes: usize) -> Result<Self> {
        if preds.len() != labels.len() {
            return Err(Error::shape(
                format!("{} predictions", labels.len()),
                format!("{}", preds.len()),
            ));
        }
        let mut cm = Self::new(n_classes);
        for (&p, &t) in preds.iter().zip(labels) {
            cm.record(t, p)?;
        }
        Ok(cm)
    }

    pub fn record(&mut self, true_class: usize, predicted: usize) -> Result<()> {
        if true_class >= self.n_classes || predicted >= self.n_classes {
            return Err(Error::InvalidInput(format!(
                "class out of range: true {true_class}, predicted {predicted}, n {}",
                self.n_classes
            )));
        }
        self.counts[true_class * self.n_classes + predicted] += 1;
        Ok(())
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn count(&self, true_class: usize, predicted: usize) -> u64 {
        self.counts[true_class * self.n_classes + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_sum(&self, true_class: usize) -> u64 {
        self.counts[true_class * self.n_classes..(true_class + 1) * self.n_classes]
            .iter()
            .sum()
    }

    /// Merge counts from another matrix of the same shape.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.n_classes != self.n_classes {
            return Err(Error::shape(
                format!("{} classes", self.n_classes),
                format!("{}", other.n_classes),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    /// Proportion of correct predictions.
    pub fn accuracy(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(Error::InvalidInput("empty confusion matrix".into()));
        }
        let trace: u64 = (0..self.n_classes).map(|i| self.count(i, i)).sum();
        Ok(trace as f64 / total as f64)
    }

    /// Mean per-class recall; every class must have at least one sample.
    pub fn balanced_accuracy(&self) -> Result<f64> {
        let mut acc = 0.0;
        for c in 0..self.n_classes {
            let row = self.row_sum(c);
            if row == 0 {
                return Err(Error::InvalidInput(format!(
                    "class {c} has no samples; balanced accuracy undefined"
                )));
            }
            acc += self.count(c, c) as f64 / row as f64;
        }
        Ok(acc / self.n_classes as f64)
    }

    /// Balanced accuracy over only the classes that have samples.
    pub fn balanced_accuracy_present(&self) -> Result<f64> {
        let mut acc = 0.0;
        let mut present = 0usize;
        for c in 0..self.n_classes {
            let row = self.row_sum(c);
            if row > 0 {
                acc += self.count(c, c) as f64 / row as f64;
                present += 1;
            }
        }
        if present == 0 {
            return Err(Error::InvalidInput("empty confusion matrix".into()));
        }
        Ok(acc / present as f64)
    }

    pub fn per_class_recall(&self) -> Vec<Option<f64>> {
        (0..self.n_classes)
            .map(|c| {
                let row = self.row_sum(c);
                (row > 0).then(|| self.count(c, c) as f64 / row as f64)
            })
            .collect()
    }
}

/// The SNR grid of the dataset: -20..=30 dB in 2 dB steps, 26 levels.
pub fn snr_grid_db() -> Vec<f64> {
    (0..26).map(|i| -20.0 + 2.0 * i as f64).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub balanced_accuracy: f64,
    pub count: usize,
}

/// Balanced accuracy per SNR bucket; empty buckets are omitted from the
/// points and reported in `skipped`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnrCurve {
    pub points: Vec<SnrPoint>,
    pub skipped: Vec<f64>,
}

impl SnrCurve {
    pub fn total_count(&self) -> usize {
        self.points.iter().map(|p| p.count).sum()
    }

    pub fn point_at(&self, snr_db: f64) -> Option<&SnrPoint> {
        self.points.iter().find(|p| (p.snr_db - snr_db).abs() < 1e-9)
    }
}

/// Bucket predictions by their sample's SNR tag and compute the
/// balanced accuracy within each bucket. Noise-class samples use the
/// SNR tags assigned at mixing time.
pub fn per_snr_curve(
    preds: &[usize],
    labels: &[usize],
    snr_tags_db: &[f64],
    n_classes: usize,
    grid_db: &[f64],
) -> Result<SnrCurve> {
    if preds.len() != labels.len() || preds.len() != snr_tags_db.len() {
        return Err(Error::InvalidInput("preds, labels and SNR tags must align".into()));
    }
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &snr in grid_db {
        let mut cm = ConfusionMatrix::new(n_classes);
        let mut count = 0usize;
        for ((&p, &t), &s) in preds.iter().zip(labels).zip(snr_tags_db) {
            if (s - snr).abs() < 1e-9 {
                cm.record(t, p)?;
                count += 1;
            }
        }
        if count == 0 {
            skipped.push(snr);
        } else {
            points.push(SnrPoint {
                snr_db: snr,
                balanced_accuracy: cm.balanced_accuracy_present()?,
                count,
            });
        }
    }
    Ok(SnrCurve { points, skipped })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput("need two aligned sequences of length >= 2".into()));
    }
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut ranks = vec![0.0; v.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &ix in &order[i..=j] {
                ranks[ix] = avg;
            }
            i = j + 1;
        }
        ranks
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mean) * (b - mean);
        dx += (a - mean) * (a - mean);
        dy += (b - mean) * (b - mean);
    }
    if dx == 0.0 || dy == 0.0 {
        return Err(Error::DegenerateInput("constant sequence has no rank correlation".into()));
    }
    Ok(num / (dx * dy).sqrt())
}
