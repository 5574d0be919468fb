//! Model evaluation: metrics, per-SNR curves, penultimate-layer
//! embeddings, exact t-SNE projection and report emission.

pub mod cluster;
pub mod metrics;
pub mod reports;
pub mod tsne;

pub use cluster::{cluster_purity, kmeans, silhouette};
pub use metrics::{per_snr_curve, snr_grid_db, spearman, ConfusionMatrix, SnrCurve, SnrPoint};
pub use reports::{emit_reports, EmbeddedPoints, ReportBundle, Summary};
pub use tsne::{tsne_project, TsneConfig, TsneResult};

use crate::nn::{Tensor, VggBn};
use crate::{Error, Real, Result};

/// Penultimate-layer activations of a sample set: one row of
/// `hidden_units` values per sample, with labels and SNR tags.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    matrix: Vec<f32>,
    dim: usize,
    pub labels: Vec<usize>,
    pub snr_db: Vec<f64>,
}

impl EmbeddingSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.matrix[i * self.dim..(i + 1) * self.dim]
    }

    pub fn matrix(&self) -> &[f32] {
        &self.matrix
    }

    /// Row-major f64 copy, for the t-SNE and clustering routines.
    pub fn matrix_f64(&self) -> Vec<f64> {
        self.matrix.iter().map(|&v| v as f64).collect()
    }
}

/// Run the model in eval mode and collect the hidden-layer activations
/// of every sample. Inputs must already be standardized.
pub fn extract_embeddings<T: Real>(
    model: &VggBn<T>,
    inputs: &[Tensor<T>],
    labels: &[usize],
    snr_db: &[f64],
) -> Result<EmbeddingSet> {
    if inputs.len() != labels.len() || inputs.len() != snr_db.len() {
        return Err(Error::InvalidInput("inputs, labels and SNR tags must align".into()));
    }
    let dim = model.config.hidden_units;
    let mut matrix = Vec::with_capacity(inputs.len() * dim);
    for chunk in inputs.chunks(32) {
        let item = chunk[0].shape().to_vec();
        let stride: usize = item.iter().product();
        let mut shape = vec![chunk.len()];
        shape.extend_from_slice(&item);
        let mut batch = Tensor::zeros(&shape);
        for (slot, input) in chunk.iter().enumerate() {
            if input.shape() != item.as_slice() {
                return Err(Error::shape(format!("{item:?}"), format!("{:?}", input.shape())));
            }
            batch.data_mut()[slot * stride..(slot + 1) * stride].copy_from_slice(input.data());
        }
        let (_, emb) = model.forward_eval(&batch, true)?;
        let emb = emb.expect("embeddings requested");
        matrix.extend(emb.data().iter().map(|v| v.to64() as f32));
    }
    Ok(EmbeddingSet { matrix, dim, labels: labels.to_vec(), snr_db: snr_db.to_vec() })
}
