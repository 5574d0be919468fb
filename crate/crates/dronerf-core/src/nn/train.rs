//! Deterministic training loop with best-on-validation checkpointing.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamParams, AdamState};
use super::loss::{loss_softmax_ce, softmax};
use super::tensor::Tensor;
use super::vgg::{VggBn, VggConfig};
use crate::eval::metrics::ConfusionMatrix;
use crate::{seeds, Error, Real, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub betas: (f64, f64),
    pub weight_decay: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            batch_size: 8,
            learning_rate: 0.005,
            betas: (0.9, 0.999),
            weight_decay: 0.0,
            eps: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        Ok(())
    }

    fn adam(&self) -> AdamParams {
        AdamParams {
            lr: self.learning_rate,
            beta1: self.betas.0,
            beta2: self.betas.1,
            eps: self.eps,
            weight_decay: self.weight_decay,
        }
    }
}

/// One sample set: standardized input tensors [2, S, C] plus labels.
pub struct SampleSet<'a, T: Real> {
    pub inputs: &'a [Tensor<T>],
    pub labels: &'a [usize],
}

impl<'a, T: Real> SampleSet<'a, T> {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_balanced_accuracy: f64,
}

pub struct TrainOutcome<T: Real> {
    pub model: VggBn<T>,
    pub best_epoch: usize,
    pub best_val_balanced_accuracy: f64,
    pub history: Vec<EpochStats>,
}

fn stack_batch<T: Real>(inputs: &[Tensor<T>], indices: &[usize]) -> Result<Tensor<T>> {
    let item_shape = inputs[indices[0]].shape().to_vec();
    let mut shape = vec![indices.len()];
    shape.extend_from_slice(&item_shape);
    let stride: usize = item_shape.iter().product();
    let mut out = Tensor::zeros(&shape);
    for (slot, &ix) in indices.iter().enumerate() {
        if inputs[ix].shape() != item_shape.as_slice() {
            return Err(Error::shape(format!("{item_shape:?}"), format!("{:?}", inputs[ix].shape())));
        }
        out.data_mut()[slot * stride..(slot + 1) * stride].copy_from_slice(inputs[ix].data());
    }
    Ok(out)
}

/// Eval-mode predictions over a sample set, batched for throughput.
pub fn predict<T: Real>(model: &VggBn<T>, set: &SampleSet<'_, T>) -> Result<Vec<usize>> {
    let mut preds = Vec::with_capacity(set.len());
    for chunk in (0..set.len()).collect::<Vec<_>>().chunks(32) {
        let batch = stack_batch(set.inputs, chunk)?;
        let (logits, _) = model.forward_eval(&batch, false)?;
        let k = model.config.num_classes;
        for row in 0..chunk.len() {
            let row_logits = &logits.data()[row * k..(row + 1) * k];
            let argmax = row_logits
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            preds.push(argmax);
        }
    }
    Ok(preds)
}

/// Class posteriors for a single input.
pub fn posteriors<T: Real>(model: &VggBn<T>, input: &Tensor<T>) -> Result<Vec<f64>> {
    let batch = stack_batch(std::slice::from_ref(input), &[0])?;
    let (logits, _) = model.forward_eval(&batch, false)?;
    let probs = softmax(&logits)?;
    Ok(probs.data().iter().map(|v| v.to64()).collect())
}

fn balanced_accuracy_of<T: Real>(
    model: &VggBn<T>,
    set: &SampleSet<'_, T>,
    n_classes: usize,
) -> Result<f64> {
    let preds = predict(model, set)?;
    let cm = ConfusionMatrix::from_pairs(&preds, set.labels, n_classes)?;
    cm.balanced_accuracy()
}

/// Train a fresh model, tracking the epoch with the highest validation
/// balanced accuracy; fully deterministic given the seed.
///
/// With `epochs == 0` the initialised model is evaluated once and
/// returned as the checkpointed state.
pub fn train<T: Real>(
    config: &VggConfig,
    tc: &TrainConfig,
    train_set: &SampleSet<'_, T>,
    val_set: &SampleSet<'_, T>,
) -> Result<TrainOutcome<T>> {
    tc.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::InvalidInput("train and validation sets must be non-empty".into()));
    }
    if train_set.inputs.len() != train_set.labels.len()
        || val_set.inputs.len() != val_set.labels.len()
    {
        return Err(Error::InvalidInput("inputs and labels differ in length".into()));
    }

    let mut model = VggBn::<T>::init(config.clone(), tc.seed)?;
    let hp = tc.adam();
    let mut adam = AdamState::<T>::for_shapes(&model.trainable_sizes());
    let mut step = 0u64;

    let mut history = Vec::with_capacity(tc.epochs);
    let mut best_blob = model.snapshot();
    let mut best_val = balanced_accuracy_of(&model, val_set, config.num_classes)?;
    let mut best_epoch = 0usize;

    if tc.epochs == 0 {
        history.push(EpochStats { epoch: 0, train_loss: f64::NAN, val_balanced_accuracy: best_val });
        return Ok(TrainOutcome {
            model,
            best_epoch: 0,
            best_val_balanced_accuracy: best_val,
            history,
        });
    }

    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 1..=tc.epochs {
        let mut rng = seeds::rng(tc.seed, "train-shuffle", &[epoch as u64]);
        order.shuffle(&mut rng);

        let mut epoch_loss = 0.0f64;
        let mut batches = 0usize;
        for (batch_ix, chunk) in order.chunks(tc.batch_size).enumerate() {
            let batch = stack_batch(train_set.inputs, chunk)?;
            let labels: Vec<usize> = chunk.iter().map(|&i| train_set.labels[i]).collect();
            let (logits, tape) = model.forward_train(&batch)?;
            let (loss, grad_logits) = loss_softmax_ce(&logits, &labels)?;
            if !loss.is_finite() {
                return Err(Error::Numerical(format!(
                    "loss became non-finite at epoch {epoch}, batch {batch_ix}"
                )));
            }
            epoch_loss += loss;
            batches += 1;
            let grads = model.backward(&tape, &grad_logits)?;
            step += 1;
            let mut params = model.trainable_param_slices_mut();
            let mut param_refs: Vec<&mut [T]> =
                params.iter_mut().map(|p| p.as_mut_slice()).collect();
            let grad_refs: Vec<&[T]> = grads.groups.iter().map(|g| g.as_slice()).collect();
            adam_step(&mut param_refs, &grad_refs, &mut adam, step, &hp)?;
        }

        let val_bal = balanced_accuracy_of(&model, val_set, config.num_classes)?;
        history.push(EpochStats {
            epoch,
            train_loss: epoch_loss / batches as f64,
            val_balanced_accuracy: val_bal,
        });
        if val_bal > best_val {
            best_val = val_bal;
            best_epoch = epoch;
            best_blob = model.snapshot();
        }
    }

    model.restore(&best_blob)?;
    Ok(TrainOutcome { model, best_epoch, best_val_balanced_accuracy: best_val, history })
}

/// Write the per-epoch history as `history.csv`.
pub fn write_history(history: &[EpochStats], path: &std::path::Path) -> Result<()> {
    let mut out = String::from("epoch,train_loss,val_balanced_acc\n");
    for h in history {
        out.push_str(&format!("{},{},{}\n", h.epoch, h.train_loss, h.val_balanced_accuracy));
    }
    Ok(std::fs::write(path, out)?)
}
