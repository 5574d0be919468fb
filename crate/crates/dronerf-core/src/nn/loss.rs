//! Mean softmax cross-entropy over a batch of logits.

use super::tensor::Tensor;
use crate::{Error, Real, Result};

/// Row-wise softmax with the usual max-subtraction for stability.
pub fn softmax<T: Real>(logits: &Tensor<T>) -> Result<Tensor<T>> {
    if logits.shape().len() != 2 {
        return Err(Error::shape("[B, classes]", format!("{:?}", logits.shape())));
    }
    let (b, k) = (logits.shape()[0], logits.shape()[1]);
    let mut out = Tensor::zeros(&[b, k]);
    for s in 0..b {
        let row = &logits.data()[s * k..(s + 1) * k];
        let max = row.iter().cloned().fold(T::neg_infinity(), T::max);
        let mut sum = T::zero();
        let orow = &mut out.data_mut()[s * k..(s + 1) * k];
        for (o, &v) in orow.iter_mut().zip(row) {
            *o = (v - max).exp();
            sum += *o;
        }
        for o in orow.iter_mut() {
            *o /= sum;
        }
    }
    Ok(out)
}

/// Mean cross-entropy loss and its gradient with respect to the logits,
/// `(softmax − one-hot) / B`.
pub fn loss_softmax_ce<T: Real>(
    logits: &Tensor<T>,
    labels: &[usize],
) -> Result<(f64, Tensor<T>)> {
    let (b, k) = (logits.shape()[0], logits.shape()[1]);
    if labels.len() != b {
        return Err(Error::shape(format!("{b} labels"), format!("{}", labels.len())));
    }
    if let Some(bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::InvalidInput(format!("label {bad} out of range 0..{k}")));
    }
    let probs = softmax(logits)?;
    let mut loss = 0.0f64;
    let mut grad = probs.clone();
    let inv_b = T::of(1.0 / b as f64);
    for s in 0..b {
        let p = probs.data()[s * k + labels[s]].to64();
        loss -= p.max(f64::MIN_POSITIVE).ln();
        grad.data_mut()[s * k + labels[s]] -= T::one();
    }
    for g in grad.data_mut() {
        *g *= inv_b;
    }
    Ok((loss / b as f64, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_logits_give_ln_k() {
        let logits = Tensor::<f64>::zeros(&[3, 7]);
        let (loss, _) = loss_softmax_ce(&logits, &[0, 3, 6]).unwrap();
        assert!((loss - 7.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn confident_correct_logits_drive_loss_to_zero() {
        let mut logits = Tensor::<f64>::zeros(&[1, 7]);
        logits.data_mut()[2] = 50.0;
        let (loss, _) = loss_softmax_ce(&logits, &[2]).unwrap();
        assert!(loss < 1e-12, "loss {loss}");
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let logits =
            Tensor::<f32>::from_vec(&[2, 7], (0..14).map(|i| (i as f32) * 0.37 - 2.0).collect())
                .unwrap();
        let probs = softmax(&logits).unwrap();
        for s in 0..2 {
            let sum: f32 = probs.data()[s * 7..(s + 1) * 7].iter().sum();
            assert!((sum - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn out_of_range_label_rejected() {
        let logits = Tensor::<f64>::zeros(&[1, 7]);
        assert!(loss_softmax_ce(&logits, &[7]).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut logits = Tensor::<f64>::from_vec(
            &[2, 5],
            vec![0.3, -1.2, 0.7, 2.0, -0.5, 1.1, 0.0, -0.3, 0.4, 0.9],
        )
        .unwrap();
        let labels = [3usize, 0];
        let (_, grad) = loss_softmax_ce(&logits, &labels).unwrap();
        let eps = 1e-6;
        for i in 0..logits.len() {
            let orig = logits.data()[i];
            logits.data_mut()[i] = orig + eps;
            let (lp, _) = loss_softmax_ce(&logits, &labels).unwrap();
            logits.data_mut()[i] = orig - eps;
            let (lm, _) = loss_softmax_ce(&logits, &labels).unwrap();
            logits.data_mut()[i] = orig;
            let numeric = (lp - lm) / (2.0 * eps);
            let analytic = grad.data()[i];
            assert!(
                (numeric - analytic).abs() / numeric.abs().max(1e-8) < 1e-4,
                "index {i}: {numeric} vs {analytic}"
            );
        }
    }
}
