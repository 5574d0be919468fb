//! Adam with bias correction.

use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams { lr: 0.005, beta1: 0.9, beta2: 0.999, eps: 1e-8, weight_decay: 0.0 }
    }
}

/// First/second moment estimates, one pair of buffers per parameter
/// group, laid out parallel to the model's trainable parameter order.
#[derive(Debug, Clone)]
pub struct AdamState<T: Real> {
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
}

impl<T: Real> AdamState<T> {
    pub fn for_shapes(sizes: &[usize]) -> Self {
        AdamState {
            m: sizes.iter().map(|&n| vec![T::zero(); n]).collect(),
            v: sizes.iter().map(|&n| vec![T::zero(); n]).collect(),
        }
    }
}

/// One Adam update at step `t` (1-based).
pub fn adam_step<T: Real>(
    params: &mut [&mut [T]],
    grads: &[&[T]],
    state: &mut AdamState<T>,
    t: u64,
    hp: &AdamParams,
) -> Result<()> {
    if t < 1 {
        return Err(Error::InvalidInput("Adam step count is 1-based; got t = 0".into()));
    }
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::shape(
            format!("{} parameter groups", state.m.len()),
            format!("{} params / {} grads", params.len(), grads.len()),
        ));
    }
    let b1 = T::of(hp.beta1);
    let b2 = T::of(hp.beta2);
    let one = T::one();
    let lr = T::of(hp.lr);
    let eps = T::of(hp.eps);
    let wd = T::of(hp.weight_decay);
    let bc1 = T::of(1.0 - hp.beta1.powi(t as i32));
    let bc2 = T::of(1.0 - hp.beta2.powi(t as i32));

    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        if p.len() != g.len() || p.len() != m.len() {
            return Err(Error::shape(format!("{} values", m.len()), format!("{}", p.len())));
        }
        for i in 0..p.len() {
            let mut grad = g[i];
            if hp.weight_decay != 0.0 {
                grad += wd * p[i];
            }
            m[i] = b1 * m[i] + (one - b1) * grad;
            v[i] = b2 * v[i] + (one - b2) * grad * grad;
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        // Scalar θ = 0, g = 2: bias-corrected m̂ = 2, v̂ = 4, so the step is
        // lr·g/(|g| + eps) ≈ lr.
        let mut theta = [0.0f64];
        let grad = [2.0f64];
        let mut state = AdamState::for_shapes(&[1]);
        let hp = AdamParams::default();
        adam_step(&mut [&mut theta], &[&grad], &mut state, 1, &hp).unwrap();
        assert!((theta[0] + 0.005).abs() < 1e-9, "theta {}", theta[0]);
    }

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let mut theta = [1.5f64, -0.25];
        let grad = [0.0f64, 0.0];
        let mut state = AdamState::for_shapes(&[2]);
        let hp = AdamParams::default();
        for t in 1..=50 {
            adam_step(&mut [&mut theta], &[&grad], &mut state, t, &hp).unwrap();
        }
        assert_eq!(theta, [1.5, -0.25]);
    }

    #[test]
    fn descends_a_quadratic() {
        // f(θ) = θ², ∇f = 2θ, from θ = 1.
        let mut theta = [1.0f64];
        let mut state = AdamState::for_shapes(&[1]);
        let hp = AdamParams { lr: 0.05, ..AdamParams::default() };
        for t in 1..=100 {
            let grad = [2.0 * theta[0]];
            adam_step(&mut [&mut theta], &[&grad], &mut state, t, &hp).unwrap();
        }
        assert!(theta[0].abs() < 0.1, "theta {}", theta[0]);
    }

    #[test]
    fn rejects_step_zero() {
        let mut theta = [0.0f64];
        let grad = [1.0f64];
        let mut state = AdamState::for_shapes(&[1]);
        assert!(adam_step(&mut [&mut theta], &[&grad], &mut state, 0, &AdamParams::default())
            .is_err());
    }
}
