//! Finite-difference spot checks for every layer's analytic gradients.
//!
//! A scalar objective `L = Σ out ⊙ R` with a fixed random projection `R`
//! turns each layer into a function whose gradient the backward pass
//! claims to compute; central differences on the forward pass alone give
//! the independent oracle. Everything runs in f64.

mod checks {
    use super::super::layers::*;
    use super::super::loss::loss_softmax_ce;
    use super::super::tensor::Tensor;
    use crate::seeds;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn rel_err(a: f64, n: f64) -> f64 {
        (a - n).abs() / a.abs().max(n.abs()).max(1e-3)
    }

    pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect()
    }

    /// Random values bounded away from zero, for layers with kinks.
    pub fn random_vec_offzero(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let v: f64 = rng.sample(rand_distr::StandardNormal);
                v + v.signum() * 0.05
            })
            .collect()
    }

    pub fn numeric_grad(mut f: impl FnMut(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
        let mut probe = x.to_vec();
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            let eps = 1e-5 * x[i].abs().max(1.0);
            probe[i] = x[i] + eps;
            let fp = f(&probe);
            probe[i] = x[i] - eps;
            let fm = f(&probe);
            probe[i] = x[i];
            grad[i] = (fp - fm) / (2.0 * eps);
        }
        grad
    }

    pub fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
        analytic
            .iter()
            .zip(numeric)
            .map(|(&a, &n)| rel_err(a, n))
            .fold(0.0, f64::max)
    }

    pub fn check_conv2d(seed: u64, b: usize, cin: usize, cout: usize, h: usize, w: usize) -> f64 {
        let mut rng = seeds::rng(seed, "gc-conv", &[]);
        let mut layer = Conv2d::<f64>::init(cin, cout, &mut rng);
        let x = Tensor::from_vec(&[b, cin, h, w], random_vec(&mut rng, b * cin * h * w)).unwrap();
        let proj = random_vec(&mut rng, b * cout * h * w);

        let objective = |layer: &Conv2d<f64>, x: &Tensor<f64>| -> f64 {
            let (out, _) = layer.forward(x).unwrap();
            out.data().iter().zip(&proj).map(|(o, r)| o * r).sum()
        };

        let (_, cache) = layer.forward(&x).unwrap();
        let gout = Tensor::from_vec(&[b, cout, h, w], proj.clone()).unwrap();
        let (gx, gw, gb) = layer.backward(&cache, &gout).unwrap();

        let mut worst = 0.0f64;
        let x0 = x.data().to_vec();
        let nx = numeric_grad(
            |v| {
                let xt = Tensor::from_vec(&[b, cin, h, w], v.to_vec()).unwrap();
                objective(&layer, &xt)
            },
            &x0,
        );
        worst = worst.max(max_rel_err(gx.data(), &nx));

        let w0 = layer.weight.clone();
        let nw = numeric_grad(
            |v| {
                layer.weight.copy_from_slice(v);
                let r = objective(&layer, &x);
                layer.weight.copy_from_slice(&w0);
                r
            },
            &w0.clone(),
        );
        layer.weight.copy_from_slice(&w0);
        worst = worst.max(max_rel_err(&gw, &nw));

        let b0 = layer.bias.clone();
        let nb = numeric_grad(
            |v| {
                layer.bias.copy_from_slice(v);
                let r = objective(&layer, &x);
                layer.bias.copy_from_slice(&b0);
                r
            },
            &b0.clone(),
        );
        layer.bias.copy_from_slice(&b0);
        worst.max(max_rel_err(&gb, &nb))
    }

    pub fn check_batchnorm(seed: u64, b: usize, c: usize, h: usize, w: usize) -> f64 {
        let mut rng = seeds::rng(seed, "gc-bn", &[]);
        let mut layer = BatchNorm2d::<f64>::init(c);
        for g in &mut layer.gamma {
            *g = 1.0 + 0.2 * rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        for bta in &mut layer.beta {
            *bta = 0.1 * rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        let x = Tensor::from_vec(&[b, c, h, w], random_vec(&mut rng, b * c * h * w)).unwrap();
        let proj = random_vec(&mut rng, b * c * h * w);

        // Forward in train mode mutates running stats; clone per call.
        let objective = |layer: &BatchNorm2d<f64>, x: &Tensor<f64>| -> f64 {
            let mut fresh = layer.clone();
            let (out, _) = fresh.forward_train(x).unwrap();
            out.data().iter().zip(&proj).map(|(o, r)| o * r).sum()
        };

        let mut fresh = layer.clone();
        let (_, cache) = fresh.forward_train(&x).unwrap();
        let gout = Tensor::from_vec(&[b, c, h, w], proj.clone()).unwrap();
        let (gx, ggamma, gbeta) = layer.backward(&cache, &gout).unwrap();

        let mut worst = 0.0f64;
        let x0 = x.data().to_vec();
        let nx = numeric_grad(
            |v| {
                let xt = Tensor::from_vec(&[b, c, h, w], v.to_vec()).unwrap();
                objective(&layer, &xt)
            },
            &x0,
        );
        worst = worst.max(max_rel_err(gx.data(), &nx));

        let g0 = layer.gamma.clone();
        let ng = numeric_grad(
            |v| {
                layer.gamma.copy_from_slice(v);
                let r = objective(&layer, &x);
                layer.gamma.copy_from_slice(&g0);
                r
            },
            &g0.clone(),
        );
        layer.gamma.copy_from_slice(&g0);
        worst = worst.max(max_rel_err(&ggamma, &ng));

        let b0 = layer.beta.clone();
        let nb = numeric_grad(
            |v| {
                layer.beta.copy_from_slice(v);
                let r = objective(&layer, &x);
                layer.beta.copy_from_slice(&b0);
                r
            },
            &b0.clone(),
        );
        layer.beta.copy_from_slice(&b0);
        worst.max(max_rel_err(&gbeta, &nb))
    }

    pub fn check_dense(seed: u64, b: usize, din: usize, dout: usize) -> f64 {
        let mut rng = seeds::rng(seed, "gc-dense", &[]);
        let mut layer = Dense::<f64>::init(din, dout, &mut rng);
        let x = Tensor::from_vec(&[b, din], random_vec(&mut rng, b * din)).unwrap();
        let proj = random_vec(&mut rng, b * dout);

        let objective = |layer: &Dense<f64>, x: &Tensor<f64>| -> f64 {
            layer.forward_eval(x).unwrap().data().iter().zip(&proj).map(|(o, r)| o * r).sum()
        };

        let (_, cache) = layer.forward(&x).unwrap();
        let gout = Tensor::from_vec(&[b, dout], proj.clone()).unwrap();
        let (gx, gw, gb) = layer.backward(&cache, &gout).unwrap();

        let mut worst = 0.0f64;
        let nx = numeric_grad(
            |v| objective(&layer, &Tensor::from_vec(&[b, din], v.to_vec()).unwrap()),
            &x.data().to_vec(),
        );
        worst = worst.max(max_rel_err(gx.data(), &nx));

        let w0 = layer.weight.clone();
        let nw = numeric_grad(
            |v| {
                layer.weight.copy_from_slice(v);
                let r = objective(&layer, &x);
                layer.weight.copy_from_slice(&w0);
                r
            },
            &w0.clone(),
        );
        layer.weight.copy_from_slice(&w0);
        worst = worst.max(max_rel_err(&gw, &nw));

        let b0 = layer.bias.clone();
        let nb = numeric_grad(
            |v| {
                layer.bias.copy_from_slice(v);
                let r = objective(&layer, &x);
                layer.bias.copy_from_slice(&b0);
                r
            },
            &b0.clone(),
        );
        layer.bias.copy_from_slice(&b0);
        worst.max(max_rel_err(&gb, &nb))
    }

    pub fn check_relu(seed: u64, n: usize) -> f64 {
        let mut rng = seeds::rng(seed, "gc-relu", &[]);
        let x = Tensor::from_vec(&[1, n], random_vec_offzero(&mut rng, n)).unwrap();
        let proj = random_vec(&mut rng, n);
        let (_, cache) = relu_forward(&x);
        let gout = Tensor::from_vec(&[1, n], proj.clone()).unwrap();
        let gx = relu_backward(&cache, &gout);
        let nx = numeric_grad(
            |v| {
                let (out, _) = relu_forward(&Tensor::from_vec(&[1, n], v.to_vec()).unwrap());
                out.data().iter().zip(&proj).map(|(o, r)| o * r).sum()
            },
            &x.data().to_vec(),
        );
        max_rel_err(gx.data(), &nx)
    }

    pub fn check_maxpool(seed: u64, b: usize, c: usize, h: usize, w: usize) -> f64 {
        let mut rng = seeds::rng(seed, "gc-pool", &[]);
        let x =
            Tensor::from_vec(&[b, c, h, w], random_vec_offzero(&mut rng, b * c * h * w)).unwrap();
        let proj = random_vec(&mut rng, b * c * (h / 2) * (w / 2));
        let (_, cache) = maxpool2_forward(&x).unwrap();
        let gout = Tensor::from_vec(&[b, c, h / 2, w / 2], proj.clone()).unwrap();
        let gx = maxpool2_backward(&cache, &gout);
        let nx = numeric_grad(
            |v| {
                let xt = Tensor::from_vec(&[b, c, h, w], v.to_vec()).unwrap();
                let (out, _) = maxpool2_forward(&xt).unwrap();
                out.data().iter().zip(&proj).map(|(o, r)| o * r).sum()
            },
            &x.data().to_vec(),
        );
        max_rel_err(gx.data(), &nx)
    }

    pub fn check_gap(seed: u64, b: usize, c: usize, h: usize, w: usize) -> f64 {
        let mut rng = seeds::rng(seed, "gc-gap", &[]);
        let x = Tensor::from_vec(&[b, c, h, w], random_vec(&mut rng, b * c * h * w)).unwrap();
        let proj = random_vec(&mut rng, b * c);
        let (_, cache) = gap_forward(&x).unwrap();
        let gout = Tensor::from_vec(&[b, c], proj.clone()).unwrap();
        let gx = gap_backward(&cache, &gout);
        let nx = numeric_grad(
            |v| {
                let xt = Tensor::from_vec(&[b, c, h, w], v.to_vec()).unwrap();
                let (out, _) = gap_forward(&xt).unwrap();
                out.data().iter().zip(&proj).map(|(o, r)| o * r).sum()
            },
            &x.data().to_vec(),
        );
        max_rel_err(gx.data(), &nx)
    }

    pub fn check_softmax_ce(seed: u64, b: usize, k: usize) -> f64 {
        let mut rng = seeds::rng(seed, "gc-ce", &[]);
        let logits = Tensor::from_vec(&[b, k], random_vec(&mut rng, b * k)).unwrap();
        let labels: Vec<usize> = (0..b).map(|_| rng.gen_range(0..k)).collect();
        let (_, grad) = loss_softmax_ce(&logits, &labels).unwrap();
        let n = numeric_grad(
            |v| {
                let lt = Tensor::from_vec(&[b, k], v.to_vec()).unwrap();
                loss_softmax_ce(&lt, &labels).unwrap().0
            },
            &logits.data().to_vec(),
        );
        max_rel_err(grad.data(), &n)
    }
}


pub use checks::*;

/// Randomised sweep over every layer type at acceptance scale: returns
/// the number of checks run and the worst relative error observed.
pub fn run_acceptance_sweep(shapes_per_layer: usize) -> (usize, f64) {
    use rand::Rng;
    let mut rng = crate::seeds::rng(4242, "gc-acceptance", &[]);
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for i in 0..shapes_per_layer as u64 {
        let b = rng.gen_range(1..4);
        let c = rng.gen_range(1..4);
        let co = rng.gen_range(1..5);
        let h = 2 * rng.gen_range(2..5);
        let w = 2 * rng.gen_range(2..5);
        worst = worst.max(checks::check_conv2d(i, b, c, co, h, w));
        worst = worst.max(checks::check_batchnorm(i, b.max(2), c, h, w));
        worst = worst.max(checks::check_dense(i, b, rng.gen_range(2..12), rng.gen_range(2..9)));
        worst = worst.max(checks::check_relu(i, rng.gen_range(8..64)));
        worst = worst.max(checks::check_maxpool(i, b, c, h, w));
        worst = worst.max(checks::check_gap(i, b, c, h, w));
        worst = worst.max(checks::check_softmax_ce(i, rng.gen_range(2..9), 7));
        checked += 7;
    }
    (checked, worst)
}
