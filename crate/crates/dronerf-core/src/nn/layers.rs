//! Network layers with explicit forward and backward passes.
//!
//! Layout is NCHW throughout. Convolutions are 3×3, stride 1, padding 1
//! (the only kind the architecture uses) and run as im2col + GEMM.
//! Reduction order is fixed everywhere; rayon parallelism only splits
//! independent per-sample work, so results are bitwise reproducible.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tensor::Tensor;
use crate::{Error, Real, Result};

/// out[m][n] += Σ_k a[m][k] · b[k][n]
fn gemm_acc<T: Real>(out: &mut [T], a: &[T], b: &[T], m: usize, k: usize, n: usize) {
    for i in 0..m {
        let out_row = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let alpha = a[i * k + p];
            if alpha == T::zero() {
                continue;
            }
            let b_row = &b[p * n..(p + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += alpha * bv;
            }
        }
    }
}

/// out[k][n] += Σ_m a[m][k] · b[m][n]  (aᵀ·b)
fn gemm_at_acc<T: Real>(out: &mut [T], a: &[T], b: &[T], m: usize, k: usize, n: usize) {
    for i in 0..m {
        for p in 0..k {
            let alpha = a[i * k + p];
            if alpha == T::zero() {
                continue;
            }
            let b_row = &b[i * n..(i + 1) * n];
            let out_row = &mut out[p * n..(p + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += alpha * bv;
            }
        }
    }
}

/// out[m][k] += Σ_n a[m][n] · b[k][n]  (a·bᵀ)
fn gemm_abt_acc<T: Real>(out: &mut [T], a: &[T], b: &[T], m: usize, k: usize, n: usize) {
    for i in 0..m {
        let a_row = &a[i * n..(i + 1) * n];
        for p in 0..k {
            let b_row = &b[p * n..(p + 1) * n];
            let mut acc = T::zero();
            for (&av, &bv) in a_row.iter().zip(b_row) {
                acc += av * bv;
            }
            out[i * k + p] += acc;
        }
    }
}

fn kaiming_normal<T: Real>(rng: &mut ChaCha8Rng, count: usize, fan_in: usize) -> Vec<T> {
    let std = (2.0 / fan_in as f64).sqrt();
    (0..count)
        .map(|_| T::of(std * rng.sample::<f64, _>(rand_distr::StandardNormal)))
        .collect()
}

// ---------------------------------------------------------------------
// Conv2d 3×3, stride 1, padding 1
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Conv2d<T: Real> {
    pub in_ch: usize,
    pub out_ch: usize,
    /// [out_ch × in_ch·9]
    pub weight: Vec<T>,
    pub bias: Vec<T>,
}

pub struct ConvCache<T: Real> {
    /// im2col matrices, one [in_ch·9 × H·W] block per sample.
    cols: Vec<T>,
    h: usize,
    w: usize,
    batch: usize,
}

impl<T: Real> Conv2d<T> {
    pub fn init(in_ch: usize, out_ch: usize, rng: &mut ChaCha8Rng) -> Self {
        let fan_in = in_ch * 9;
        Conv2d {
            in_ch,
            out_ch,
            weight: kaiming_normal(rng, out_ch * fan_in, fan_in),
            bias: vec![T::zero(); out_ch],
        }
    }

    fn im2col(&self, x: &[T], h: usize, w: usize, cols: &mut [T]) {
        let hw = h * w;
        for c in 0..self.in_ch {
            let plane = &x[c * hw..(c + 1) * hw];
            for ky in 0..3usize {
                for kx in 0..3usize {
                    let row = &mut cols[(c * 9 + ky * 3 + kx) * hw..(c * 9 + ky * 3 + kx + 1) * hw];
                    for y in 0..h {
                        let sy = y as isize + ky as isize - 1;
                        let dst = &mut row[y * w..(y + 1) * w];
                        if sy < 0 || sy >= h as isize {
                            for v in dst.iter_mut() {
                                *v = T::zero();
                            }
                            continue;
                        }
                        let src = &plane[sy as usize * w..(sy as usize + 1) * w];
                        // x range where sx = x + kx - 1 stays inside [0, w)
                        let x_lo = if kx == 0 { 1 } else { 0 };
                        let x_hi = if kx == 2 { w - 1 } else { w };
                        if kx == 0 {
                            dst[0] = T::zero();
                        }
                        if kx == 2 {
                            dst[w - 1] = T::zero();
                        }
                        let shift = kx as isize - 1;
                        for x_pos in x_lo..x_hi {
                            dst[x_pos] = src[(x_pos as isize + shift) as usize];
                        }
                    }
                }
            }
        }
    }

    /// Input [B, in_ch, H, W] → output [B, out_ch, H, W].
    pub fn forward(&self, x: &Tensor<T>) -> Result<(Tensor<T>, ConvCache<T>)> {
        let [b, c, h, w] = dims4(x)?;
        if c != self.in_ch {
            return Err(Error::shape(format!("{} input channels", self.in_ch), format!("{c}")));
        }
        let hw = h * w;
        let k = self.in_ch * 9;
        let mut cols = vec![T::zero(); b * k * hw];
        let mut out = Tensor::zeros(&[b, self.out_ch, h, w]);
        let in_stride = c * hw;
        let out_stride = self.out_ch * hw;

        out.data_mut()
            .par_chunks_mut(out_stride)
            .zip(cols.par_chunks_mut(k * hw))
            .enumerate()
            .for_each(|(s, (out_s, cols_s))| {
                self.im2col(&x.data()[s * in_stride..(s + 1) * in_stride], h, w, cols_s);
                gemm_acc(out_s, &self.weight, cols_s, self.out_ch, k, hw);
                for oc in 0..self.out_ch {
                    let bias = self.bias[oc];
                    for v in &mut out_s[oc * hw..(oc + 1) * hw] {
                        *v += bias;
                    }
                }
            });
        Ok((out, ConvCache { cols, h, w, batch: b }))
    }

    /// Returns (grad_input, grad_weight, grad_bias).
    pub fn backward(
        &self,
        cache: &ConvCache<T>,
        grad_out: &Tensor<T>,
    ) -> Result<(Tensor<T>, Vec<T>, Vec<T>)> {
        let (b, h, w) = (cache.batch, cache.h, cache.w);
        let hw = h * w;
        let k = self.in_ch * 9;
        let mut grad_in = Tensor::zeros(&[b, self.in_ch, h, w]);
        let mut grad_b = vec![T::zero(); self.out_ch];
        let gout = grad_out.data();

        // Per-sample weight-gradient contributions, then a fixed-order sum.
        let per_sample: Vec<Vec<T>> = (0..b)
            .into_par_iter()
            .map(|s| {
                let g = &gout[s * self.out_ch * hw..(s + 1) * self.out_ch * hw];
                let cols_s = &cache.cols[s * k * hw..(s + 1) * k * hw];
                let mut gw = vec![T::zero(); self.out_ch * k];
                gemm_abt_acc(&mut gw, g, cols_s, self.out_ch, k, hw);
                gw
            })
            .collect();
        let mut grad_w = vec![T::zero(); self.out_ch * k];
        for gw in &per_sample {
            for (acc, v) in grad_w.iter_mut().zip(gw) {
                *acc += *v;
            }
        }
        for s in 0..b {
            for oc in 0..self.out_ch {
                let mut acc = T::zero();
                for &v in &gout[(s * self.out_ch + oc) * hw..(s * self.out_ch + oc + 1) * hw] {
                    acc += v;
                }
                grad_b[oc] += acc;
            }
        }

        let in_stride = self.in_ch * hw;
        grad_in
            .data_mut()
            .par_chunks_mut(in_stride)
            .enumerate()
            .for_each(|(s, gin_s)| {
                let g = &gout[s * self.out_ch * hw..(s + 1) * self.out_ch * hw];
                let mut gcols = vec![T::zero(); k * hw];
                gemm_at_acc(&mut gcols, &self.weight, g, self.out_ch, k, hw);
                // col2im: scatter-add the column gradients back.
                for c in 0..self.in_ch {
                    let plane = &mut gin_s[c * hw..(c + 1) * hw];
                    for ky in 0..3usize {
                        for kx in 0..3usize {
                            let row = &gcols[(c * 9 + ky * 3 + kx) * hw..(c * 9 + ky * 3 + kx + 1) * hw];
                            for y in 0..h {
                                let sy = y as isize + ky as isize - 1;
                                if sy < 0 || sy >= h as isize {
                                    continue;
                                }
                                let x_lo = if kx == 0 { 1 } else { 0 };
                                let x_hi = if kx == 2 { w - 1 } else { w };
                                let shift = kx as isize - 1;
                                for x_pos in x_lo..x_hi {
                                    plane[sy as usize * w + (x_pos as isize + shift) as usize] +=
                                        row[y * w + x_pos];
                                }
                            }
                        }
                    }
                }
            });
        Ok((grad_in, grad_w, grad_b))
    }
}

// ---------------------------------------------------------------------
// BatchNorm2d
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct BatchNorm2d<T: Real> {
    pub ch: usize,
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
    pub running_mean: Vec<T>,
    pub running_var: Vec<T>,
    pub eps: f64,
    pub momentum: f64,
}

pub struct BnCache<T: Real> {
    xhat: Vec<T>,
    inv_std: Vec<T>,
    shape: Vec<usize>,
}

impl<T: Real> BatchNorm2d<T> {
    pub fn init(ch: usize) -> Self {
        BatchNorm2d {
            ch,
            gamma: vec![T::one(); ch],
            beta: vec![T::zero(); ch],
            running_mean: vec![T::zero(); ch],
            running_var: vec![T::one(); ch],
            eps: 1e-5,
            momentum: 0.1,
        }
    }

    /// Train mode: normalise with batch statistics and update the
    /// running estimates (unbiased variance, momentum 0.1).
    pub fn forward_train(&mut self, x: &Tensor<T>) -> Result<(Tensor<T>, BnCache<T>)> {
        let [b, c, h, w] = dims4(x)?;
        if c != self.ch {
            return Err(Error::shape(format!("{} channels", self.ch), format!("{c}")));
        }
        let hw = h * w;
        let count = b * hw;
        let mut out = Tensor::zeros(x.shape());
        let mut xhat = vec![T::zero(); x.len()];
        let mut inv_std = vec![T::zero(); c];

        for ch in 0..c {
            let mut mean = T::zero();
            for s in 0..b {
                for &v in &x.data()[(s * c + ch) * hw..(s * c + ch + 1) * hw] {
                    mean += v;
                }
            }
            mean /= T::of(count as f64);
            let mut var = T::zero();
            for s in 0..b {
                for &v in &x.data()[(s * c + ch) * hw..(s * c + ch + 1) * hw] {
                    let d = v - mean;
                    var += d * d;
                }
            }
            var /= T::of(count as f64);
            let istd = T::one() / (var + T::of(self.eps)).sqrt();
            inv_std[ch] = istd;

            let (g, bta) = (self.gamma[ch], self.beta[ch]);
            for s in 0..b {
                let base = (s * c + ch) * hw;
                for i in 0..hw {
                    let xh = (x.data()[base + i] - mean) * istd;
                    xhat[base + i] = xh;
                    out.data_mut()[base + i] = g * xh + bta;
                }
            }

            let m = T::of(self.momentum);
            let unbiased = if count > 1 {
                var * T::of(count as f64 / (count as f64 - 1.0))
            } else {
                var
            };
            self.running_mean[ch] = (T::one() - m) * self.running_mean[ch] + m * mean;
            self.running_var[ch] = (T::one() - m) * self.running_var[ch] + m * unbiased;
        }
        Ok((out, BnCache { xhat, inv_std, shape: x.shape().to_vec() }))
    }

    /// Eval mode: normalise with the running statistics; pure function.
    pub fn forward_eval(&self, x: &Tensor<T>) -> Result<Tensor<T>> {
        let [b, c, h, w] = dims4(x)?;
        if c != self.ch {
            return Err(Error::shape(format!("{} channels", self.ch), format!("{c}")));
        }
        let hw = h * w;
        let mut out = Tensor::zeros(x.shape());
        for ch in 0..c {
            let istd = T::one() / (self.running_var[ch] + T::of(self.eps)).sqrt();
            let (g, bta, mean) = (self.gamma[ch], self.beta[ch], self.running_mean[ch]);
            for s in 0..b {
                let base = (s * c + ch) * hw;
                for i in 0..hw {
                    out.data_mut()[base + i] = g * (x.data()[base + i] - mean) * istd + bta;
                }
            }
        }
        Ok(out)
    }

    pub fn backward(
        &self,
        cache: &BnCache<T>,
        grad_out: &Tensor<T>,
    ) -> Result<(Tensor<T>, Vec<T>, Vec<T>)> {
        let (b, c, h, w) = (cache.shape[0], cache.shape[1], cache.shape[2], cache.shape[3]);
        let hw = h * w;
        let count = T::of((b * hw) as f64);
        let mut grad_in = Tensor::zeros(&cache.shape);
        let mut grad_gamma = vec![T::zero(); c];
        let mut grad_beta = vec![T::zero(); c];
        let gout = grad_out.data();

        for ch in 0..c {
            let mut sum_gy = T::zero();
            let mut sum_gy_xhat = T::zero();
            for s in 0..b {
                let base = (s * c + ch) * hw;
                for i in 0..hw {
                    sum_gy += gout[base + i];
                    sum_gy_xhat += gout[base + i] * cache.xhat[base + i];
                }
            }
            grad_beta[ch] = sum_gy;
            grad_gamma[ch] = sum_gy_xhat;

            let scale = self.gamma[ch] * cache.inv_std[ch];
            for s in 0..b {
                let base = (s * c + ch) * hw;
                for i in 0..hw {
                    let gy = gout[base + i];
                    grad_in.data_mut()[base + i] = scale
                        * (gy - (sum_gy + cache.xhat[base + i] * sum_gy_xhat) / count);
                }
            }
        }
        Ok((grad_in, grad_gamma, grad_beta))
    }
}

// ---------------------------------------------------------------------
// ReLU / MaxPool / GlobalAvgPool / Dense
// ---------------------------------------------------------------------

pub struct ReluCache {
    active: Vec<bool>,
}

pub fn relu_forward<T: Real>(x: &Tensor<T>) -> (Tensor<T>, ReluCache) {
    let mut out = Tensor::zeros(x.shape());
    let mut active = vec![false; x.len()];
    for (i, (&v, o)) in x.data().iter().zip(out.data_mut()).enumerate() {
        if v > T::zero() {
            *o = v;
            active[i] = true;
        }
    }
    (out, ReluCache { active })
}

pub fn relu_backward<T: Real>(cache: &ReluCache, grad_out: &Tensor<T>) -> Tensor<T> {
    let mut grad_in = Tensor::zeros(grad_out.shape());
    for (i, (&g, o)) in grad_out.data().iter().zip(grad_in.data_mut()).enumerate() {
        if cache.active[i] {
            *o = g;
        }
    }
    grad_in
}

pub struct PoolCache {
    argmax: Vec<usize>,
    in_shape: Vec<usize>,
}

/// 2×2 max-pool, stride 2; input spatial dims must be even.
pub fn maxpool2_forward<T: Real>(x: &Tensor<T>) -> Result<(Tensor<T>, PoolCache)> {
    let [b, c, h, w] = dims4(x)?;
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::shape("even spatial dims", format!("{h}x{w}")));
    }
    let (oh, ow) = (h / 2, w / 2);
    let mut out = Tensor::zeros(&[b, c, oh, ow]);
    let mut argmax = vec![0usize; b * c * oh * ow];
    for bc in 0..b * c {
        let plane = &x.data()[bc * h * w..(bc + 1) * h * w];
        for y in 0..oh {
            for xcol in 0..ow {
                let mut best_idx = (2 * y) * w + 2 * xcol;
                let mut best = plane[best_idx];
                for (dy, dx) in [(0usize, 1usize), (1, 0), (1, 1)] {
                    let idx = (2 * y + dy) * w + 2 * xcol + dx;
                    if plane[idx] > best {
                        best = plane[idx];
                        best_idx = idx;
                    }
                }
                out.data_mut()[bc * oh * ow + y * ow + xcol] = best;
                argmax[bc * oh * ow + y * ow + xcol] = bc * h * w + best_idx;
            }
        }
    }
    Ok((out, PoolCache { argmax, in_shape: vec![b, c, h, w] }))
}

pub fn maxpool2_backward<T: Real>(cache: &PoolCache, grad_out: &Tensor<T>) -> Tensor<T> {
    let mut grad_in = Tensor::zeros(&cache.in_shape);
    for (i, &g) in grad_out.data().iter().enumerate() {
        grad_in.data_mut()[cache.argmax[i]] += g;
    }
    grad_in
}

pub struct GapCache {
    in_shape: Vec<usize>,
}

/// Global average pool [B, C, H, W] → [B, C].
pub fn gap_forward<T: Real>(x: &Tensor<T>) -> Result<(Tensor<T>, GapCache)> {
    let [b, c, h, w] = dims4(x)?;
    let hw = h * w;
    let mut out = Tensor::zeros(&[b, c]);
    for bc in 0..b * c {
        let mut acc = T::zero();
        for &v in &x.data()[bc * hw..(bc + 1) * hw] {
            acc += v;
        }
        out.data_mut()[bc] = acc / T::of(hw as f64);
    }
    Ok((out, GapCache { in_shape: vec![b, c, h, w] }))
}

pub fn gap_backward<T: Real>(cache: &GapCache, grad_out: &Tensor<T>) -> Tensor<T> {
    let (h, w) = (cache.in_shape[2], cache.in_shape[3]);
    let hw = h * w;
    let mut grad_in = Tensor::zeros(&cache.in_shape);
    for (bc, &g) in grad_out.data().iter().enumerate() {
        let scaled = g / T::of(hw as f64);
        for v in &mut grad_in.data_mut()[bc * hw..(bc + 1) * hw] {
            *v = scaled;
        }
    }
    grad_in
}

#[derive(Debug, Clone)]
pub struct Dense<T: Real> {
    pub in_dim: usize,
    pub out_dim: usize,
    /// [out_dim × in_dim]
    pub weight: Vec<T>,
    pub bias: Vec<T>,
}

pub struct DenseCache<T: Real> {
    input: Tensor<T>,
}

impl<T: Real> Dense<T> {
    pub fn init(in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        Dense {
            in_dim,
            out_dim,
            weight: kaiming_normal(rng, out_dim * in_dim, in_dim),
            bias: vec![T::zero(); out_dim],
        }
    }

    /// Input [B, in_dim] → output [B, out_dim].
    pub fn forward(&self, x: &Tensor<T>) -> Result<(Tensor<T>, DenseCache<T>)> {
        let out = self.forward_eval(x)?;
        Ok((out, DenseCache { input: x.clone() }))
    }

    pub fn forward_eval(&self, x: &Tensor<T>) -> Result<Tensor<T>> {
        if x.shape().len() != 2 || x.shape()[1] != self.in_dim {
            return Err(Error::shape(format!("[B, {}]", self.in_dim), format!("{:?}", x.shape())));
        }
        let b = x.shape()[0];
        let mut out = Tensor::zeros(&[b, self.out_dim]);
        for s in 0..b {
            let xin = &x.data()[s * self.in_dim..(s + 1) * self.in_dim];
            let orow = &mut out.data_mut()[s * self.out_dim..(s + 1) * self.out_dim];
            for o in 0..self.out_dim {
                let wrow = &self.weight[o * self.in_dim..(o + 1) * self.in_dim];
                let mut acc = self.bias[o];
                for (&wv, &xv) in wrow.iter().zip(xin) {
                    acc += wv * xv;
                }
                orow[o] = acc;
            }
        }
        Ok(out)
    }

    pub fn backward(
        &self,
        cache: &DenseCache<T>,
        grad_out: &Tensor<T>,
    ) -> Result<(Tensor<T>, Vec<T>, Vec<T>)> {
        let b = cache.input.shape()[0];
        let mut grad_w = vec![T::zero(); self.out_dim * self.in_dim];
        let mut grad_b = vec![T::zero(); self.out_dim];
        let mut grad_in = Tensor::zeros(cache.input.shape());
        for s in 0..b {
            let xin = &cache.input.data()[s * self.in_dim..(s + 1) * self.in_dim];
            let g = &grad_out.data()[s * self.out_dim..(s + 1) * self.out_dim];
            for o in 0..self.out_dim {
                grad_b[o] += g[o];
                let wg = &mut grad_w[o * self.in_dim..(o + 1) * self.in_dim];
                for (wgv, &xv) in wg.iter_mut().zip(xin) {
                    *wgv += g[o] * xv;
                }
            }
            let gin = &mut grad_in.data_mut()[s * self.in_dim..(s + 1) * self.in_dim];
            for o in 0..self.out_dim {
                let wrow = &self.weight[o * self.in_dim..(o + 1) * self.in_dim];
                for (gv, &wv) in gin.iter_mut().zip(wrow) {
                    *gv += g[o] * wv;
                }
            }
        }
        Ok((grad_in, grad_w, grad_b))
    }
}

pub(crate) fn dims4<T: Real>(x: &Tensor<T>) -> Result<[usize; 4]> {
    match x.shape() {
        [b, c, h, w] => Ok([*b, *c, *h, *w]),
        other => Err(Error::shape("4-d tensor", format!("{other:?}"))),
    }
}
