//! VGG-style batch-norm classifier built from the layer primitives.
//!
//! Five conv stages of 3×3 convolutions (each conv followed by
//! batch-norm and ReLU, each stage by a 2×2 max-pool), then global
//! average pooling into a 256-unit dense layer and the class logits.
//! The last two stages share a width, mirroring the reference VGG
//! channel plans, so a four-entry width plan describes all five stages.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layers::*;
use super::tensor::Tensor;
use crate::{seeds, Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VggVariant {
    Vgg11,
    Vgg13,
    Vgg16,
    Vgg19,
}

impl VggVariant {
    pub const ALL: [VggVariant; 4] =
        [VggVariant::Vgg11, VggVariant::Vgg13, VggVariant::Vgg16, VggVariant::Vgg19];

    /// Convolutions per stage (batch-norm variant of the standard plans).
    pub fn convs_per_stage(self) -> [usize; 5] {
        match self {
            VggVariant::Vgg11 => [1, 1, 2, 2, 2],
            VggVariant::Vgg13 => [2, 2, 2, 2, 2],
            VggVariant::Vgg16 => [2, 2, 3, 3, 3],
            VggVariant::Vgg19 => [2, 2, 4, 4, 4],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VggVariant::Vgg11 => "vgg11",
            VggVariant::Vgg13 => "vgg13",
            VggVariant::Vgg16 => "vgg16",
            VggVariant::Vgg19 => "vgg19",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown VGG variant {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VggConfig {
    pub variant: VggVariant,
    /// Stage widths; the fifth stage reuses the last entry.
    pub width_plan: [usize; 4],
    /// Input shape is [2 × input_height × input_width].
    pub input_height: usize,
    pub input_width: usize,
    pub hidden_units: usize,
    pub num_classes: usize,
}

impl VggConfig {
    /// Desk-scale plan: widths [8, 16, 32, 32] on 2×64×64 inputs.
    pub fn desk(variant: VggVariant) -> Self {
        VggConfig {
            variant,
            width_plan: [8, 16, 32, 32],
            input_height: 64,
            input_width: 64,
            hidden_units: 256,
            num_classes: 7,
        }
    }

    /// Full-scale plan: widths [64, 128, 256, 512] on 2×1024×1024 inputs.
    pub fn paper(variant: VggVariant) -> Self {
        VggConfig {
            variant,
            width_plan: [64, 128, 256, 512],
            input_height: 1024,
            input_width: 1024,
            hidden_units: 256,
            num_classes: 7,
        }
    }

    pub fn stage_widths(&self) -> [usize; 5] {
        let [a, b, c, d] = self.width_plan;
        [a, b, c, d, d]
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_height % 32 != 0 || self.input_width % 32 != 0 {
            return Err(Error::Config(format!(
                "input {}x{} must be divisible by 32 (five pooling stages)",
                self.input_height, self.input_width
            )));
        }
        if self.width_plan.iter().any(|&w| w == 0) || self.hidden_units == 0 || self.num_classes == 0
        {
            return Err(Error::Config("widths and head sizes must be positive".into()));
        }
        Ok(())
    }

    /// Trainable parameter count (conv and dense weights/biases plus
    /// batch-norm affine terms).
    pub fn param_count(&self) -> usize {
        let widths = self.stage_widths();
        let counts = self.variant.convs_per_stage();
        let mut total = 0usize;
        let mut in_ch = 2usize;
        for (w, n) in widths.iter().zip(counts) {
            for _ in 0..n {
                total += w * in_ch * 9 + w; // conv weight + bias
                total += 2 * w; // gamma + beta
                in_ch = *w;
            }
        }
        total += self.hidden_units * widths[4] + self.hidden_units;
        total += self.num_classes * self.hidden_units + self.num_classes;
        total
    }
}

/// The assembled model.
pub struct VggBn<T: Real> {
    pub config: VggConfig,
    convs: Vec<Conv2d<T>>,
    bns: Vec<BatchNorm2d<T>>,
    fc1: Dense<T>,
    fc2: Dense<T>,
}

/// Forward activations retained for the backward pass.
pub struct Tape<T: Real> {
    convs: Vec<ConvCache<T>>,
    bns: Vec<BnCache<T>>,
    relus: Vec<ReluCache>,
    pools: Vec<PoolCache>,
    gap: GapCache,
    fc1: DenseCache<T>,
    hidden_relu: ReluCache,
    fc2: DenseCache<T>,
}

/// Gradients aligned with [`VggBn::trainable_param_slices`] order.
pub struct Gradients<T: Real> {
    pub groups: Vec<Vec<T>>,
}

impl<T: Real> VggBn<T> {
    pub fn init(config: VggConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng: ChaCha8Rng = seeds::rng(seed, "vgg-init", &[]);
        let widths = config.stage_widths();
        let counts = config.variant.convs_per_stage();
        let mut convs = Vec::new();
        let mut bns = Vec::new();
        let mut in_ch = 2usize;
        for (w, n) in widths.iter().zip(counts) {
            for _ in 0..n {
                convs.push(Conv2d::init(in_ch, *w, &mut rng));
                bns.push(BatchNorm2d::init(*w));
                in_ch = *w;
            }
        }
        let fc1 = Dense::init(widths[4], config.hidden_units, &mut rng);
        let fc2 = Dense::init(config.hidden_units, config.num_classes, &mut rng);
        Ok(VggBn { config, convs, bns, fc1, fc2 })
    }

    fn check_input(&self, x: &Tensor<T>) -> Result<()> {
        match x.shape() {
            [_, 2, h, w] if *h == self.config.input_height && *w == self.config.input_width => {
                Ok(())
            }
            other => Err(Error::shape(
                format!("[B, 2, {}, {}]", self.config.input_height, self.config.input_width),
                format!("{other:?}"),
            )),
        }
    }

    /// Training-mode forward (batch statistics, running stats updated).
    pub fn forward_train(&mut self, x: &Tensor<T>) -> Result<(Tensor<T>, Tape<T>)> {
        self.check_input(x)?;
        let counts = self.config.variant.convs_per_stage();
        let mut convs = Vec::new();
        let mut bns = Vec::new();
        let mut relus = Vec::new();
        let mut pools = Vec::new();
        let mut cur = x.clone();
        let mut li = 0usize;
        for &n in &counts {
            for _ in 0..n {
                let (y, cc) = self.convs[li].forward(&cur)?;
                let (y, bc) = self.bns[li].forward_train(&y)?;
                let (y, rc) = relu_forward(&y);
                convs.push(cc);
                bns.push(bc);
                relus.push(rc);
                cur = y;
                li += 1;
            }
            let (y, pc) = maxpool2_forward(&cur)?;
            pools.push(pc);
            cur = y;
        }
        let (feat, gap) = gap_forward(&cur)?;
        let (hidden, fc1_cache) = self.fc1.forward(&feat)?;
        let (hidden, hidden_relu) = relu_forward(&hidden);
        let (logits, fc2_cache) = self.fc2.forward(&hidden)?;
        Ok((logits, Tape {
            convs,
            bns,
            relus,
            pools,
            gap,
            fc1: fc1_cache,
            hidden_relu,
            fc2: fc2_cache,
        }))
    }

    /// Eval-mode forward (running statistics, no state mutation). Returns
    /// the logits and, when requested, the 256-unit hidden activations.
    pub fn forward_eval(
        &self,
        x: &Tensor<T>,
        want_embeddings: bool,
    ) -> Result<(Tensor<T>, Option<Tensor<T>>)> {
        self.check_input(x)?;
        let counts = self.config.variant.convs_per_stage();
        let mut cur = x.clone();
        let mut li = 0usize;
        for &n in &counts {
            for _ in 0..n {
                let (y, _) = self.convs[li].forward(&cur)?;
                let y = self.bns[li].forward_eval(&y)?;
                let (y, _) = relu_forward(&y);
                cur = y;
                li += 1;
            }
            let (y, _) = maxpool2_forward(&cur)?;
            cur = y;
        }
        let (feat, _) = gap_forward(&cur)?;
        let hidden = self.fc1.forward_eval(&feat)?;
        let (hidden, _) = relu_forward(&hidden);
        let logits = self.fc2.forward_eval(&hidden)?;
        Ok((logits, want_embeddings.then_some(hidden)))
    }

    /// Backward pass for the batch most recently run through
    /// [`forward_train`]; gradients follow the trainable-parameter order.
    pub fn backward(&self, tape: &Tape<T>, grad_logits: &Tensor<T>) -> Result<Gradients<T>> {
        let counts = self.config.variant.convs_per_stage();
        let n_convs = self.convs.len();
        let mut conv_grads: Vec<(Vec<T>, Vec<T>)> = Vec::with_capacity(n_convs);
        let mut bn_grads: Vec<(Vec<T>, Vec<T>)> = Vec::with_capacity(n_convs);
        conv_grads.resize_with(n_convs, Default::default);
        bn_grads.resize_with(n_convs, Default::default);

        let (g, gw2, gb2) = self.fc2.backward(&tape.fc2, grad_logits)?;
        let g = relu_backward(&tape.hidden_relu, &g);
        let (g, gw1, gb1) = self.fc1.backward(&tape.fc1, &g)?;
        let mut g = gap_backward(&tape.gap, &g);

        let mut li = n_convs;
        for (stage, &n) in counts.iter().enumerate().rev() {
            g = maxpool2_backward(&tape.pools[stage], &g);
            for _ in 0..n {
                li -= 1;
                g = relu_backward(&tape.relus[li], &g);
                let (gx, ggamma, gbeta) = self.bns[li].backward(&tape.bns[li], &g)?;
                let (gx, gw, gb) = self.convs[li].backward(&tape.convs[li], &gx)?;
                conv_grads[li] = (gw, gb);
                bn_grads[li] = (ggamma, gbeta);
                g = gx;
            }
        }

        let mut groups = Vec::new();
        for i in 0..n_convs {
            let (gw, gb) = std::mem::take(&mut conv_grads[i]);
            let (gg, gbta) = std::mem::take(&mut bn_grads[i]);
            groups.push(gw);
            groups.push(gb);
            groups.push(gg);
            groups.push(gbta);
        }
        groups.push(gw1);
        groups.push(gb1);
        groups.push(gw2);
        groups.push(gb2);
        Ok(Gradients { groups })
    }

    /// Name, shape and trainability of every parameter, in blob order.
    /// Batch-norm running statistics ride along as non-trainable entries.
    pub fn param_table(&self) -> Vec<(String, Vec<usize>, bool)> {
        let mut table = Vec::new();
        for (i, (conv, bn)) in self.convs.iter().zip(&self.bns).enumerate() {
            table.push((format!("conv{i}.weight"), vec![conv.out_ch, conv.in_ch, 3, 3], true));
            table.push((format!("conv{i}.bias"), vec![conv.out_ch], true));
            table.push((format!("bn{i}.gamma"), vec![bn.ch], true));
            table.push((format!("bn{i}.beta"), vec![bn.ch], true));
            table.push((format!("bn{i}.running_mean"), vec![bn.ch], false));
            table.push((format!("bn{i}.running_var"), vec![bn.ch], false));
        }
        table.push(("fc1.weight".into(), vec![self.fc1.out_dim, self.fc1.in_dim], true));
        table.push(("fc1.bias".into(), vec![self.fc1.out_dim], true));
        table.push(("fc2.weight".into(), vec![self.fc2.out_dim, self.fc2.in_dim], true));
        table.push(("fc2.bias".into(), vec![self.fc2.out_dim], true));
        table
    }

    pub fn param_slices(&self) -> Vec<&[T]> {
        let mut out: Vec<&[T]> = Vec::new();
        for (conv, bn) in self.convs.iter().zip(&self.bns) {
            out.push(&conv.weight);
            out.push(&conv.bias);
            out.push(&bn.gamma);
            out.push(&bn.beta);
            out.push(&bn.running_mean);
            out.push(&bn.running_var);
        }
        out.push(&self.fc1.weight);
        out.push(&self.fc1.bias);
        out.push(&self.fc2.weight);
        out.push(&self.fc2.bias);
        out
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut Vec<T>> {
        let mut out: Vec<&mut Vec<T>> = Vec::new();
        for (conv, bn) in self.convs.iter_mut().zip(self.bns.iter_mut()) {
            out.push(&mut conv.weight);
            out.push(&mut conv.bias);
            out.push(&mut bn.gamma);
            out.push(&mut bn.beta);
            out.push(&mut bn.running_mean);
            out.push(&mut bn.running_var);
        }
        out.push(&mut self.fc1.weight);
        out.push(&mut self.fc1.bias);
        out.push(&mut self.fc2.weight);
        out.push(&mut self.fc2.bias);
        out
    }

    /// Trainable parameters only, aligned with [`Gradients`].
    pub fn trainable_param_slices_mut(&mut self) -> Vec<&mut Vec<T>> {
        let table = self.param_table();
        self.param_slices_mut()
            .into_iter()
            .zip(table)
            .filter(|(_, (_, _, trainable))| *trainable)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn trainable_sizes(&self) -> Vec<usize> {
        self.param_table()
            .iter()
            .filter(|(_, _, t)| *t)
            .map(|(_, shape, _)| shape.iter().product())
            .collect()
    }

    /// Trainable parameter count; matches [`VggConfig::param_count`].
    pub fn param_count(&self) -> usize {
        self.trainable_sizes().iter().sum()
    }

    /// Flatten every parameter (trainable and running stats) into one
    /// blob in table order.
    pub fn snapshot(&self) -> Vec<T> {
        let mut blob = Vec::new();
        for slice in self.param_slices() {
            blob.extend_from_slice(slice);
        }
        blob
    }

    pub fn restore(&mut self, blob: &[T]) -> Result<()> {
        let total: usize = self.param_slices().iter().map(|s| s.len()).sum();
        if blob.len() != total {
            return Err(Error::shape(format!("{total} blob values"), format!("{}", blob.len())));
        }
        let mut offset = 0usize;
        for slice in self.param_slices_mut() {
            let n = slice.len();
            slice.copy_from_slice(&blob[offset..offset + n]);
            offset += n;
        }
        Ok(())
    }
}
