//! From-scratch tensor math and the VGG-BN classifier stack: layers with
//! hand-written backward passes, softmax cross-entropy, Adam, a
//! deterministic training loop and flat-blob checkpoints.

pub mod adam;
pub mod checkpoint;
pub mod gradcheck;
pub mod layers;
pub mod loss;
pub mod tensor;
pub mod train;
pub mod vgg;

pub use adam::{adam_step, AdamParams, AdamState};
pub use checkpoint::{CheckpointMeta, ModelCheckpoint, ParamEntry};
pub use loss::{loss_softmax_ce, softmax};
pub use tensor::Tensor;
pub use train::{posteriors, predict, train, EpochStats, SampleSet, TrainConfig, TrainOutcome};
pub use vgg::{Gradients, Tape, VggBn, VggConfig, VggVariant};
