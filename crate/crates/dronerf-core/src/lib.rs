//! RF drone detection and classification at desk scale.
//!
//! This crate reproduces a complete remote-controller RF classification
//! pipeline as a pure-software artifact:
//!
//! * [`sigcore`] — deterministic DSP for the data-preparation chain:
//!   Chebyshev decimation, burst detection, power normalisation and
//!   SNR mixing of IQ frames.
//! * [`synth`] — synthetic transmitter bursts and lab-like interference
//!   whose timing/spectral signatures follow the measured transmitter
//!   table, standing in for anechoic-chamber recordings.
//! * [`spectro`] — two-plane complex spectrograms (the CNN input) and
//!   the log-power view used for plots.
//! * [`dataset`] — assembly, persistence and stratified k-fold splitting
//!   of the labelled noisy-spectrogram dataset.
//! * [`nn`] — from-scratch tensors, VGG-BN classifiers, cross-entropy,
//!   Adam, a deterministic training loop and flat-blob checkpoints.
//! * [`eval`] — accuracy/balanced-accuracy metrics, per-SNR curves,
//!   penultimate-layer embeddings and exact t-SNE projection.
//! * [`stream`] — a simulated real-time detector: scheduled transmitters
//!   behind a free-space/antenna channel model, one-second batching,
//!   frame classification and drone-vs-noise pooling.
//!
//! Numeric code is generic over [`Real`] (`f32` for production paths,
//! `f64` for verification oracles).

pub mod dataset;
pub mod eval;
pub mod iq;
pub mod nn;
pub mod seeds;
pub mod sigcore;
pub mod spectro;
pub mod stream;
pub mod synth;

mod error;
mod real;

pub use error::{Error, Result};
pub use iq::{BurstMask, IqFrame, SnrSpec};
pub use real::Real;
