//! Core IQ domain types: frames, burst masks and SNR specifications.

use std::ops::Range;

use num_complex::Complex;

use crate::{Error, Real, Result};

/// A fixed-length complex baseband sample vector with sample-rate
/// metadata; the unit of classification.
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame<T: Real> {
    samples: Vec<Complex<T>>,
    sample_rate_hz: f64,
}

impl<T: Real> IqFrame<T> {
    /// Build a frame, validating the type invariants: positive sample
    /// rate, non-empty sample vector, all samples finite.
    pub fn new(samples: Vec<Complex<T>>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sample rate must be positive and finite, got {sample_rate_hz}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidInput("frame must contain samples".into()));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::InvalidInput("frame contains non-finite samples".into()));
        }
        Ok(Self { samples, sample_rate_hz })
    }

    /// Frame of `len` zeros; useful as an accumulation canvas.
    pub fn zeros(len: usize, sample_rate_hz: f64) -> Result<Self> {
        Self::new(vec![Complex::new(T::zero(), T::zero()); len], sample_rate_hz)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    /// Frame duration in seconds.
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Mean power `(1/k)·Σ|x(i)|²`, accumulated in f64.
    pub fn mean_power(&self) -> f64 {
        let sum: f64 = self
            .samples
            .iter()
            .map(|s| s.re.to64() * s.re.to64() + s.im.to64() * s.im.to64())
            .sum();
        sum / self.samples.len() as f64
    }

    /// Mean power over the masked samples only.
    pub fn masked_mean_power(&self, mask: &BurstMask) -> Result<f64> {
        if mask.frame_length() != self.len() {
            return Err(Error::shape(
                format!("mask over {} samples", self.len()),
                format!("mask over {} samples", mask.frame_length()),
            ));
        }
        let m = mask.covered();
        if m == 0 {
            return Err(Error::DegenerateInput("mask covers no samples".into()));
        }
        let mut sum = 0.0f64;
        for iv in mask.intervals() {
            for s in &self.samples[iv.start..iv.end] {
                sum += s.re.to64() * s.re.to64() + s.im.to64() * s.im.to64();
            }
        }
        Ok(sum / m as f64)
    }

    /// Convert the sample dtype (f32 ↔ f64).
    pub fn cast<U: Real>(&self) -> IqFrame<U> {
        IqFrame {
            samples: self
                .samples
                .iter()
                .map(|s| Complex::new(U::of(s.re.to64()), U::of(s.im.to64())))
                .collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

/// Ordered, non-overlapping half-open index ranges marking burst support
/// within a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurstMask {
    intervals: Vec<Range<usize>>,
    frame_length: usize,
}

impl BurstMask {
    pub fn new(intervals: Vec<Range<usize>>, frame_length: usize) -> Result<Self> {
        let mut prev_end = 0usize;
        for (i, iv) in intervals.iter().enumerate() {
            if iv.start >= iv.end {
                return Err(Error::InvalidInput(format!(
                    "interval {i} is empty or inverted: {}..{}",
                    iv.start, iv.end
                )));
            }
            if iv.end > frame_length {
                return Err(Error::InvalidInput(format!(
                    "interval {i} ends at {} beyond frame length {frame_length}",
                    iv.end
                )));
            }
            if i > 0 && iv.start < prev_end {
                return Err(Error::InvalidInput(format!(
                    "interval {i} overlaps or is out of order (starts at {}, previous ends at {prev_end})",
                    iv.start
                )));
            }
            prev_end = iv.end;
        }
        Ok(Self { intervals, frame_length })
    }

    pub fn empty(frame_length: usize) -> Self {
        Self { intervals: Vec::new(), frame_length }
    }

    /// Mask covering the whole frame.
    pub fn full(frame_length: usize) -> Self {
        Self { intervals: vec![0..frame_length], frame_length }
    }

    pub fn intervals(&self) -> &[Range<usize>] {
        &self.intervals
    }

    pub fn frame_length(&self) -> usize {
        self.frame_length
    }

    /// Number of samples covered (`m` of the carrier-power normalisation).
    pub fn covered(&self) -> usize {
        self.intervals.iter().map(|iv| iv.end - iv.start).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.intervals.iter().any(|iv| iv.contains(&index))
    }
}

/// Target signal-to-noise ratio for mixing, with its derived linear
/// power factor `k = 10^(SNR/10)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSpec {
    snr_db: f64,
}

impl SnrSpec {
    /// Dataset work stays within [-20, 30] dB; ad-hoc mixing is unbounded.
    pub const DATASET_MIN_DB: f64 = -20.0;
    pub const DATASET_MAX_DB: f64 = 30.0;

    pub fn new(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::InvalidInput(format!("SNR must be finite, got {snr_db}")));
        }
        Ok(Self { snr_db })
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    /// Linear power mixing factor `k = 10^(SNR/10)`.
    pub fn k_factor(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    pub fn in_dataset_range(&self) -> bool {
        (Self::DATASET_MIN_DB..=Self::DATASET_MAX_DB).contains(&self.snr_db)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_rejects_bad_inputs() {
        assert!(IqFrame::<f32>::new(vec![], 1.0).is_err());
        assert!(IqFrame::new(vec![Complex::new(1.0f32, 0.0)], 0.0).is_err());
        assert!(IqFrame::new(vec![Complex::new(f32::NAN, 0.0)], 1.0).is_err());
        let f = IqFrame::new(vec![Complex::new(1.0f32, 0.0); 8], 250e3).unwrap();
        assert_eq!(f.len(), 8);
        assert!((f.mean_power() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mask_validation() {
        assert!(BurstMask::new(vec![0..4, 2..6], 8).is_err()); // overlap
        assert!(BurstMask::new(vec![4..4], 8).is_err()); // empty interval
        assert!(BurstMask::new(vec![4..10], 8).is_err()); // out of range
        assert!(BurstMask::new(vec![4..2], 8).is_err()); // inverted
        let m = BurstMask::new(vec![0..2, 4..8], 8).unwrap();
        assert_eq!(m.covered(), 6);
        assert!(m.contains(5));
        assert!(!m.contains(2));
    }

    #[test]
    fn k_factor_matches_definition() {
        // k = 10^(SNR/10): 0 dB ⇒ 1, -20 dB ⇒ 0.01, +10 dB ⇒ 10.
        for (db, k) in [(0.0, 1.0), (-20.0, 0.01), (10.0, 10.0)] {
            let spec = SnrSpec::new(db).unwrap();
            assert!((spec.k_factor() - k).abs() <= f64::EPSILON * k.abs() * 4.0);
            assert!(spec.k_factor() > 0.0);
        }
    }
}
