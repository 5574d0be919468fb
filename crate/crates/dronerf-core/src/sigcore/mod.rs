//! Deterministic DSP primitives for the data-preparation chain:
//! decimation, burst detection, power normalisation and SNR mixing.
//!
//! All operations are pure functions of their inputs. Scale factors and
//! energy sums are accumulated in f64 even for f32 frames; sample data
//! keeps the frame dtype.

use num_complex::Complex;

use crate::{BurstMask, Error, IqFrame, Real, Result, SnrSpec};

mod filter;

pub use filter::IirFilter;

/// Filter constants for decimation: order and family come from the data
/// preparation chain being reproduced; ripple, cutoff and the zero-phase
/// forward-reverse application follow the de facto convention of that
/// routine.
pub const DECIMATION_FILTER_ORDER: usize = 8;
pub const DECIMATION_RIPPLE_DB: f64 = 0.05;
pub const DECIMATION_CUTOFF_REL: f64 = 0.8;

/// Default centred smoothing window for burst detection.
pub const DEFAULT_SMOOTH_WINDOW: usize = 129;
/// Default relative threshold against the frame's peak smoothed energy.
pub const DEFAULT_BURST_REL_THRESHOLD: f64 = 0.5;
/// Energy factor for selecting burst-bearing segments out of a recording.
pub const SEGMENT_ENERGY_FACTOR: f64 = 0.001;

/// Low-pass filter and keep every `factor`-th sample.
///
/// The anti-alias filter is an 8th-order Chebyshev type I lowpass
/// (0.05 dB ripple, cutoff at 0.8× the post-decimation Nyquist) applied
/// zero-phase, so a DC frame passes with unit gain.
pub fn decimate<T: Real>(frame: &IqFrame<T>, factor: usize) -> Result<IqFrame<T>> {
    if factor < 2 {
        return Err(Error::InvalidInput(format!("decimation factor must be >= 2, got {factor}")));
    }
    if frame.len() % factor != 0 {
        return Err(Error::InvalidInput(format!(
            "frame length {} not divisible by factor {factor}",
            frame.len()
        )));
    }
    let filter = IirFilter::cheby1_lowpass(
        DECIMATION_FILTER_ORDER,
        DECIMATION_RIPPLE_DB,
        DECIMATION_CUTOFF_REL / factor as f64,
    )?;
    let wide: Vec<Complex<f64>> = frame
        .samples()
        .iter()
        .map(|s| Complex::new(s.re.to64(), s.im.to64()))
        .collect();
    let filtered = filter.filtfilt(&wide)?;
    let kept: Vec<Complex<T>> = filtered
        .iter()
        .step_by(factor)
        .map(|s| Complex::new(T::of(s.re), T::of(s.im)))
        .collect();
    IqFrame::new(kept, frame.sample_rate_hz() / factor as f64)
}

/// The designed anti-alias filter for a given decimation factor, exposed
/// so tests can evaluate its frequency response as an oracle.
pub fn decimation_filter(factor: usize) -> Result<IirFilter> {
    IirFilter::cheby1_lowpass(
        DECIMATION_FILTER_ORDER,
        DECIMATION_RIPPLE_DB,
        DECIMATION_CUTOFF_REL / factor as f64,
    )
}

/// Centred moving average of |x(i)|², truncated at the frame edges.
pub fn smoothed_energy<T: Real>(frame: &IqFrame<T>, window: usize) -> Result<Vec<f64>> {
    if window < 1 {
        return Err(Error::InvalidInput("smoothing window must be >= 1".into()));
    }
    let n = frame.len();
    let energy: Vec<f64> = frame
        .samples()
        .iter()
        .map(|s| s.re.to64() * s.re.to64() + s.im.to64() * s.im.to64())
        .collect();
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + energy[i];
    }
    let left = (window - 1) / 2;
    let right = window / 2;
    let mut smoothed = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(left);
        let hi = (i + right + 1).min(n);
        smoothed.push((prefix[hi] - prefix[lo]) / (hi - lo) as f64);
    }
    Ok(smoothed)
}

/// Locate bursts as maximal runs where the smoothed energy exceeds
/// `rel_threshold` times the frame's peak smoothed energy.
///
/// The mask depends on |x|² only, so it is invariant under a global
/// phase rotation of the frame. An all-zero frame yields an empty mask.
pub fn detect_bursts<T: Real>(
    frame: &IqFrame<T>,
    smooth_window: usize,
    rel_threshold: f64,
) -> Result<BurstMask> {
    if !(0.0 < rel_threshold && rel_threshold < 1.0) {
        return Err(Error::InvalidInput(format!(
            "relative threshold must lie in (0, 1), got {rel_threshold}"
        )));
    }
    let smoothed = smoothed_energy(frame, smooth_window)?;
    let peak = smoothed.iter().cloned().fold(0.0f64, f64::max);
    if peak <= 0.0 {
        return Ok(BurstMask::empty(frame.len()));
    }
    let threshold = rel_threshold * peak;
    let mut intervals = Vec::new();
    let mut start = None;
    for (i, &v) in smoothed.iter().enumerate() {
        match (v > threshold, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                intervals.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        intervals.push(s..frame.len());
    }
    BurstMask::new(intervals, frame.len())
}

/// Peak smoothed energy of a frame; the statistic compared against the
/// recording average when selecting segments.
pub fn peak_smoothed_energy<T: Real>(frame: &IqFrame<T>, window: usize) -> Result<f64> {
    Ok(smoothed_energy(frame, window)?.into_iter().fold(0.0, f64::max))
}

/// Does a segment contain a burst? True iff its peak smoothed energy
/// exceeds `factor` times the average energy of the whole recording.
pub fn segment_has_burst(
    segment_peak_energy: f64,
    recording_mean_energy: f64,
    factor: f64,
) -> Result<bool> {
    if !(recording_mean_energy > 0.0) {
        return Err(Error::InvalidInput(format!(
            "recording mean energy must be positive, got {recording_mean_energy}"
        )));
    }
    Ok(segment_peak_energy > factor * recording_mean_energy)
}

/// Select the burst-bearing frames of a recording split into segments,
/// using the per-segment peak smoothed energy against the recording mean.
pub fn select_burst_segments<T: Real>(
    segments: &[IqFrame<T>],
    smooth_window: usize,
    factor: f64,
) -> Result<Vec<bool>> {
    if segments.is_empty() {
        return Ok(Vec::new());
    }
    let total: f64 = segments.iter().map(|f| f.mean_power() * f.len() as f64).sum();
    let count: usize = segments.iter().map(IqFrame::len).sum();
    let mean = total / count as f64;
    segments
        .iter()
        .map(|f| segment_has_burst(peak_smoothed_energy(f, smooth_window)?, mean, factor))
        .collect()
}

/// Normalise a frame to carrier power 1: only the masked (burst) samples
/// enter the power estimate, `x̂(i) = x(i) / sqrt((1/m)·Σ_mask |x(i)|²)`.
pub fn normalize_carrier_power<T: Real>(frame: &IqFrame<T>, mask: &BurstMask) -> Result<IqFrame<T>> {
    let power = frame.masked_mean_power(mask)?;
    if power <= 0.0 {
        return Err(Error::DegenerateInput("mask covers only zero-energy samples".into()));
    }
    scale_frame(frame, 1.0 / power.sqrt())
}

/// Normalise a frame to mean power 1 over all samples,
/// `n̂(i) = n(i) / sqrt((1/k)·Σ |n(i)|²)`.
pub fn normalize_mean_power<T: Real>(frame: &IqFrame<T>) -> Result<IqFrame<T>> {
    let power = frame.mean_power();
    if power <= 0.0 {
        return Err(Error::DegenerateInput("frame has no energy".into()));
    }
    scale_frame(frame, 1.0 / power.sqrt())
}

fn scale_frame<T: Real>(frame: &IqFrame<T>, scale: f64) -> Result<IqFrame<T>> {
    let s = T::of(scale);
    IqFrame::new(
        frame.samples().iter().map(|v| Complex::new(v.re * s, v.im * s)).collect(),
        frame.sample_rate_hz(),
    )
}

/// Mix a carrier-power-normalised signal with a mean-power-normalised
/// noise frame at the requested SNR:
/// `ŷ(i) = (sqrt(k)·x̂(i) + n̂(i)) / sqrt(k + 1)` with `k = 10^(SNR/10)`.
pub fn mix_at_snr<T: Real>(
    signal: &IqFrame<T>,
    noise: &IqFrame<T>,
    spec: SnrSpec,
) -> Result<IqFrame<T>> {
    if signal.len() != noise.len() {
        return Err(Error::shape(
            format!("noise of length {}", signal.len()),
            format!("length {}", noise.len()),
        ));
    }
    if signal.sample_rate_hz() != noise.sample_rate_hz() {
        return Err(Error::InvalidInput(format!(
            "sample rates differ: {} vs {}",
            signal.sample_rate_hz(),
            noise.sample_rate_hz()
        )));
    }
    let k = spec.k_factor();
    let sqrt_k = T::of(k.sqrt());
    let denom = T::of((k + 1.0).sqrt());
    let mixed: Vec<Complex<T>> = signal
        .samples()
        .iter()
        .zip(noise.samples())
        .map(|(x, n)| {
            Complex::new((sqrt_k * x.re + n.re) / denom, (sqrt_k * x.im + n.im) / denom)
        })
        .collect();
    IqFrame::new(mixed, signal.sample_rate_hz())
}

#[cfg(test)]
mod tests;
