//! Synthetic transmitter bursts and interference.
//!
//! Stands in for anechoic-chamber recordings: each transmitter model is
//! described by the macro-parameters that shape its spectrogram
//! signature (channel spacing, burst duration, repetition period,
//! centre-frequency offset) and synthesised as Gaussian-shaped FSK
//! bursts of random bits on a randomly chosen grid channel. Everything
//! is a pure function of (model, profile, seed).

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{seeds, BurstMask, Error, IqFrame, Real, Result};

/// Bandwidth of the reference recordings the models are expressed in.
pub const REFERENCE_BAND_HZ: f64 = 14e6;
/// Centre of the 2.4 GHz band the transmitters occupy.
pub const BAND_CENTER_GHZ: f64 = 2.44175;
/// Occupied bandwidth as a fraction of channel spacing (the transmitter
/// table gives no per-model bandwidth; this factor is a fixed choice).
pub const BANDWIDTH_SPACING_FRACTION: f64 = 0.8;

/// Transmitter labels, ordered to match the dataset class table
/// (alphabetical with Noise inserted at index 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransmitterLabel {
    #[serde(rename = "DJI")]
    Dji,
    FutabaT14,
    FutabaT7,
    Graupner,
    Taranis,
    Turnigy,
}

impl TransmitterLabel {
    pub const ALL: [TransmitterLabel; 6] = [
        TransmitterLabel::Dji,
        TransmitterLabel::FutabaT14,
        TransmitterLabel::FutabaT7,
        TransmitterLabel::Graupner,
        TransmitterLabel::Taranis,
        TransmitterLabel::Turnigy,
    ];

    /// Class id in the fixed 7-class table (Noise occupies 4).
    pub fn class_id(self) -> u16 {
        match self {
            TransmitterLabel::Dji => 0,
            TransmitterLabel::FutabaT14 => 1,
            TransmitterLabel::FutabaT7 => 2,
            TransmitterLabel::Graupner => 3,
            TransmitterLabel::Taranis => 5,
            TransmitterLabel::Turnigy => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TransmitterLabel::Dji => "DJI",
            TransmitterLabel::FutabaT14 => "FutabaT14",
            TransmitterLabel::FutabaT7 => "FutabaT7",
            TransmitterLabel::Graupner => "Graupner",
            TransmitterLabel::Taranis => "Taranis",
            TransmitterLabel::Turnigy => "Turnigy",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::InvalidInput(format!("unknown transmitter label {name:?}")))
    }
}

impl std::fmt::Display for TransmitterLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Burst duration: fixed, or one of two values chosen per burst with
/// equal probability (Graupner and Taranis alternate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DurationSpec {
    Single(f64),
    Dual(f64, f64),
}

impl DurationSpec {
    pub fn min_s(&self) -> f64 {
        match *self {
            DurationSpec::Single(d) => d,
            DurationSpec::Dual(a, b) => a.min(b),
        }
    }

    pub fn max_s(&self) -> f64 {
        match *self {
            DurationSpec::Single(d) => d,
            DurationSpec::Dual(a, b) => a.max(b),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            DurationSpec::Single(d) => d,
            DurationSpec::Dual(a, b) => {
                if rng.gen_bool(0.5) {
                    a
                } else {
                    b
                }
            }
        }
    }
}

/// Repetition behaviour: a fixed period, or (Turnigy) a first burst at a
/// fixed offset followed by uniformly drawn gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RepetitionSpec {
    Fixed(f64),
    Jittered { first_s: f64, min_s: f64, max_s: f64 },
}

impl RepetitionSpec {
    pub fn min_s(&self) -> f64 {
        match *self {
            RepetitionSpec::Fixed(p) => p,
            RepetitionSpec::Jittered { min_s, .. } => min_s,
        }
    }
}

/// Macro-parameters of one transmitter, at reference-band scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmitterModel {
    pub label: TransmitterLabel,
    pub channel_spacing_hz: f64,
    pub burst_duration_s: DurationSpec,
    pub repetition: RepetitionSpec,
    /// Offset of the transmitter's channel grid from the band centre.
    pub center_offset_hz: f64,
    pub burst_bandwidth_hz: f64,
}

impl TransmitterModel {
    pub fn validate(&self) -> Result<()> {
        if self.burst_duration_s.max_s() >= self.repetition.min_s() {
            return Err(Error::Config(format!(
                "{}: burst duration {}s reaches the minimum repetition period {}s",
                self.label,
                self.burst_duration_s.max_s(),
                self.repetition.min_s()
            )));
        }
        if self.burst_bandwidth_hz > self.channel_spacing_hz {
            return Err(Error::Config(format!(
                "{}: burst bandwidth {} exceeds channel spacing {}",
                self.label, self.burst_bandwidth_hz, self.channel_spacing_hz
            )));
        }
        if self.channel_spacing_hz <= 0.0 || self.burst_duration_s.min_s() <= 0.0 {
            return Err(Error::Config(format!("{}: non-positive spacing or duration", self.label)));
        }
        Ok(())
    }

    fn entry(
        label: TransmitterLabel,
        center_freq_ghz: f64,
        spacing_mhz: f64,
        duration: DurationSpec,
        repetition: RepetitionSpec,
    ) -> Self {
        TransmitterModel {
            label,
            channel_spacing_hz: spacing_mhz * 1e6,
            burst_duration_s: duration,
            repetition,
            center_offset_hz: (center_freq_ghz - BAND_CENTER_GHZ) * 1e9,
            burst_bandwidth_hz: BANDWIDTH_SPACING_FRACTION * spacing_mhz * 1e6,
        }
    }

    /// The six transmitters of the measured table. Durations and
    /// repetition periods in ms, spacings in MHz, centre frequencies in
    /// GHz; Turnigy repeats at 61 ms once, then in [120, 2900] ms.
    pub fn default_table() -> Vec<TransmitterModel> {
        use DurationSpec::*;
        use RepetitionSpec::*;
        let ms = 1e-3;
        vec![
            Self::entry(TransmitterLabel::Dji, 2.44175, 1.7, Single(2.18 * ms), Fixed(630.0 * ms)),
            Self::entry(TransmitterLabel::FutabaT7, 2.44175, 2.0, Single(1.7 * ms), Fixed(288.0 * ms)),
            Self::entry(TransmitterLabel::FutabaT14, 2.44175, 3.1, Single(1.4 * ms), Fixed(330.0 * ms)),
            Self::entry(
                TransmitterLabel::Graupner,
                2.44175,
                1.0,
                Dual(1.9 * ms, 3.7 * ms),
                Fixed(750.0 * ms),
            ),
            Self::entry(
                TransmitterLabel::Taranis,
                2.440,
                1.5,
                Dual(3.1 * ms, 4.4 * ms),
                Fixed(420.0 * ms),
            ),
            Self::entry(
                TransmitterLabel::Turnigy,
                2.445,
                2.0,
                Single(1.3 * ms),
                Jittered { first_s: 61.0 * ms, min_s: 120.0 * ms, max_s: 2900.0 * ms },
            ),
        ]
    }

    pub fn find(table: &[TransmitterModel], label: TransmitterLabel) -> Result<&TransmitterModel> {
        table
            .iter()
            .find(|m| m.label == label)
            .ok_or_else(|| Error::Config(format!("transmitter {label} missing from model table")))
    }
}

/// Noise and interference source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NoiseModel {
    /// I.i.d. circular complex Gaussian with total variance `variance`.
    Gaussian { variance: f64 },
    /// Lab-like mixture: short narrowband hopping bursts, longer
    /// wideband bursts, and a low Gaussian floor.
    LabLike(LabNoiseParams),
}

impl NoiseModel {
    pub fn gaussian_unit() -> Self {
        NoiseModel::Gaussian { variance: 1.0 }
    }

    pub fn lab_default() -> Self {
        NoiseModel::LabLike(LabNoiseParams::default())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::Gaussian { variance } => {
                if *variance <= 0.0 {
                    return Err(Error::Config("noise variance must be positive".into()));
                }
            }
            NoiseModel::LabLike(p) => {
                if p.bt_rate_per_s <= 0.0
                    || p.bt_duration_s <= 0.0
                    || p.bt_bandwidth_hz <= 0.0
                    || p.wifi_rate_per_s <= 0.0
                    || p.wifi_duration_s <= 0.0
                    || p.wifi_bandwidth_hz <= 0.0
                    || p.floor_power <= 0.0
                {
                    return Err(Error::Config("lab noise parameters must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// Parameters of the lab-like interference mixture; rates in events per
/// second, durations in seconds, bandwidths at reference-band scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabNoiseParams {
    pub bt_rate_per_s: f64,
    pub bt_duration_s: f64,
    pub bt_bandwidth_hz: f64,
    pub wifi_rate_per_s: f64,
    pub wifi_duration_s: f64,
    pub wifi_bandwidth_hz: f64,
    pub floor_power: f64,
}

impl Default for LabNoiseParams {
    fn default() -> Self {
        LabNoiseParams {
            bt_rate_per_s: 300.0,
            bt_duration_s: 400e-6,
            bt_bandwidth_hz: 1e6,
            wifi_rate_per_s: 50.0,
            wifi_duration_s: 2.5e-3,
            wifi_bandwidth_hz: 6e6,
            floor_power: 0.1,
        }
    }
}

/// Profile name for serialisation and CLI selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Paper,
    Desk,
}

/// Scale profile tying sample rate, frame length, spectrogram segment
/// length and the time compression applied to the transmitter table.
///
/// Repetition periods are compressed so that frames at desk scale
/// usually hold several bursts; burst durations are kept at their
/// tabulated millisecond scale so burst detection and occupied-bandwidth
/// signatures stay meaningful at the reduced sample rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleProfile {
    pub name: ProfileName,
    pub sample_rate_hz: f64,
    pub frame_length: usize,
    pub segment_length: usize,
    pub duration_scale: f64,
    pub repetition_scale: f64,
}

impl ScaleProfile {
    /// Full-scale profile: 14 MHz, 2^20-sample frames, 1024-point segments.
    pub fn paper() -> Self {
        ScaleProfile {
            name: ProfileName::Paper,
            sample_rate_hz: 14e6,
            frame_length: 1 << 20,
            segment_length: 1024,
            duration_scale: 1.0,
            repetition_scale: 1.0,
        }
    }

    /// Desk profile: 250 kHz, 4096-sample frames (16.38 ms), 64-point
    /// segments, repetition periods compressed 80×.
    pub fn desk() -> Self {
        ScaleProfile {
            name: ProfileName::Desk,
            sample_rate_hz: 250e3,
            frame_length: 4096,
            segment_length: 64,
            duration_scale: 1.0,
            repetition_scale: 1.0 / 80.0,
        }
    }

    pub fn by_name(name: ProfileName) -> Self {
        match name {
            ProfileName::Paper => Self::paper(),
            ProfileName::Desk => Self::desk(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate_hz <= 0.0 {
            return Err(Error::Config("profile sample rate must be positive".into()));
        }
        if !self.segment_length.is_power_of_two() {
            return Err(Error::Config("segment length must be a power of two".into()));
        }
        let s2 = self.segment_length * self.segment_length;
        if self.frame_length % s2 != 0 || !(self.frame_length / s2).is_power_of_two() {
            return Err(Error::Config(format!(
                "frame length {} must be S²·2^j for segment length {}",
                self.frame_length, self.segment_length
            )));
        }
        if self.duration_scale <= 0.0 || self.repetition_scale <= 0.0 {
            return Err(Error::Config("time scales must be positive".into()));
        }
        Ok(())
    }

    /// Frequency compression relative to the reference band.
    pub fn freq_scale(&self) -> f64 {
        self.sample_rate_hz / REFERENCE_BAND_HZ
    }

    /// Spectrogram columns per frame.
    pub fn columns(&self) -> usize {
        self.frame_length / self.segment_length
    }

    pub fn frame_duration_s(&self) -> f64 {
        self.frame_length as f64 / self.sample_rate_hz
    }
}

// ---------------------------------------------------------------------
// Burst synthesis
// ---------------------------------------------------------------------

/// Gaussian-shaped FSK of random bits: `n` samples at `fs`, centred on
/// `center_hz`, with deviation and symbol rate derived from `bw_hz`.
/// Constant envelope except for short raised-cosine ramps.
fn gfsk_waveform(
    n: usize,
    center_hz: f64,
    bw_hz: f64,
    fs: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Complex<f64>> {
    let symbol_rate = (bw_hz / 2.0).min(fs / 2.0);
    let sps = (fs / symbol_rate).max(1.0);
    let n_symbols = ((n as f64 / sps).ceil() as usize).max(1);
    let bits: Vec<f64> =
        (0..n_symbols).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();

    // NRZ at symbol rate, smoothed by a BT = 0.5 Gaussian kernel.
    let bt = 0.5;
    let sigma = sps * (2.0f64.ln()).sqrt() / (2.0 * std::f64::consts::PI * bt);
    let half = ((3.0 * sigma).ceil() as usize).clamp(1, n);
    let kernel: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let t = i as f64 - half as f64;
            (-0.5 * (t / sigma).powi(2)).exp()
        })
        .collect();
    let ksum: f64 = kernel.iter().sum();

    let nrz = |i: isize| -> f64 {
        if i < 0 {
            return bits[0];
        }
        let sym = (i as f64 / sps) as usize;
        bits[sym.min(n_symbols - 1)]
    };
    let deviation = bw_hz / 4.0;
    let mut phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut shaped = 0.0;
        for (k, w) in kernel.iter().enumerate() {
            shaped += w * nrz(i as isize + k as isize - half as isize);
        }
        shaped /= ksum;
        let freq = center_hz + deviation * shaped;
        phase += std::f64::consts::TAU * freq / fs;
        out.push(Complex::from_polar(1.0, phase));
    }

    // Raised-cosine ramps keep the smoothed-energy edges steep enough
    // for boundary recovery while avoiding spectral splatter.
    let ramp = (n / 20).clamp(2, n / 2).max(1);
    for i in 0..ramp {
        let w = 0.5 * (1.0 - (std::f64::consts::PI * (i as f64 + 0.5) / ramp as f64).cos());
        out[i] *= w;
        out[n - 1 - i] *= w;
    }
    out
}

/// Grid channels whose scaled frequency fits the profile band.
fn valid_channels(model: &TransmitterModel, profile: &ScaleProfile) -> Result<Vec<i64>> {
    let fsc = profile.freq_scale();
    let spacing = model.channel_spacing_hz * fsc;
    let offset = model.center_offset_hz * fsc;
    let half_bw = model.burst_bandwidth_hz * fsc / 2.0;
    let limit = 0.48 * profile.sample_rate_hz;
    let mut channels = Vec::new();
    let max_idx = ((limit + offset.abs()) / spacing).ceil() as i64 + 1;
    for idx in -max_idx..=max_idx {
        let f = offset + idx as f64 * spacing;
        if f.abs() + half_bw <= limit {
            channels.push(idx);
        }
    }
    if channels.is_empty() {
        return Err(Error::Config(format!(
            "{}: no grid channel fits the profile band of {} Hz",
            model.label, profile.sample_rate_hz
        )));
    }
    Ok(channels)
}

/// One synthesised burst: a band-limited fragment of the model's
/// duration on a randomly chosen grid channel, unit carrier power, with
/// a mask marking its support.
pub fn synth_burst<T: Real>(
    model: &TransmitterModel,
    profile: &ScaleProfile,
    seed: u64,
) -> Result<(IqFrame<T>, BurstMask)> {
    model.validate()?;
    profile.validate()?;
    let mut rng = seeds::rng(seed, "synth-burst", &[]);
    synth_burst_with(model, profile, &mut rng)
}

pub(crate) fn synth_burst_with<T: Real>(
    model: &TransmitterModel,
    profile: &ScaleProfile,
    rng: &mut ChaCha8Rng,
) -> Result<(IqFrame<T>, BurstMask)> {
    let fs = profile.sample_rate_hz;
    let duration = model.burst_duration_s.draw(rng) * profile.duration_scale;
    let n = (duration * fs).round() as usize;
    if n > profile.frame_length {
        return Err(Error::Config(format!(
            "{}: burst of {n} samples does not fit a {}-sample frame",
            model.label, profile.frame_length
        )));
    }
    let n = n.max(2);

    let channels = valid_channels(model, profile)?;
    let idx = channels[rng.gen_range(0..channels.len())];
    let fsc = profile.freq_scale();
    let center = (model.center_offset_hz + idx as f64 * model.channel_spacing_hz) * fsc;
    let bw = model.burst_bandwidth_hz * fsc;

    let wave = gfsk_waveform(n, center, bw, fs, rng);
    let power = wave.iter().map(|s| s.norm_sqr()).sum::<f64>() / n as f64;
    let scale = 1.0 / power.sqrt();
    let samples: Vec<Complex<T>> = wave
        .iter()
        .map(|s| Complex::new(T::of(s.re * scale), T::of(s.im * scale)))
        .collect();
    Ok((IqFrame::new(samples, fs)?, BurstMask::full(n)))
}

/// Burst start times over `[0, total_duration_s)`. Fixed-period models
/// start at 0 and repeat exactly; jittered models start at their first
/// offset and draw every gap uniformly. Deterministic given the seed.
pub fn synth_transmission_schedule(
    model: &TransmitterModel,
    profile: &ScaleProfile,
    total_duration_s: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(total_duration_s > 0.0) {
        return Err(Error::InvalidInput("schedule duration must be positive".into()));
    }
    model.validate()?;
    profile.validate()?;
    let mut rng = seeds::rng(seed, "synth-schedule", &[]);
    let mut starts = Vec::new();
    match model.repetition {
        RepetitionSpec::Fixed(period) => {
            let period = period * profile.repetition_scale;
            let mut k = 0u64;
            loop {
                let t = k as f64 * period;
                if t >= total_duration_s {
                    break;
                }
                starts.push(t);
                k += 1;
            }
        }
        RepetitionSpec::Jittered { first_s, min_s, max_s } => {
            let mut t = first_s * profile.repetition_scale;
            while t < total_duration_s {
                starts.push(t);
                t += rng.gen_range(min_s..=max_s) * profile.repetition_scale;
            }
        }
    }
    Ok(starts)
}

// ---------------------------------------------------------------------
// Noise synthesis
// ---------------------------------------------------------------------

fn gaussian_frame(len: usize, variance: f64, fs: f64, rng: &mut ChaCha8Rng) -> Vec<Complex<f64>> {
    let sigma = (variance / 2.0).sqrt();
    let _ = fs;
    (0..len)
        .map(|_| {
            Complex::new(
                sigma * rng.sample::<f64, _>(rand_distr::StandardNormal),
                sigma * rng.sample::<f64, _>(rand_distr::StandardNormal),
            )
        })
        .collect()
}

/// Band-limited noise burst via spectral masking.
fn wideband_burst(
    n: usize,
    center_hz: f64,
    bw_hz: f64,
    fs: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Complex<f64>> {
    let mut buf = gaussian_frame(n, 1.0, fs, rng);
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    fft.process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        // Signed bin frequency.
        let f = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 } * fs / n as f64;
        if (f - center_hz).abs() > bw_hz / 2.0 {
            *v = Complex::new(0.0, 0.0);
        }
    }
    let ifft = planner.plan_fft_inverse(n);
    ifft.process(&mut buf);
    let power = buf.iter().map(|s| s.norm_sqr()).sum::<f64>() / n as f64;
    if power > 0.0 {
        let scale = 1.0 / power.sqrt();
        for v in &mut buf {
            *v *= scale;
        }
    }
    buf
}

fn event_count(rate_per_s: f64, duration_s: f64, rng: &mut ChaCha8Rng) -> usize {
    let expected = rate_per_s * duration_s;
    let base = expected.floor() as usize;
    base + usize::from(rng.gen_bool((expected - base as f64).clamp(0.0, 1.0)))
}

/// Synthesise a noise frame of `length` samples.
pub fn synth_noise<T: Real>(
    model: &NoiseModel,
    profile: &ScaleProfile,
    length: usize,
    seed: u64,
) -> Result<IqFrame<T>> {
    if length == 0 {
        return Err(Error::InvalidInput("noise length must be positive".into()));
    }
    model.validate()?;
    profile.validate()?;
    let fs = profile.sample_rate_hz;
    let mut rng = seeds::rng(seed, "synth-noise", &[]);

    let samples: Vec<Complex<f64>> = match model {
        NoiseModel::Gaussian { variance } => gaussian_frame(length, *variance, fs, &mut rng),
        NoiseModel::LabLike(p) => {
            let mut canvas = gaussian_frame(length, p.floor_power, fs, &mut rng);
            let fsc = profile.freq_scale();
            let span_s = length as f64 / fs;
            let freq_limit = 0.4 * fs;

            let bt_count = event_count(p.bt_rate_per_s, span_s, &mut rng);
            for _ in 0..bt_count {
                let n = ((p.bt_duration_s * fs).round() as usize).clamp(4, length);
                let start = rng.gen_range(0..=(length - n));
                let center = rng.gen_range(-freq_limit..freq_limit);
                let amp = rng.gen_range(0.5..2.0);
                let bw = (p.bt_bandwidth_hz * fsc).min(0.2 * fs);
                let wave = gfsk_waveform(n, center, bw, fs, &mut rng);
                for (i, w) in wave.iter().enumerate() {
                    canvas[start + i] += w * amp;
                }
            }

            let wifi_count = event_count(p.wifi_rate_per_s, span_s, &mut rng);
            for _ in 0..wifi_count {
                let n = ((p.wifi_duration_s * fs).round() as usize).clamp(8, length);
                let start = rng.gen_range(0..=(length - n));
                let bw = (p.wifi_bandwidth_hz * fsc).min(0.8 * fs);
                let center = rng.gen_range(-(freq_limit - bw / 2.0).max(0.0)..=(freq_limit - bw / 2.0).max(0.0));
                let amp = rng.gen_range(0.3..1.0);
                let wave = wideband_burst(n, center, bw, fs, &mut rng);
                for (i, w) in wave.iter().enumerate() {
                    canvas[start + i] += w * amp;
                }
            }
            canvas
        }
    };
    IqFrame::new(
        samples.iter().map(|s| Complex::new(T::of(s.re), T::of(s.im))).collect(),
        fs,
    )
}

// ---------------------------------------------------------------------
// Model table as a human-editable JSON config
// ---------------------------------------------------------------------

/// On-disk schema mirroring the transmitter table columns: centre
/// frequency in GHz, spacing in MHz, durations and repetition in ms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransmitterTableFile {
    pub band_center_ghz: f64,
    pub transmitters: Vec<TransmitterEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransmitterEntry {
    pub label: String,
    pub center_freq_ghz: f64,
    pub spacing_mhz: f64,
    /// One duration, or two alternating with equal probability.
    pub duration_ms: Vec<f64>,
    pub repetition_ms: RepetitionEntry,
    /// Occupied bandwidth in MHz; defaults to 0.8 × spacing.
    #[serde(default)]
    pub bandwidth_mhz: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepetitionEntry {
    Fixed { fixed: f64 },
    Jittered { first: f64, range: [f64; 2] },
}

impl TransmitterTableFile {
    pub fn from_models(models: &[TransmitterModel]) -> Self {
        TransmitterTableFile {
            band_center_ghz: BAND_CENTER_GHZ,
            transmitters: models
                .iter()
                .map(|m| TransmitterEntry {
                    label: m.label.name().to_string(),
                    center_freq_ghz: BAND_CENTER_GHZ + m.center_offset_hz / 1e9,
                    spacing_mhz: m.channel_spacing_hz / 1e6,
                    duration_ms: match m.burst_duration_s {
                        DurationSpec::Single(d) => vec![d * 1e3],
                        DurationSpec::Dual(a, b) => vec![a * 1e3, b * 1e3],
                    },
                    repetition_ms: match m.repetition {
                        RepetitionSpec::Fixed(p) => RepetitionEntry::Fixed { fixed: p * 1e3 },
                        RepetitionSpec::Jittered { first_s, min_s, max_s } => {
                            RepetitionEntry::Jittered {
                                first: first_s * 1e3,
                                range: [min_s * 1e3, max_s * 1e3],
                            }
                        }
                    },
                    bandwidth_mhz: Some(m.burst_bandwidth_hz / 1e6),
                })
                .collect(),
        }
    }

    pub fn into_models(self) -> Result<Vec<TransmitterModel>> {
        let mut models = Vec::with_capacity(self.transmitters.len());
        for t in &self.transmitters {
            let label = TransmitterLabel::from_name(&t.label)?;
            let duration = match t.duration_ms.as_slice() {
                [d] => DurationSpec::Single(d * 1e-3),
                [a, b] => DurationSpec::Dual(a * 1e-3, b * 1e-3),
                other => {
                    return Err(Error::Format(format!(
                        "{}: expected 1 or 2 durations, got {}",
                        t.label,
                        other.len()
                    )))
                }
            };
            let repetition = match t.repetition_ms {
                RepetitionEntry::Fixed { fixed } => RepetitionSpec::Fixed(fixed * 1e-3),
                RepetitionEntry::Jittered { first, range } => RepetitionSpec::Jittered {
                    first_s: first * 1e-3,
                    min_s: range[0] * 1e-3,
                    max_s: range[1] * 1e-3,
                },
            };
            let model = TransmitterModel {
                label,
                channel_spacing_hz: t.spacing_mhz * 1e6,
                burst_duration_s: duration,
                repetition,
                center_offset_hz: (t.center_freq_ghz - self.band_center_ghz) * 1e9,
                burst_bandwidth_hz: t
                    .bandwidth_mhz
                    .map(|b| b * 1e6)
                    .unwrap_or(BANDWIDTH_SPACING_FRACTION * t.spacing_mhz * 1e6),
            };
            model.validate()?;
            models.push(model);
        }
        Ok(models)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, serde_json::to_string_pretty(self)?)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests;
