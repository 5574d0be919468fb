//! Two-plane complex spectrograms: the CNN input representation.
//!
//! A frame of length `S·C` becomes `C` consecutive non-overlapping
//! segments of length `S`; each segment is Fourier-transformed with
//! unitary (1/√S) normalisation, frequency-shifted so bin 0 holds the
//! most negative frequency, and stored as separate real and imaginary
//! planes. No window function is applied.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, IqFrame, Real, Result};

/// Real tensor `[2 × S × C]`: plane 0 the real part, plane 1 the
/// imaginary part of the per-segment FFT. Row-major within a plane,
/// frequency bins as rows and time columns as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram<T: Real> {
    planes: Vec<T>,
    segment_length: usize,
    columns: usize,
    fft_shift: bool,
}

impl<T: Real> Spectrogram<T> {
    pub fn from_planes(
        planes: Vec<T>,
        segment_length: usize,
        columns: usize,
        fft_shift: bool,
    ) -> Result<Self> {
        if planes.len() != 2 * segment_length * columns {
            return Err(Error::shape(
                format!("{} plane values", 2 * segment_length * columns),
                format!("{}", planes.len()),
            ));
        }
        if planes.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("spectrogram contains non-finite values".into()));
        }
        Ok(Self { planes, segment_length, columns, fft_shift })
    }

    /// Frequency bins per column (`S`).
    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    /// Time columns (`C = frame_length / S`).
    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn fft_shift(&self) -> bool {
        self.fft_shift
    }

    /// Flat `[2 × S × C]` data, plane-major then row-major.
    pub fn planes(&self) -> &[T] {
        &self.planes
    }

    pub fn value(&self, plane: usize, bin: usize, col: usize) -> T {
        self.planes[plane * self.segment_length * self.columns + bin * self.columns + col]
    }

    pub fn column(&self, col: usize) -> Vec<Complex<T>> {
        (0..self.segment_length)
            .map(|b| Complex::new(self.value(0, b, col), self.value(1, b, col)))
            .collect()
    }

    /// Total energy Σ(Re² + Im²); with unitary normalisation this equals
    /// the frame energy (Parseval).
    pub fn energy(&self) -> f64 {
        self.planes.iter().map(|v| v.to64() * v.to64()).sum()
    }

    pub fn cast<U: Real>(&self) -> Spectrogram<U> {
        Spectrogram {
            planes: self.planes.iter().map(|v| U::of(v.to64())).collect(),
            segment_length: self.segment_length,
            columns: self.columns,
            fft_shift: self.fft_shift,
        }
    }
}

/// Reusable FFT plan for one segment length.
pub struct SpectrogramPlan<T: Real> {
    fft: Arc<dyn Fft<T>>,
    segment_length: usize,
}

impl<T: Real> SpectrogramPlan<T> {
    pub fn new(segment_length: usize) -> Result<Self> {
        if !segment_length.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "segment length must be a power of two, got {segment_length}"
            )));
        }
        let fft = FftPlanner::new().plan_fft_forward(segment_length);
        Ok(Self { fft, segment_length })
    }

    pub fn compute(&self, frame: &IqFrame<T>) -> Result<Spectrogram<T>> {
        let s = self.segment_length;
        if frame.len() % s != 0 {
            return Err(Error::InvalidInput(format!(
                "frame length {} not divisible by segment length {s}",
                frame.len()
            )));
        }
        let c = frame.len() / s;
        let norm = T::of(1.0 / (s as f64).sqrt());
        let mut planes = vec![T::zero(); 2 * s * c];
        let mut buf = vec![Complex::new(T::zero(), T::zero()); s];
        for col in 0..c {
            buf.copy_from_slice(&frame.samples()[col * s..(col + 1) * s]);
            self.fft.process(&mut buf);
            for bin in 0..s {
                // fftshift: output row 0 is the most negative frequency.
                let src = (bin + s / 2) % s;
                planes[bin * c + col] = buf[src].re * norm;
                planes[s * c + bin * c + col] = buf[src].im * norm;
            }
        }
        Spectrogram::from_planes(planes, s, c, true)
    }
}

/// Compute the two-plane complex spectrogram of a frame with segment
/// length `segment_length`.
pub fn complex_spectrogram<T: Real>(
    frame: &IqFrame<T>,
    segment_length: usize,
) -> Result<Spectrogram<T>> {
    SpectrogramPlan::new(segment_length)?.compute(frame)
}

/// Log-power view `log10(sqrt(Re² + Im²) + epsilon)`, shape `[S × C]`
/// row-major. Visualisation only; the CNN consumes the raw planes.
pub fn log_power<T: Real>(spec: &Spectrogram<T>, epsilon: f64) -> Result<Vec<T>> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let s = spec.segment_length();
    let c = spec.columns();
    let mut out = Vec::with_capacity(s * c);
    for bin in 0..s {
        for col in 0..c {
            let re = spec.value(0, bin, col).to64();
            let im = spec.value(1, bin, col).to64();
            out.push(T::of(((re * re + im * im).sqrt() + epsilon).log10()));
        }
    }
    Ok(out)
}

/// Default epsilon for [`log_power`].
pub const LOG_POWER_EPSILON: f64 = 1e-12;

/// Per-plane standardisation statistics, computed on the training split
/// only and carried with the model checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneStats {
    pub mean: [f64; 2],
    pub std: [f64; 2],
}

impl PlaneStats {
    /// Identity statistics (mean 0, std 1).
    pub fn identity() -> Self {
        Self { mean: [0.0; 2], std: [1.0; 2] }
    }

    /// Moments over a set of spectrograms, per plane.
    pub fn compute<T: Real>(specs: &[&Spectrogram<T>]) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidInput("no spectrograms to compute stats over".into()));
        }
        let mut mean = [0.0f64; 2];
        let mut var = [0.0f64; 2];
        for plane in 0..2 {
            let mut sum = 0.0f64;
            let mut count = 0usize;
            for spec in specs {
                let n = spec.segment_length() * spec.columns();
                for v in &spec.planes()[plane * n..(plane + 1) * n] {
                    sum += v.to64();
                }
                count += n;
            }
            let m = sum / count as f64;
            let mut sq = 0.0f64;
            for spec in specs {
                let n = spec.segment_length() * spec.columns();
                for v in &spec.planes()[plane * n..(plane + 1) * n] {
                    let d = v.to64() - m;
                    sq += d * d;
                }
            }
            mean[plane] = m;
            var[plane] = sq / count as f64;
        }
        Ok(Self { mean, std: [var[0].sqrt(), var[1].sqrt()] })
    }
}

/// Standardise a spectrogram per plane: `(value − mean) / std`.
pub fn input_standardize<T: Real>(
    spec: &Spectrogram<T>,
    stats: &PlaneStats,
) -> Result<Spectrogram<T>> {
    if stats.std.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::DegenerateInput(format!(
            "plane std must be positive, got {:?}",
            stats.std
        )));
    }
    let n = spec.segment_length() * spec.columns();
    let mut planes = Vec::with_capacity(2 * n);
    for plane in 0..2 {
        let m = T::of(stats.mean[plane]);
        let inv = T::of(1.0 / stats.std[plane]);
        for v in &spec.planes()[plane * n..(plane + 1) * n] {
            planes.push((*v - m) * inv);
        }
    }
    Spectrogram::from_planes(planes, spec.segment_length(), spec.columns(), spec.fft_shift())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_frame(len: usize, seed: u64) -> IqFrame<f64> {
        let mut rng = seeds::rng(seed, "spectro-test", &[]);
        IqFrame::new(
            (0..len)
                .map(|_| {
                    Complex::new(
                        rng.sample::<f64, _>(rand_distr::StandardNormal),
                        rng.sample::<f64, _>(rand_distr::StandardNormal),
                    )
                })
                .collect(),
            250e3,
        )
        .unwrap()
    }

    /// Brute-force O(S²) DFT of one segment with the same unitary
    /// normalisation and shift convention; the independent oracle.
    fn dft_column(segment: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let s = segment.len();
        let norm = 1.0 / (s as f64).sqrt();
        (0..s)
            .map(|bin| {
                let k = (bin + s / 2) % s;
                let mut acc = Complex::new(0.0, 0.0);
                for (n, x) in segment.iter().enumerate() {
                    let phase = -2.0 * std::f64::consts::PI * (k * n) as f64 / s as f64;
                    acc += x * Complex::from_polar(1.0, phase);
                }
                acc * norm
            })
            .collect()
    }

    #[test]
    fn shape_arithmetic() {
        let frame = random_frame(4096, 1);
        let spec = complex_spectrogram(&frame, 64).unwrap();
        assert_eq!(spec.segment_length(), 64);
        assert_eq!(spec.columns(), 64);
        assert_eq!(spec.planes().len(), 2 * 64 * 64);
    }

    #[test]
    fn impulse_spreads_flat_over_first_column() {
        let mut samples = vec![Complex::new(0.0f64, 0.0); 256];
        samples[0] = Complex::new(1.0, 0.0);
        let frame = IqFrame::new(samples, 250e3).unwrap();
        let spec = complex_spectrogram(&frame, 64).unwrap();
        let expected = 1.0 / 8.0; // 1/√64
        for bin in 0..64 {
            let c0 = spec.column(0)[bin];
            assert!((c0.norm() - expected).abs() < 1e-12);
            for col in 1..4 {
                assert_eq!(spec.column(col)[bin], Complex::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn columns_match_brute_force_dft() {
        for seed in 0..5u64 {
            let frame = random_frame(512, seed);
            let spec = complex_spectrogram(&frame, 64).unwrap();
            for col in 0..spec.columns() {
                let oracle = dft_column(&frame.samples()[col * 64..(col + 1) * 64]);
                for (bin, expect) in oracle.iter().enumerate() {
                    let got = spec.column(col)[bin];
                    assert!(
                        (got - expect).norm() < 1e-9,
                        "col {col} bin {bin}: {got} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn indivisible_length_rejected() {
        let frame = random_frame(100, 3);
        assert!(complex_spectrogram(&frame, 64).is_err());
        assert!(complex_spectrogram(&frame, 50).is_err()); // not a power of two
    }

    #[test]
    fn pure_tone_concentrates_in_one_bin() {
        let s = 64usize;
        let fs = 250e3;
        // Exact bin frequency: 7 cycles per segment.
        let f = 7.0 * fs / s as f64;
        let frame = IqFrame::new(
            (0..4096)
                .map(|n| {
                    Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * f * n as f64 / fs)
                })
                .collect::<Vec<Complex<f64>>>(),
            fs,
        )
        .unwrap();
        let spec = complex_spectrogram(&frame, s).unwrap();
        for col in 0..spec.columns() {
            let column = spec.column(col);
            let total: f64 = column.iter().map(|v| v.norm_sqr()).sum();
            let peak = column.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
            assert!(peak / total >= 0.999, "col {col}: {}", peak / total);
        }
    }

    #[test]
    fn log_power_examples() {
        // 3-4-5 triangle: log10(5) per cell.
        let spec = Spectrogram::<f64>::from_planes(vec![3.0, 4.0], 1, 1, true).unwrap();
        let lp = log_power(&spec, 1e-300).unwrap();
        assert!((lp[0] - 5.0f64.log10()).abs() < 1e-12);

        // All-zero spectrogram with epsilon 1e-12 maps to exactly -12.
        let zero = Spectrogram::<f64>::from_planes(vec![0.0; 16], 4, 2, true).unwrap();
        for v in log_power(&zero, 1e-12).unwrap() {
            assert!((v + 12.0).abs() < 1e-12);
        }

        assert!(log_power(&zero, 0.0).is_err());
    }

    #[test]
    fn log_power_matches_definition() {
        let frame = random_frame(512, 9);
        let spec = complex_spectrogram(&frame, 32).unwrap();
        let lp = log_power(&spec, LOG_POWER_EPSILON).unwrap();
        for bin in 0..spec.segment_length() {
            for col in 0..spec.columns() {
                let re = spec.value(0, bin, col);
                let im = spec.value(1, bin, col);
                let expect = ((re * re + im * im).sqrt() + LOG_POWER_EPSILON).log10();
                let got = lp[bin * spec.columns() + col];
                assert!((got - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval_holds() {
        let frame = random_frame(4096, 17);
        let spec = complex_spectrogram(&frame, 64).unwrap();
        let frame_energy: f64 = frame.samples().iter().map(|s| s.norm_sqr()).sum();
        assert!((spec.energy() - frame_energy).abs() / frame_energy < 1e-12);

        let frame32 = frame.cast::<f32>();
        let spec32 = complex_spectrogram(&frame32, 64).unwrap();
        let energy32: f64 = frame32.samples().iter().map(|s| s.norm_sqr() as f64).sum();
        assert!((spec32.energy() - energy32).abs() / energy32 < 1e-6);
    }

    #[test]
    fn standardize_identity_and_errors() {
        let frame = random_frame(256, 5);
        let spec = complex_spectrogram(&frame, 16).unwrap();
        let same = input_standardize(&spec, &PlaneStats::identity()).unwrap();
        assert_eq!(same, spec);

        // Constant planes have zero std; standardising with own stats fails.
        let constant =
            Spectrogram::<f64>::from_planes(vec![1.0; 16], 4, 2, true).unwrap();
        let stats = PlaneStats::compute(&[&constant]).unwrap();
        assert!(matches!(
            input_standardize(&constant, &stats),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn standardize_normalises_training_split() {
        let specs: Vec<Spectrogram<f64>> = (0..8)
            .map(|i| complex_spectrogram(&random_frame(1024, 100 + i), 32).unwrap())
            .collect();
        let refs: Vec<&Spectrogram<f64>> = specs.iter().collect();
        let stats = PlaneStats::compute(&refs).unwrap();
        let standardized: Vec<Spectrogram<f64>> =
            specs.iter().map(|s| input_standardize(s, &stats).unwrap()).collect();
        let srefs: Vec<&Spectrogram<f64>> = standardized.iter().collect();
        let after = PlaneStats::compute(&srefs).unwrap();
        for p in 0..2 {
            assert!(after.mean[p].abs() < 1e-3);
            assert!((after.std[p] - 1.0).abs() < 1e-3);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn spectrogram_is_linear(seed in 0u64..500, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let x = random_frame(256, seed);
            let y = random_frame(256, seed.wrapping_add(7777));
            let combo = IqFrame::new(
                x.samples().iter().zip(y.samples()).map(|(u, v)| u * a + v * b).collect(),
                250e3,
            ).unwrap();
            let sx = complex_spectrogram(&x, 32).unwrap();
            let sy = complex_spectrogram(&y, 32).unwrap();
            let sc = complex_spectrogram(&combo, 32).unwrap();
            for i in 0..sc.planes().len() {
                let expect = a * sx.planes()[i] + b * sy.planes()[i];
                prop_assert!((sc.planes()[i] - expect).abs() < 1e-9);
            }
        }
    }
}
