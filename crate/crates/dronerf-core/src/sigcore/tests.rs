use num_complex::Complex;
use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::seeds;

fn tone(freq_hz: f64, fs: f64, len: usize, amp: f64) -> IqFrame<f64> {
    let samples = (0..len)
        .map(|n| {
            Complex::from_polar(amp, 2.0 * std::f64::consts::PI * freq_hz * n as f64 / fs)
        })
        .collect();
    IqFrame::new(samples, fs).unwrap()
}

fn noise_frame(len: usize, fs: f64, seed: u64) -> IqFrame<f64> {
    let mut rng = seeds::rng(seed, "sigcore-test-noise", &[]);
    let samples = (0..len)
        .map(|_| {
            Complex::new(
                rng.sample::<f64, _>(rand_distr::StandardNormal),
                rng.sample::<f64, _>(rand_distr::StandardNormal),
            )
        })
        .collect();
    IqFrame::new(samples, fs).unwrap()
}

// ---- decimate -------------------------------------------------------

#[test]
fn decimate_dc_passes_with_unit_gain() {
    let frame = IqFrame::new(vec![Complex::new(1.0f64, 0.0); 4096], 56e6).unwrap();
    let out = decimate(&frame, 4).unwrap();
    assert_eq!(out.len(), 1024);
    for s in out.samples() {
        assert!((s - Complex::new(1.0, 0.0)).norm() < 1e-6);
    }
}

#[test]
fn decimate_halves_rate_bookkeeping() {
    let frame = noise_frame(4096, 56e6, 7);
    let out = decimate(&frame, 4).unwrap();
    assert_eq!(out.sample_rate_hz(), 14e6);
    assert_eq!(out.len(), 1024);
}

#[test]
fn decimate_rejects_bad_args() {
    let frame = noise_frame(4096, 56e6, 8);
    assert!(matches!(decimate(&frame, 1), Err(Error::InvalidInput(_))));
    let odd = IqFrame::new(frame.samples()[..4095].to_vec(), 56e6).unwrap();
    assert!(matches!(decimate(&odd, 4), Err(Error::InvalidInput(_))));
}

#[test]
fn decimate_attenuates_stopband_tone() {
    // Tone placed 0.9 new-Nyquist beyond the new Nyquist, i.e. at
    // 1.9 × (fs/2/factor): deep in the stopband for factor 4.
    let fs = 56e6;
    let factor = 4;
    let f_tone = 1.9 * fs / 2.0 / factor as f64;
    let frame = tone(f_tone, fs, 8192, 1.0);
    let out = decimate(&frame, factor).unwrap();

    let attenuation_db = -10.0 * (out.mean_power() / frame.mean_power()).log10();
    assert!(attenuation_db >= 30.0, "measured only {attenuation_db:.1} dB");

    // Oracle: the designed filter's own response at the tone frequency,
    // doubled in dB for the forward+reverse application.
    let filt = decimation_filter(factor).unwrap();
    let omega = 2.0 * std::f64::consts::PI * f_tone / fs;
    let oracle_db = -2.0 * filt.magnitude_db(omega);
    assert!(oracle_db >= 30.0, "oracle predicts only {oracle_db:.1} dB");
}

#[test]
fn decimate_preserves_passband_tone_within_ripple() {
    // Tone at half the filter cutoff; amplitude must stay within the
    // forward+reverse passband ripple bound (2 × 0.05 dB).
    let fs = 56e6;
    let factor = 4;
    let f_tone = 0.5 * DECIMATION_CUTOFF_REL * fs / 2.0 / factor as f64;
    let frame = tone(f_tone, fs, 16384, 1.0);
    let out = decimate(&frame, factor).unwrap();
    // Ignore frame edges where the odd-extension transient lives.
    let inner = &out.samples()[out.len() / 4..3 * out.len() / 4];
    let power: f64 =
        inner.iter().map(|s| s.norm_sqr()).sum::<f64>() / inner.len() as f64;
    let db = 10.0 * power.log10();
    assert!(db >= -0.01 && db <= 0.11, "passband deviation {db} dB");
}

// ---- detect_bursts --------------------------------------------------

#[test]
fn all_zero_frame_yields_empty_mask() {
    let frame = IqFrame::new(vec![Complex::new(0.0f64, 0.0); 4096], 250e3).unwrap();
    let mask = detect_bursts(&frame, 64, 0.5).unwrap();
    assert!(mask.is_empty());
}

#[test]
fn rectangular_burst_boundaries_recovered() {
    let mut samples = vec![Complex::new(0.0f64, 0.0); 4096];
    for s in &mut samples[1000..3000] {
        *s = Complex::new(1.0, 0.0);
    }
    let frame = IqFrame::new(samples, 250e3).unwrap();
    let mask = detect_bursts(&frame, 64, 0.5).unwrap();
    assert_eq!(mask.intervals().len(), 1);
    let iv = &mask.intervals()[0];
    assert!(iv.start.abs_diff(1000) <= 64, "start {}", iv.start);
    assert!(iv.end.abs_diff(3000) <= 64, "end {}", iv.end);
}

#[test]
fn noise_mask_matches_brute_force_definition() {
    let frame = noise_frame(2048, 250e3, 99);
    let window = 33;
    let rel = 0.5;
    let mask = detect_bursts(&frame, window, rel).unwrap();

    // Independent oracle: evaluate the defining predicate per sample with
    // a naive O(n·w) truncated-window average.
    let energy: Vec<f64> = frame.samples().iter().map(|s| s.norm_sqr()).collect();
    let naive: Vec<f64> = (0..energy.len())
        .map(|i| {
            let lo = i.saturating_sub((window - 1) / 2);
            let hi = (i + window / 2 + 1).min(energy.len());
            energy[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let peak = naive.iter().cloned().fold(0.0, f64::max);
    for (i, &v) in naive.iter().enumerate() {
        assert_eq!(
            mask.contains(i),
            v > rel * peak,
            "sample {i}: smoothed {v}, threshold {}",
            rel * peak
        );
    }
    // Every recovered interval sits above the threshold on average.
    for iv in mask.intervals() {
        let mean: f64 =
            naive[iv.start..iv.end].iter().sum::<f64>() / (iv.end - iv.start) as f64;
        assert!(mean > rel * peak);
    }
}

#[test]
fn detect_bursts_rejects_bad_threshold() {
    let frame = noise_frame(256, 250e3, 1);
    assert!(detect_bursts(&frame, 16, 0.0).is_err());
    assert!(detect_bursts(&frame, 16, 1.0).is_err());
    assert!(detect_bursts(&frame, 0, 0.5).is_err());
}

// ---- segment_has_burst ----------------------------------------------

#[test]
fn segment_threshold_arithmetic() {
    assert!(segment_has_burst(0.002, 1.0, 0.001).unwrap());
    assert!(!segment_has_burst(0.0, 1.0, 0.001).unwrap());
    assert!(segment_has_burst(1.0, -1.0, 0.001).is_err());
    assert!(segment_has_burst(1.0, 0.0, 0.001).is_err());
}

#[test]
fn recording_selection_finds_exactly_the_burst_frames() {
    let fs = 250e3;
    let mut frames = Vec::new();
    for i in 0..10usize {
        let mut samples = vec![Complex::new(1e-4f64, 0.0); 2048];
        if [2, 5, 9].contains(&i) {
            for s in &mut samples[300..500] {
                *s = Complex::new(1.0, 0.0);
            }
        }
        frames.push(IqFrame::new(samples, fs).unwrap());
    }
    let selected = select_burst_segments(&frames, 64, SEGMENT_ENERGY_FACTOR).unwrap();
    let expect: Vec<bool> = (0..10).map(|i| [2, 5, 9].contains(&i)).collect();
    assert_eq!(selected, expect);
}

// ---- normalisation ---------------------------------------------------

#[test]
fn carrier_normalisation_of_constant_frame() {
    let frame = IqFrame::new(vec![Complex::new(2.0f64, 0.0); 512], 250e3).unwrap();
    let out = normalize_carrier_power(&frame, &BurstMask::full(512)).unwrap();
    for s in out.samples() {
        assert!((s.re - 1.0).abs() < 1e-12 && s.im.abs() < 1e-12);
    }
}

#[test]
fn carrier_normalisation_scales_burst_only_region() {
    let mut samples = vec![Complex::new(0.0f64, 0.0); 1024];
    for s in &mut samples[..512] {
        *s = Complex::new(0.0, 3.0);
    }
    let frame = IqFrame::new(samples, 250e3).unwrap();
    let mask = BurstMask::new(vec![0..512], 1024).unwrap();
    let out = normalize_carrier_power(&frame, &mask).unwrap();
    assert!((out.samples()[0].im - 1.0).abs() < 1e-12);
    assert_eq!(out.samples()[700], Complex::new(0.0, 0.0));
}

#[test]
fn carrier_normalisation_degenerate_inputs() {
    let frame = noise_frame(256, 250e3, 3);
    assert!(matches!(
        normalize_carrier_power(&frame, &BurstMask::empty(256)),
        Err(Error::DegenerateInput(_))
    ));
    let zeros = IqFrame::new(vec![Complex::new(0.0f64, 0.0); 256], 250e3).unwrap();
    assert!(matches!(
        normalize_carrier_power(&zeros, &BurstMask::full(256)),
        Err(Error::DegenerateInput(_))
    ));
}

#[test]
fn mean_power_normalisation_examples() {
    let frame = IqFrame::new(vec![Complex::new(0.5f64, 0.0); 512], 250e3).unwrap();
    let out = normalize_mean_power(&frame).unwrap();
    assert!((out.samples()[17].re - 1.0).abs() < 1e-12);

    let noise = noise_frame(4096, 250e3, 11);
    let out = normalize_mean_power(&noise).unwrap();
    assert!((out.mean_power() - 1.0).abs() < 1e-12);

    // Idempotence: a frame already at mean power 1 is left alone.
    let again = normalize_mean_power(&out).unwrap();
    for (a, b) in again.samples().iter().zip(out.samples()) {
        assert!((a - b).norm() < 1e-12);
    }

    let zeros = IqFrame::new(vec![Complex::new(0.0f64, 0.0); 16], 250e3).unwrap();
    assert!(matches!(normalize_mean_power(&zeros), Err(Error::DegenerateInput(_))));
}

// ---- mix_at_snr -------------------------------------------------------

#[test]
fn mix_at_zero_db_is_average_over_sqrt2() {
    let x = noise_frame(1024, 250e3, 21);
    let n = noise_frame(1024, 250e3, 22);
    let y = mix_at_snr(&x, &n, SnrSpec::new(0.0).unwrap()).unwrap();
    let sqrt2 = 2.0f64.sqrt();
    for ((a, b), c) in x.samples().iter().zip(n.samples()).zip(y.samples()) {
        let expect = Complex::new((a.re + b.re) / sqrt2, (a.im + b.im) / sqrt2);
        assert_eq!(*c, expect);
    }
}

#[test]
fn mix_rejects_mismatched_inputs() {
    let x = noise_frame(1024, 250e3, 23);
    let n = noise_frame(512, 250e3, 24);
    assert!(mix_at_snr(&x, &n, SnrSpec::new(0.0).unwrap()).is_err());
    let n = noise_frame(1024, 125e3, 24);
    assert!(mix_at_snr(&x, &n, SnrSpec::new(0.0).unwrap()).is_err());
}

#[test]
fn mixed_snr_measures_within_half_db() {
    // Oracle: retain the scaled components separately and measure the
    // realised SNR as masked signal power over mean noise power.
    let fs = 250e3;
    for &target_db in &[-10.0f64, 0.0, 10.0] {
        let mut samples = vec![Complex::new(0.0f64, 0.0); 4096];
        let mut rng = seeds::rng(31, "mix-oracle", &[target_db.to_bits()]);
        for s in &mut samples[1024..2048] {
            *s = Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        }
        let frame = IqFrame::new(samples, fs).unwrap();
        let mask = detect_bursts(&frame, 65, 0.5).unwrap();
        let signal = normalize_carrier_power(&frame, &mask).unwrap();
        let noise = normalize_mean_power(&noise_frame(4096, fs, 32)).unwrap();

        let spec = SnrSpec::new(target_db).unwrap();
        let k = spec.k_factor();
        let a = (k / (k + 1.0)).sqrt();
        let b = (1.0 / (k + 1.0)).sqrt();
        let scaled_signal = IqFrame::new(
            signal.samples().iter().map(|s| s * a).collect(),
            fs,
        )
        .unwrap();
        let scaled_noise =
            IqFrame::new(noise.samples().iter().map(|s| s * b).collect(), fs).unwrap();

        let measured_db = 10.0
            * (scaled_signal.masked_mean_power(&mask).unwrap()
                / scaled_noise.mean_power())
            .log10();
        assert!(
            (measured_db - target_db).abs() <= 0.5,
            "target {target_db} dB, measured {measured_db} dB"
        );

        // And the mix itself equals the sum of the retained components.
        let mixed = mix_at_snr(&signal, &noise, spec).unwrap();
        for ((m, s), n) in mixed
            .samples()
            .iter()
            .zip(scaled_signal.samples())
            .zip(scaled_noise.samples())
        {
            assert!((m - (s + n)).norm() < 1e-12);
        }
    }
}

// ---- spec invariants as property tests --------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eq1_masked_power_is_one(seed in 0u64..1000, start in 0usize..200, len in 1usize..200) {
        let frame = noise_frame(512, 250e3, seed);
        let mask = BurstMask::new(vec![start..start + len], 512).unwrap();
        let out = normalize_carrier_power(&frame, &mask).unwrap();
        let power = out.masked_mean_power(&mask).unwrap();
        prop_assert!((power - 1.0).abs() < 1e-9);
        // Idempotence
        let again = normalize_carrier_power(&out, &mask).unwrap();
        for (a, b) in again.samples().iter().zip(out.samples()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn eq2_mean_power_is_one(seed in 0u64..1000, len in 16usize..2048) {
        let frame = noise_frame(len, 250e3, seed);
        let out = normalize_mean_power(&frame).unwrap();
        prop_assert!((out.mean_power() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn eq3_matches_scalar_loop(seed in 0u64..1000, snr_db in -30.0f64..40.0) {
        let x = noise_frame(256, 250e3, seed);
        let n = noise_frame(256, 250e3, seed.wrapping_add(1));
        let spec = SnrSpec::new(snr_db).unwrap();
        let y = mix_at_snr(&x, &n, spec).unwrap();
        let k = spec.k_factor();
        let (sk, dk) = (k.sqrt(), (k + 1.0).sqrt());
        for ((a, b), c) in x.samples().iter().zip(n.samples()).zip(y.samples()) {
            // Independent scalar loop, same precision: must match exactly.
            prop_assert_eq!(c.re, (sk * a.re + b.re) / dk);
            prop_assert_eq!(c.im, (sk * a.im + b.im) / dk);
        }
    }

    #[test]
    fn burst_mask_is_phase_invariant(seed in 0u64..500, phase in 0.0f64..6.28) {
        let frame = noise_frame(1024, 250e3, seed);
        let rotated = IqFrame::new(
            frame.samples().iter().map(|s| s * Complex::from_polar(1.0, phase)).collect(),
            250e3,
        ).unwrap();
        let a = detect_bursts(&frame, 33, 0.5).unwrap();
        let b = detect_bursts(&rotated, 33, 0.5).unwrap();
        prop_assert_eq!(a, b);
    }
}
