use super::*;
use crate::sigcore::{detect_bursts, normalize_mean_power};

fn model(label: TransmitterLabel) -> TransmitterModel {
    TransmitterModel::find(&TransmitterModel::default_table(), label)
        .unwrap()
        .clone()
}

#[test]
fn profiles_validate() {
    ScaleProfile::paper().validate().unwrap();
    ScaleProfile::desk().validate().unwrap();
    let mut bad = ScaleProfile::desk();
    bad.frame_length = 4095;
    assert!(bad.validate().is_err());
}

#[test]
fn default_table_validates() {
    for m in TransmitterModel::default_table() {
        m.validate().unwrap();
    }
}

#[test]
fn dji_burst_length_at_paper_scale() {
    let dji = model(TransmitterLabel::Dji);
    let (frame, mask) = synth_burst::<f32>(&dji, &ScaleProfile::paper(), 1).unwrap();
    // 2.18 ms at 14 MHz, within one symbol period.
    let sps = (14e6 / (dji.burst_bandwidth_hz / 2.0)).ceil() as usize;
    assert!(frame.len().abs_diff(30520) <= sps, "got {}", frame.len());
    assert_eq!(mask.covered(), frame.len());
    // Unit carrier power over the support.
    assert!((frame.masked_mean_power(&mask).unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn duration_scale_is_applied_exactly() {
    let dji = model(TransmitterLabel::Dji);
    let mut profile = ScaleProfile::desk();
    let (full, _) = synth_burst::<f32>(&dji, &profile, 3).unwrap();
    profile.duration_scale = 0.5;
    let (half, _) = synth_burst::<f32>(&dji, &profile, 3).unwrap();
    let expect = (2.18e-3 * 0.5 * profile.sample_rate_hz).round() as usize;
    assert_eq!(half.len(), expect);
    assert_eq!(full.len(), (2.18e-3 * profile.sample_rate_hz).round() as usize);
}

#[test]
fn burst_longer_than_frame_is_a_config_error() {
    let dji = model(TransmitterLabel::Dji);
    let mut tiny = ScaleProfile::desk();
    tiny.frame_length = 16;
    tiny.segment_length = 4;
    assert!(matches!(
        synth_burst::<f32>(&dji, &tiny, 1),
        Err(Error::Config(_))
    ));
}

/// 99% occupied bandwidth from the burst's own periodogram.
fn occupied_bandwidth_hz(frame: &IqFrame<f64>) -> f64 {
    let n = frame.len();
    let mut buf: Vec<Complex<f64>> = frame.samples().to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // Shift so the spectrum is ordered from -fs/2 to fs/2.
    let psd: Vec<f64> = (0..n).map(|i| buf[(i + n / 2) % n].norm_sqr()).collect();
    let total: f64 = psd.iter().sum();
    let mut lo = 0usize;
    let mut acc = 0.0;
    while lo < n && acc + psd[lo] <= 0.005 * total {
        acc += psd[lo];
        lo += 1;
    }
    let mut hi = n - 1;
    acc = 0.0;
    while hi > lo && acc + psd[hi] <= 0.005 * total {
        acc += psd[hi];
        hi -= 1;
    }
    (hi - lo + 1) as f64 * frame.sample_rate_hz() / n as f64
}

#[test]
fn turnigy_occupied_bandwidth_within_channel_spacing() {
    let turnigy = model(TransmitterLabel::Turnigy);
    let profile = ScaleProfile::paper();
    for seed in 0..3u64 {
        let (frame, _) = synth_burst::<f64>(&turnigy, &profile, seed).unwrap();
        let obw = occupied_bandwidth_hz(&frame);
        assert!(
            obw <= turnigy.channel_spacing_hz * profile.freq_scale(),
            "seed {seed}: OBW {obw} Hz"
        );
    }
}

#[test]
fn burst_is_reproducible_bit_for_bit() {
    let taranis = model(TransmitterLabel::Taranis);
    let (a, _) = synth_burst::<f32>(&taranis, &ScaleProfile::desk(), 42).unwrap();
    let (b, _) = synth_burst::<f32>(&taranis, &ScaleProfile::desk(), 42).unwrap();
    assert_eq!(a.samples(), b.samples());
    let (c, _) = synth_burst::<f32>(&taranis, &ScaleProfile::desk(), 43).unwrap();
    assert_ne!(a.samples(), c.samples());
}

#[test]
fn every_burst_recovers_its_duration_under_default_detection() {
    let profile = ScaleProfile::desk();
    for m in TransmitterModel::default_table() {
        for seed in 0..4u64 {
            let (burst, _) = synth_burst::<f64>(&m, &profile, seed).unwrap();
            let n = burst.len();
            let mut samples = vec![Complex::new(0.0, 0.0); n + 2 * 2048];
            samples[2048..2048 + n].copy_from_slice(burst.samples());
            let frame = IqFrame::new(samples, profile.sample_rate_hz).unwrap();
            let mask = detect_bursts(
                &frame,
                crate::sigcore::DEFAULT_SMOOTH_WINDOW,
                crate::sigcore::DEFAULT_BURST_REL_THRESHOLD,
            )
            .unwrap();
            let covered = mask.covered();
            assert!(
                (covered as f64 - n as f64).abs() <= 0.1 * n as f64,
                "{}: burst of {n} recovered as {covered}",
                m.label
            );
        }
    }
}

#[test]
fn distinct_models_differ_in_at_least_one_signature() {
    let table = TransmitterModel::default_table();
    let rel = |a: f64, b: f64| (a - b).abs() / a.min(b);
    for (i, a) in table.iter().enumerate() {
        for b in table.iter().skip(i + 1) {
            let separable = rel(a.channel_spacing_hz, b.channel_spacing_hz) >= 0.15
                || rel(a.burst_duration_s.min_s(), b.burst_duration_s.min_s()) >= 0.15
                || rel(a.burst_bandwidth_hz, b.burst_bandwidth_hz) >= 0.15;
            assert!(separable, "{} vs {} not separable", a.label, b.label);
        }
    }
}

// ---- schedules --------------------------------------------------------

#[test]
fn dji_schedule_repeats_exactly() {
    let dji = model(TransmitterLabel::Dji);
    let starts =
        synth_transmission_schedule(&dji, &ScaleProfile::paper(), 3.15, 0).unwrap();
    let expect = [0.0, 0.63, 1.26, 1.89, 2.52];
    assert_eq!(starts.len(), 5);
    for (got, want) in starts.iter().zip(expect) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn short_window_holds_exactly_one_burst() {
    for m in TransmitterModel::default_table() {
        if let RepetitionSpec::Fixed(period) = m.repetition {
            let starts =
                synth_transmission_schedule(&m, &ScaleProfile::paper(), period * 0.9, 1).unwrap();
            assert_eq!(starts.len(), 1, "{}", m.label);
        }
    }
}

#[test]
fn turnigy_gaps_stay_in_the_stated_interval() {
    let turnigy = model(TransmitterLabel::Turnigy);
    for profile in [ScaleProfile::paper(), ScaleProfile::desk()] {
        let starts = synth_transmission_schedule(&turnigy, &profile, 10.0, 7).unwrap();
        assert!(
            (starts[0] - 61e-3 * profile.repetition_scale).abs() < 1e-12,
            "first burst at {}",
            starts[0]
        );
        for pair in starts.windows(2) {
            let gap = pair[1] - pair[0];
            let (lo, hi) = (0.120 * profile.repetition_scale, 2.9 * profile.repetition_scale);
            assert!(gap >= lo - 1e-12 && gap <= hi + 1e-12, "gap {gap}");
        }
    }
}

#[test]
fn schedules_are_seed_deterministic() {
    let turnigy = model(TransmitterLabel::Turnigy);
    let a = synth_transmission_schedule(&turnigy, &ScaleProfile::desk(), 30.0, 5).unwrap();
    let b = synth_transmission_schedule(&turnigy, &ScaleProfile::desk(), 30.0, 5).unwrap();
    assert_eq!(a, b);
}

// ---- noise -------------------------------------------------------------

#[test]
fn gaussian_noise_power_tracks_variance() {
    let profile = ScaleProfile::desk();
    let noise = synth_noise::<f64>(
        &NoiseModel::Gaussian { variance: 2.5 },
        &profile,
        1 << 16,
        11,
    )
    .unwrap();
    assert!((noise.mean_power() - 2.5).abs() / 2.5 < 0.03);
}

#[test]
fn unit_gaussian_noise_is_barely_changed_by_normalisation() {
    let profile = ScaleProfile::desk();
    let noise =
        synth_noise::<f64>(&NoiseModel::gaussian_unit(), &profile, 1 << 20, 13).unwrap();
    let normalized = normalize_mean_power(&noise).unwrap();
    let rms: f64 = (noise
        .samples()
        .iter()
        .zip(normalized.samples())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / noise.len() as f64)
        .sqrt();
    assert!(rms < 1e-3, "rms change {rms}");
}

#[test]
fn lab_noise_contains_a_short_time_localised_burst() {
    let profile = ScaleProfile::desk();
    let noise =
        synth_noise::<f64>(&NoiseModel::lab_default(), &profile, profile.frame_length, 3).unwrap();
    for s in noise.samples() {
        assert!(s.re.is_finite() && s.im.is_finite());
    }
    let mask = detect_bursts(&noise, 33, 0.2).unwrap();
    let limit = profile.frame_length / 5;
    assert!(
        mask.intervals().iter().any(|iv| iv.end - iv.start < limit),
        "no burst shorter than 20% of the frame: {:?}",
        mask.intervals()
    );
}

#[test]
fn noise_rejects_zero_length() {
    assert!(synth_noise::<f32>(&NoiseModel::gaussian_unit(), &ScaleProfile::desk(), 0, 1).is_err());
}

// ---- model table config -------------------------------------------------

#[test]
fn model_table_json_round_trips() {
    let table = TransmitterModel::default_table();
    let file = TransmitterTableFile::from_models(&table);
    let json = serde_json::to_string_pretty(&file).unwrap();
    let parsed: TransmitterTableFile = serde_json::from_str(&json).unwrap();
    let models = parsed.into_models().unwrap();
    assert_eq!(models.len(), table.len());
    for (a, b) in models.iter().zip(&table) {
        assert_eq!(a.label, b.label);
        assert!((a.channel_spacing_hz - b.channel_spacing_hz).abs() < 1e-6);
        assert!((a.center_offset_hz - b.center_offset_hz).abs() < 1.0);
        assert!((a.repetition.min_s() - b.repetition.min_s()).abs() < 1e-12);
        assert!((a.burst_duration_s.min_s() - b.burst_duration_s.min_s()).abs() < 1e-12);
    }
}

#[test]
fn taranis_and_turnigy_offsets_match_the_table() {
    let taranis = model(TransmitterLabel::Taranis);
    assert!((taranis.center_offset_hz - (-1.75e6)).abs() < 1.0);
    let turnigy = model(TransmitterLabel::Turnigy);
    assert!((turnigy.center_offset_hz - 3.25e6).abs() < 1.0);
}
