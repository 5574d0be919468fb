use super::*;
use crate::sigcore::select_burst_segments;

fn tiny_profile() -> ScaleProfile {
    // Quarter-rate desk profile keeps these tests fast while remaining a
    // valid S²·2^j geometry.
    let mut p = ScaleProfile::desk();
    p.frame_length = 1024;
    p.segment_length = 32;
    p
}

fn tiny_build() -> BuildConfig {
    BuildConfig { drone_count_per_class: 26, noise_count: 52, ..Default::default() }
}

#[test]
fn snr_grid_is_26_levels_and_flat_per_class() {
    let config = BuildConfig {
        drone_count_per_class: 30,
        noise_count: 30,
        ..Default::default()
    };
    let ds = build_dataset::<f32>(&config, &tiny_profile(), 5).unwrap();
    let grid = crate::eval::snr_grid_db();
    assert_eq!(grid.len(), 26);
    for class in 0..NUM_CLASSES {
        let mut hist = vec![0usize; grid.len()];
        for s in ds.samples.iter().filter(|s| s.class_id as usize == class) {
            let level = grid.iter().position(|&g| (g - s.snr_db).abs() < 1e-9).unwrap();
            hist[level] += 1;
        }
        let (lo, hi) = (hist.iter().min().unwrap(), hist.iter().max().unwrap());
        assert!(hi - lo <= 1, "class {class}: {hist:?}");
    }
}

#[test]
fn class_counts_follow_config_arithmetic() {
    let config = BuildConfig { drone_count_per_class: 26, noise_count: 52, ..Default::default() };
    let ds = build_dataset::<f32>(&config, &tiny_profile(), 6).unwrap();
    for (c, stats) in ds.manifest.per_class.iter().enumerate() {
        let expect = if c == NOISE_CLASS_ID as usize { 52 } else { 26 };
        assert_eq!(stats.count, expect, "class {c}");
    }
    assert_eq!(ds.manifest.total_samples, 6 * 26 + 52);
    // 2600 per class would put 100 samples on each of the 26 levels.
    assert_eq!(2600 / 26, 100);
}

#[test]
fn counts_below_grid_size_rejected() {
    let config = BuildConfig { drone_count_per_class: 10, noise_count: 52, ..Default::default() };
    assert!(matches!(
        build_dataset::<f32>(&config, &tiny_profile(), 1),
        Err(Error::Config(_))
    ));
}

#[test]
fn noise_mix_combinations_are_quartered() {
    let config = BuildConfig { drone_count_per_class: 26, noise_count: 104, ..Default::default() };
    let ds = build_dataset::<f32>(&config, &tiny_profile(), 7).unwrap();
    let stats = &ds.manifest.per_class[NOISE_CLASS_ID as usize];
    let pairs = stats.noise_pair_counts.unwrap();
    for &count in &pairs {
        assert!((count as i64 - 26).abs() <= 1, "{pairs:?}");
    }
    // Drone classes split half lab-like, half Gaussian.
    for (c, stats) in ds.manifest.per_class.iter().enumerate() {
        if c != NOISE_CLASS_ID as usize {
            let mix = stats.drone_mix_counts.unwrap();
            assert!((mix[0] as i64 - mix[1] as i64).abs() <= 1, "class {c}: {mix:?}");
        }
    }
}

#[test]
fn generation_is_a_pure_function_of_config_and_seed() {
    let config = tiny_build();
    let a = build_dataset::<f32>(&config, &tiny_profile(), 11).unwrap();
    let b = build_dataset::<f32>(&config, &tiny_profile(), 11).unwrap();
    assert_eq!(a.samples, b.samples);
    assert_eq!(a.manifest, b.manifest);
    let c = build_dataset::<f32>(&config, &tiny_profile(), 12).unwrap();
    assert_ne!(a.samples, c.samples);
}

#[test]
fn drone_frames_pass_the_segment_energy_test() {
    let profile = tiny_profile();
    let config = tiny_build();
    let model = TransmitterModel::find(&config.models, TransmitterLabel::Taranis).unwrap();
    let mut frames = Vec::new();
    for i in 0..6u64 {
        let (frame, mask) =
            build_drone_frame::<f64>(model, &profile, &config, seeds::derive(3, "t", &[i]))
                .unwrap();
        assert!(!mask.is_empty());
        frames.push(frame);
    }
    let selected =
        select_burst_segments(&frames, config.burst_window, config.segment_energy_factor).unwrap();
    assert!(selected.iter().all(|&s| s));
}

#[test]
fn save_load_round_trip_is_bit_identical() {
    let ds = build_dataset::<f32>(&tiny_build(), &tiny_profile(), 21).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_dataset(&ds, dir.path()).unwrap();
    let loaded = load_dataset(dir.path()).unwrap();
    assert_eq!(loaded.samples, ds.samples);
    assert_eq!(loaded.manifest, ds.manifest);
    assert!(loaded.provenance.is_none());
}

#[test]
fn truncated_data_file_is_rejected() {
    let ds = build_dataset::<f32>(&tiny_build(), &tiny_profile(), 22).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_dataset(&ds, dir.path()).unwrap();
    let bin = dir.path().join("data.bin");
    let bytes = std::fs::read(&bin).unwrap();
    std::fs::write(&bin, &bytes[..bytes.len() - 1]).unwrap();
    assert!(matches!(load_dataset(dir.path()), Err(Error::Format(_))));
}

#[test]
fn corrupted_record_fails_its_checksum() {
    let ds = build_dataset::<f32>(&tiny_build(), &tiny_profile(), 23).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_dataset(&ds, dir.path()).unwrap();
    let bin = dir.path().join("data.bin");
    let mut bytes = std::fs::read(&bin).unwrap();
    bytes[100] ^= 0xff;
    std::fs::write(&bin, bytes).unwrap();
    let err = load_dataset(dir.path()).unwrap_err();
    assert!(err.to_string().contains("CRC32"), "{err}");
}

#[test]
fn manifest_hash_is_stable_and_content_sensitive() {
    let ds = build_dataset::<f32>(&tiny_build(), &tiny_profile(), 24).unwrap();
    let h1 = ds.manifest.sha256();
    let h2 = ds.manifest.sha256();
    assert_eq!(h1, h2);
    let mut other = ds.manifest.clone();
    other.seed = 99;
    assert_ne!(h1, other.sha256());
}

// ---- stratified k-fold -------------------------------------------------

#[test]
fn single_class_folds_are_even() {
    let labels = vec![0usize; 100];
    let plan = stratified_kfold(&labels, 5, 0.2, 1).unwrap();
    for fold in &plan.folds {
        assert_eq!(fold.test.len(), 20);
        assert_eq!(fold.val.len(), 16); // 20% of the remaining 80
        assert_eq!(fold.train.len(), 64);
    }
    plan.validate(&labels).unwrap();
}

#[test]
fn two_class_folds_stratify() {
    let mut labels = vec![0usize; 50];
    labels.extend(vec![1usize; 100]);
    let plan = stratified_kfold(&labels, 5, 0.2, 2).unwrap();
    for fold in &plan.folds {
        let zeros = fold.test.iter().filter(|&&i| labels[i] == 0).count();
        let ones = fold.test.iter().filter(|&&i| labels[i] == 1).count();
        assert_eq!(zeros, 10);
        assert_eq!(ones, 20);
    }
    plan.validate(&labels).unwrap();
}

#[test]
fn test_folds_cover_every_index_once() {
    let labels: Vec<usize> = (0..233).map(|i| i % 7).collect();
    let plan = stratified_kfold(&labels, 5, 0.2, 3).unwrap();
    plan.validate(&labels).unwrap();
    let mut seen = vec![false; labels.len()];
    for fold in &plan.folds {
        for &ix in &fold.test {
            assert!(!seen[ix]);
            seen[ix] = true;
        }
    }
    assert!(seen.iter().all(|&s| s));
}

#[test]
fn undersized_class_is_rejected() {
    let labels = vec![0usize, 0, 0, 1, 1, 1, 1, 1];
    assert!(stratified_kfold(&labels, 5, 0.2, 1).is_err());
}

#[test]
fn splits_are_seed_deterministic() {
    let labels: Vec<usize> = (0..140).map(|i| i % 7).collect();
    let a = stratified_kfold(&labels, 5, 0.2, 9).unwrap();
    let b = stratified_kfold(&labels, 5, 0.2, 9).unwrap();
    assert_eq!(a, b);
    let c = stratified_kfold(&labels, 5, 0.2, 10).unwrap();
    assert_ne!(a, c);
}
