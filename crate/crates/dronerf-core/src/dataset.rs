//! The labelled noisy-spectrogram dataset: assembly from the synthesis
//! chain, a seekable little-endian on-disk format, and stratified
//! k-fold splitting.
//!
//! On disk a dataset is a directory holding `manifest.json` plus
//! `data.bin` of fixed-size records: class_id (u16 LE), snr_db × 100
//! (i16 LE), the spectrogram planes (2·S·C f32 LE, plane-major,
//! row-major) and a trailing CRC32 (u32 LE) over the record bytes.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::sigcore::{
    detect_bursts, mix_at_snr, normalize_carrier_power, normalize_mean_power,
    peak_smoothed_energy, segment_has_burst, DEFAULT_BURST_REL_THRESHOLD, DEFAULT_SMOOTH_WINDOW,
    SEGMENT_ENERGY_FACTOR,
};
use crate::spectro::{complex_spectrogram, PlaneStats, Spectrogram};
use crate::synth::{
    synth_noise, synth_transmission_schedule, LabNoiseParams, NoiseModel, RepetitionSpec,
    ScaleProfile, TransmitterLabel, TransmitterModel,
};
use crate::{seeds, Error, IqFrame, Real, Result, SnrSpec};

pub const DATASET_FORMAT_VERSION: u32 = 1;

/// Fixed class table: alphabetical with Noise at index 4.
pub const CLASS_NAMES: [&str; 7] =
    ["DJI", "FutabaT14", "FutabaT7", "Graupner", "Noise", "Taranis", "Turnigy"];
pub const NOISE_CLASS_ID: u16 = 4;
pub const NUM_CLASSES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseKind {
    Lab,
    Gauss,
}

/// How a sample was mixed; builder-side metadata summarised in the
/// manifest (the record format stores class, SNR and planes only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixProvenance {
    Drone { noise: NoiseKind },
    NoisePair { signal_role: NoiseKind, noise_role: NoiseKind },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub spectrogram: Spectrogram<f32>,
    pub class_id: u16,
    pub snr_db: f64,
}

impl LabeledSample {
    pub fn validate(&self) -> Result<()> {
        if self.class_id as usize >= NUM_CLASSES {
            return Err(Error::InvalidInput(format!("class_id {} out of range", self.class_id)));
        }
        if !(SnrSpec::DATASET_MIN_DB..=SnrSpec::DATASET_MAX_DB).contains(&self.snr_db) {
            return Err(Error::InvalidInput(format!("snr {} dB outside dataset range", self.snr_db)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub name: String,
    pub count: usize,
    /// Drone classes: samples mixed with lab-like vs Gaussian noise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drone_mix_counts: Option<[usize; 2]>,
    /// Noise class: counts of the four (signal, noise) kind pairs in the
    /// order (Lab,Lab), (Lab,Gauss), (Gauss,Lab), (Gauss,Gauss).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_pair_counts: Option<[usize; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub profile: ScaleProfile,
    pub class_names: Vec<String>,
    pub snr_grid_db: Vec<f64>,
    pub per_class: Vec<ClassStats>,
    /// [2, S, C]
    pub spectrogram_shape: [usize; 3],
    pub dtype: String,
    /// Whole-dataset per-plane moments (informational; training uses
    /// stats recomputed on its own split).
    pub standardization: Option<PlaneStats>,
    pub seed: u64,
    pub record_bytes: usize,
    pub total_samples: usize,
}

impl DatasetManifest {
    /// SHA-256 of the canonical JSON bytes; pinned into checkpoints.
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("manifest serialises");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        format!("{:x}", hasher.finalize())
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub samples: Vec<LabeledSample>,
    /// One entry per sample when built in-process; not persisted.
    pub provenance: Option<Vec<MixProvenance>>,
    pub manifest: DatasetManifest,
}

impl Dataset {
    pub fn labels(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.class_id as usize).collect()
    }

    pub fn snr_tags(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.snr_db).collect()
    }
}

// ---------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub drone_count_per_class: usize,
    pub noise_count: usize,
    pub lab_noise: LabNoiseParams,
    pub burst_window: usize,
    pub burst_rel_threshold: f64,
    pub segment_energy_factor: f64,
    pub models: Vec<TransmitterModel>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            drone_count_per_class: 260,
            noise_count: 1040,
            lab_noise: LabNoiseParams::default(),
            burst_window: DEFAULT_SMOOTH_WINDOW,
            burst_rel_threshold: DEFAULT_BURST_REL_THRESHOLD,
            segment_energy_factor: SEGMENT_ENERGY_FACTOR,
            models: TransmitterModel::default_table(),
        }
    }
}

fn noise_model(kind: NoiseKind, lab: &LabNoiseParams) -> NoiseModel {
    match kind {
        NoiseKind::Lab => NoiseModel::LabLike(*lab),
        NoiseKind::Gauss => NoiseModel::Gaussian { variance: 1.0 },
    }
}

/// Deterministically synthesise the clean (pre-mix) frame of a drone
/// sample: bursts from a randomly-phased schedule, with at least a
/// partial burst guaranteed by the segment-energy test.
pub fn build_drone_frame<T: Real>(
    model: &TransmitterModel,
    profile: &ScaleProfile,
    config: &BuildConfig,
    sample_seed: u64,
) -> Result<(IqFrame<T>, crate::BurstMask)> {
    let fs = profile.sample_rate_hz;
    let frame_len = profile.frame_length;
    let frame_dur = profile.frame_duration_s();

    for attempt in 0..64u64 {
        let mut rng = seeds::rng(sample_seed, "drone-frame", &[attempt]);
        // Random schedule phase: pre-roll window long enough to cover one
        // repetition period (or the maximum jittered gap).
        let preroll = match model.repetition {
            RepetitionSpec::Fixed(p) => p * profile.repetition_scale,
            RepetitionSpec::Jittered { max_s, .. } => 2.0 * max_s * profile.repetition_scale,
        };
        let offset = rng.gen_range(0.0..preroll.max(1e-9));
        let schedule_seed = seeds::derive(sample_seed, "schedule", &[attempt]);
        let starts = synth_transmission_schedule(
            model,
            profile,
            frame_dur + preroll + model.burst_duration_s.max_s() * profile.duration_scale,
            schedule_seed,
        )?;

        let mut canvas = vec![num_complex::Complex::new(0.0f64, 0.0f64); frame_len];
        let mut any = false;
        for (burst_ix, t) in starts.iter().enumerate() {
            let t_rel = t - offset;
            let (burst, _) = crate::synth::synth_burst::<f64>(
                model,
                profile,
                seeds::derive(sample_seed, "burst", &[attempt, burst_ix as u64]),
            )?;
            let start = (t_rel * fs).round() as i64;
            let end = start + burst.len() as i64;
            if end <= 0 || start >= frame_len as i64 {
                continue;
            }
            for (k, v) in burst.samples().iter().enumerate() {
                let ix = start + k as i64;
                if (0..frame_len as i64).contains(&ix) {
                    canvas[ix as usize] += v;
                    any = true;
                }
            }
        }
        if !any {
            continue;
        }
        let frame = IqFrame::<f64>::new(canvas, fs)?;
        let peak = peak_smoothed_energy(&frame, config.burst_window)?;
        if !segment_has_burst(peak, frame.mean_power(), config.segment_energy_factor)? {
            continue;
        }
        let mask = detect_bursts(&frame, config.burst_window, config.burst_rel_threshold)?;
        if mask.is_empty() {
            continue;
        }
        return Ok((frame.cast::<T>(), mask));
    }
    Err(Error::Config(format!(
        "{}: no burst landed in a frame after 64 schedule draws",
        model.label
    )))
}

fn drone_sample<T: Real>(
    model: &TransmitterModel,
    profile: &ScaleProfile,
    config: &BuildConfig,
    snr_db: f64,
    kind: NoiseKind,
    sample_seed: u64,
) -> Result<LabeledSample> {
    let (frame, mask) = build_drone_frame::<T>(model, profile, config, sample_seed)?;
    let signal = normalize_carrier_power(&frame, &mask)?;
    let noise = synth_noise::<T>(
        &noise_model(kind, &config.lab_noise),
        profile,
        profile.frame_length,
        seeds::derive(sample_seed, "mix-noise", &[]),
    )?;
    let noise = normalize_mean_power(&noise)?;
    let mixed = mix_at_snr(&signal, &noise, SnrSpec::new(snr_db)?)?;
    let spec = complex_spectrogram(&mixed, profile.segment_length)?;
    Ok(LabeledSample {
        spectrogram: spec.cast::<f32>(),
        class_id: model.label.class_id(),
        snr_db,
    })
}

fn noise_sample<T: Real>(
    profile: &ScaleProfile,
    config: &BuildConfig,
    snr_db: f64,
    signal_kind: NoiseKind,
    noise_kind: NoiseKind,
    sample_seed: u64,
) -> Result<LabeledSample> {
    let a = synth_noise::<T>(
        &noise_model(signal_kind, &config.lab_noise),
        profile,
        profile.frame_length,
        seeds::derive(sample_seed, "noise-a", &[]),
    )?;
    let b = synth_noise::<T>(
        &noise_model(noise_kind, &config.lab_noise),
        profile,
        profile.frame_length,
        seeds::derive(sample_seed, "noise-b", &[]),
    )?;
    let a = normalize_mean_power(&a)?;
    let b = normalize_mean_power(&b)?;
    let mixed = mix_at_snr(&a, &b, SnrSpec::new(snr_db)?)?;
    let spec = complex_spectrogram(&mixed, profile.segment_length)?;
    Ok(LabeledSample { spectrogram: spec.cast::<f32>(), class_id: NOISE_CLASS_ID, snr_db })
}

const NOISE_PAIRS: [(NoiseKind, NoiseKind); 4] = [
    (NoiseKind::Lab, NoiseKind::Lab),
    (NoiseKind::Lab, NoiseKind::Gauss),
    (NoiseKind::Gauss, NoiseKind::Lab),
    (NoiseKind::Gauss, NoiseKind::Gauss),
];

/// Build the full dataset: six drone classes mixed half with lab-like
/// and half with Gaussian noise, plus a Noise class of all four
/// kind-pair combinations, every class spread evenly over the SNR grid.
///
/// Generation is a pure function of `(config, profile, seed)`; samples
/// are produced in parallel from independent derived seeds.
pub fn build_dataset<T: Real>(
    config: &BuildConfig,
    profile: &ScaleProfile,
    seed: u64,
) -> Result<Dataset> {
    profile.validate()?;
    let grid = crate::eval::snr_grid_db();
    if config.drone_count_per_class < grid.len() || config.noise_count < grid.len() {
        return Err(Error::Config(format!(
            "class counts must cover the {}-level SNR grid (got {} drone / {} noise)",
            grid.len(),
            config.drone_count_per_class,
            config.noise_count
        )));
    }
    for label in TransmitterLabel::ALL {
        TransmitterModel::find(&config.models, label)?;
    }

    // Work list: (class_id, per-class index, snr, provenance).
    struct Job {
        class_id: u16,
        index: usize,
        snr_db: f64,
        provenance: MixProvenance,
    }
    let mut jobs = Vec::new();
    for label in TransmitterLabel::ALL {
        for i in 0..config.drone_count_per_class {
            let snr = grid[i % grid.len()];
            let kind = if (i / grid.len()) % 2 == 0 { NoiseKind::Lab } else { NoiseKind::Gauss };
            jobs.push(Job {
                class_id: label.class_id(),
                index: i,
                snr_db: snr,
                provenance: MixProvenance::Drone { noise: kind },
            });
        }
    }
    for i in 0..config.noise_count {
        let snr = grid[i % grid.len()];
        let (sk, nk) = NOISE_PAIRS[(i / grid.len()) % 4];
        jobs.push(Job {
            class_id: NOISE_CLASS_ID,
            index: i,
            snr_db: snr,
            provenance: MixProvenance::NoisePair { signal_role: sk, noise_role: nk },
        });
    }

    let samples: Result<Vec<LabeledSample>> = jobs
        .par_iter()
        .map(|job| {
            let sample_seed =
                seeds::derive(seed, "dataset-sample", &[job.class_id as u64, job.index as u64]);
            match job.provenance {
                MixProvenance::Drone { noise } => {
                    let label = TransmitterLabel::ALL
                        .iter()
                        .copied()
                        .find(|l| l.class_id() == job.class_id)
                        .expect("drone class id");
                    let model = TransmitterModel::find(&config.models, label)?;
                    drone_sample::<T>(model, profile, config, job.snr_db, noise, sample_seed)
                }
                MixProvenance::NoisePair { signal_role, noise_role } => noise_sample::<T>(
                    profile,
                    config,
                    job.snr_db,
                    signal_role,
                    noise_role,
                    sample_seed,
                ),
            }
        })
        .collect();
    let samples = samples?;
    let provenance: Vec<MixProvenance> = jobs.iter().map(|j| j.provenance).collect();

    let mut per_class = Vec::new();
    for (class_id, name) in CLASS_NAMES.iter().enumerate() {
        let ids: Vec<usize> = (0..samples.len())
            .filter(|&i| samples[i].class_id as usize == class_id)
            .collect();
        let mut stats = ClassStats { name: name.to_string(), count: ids.len(), drone_mix_counts: None, noise_pair_counts: None };
        if class_id == NOISE_CLASS_ID as usize {
            let mut pair_counts = [0usize; 4];
            for &i in &ids {
                if let MixProvenance::NoisePair { signal_role, noise_role } = provenance[i] {
                    let ix = NOISE_PAIRS
                        .iter()
                        .position(|&(a, b)| a == signal_role && b == noise_role)
                        .unwrap();
                    pair_counts[ix] += 1;
                }
            }
            stats.noise_pair_counts = Some(pair_counts);
        } else {
            let mut mix = [0usize; 2];
            for &i in &ids {
                if let MixProvenance::Drone { noise } = provenance[i] {
                    mix[if noise == NoiseKind::Lab { 0 } else { 1 }] += 1;
                }
            }
            stats.drone_mix_counts = Some(mix);
        }
        per_class.push(stats);
    }

    let s = profile.segment_length;
    let c = profile.columns();
    let spec_refs: Vec<&Spectrogram<f32>> = samples.iter().map(|x| &x.spectrogram).collect();
    let standardization = PlaneStats::compute(&spec_refs).ok();

    let manifest = DatasetManifest {
        format_version: DATASET_FORMAT_VERSION,
        profile: *profile,
        class_names: CLASS_NAMES.iter().map(|s| s.to_string()).collect(),
        snr_grid_db: grid,
        per_class,
        spectrogram_shape: [2, s, c],
        dtype: "f32le".into(),
        standardization,
        seed,
        record_bytes: record_bytes(s, c),
        total_samples: samples.len(),
    };
    Ok(Dataset { samples, provenance: Some(provenance), manifest })
}

// ---------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------

pub fn record_bytes(s: usize, c: usize) -> usize {
    2 + 2 + 2 * s * c * 4 + 4
}

fn encode_record(sample: &LabeledSample, out: &mut Vec<u8>) {
    let start = out.len();
    out.extend_from_slice(&sample.class_id.to_le_bytes());
    let snr_centi = (sample.snr_db * 100.0).round() as i16;
    out.extend_from_slice(&snr_centi.to_le_bytes());
    for v in sample.spectrogram.planes() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let crc = crc32fast::hash(&out[start..]);
    out.extend_from_slice(&crc.to_le_bytes());
}

fn decode_record(bytes: &[u8], s: usize, c: usize, index: usize) -> Result<LabeledSample> {
    let body = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[body..].try_into().unwrap());
    if crc32fast::hash(&bytes[..body]) != stored {
        return Err(Error::Format(format!("record {index}: CRC32 mismatch")));
    }
    let class_id = u16::from_le_bytes(bytes[0..2].try_into().unwrap());
    if class_id as usize >= NUM_CLASSES {
        return Err(Error::Format(format!("record {index}: class {class_id} out of range")));
    }
    let snr_db = i16::from_le_bytes(bytes[2..4].try_into().unwrap()) as f64 / 100.0;
    let mut planes = Vec::with_capacity(2 * s * c);
    for chunk in bytes[4..body].chunks_exact(4) {
        planes.push(f32::from_le_bytes(chunk.try_into().unwrap()));
    }
    Ok(LabeledSample {
        spectrogram: Spectrogram::from_planes(planes, s, c, true)
            .map_err(|e| Error::Format(format!("record {index}: {e}")))?,
        class_id,
        snr_db,
    })
}

/// Write `manifest.json` and `data.bin` into `dir`.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&dataset.manifest)?,
    )?;
    let [_, s, c] = dataset.manifest.spectrogram_shape;
    let mut bytes = Vec::with_capacity(dataset.samples.len() * record_bytes(s, c));
    for sample in &dataset.samples {
        encode_record(sample, &mut bytes);
    }
    std::fs::write(dir.join("data.bin"), bytes)?;
    Ok(())
}

/// Load a dataset directory, verifying version, length and checksums.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let manifest: DatasetManifest =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json"))?)?;
    if manifest.format_version != DATASET_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported dataset format version {}",
            manifest.format_version
        )));
    }
    let [planes, s, c] = manifest.spectrogram_shape;
    if planes != 2 {
        return Err(Error::Format(format!("expected 2 spectrogram planes, manifest says {planes}")));
    }
    let rec = record_bytes(s, c);
    if rec != manifest.record_bytes {
        return Err(Error::Format(format!(
            "manifest record_bytes {} does not match shape-derived {}",
            manifest.record_bytes, rec
        )));
    }
    let bytes = std::fs::read(dir.join("data.bin"))?;
    if bytes.len() != rec * manifest.total_samples {
        return Err(Error::Format(format!(
            "data.bin holds {} bytes, expected {} for {} records of {} bytes",
            bytes.len(),
            rec * manifest.total_samples,
            manifest.total_samples,
            rec
        )));
    }
    let samples: Result<Vec<LabeledSample>> = bytes
        .par_chunks(rec)
        .enumerate()
        .map(|(i, chunk)| decode_record(chunk, s, c, i))
        .collect();
    Ok(Dataset { samples: samples?, provenance: None, manifest })
}

// ---------------------------------------------------------------------
// Stratified k-fold splitting
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub folds: Vec<Fold>,
}

/// Stratified k-fold split: every sample lands in exactly one test fold,
/// the remainder of each fold is divided into train and validation with
/// `val_fraction` of each class going to validation.
pub fn stratified_kfold(
    labels: &[usize],
    k: usize,
    val_fraction: f64,
    seed: u64,
) -> Result<SplitPlan> {
    if k < 2 {
        return Err(Error::InvalidInput("need at least two folds".into()));
    }
    if !(0.0..1.0).contains(&val_fraction) {
        return Err(Error::InvalidInput(format!("val fraction {val_fraction} outside [0, 1)")));
    }
    let n_classes = labels.iter().max().map(|&m| m + 1).unwrap_or(0);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    for (c, ids) in by_class.iter().enumerate() {
        if !ids.is_empty() && ids.len() < k {
            return Err(Error::InvalidInput(format!(
                "class {c} has only {} samples; needs at least {k}",
                ids.len()
            )));
        }
    }
    let mut rng = seeds::rng(seed, "kfold", &[]);
    for ids in &mut by_class {
        ids.shuffle(&mut rng);
    }

    let mut folds: Vec<Fold> =
        (0..k).map(|_| Fold { train: Vec::new(), val: Vec::new(), test: Vec::new() }).collect();
    for ids in &by_class {
        if ids.is_empty() {
            continue;
        }
        // Chunk boundaries: the first n % k chunks take one extra.
        let n = ids.len();
        let base = n / k;
        let extra = n % k;
        let mut bounds = Vec::with_capacity(k + 1);
        let mut acc = 0usize;
        bounds.push(0);
        for f in 0..k {
            acc += base + usize::from(f < extra);
            bounds.push(acc);
        }
        for f in 0..k {
            let test: Vec<usize> = ids[bounds[f]..bounds[f + 1]].to_vec();
            let rest: Vec<usize> = ids[..bounds[f]]
                .iter()
                .chain(&ids[bounds[f + 1]..])
                .copied()
                .collect();
            let val_count = (val_fraction * rest.len() as f64).round() as usize;
            folds[f].val.extend_from_slice(&rest[..val_count]);
            folds[f].train.extend_from_slice(&rest[val_count..]);
            folds[f].test.extend(test);
        }
    }
    Ok(SplitPlan { folds })
}

impl SplitPlan {
    /// Exhaustive audit of the split invariants: per fold the three sets
    /// are disjoint; the union of test sets covers every index exactly
    /// once; test-fold class proportions are stratified within ±1.
    pub fn validate(&self, labels: &[usize]) -> Result<()> {
        let k = self.folds.len();
        let mut coverage = vec![0usize; labels.len()];
        for (f, fold) in self.folds.iter().enumerate() {
            let mut seen = vec![false; labels.len()];
            for part in [&fold.train, &fold.val, &fold.test] {
                for &ix in part {
                    if ix >= labels.len() {
                        return Err(Error::InvalidInput(format!("fold {f}: index {ix} out of range")));
                    }
                    if seen[ix] {
                        return Err(Error::InvalidInput(format!(
                            "fold {f}: index {ix} appears in more than one part"
                        )));
                    }
                    seen[ix] = true;
                }
            }
            if fold.train.len() + fold.val.len() + fold.test.len() != labels.len() {
                return Err(Error::InvalidInput(format!("fold {f} does not cover the dataset")));
            }
            for &ix in &fold.test {
                coverage[ix] += 1;
            }
        }
        if coverage.iter().any(|&c| c != 1) {
            return Err(Error::InvalidInput(
                "test folds must cover every sample exactly once".into(),
            ));
        }
        // Stratification: per class, test counts differ by at most 1.
        let n_classes = labels.iter().max().map(|&m| m + 1).unwrap_or(0);
        for class in 0..n_classes {
            let counts: Vec<usize> = self
                .folds
                .iter()
                .map(|f| f.test.iter().filter(|&&ix| labels[ix] == class).count())
                .collect();
            let (lo, hi) =
                (counts.iter().min().copied().unwrap(), counts.iter().max().copied().unwrap());
            if hi - lo > 1 {
                return Err(Error::InvalidInput(format!(
                    "class {class} test counts vary by more than one across {k} folds: {counts:?}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
