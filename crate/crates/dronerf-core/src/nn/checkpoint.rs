//! Flat-blob model checkpoints: `model.json` (config, parameter table,
//! training metadata) plus `params.bin` (little-endian f32).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::vgg::{VggBn, VggConfig};
use crate::spectro::PlaneStats;
use crate::{Error, Real, Result};

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamEntry {
    pub name: String,
    pub shape: Vec<usize>,
    /// Byte offset into params.bin.
    pub offset_bytes: usize,
    pub trainable: bool,
}

/// Training metadata carried with the parameters, including everything
/// the streaming classifier needs to reproduce the input conditioning.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub epoch: usize,
    pub val_balanced_accuracy: f64,
    pub seed: u64,
    pub dataset_manifest_sha256: String,
    pub standardization: PlaneStats,
    pub sample_rate_hz: f64,
    pub frame_length: usize,
    pub segment_length: usize,
}

#[derive(Debug, Clone)]
pub struct ModelCheckpoint {
    pub config: VggConfig,
    pub params: Vec<ParamEntry>,
    pub blob: Vec<f32>,
    pub meta: CheckpointMeta,
}

#[derive(Serialize, Deserialize)]
struct CheckpointJson {
    format_version: u32,
    config: VggConfig,
    params: Vec<ParamEntry>,
    meta: CheckpointMeta,
}

impl ModelCheckpoint {
    pub fn from_model<T: Real>(model: &VggBn<T>, meta: CheckpointMeta) -> Self {
        let mut params = Vec::new();
        let mut offset = 0usize;
        for (name, shape, trainable) in model.param_table() {
            let len: usize = shape.iter().product();
            params.push(ParamEntry { name, shape, offset_bytes: offset * 4, trainable });
            offset += len;
        }
        let blob: Vec<f32> = model.snapshot().iter().map(|v| v.to64() as f32).collect();
        ModelCheckpoint { config: model.config.clone(), params, blob, meta }
    }

    /// Instantiate the model this checkpoint describes.
    pub fn to_model<T: Real>(&self) -> Result<VggBn<T>> {
        let mut model = VggBn::<T>::init(self.config.clone(), 0)?;
        let expect = model.param_table();
        if expect.len() != self.params.len() {
            return Err(Error::Format(format!(
                "parameter table mismatch: model has {} entries, checkpoint {}",
                expect.len(),
                self.params.len()
            )));
        }
        for ((name, shape, _), entry) in expect.iter().zip(&self.params) {
            if name != &entry.name || shape != &entry.shape {
                return Err(Error::Format(format!(
                    "parameter {} {:?} does not match checkpoint entry {} {:?}",
                    name, shape, entry.name, entry.shape
                )));
            }
        }
        let blob: Vec<T> = self.blob.iter().map(|&v| T::of(v as f64)).collect();
        model.restore(&blob)?;
        Ok(model)
    }

    pub fn total_values(&self) -> usize {
        self.params.iter().map(|p| p.shape.iter().product::<usize>()).sum()
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let json = CheckpointJson {
            format_version: CHECKPOINT_FORMAT_VERSION,
            config: self.config.clone(),
            params: self.params.clone(),
            meta: self.meta.clone(),
        };
        std::fs::write(dir.join("model.json"), serde_json::to_string_pretty(&json)?)?;
        let mut bytes = Vec::with_capacity(self.blob.len() * 4);
        for v in &self.blob {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::write(dir.join("params.bin"), bytes)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let json: CheckpointJson =
            serde_json::from_str(&std::fs::read_to_string(dir.join("model.json"))?)?;
        if json.format_version != CHECKPOINT_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported checkpoint format version {}",
                json.format_version
            )));
        }
        let bytes = std::fs::read(dir.join("params.bin"))?;
        let expect: usize = json.params.iter().map(|p| p.shape.iter().product::<usize>()).sum();
        if bytes.len() != expect * 4 {
            return Err(Error::Format(format!(
                "params.bin holds {} bytes, expected {} for {} values",
                bytes.len(),
                expect * 4,
                expect
            )));
        }
        let blob: Vec<f32> = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(ModelCheckpoint { config: json.config, params: json.params, blob, meta: json.meta })
    }
}
