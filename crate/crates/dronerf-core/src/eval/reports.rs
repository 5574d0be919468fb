//! Plot-ready report files: confusion matrix CSV, SNR-curve CSV,
//! embedding-coordinates CSV and a summary JSON. All CSVs are
//! comma-separated UTF-8 with fixed headers; the JSON schema is
//! versioned.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::metrics::{ConfusionMatrix, SnrCurve};
use crate::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Embedding coordinates with their sample tags.
pub struct EmbeddedPoints<'a> {
    pub labels: &'a [usize],
    pub snr_db: &'a [f64],
    pub points: &'a [[f64; 2]],
}

pub struct ReportBundle<'a> {
    pub class_names: &'a [&'a str],
    pub confusion: &'a ConfusionMatrix,
    pub curve: Option<&'a SnrCurve>,
    pub embedding: Option<EmbeddedPoints<'a>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub n_samples: u64,
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub chance_level: f64,
    pub per_class_recall: Vec<ClassRecall>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassRecall {
    pub class: String,
    pub recall: Option<f64>,
    pub support: u64,
}

/// Write every applicable report file into `dir`; returns the paths.
pub fn emit_reports(bundle: &ReportBundle<'_>, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let n = bundle.confusion.n_classes();

    let mut csv = String::from("class");
    for name in bundle.class_names {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push('\n');
    for t in 0..n {
        csv.push_str(bundle.class_names[t]);
        for p in 0..n {
            csv.push_str(&format!(",{}", bundle.confusion.count(t, p)));
        }
        csv.push('\n');
    }
    let path = dir.join("confusion.csv");
    std::fs::write(&path, csv)?;
    written.push(path);

    if let Some(curve) = bundle.curve {
        let mut csv = String::from("snr_db,balanced_accuracy,count\n");
        for p in &curve.points {
            csv.push_str(&format!("{},{},{}\n", p.snr_db, p.balanced_accuracy, p.count));
        }
        let path = dir.join("snr_curve.csv");
        std::fs::write(&path, csv)?;
        written.push(path);
    }

    if let Some(emb) = &bundle.embedding {
        let mut csv = String::from("sample_id,class,snr_db,x,y\n");
        for (i, point) in emb.points.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                i,
                bundle.class_names[emb.labels[i]],
                emb.snr_db[i],
                point[0],
                point[1]
            ));
        }
        let path = dir.join("embeddings.csv");
        std::fs::write(&path, csv)?;
        written.push(path);
    }

    let recalls = bundle.confusion.per_class_recall();
    let summary = Summary {
        schema_version: REPORT_SCHEMA_VERSION,
        n_samples: bundle.confusion.total(),
        accuracy: bundle.confusion.accuracy().unwrap_or(f64::NAN),
        balanced_accuracy: bundle.confusion.balanced_accuracy_present().unwrap_or(f64::NAN),
        chance_level: 1.0 / n as f64,
        per_class_recall: (0..n)
            .map(|c| ClassRecall {
                class: bundle.class_names[c].to_string(),
                recall: recalls[c],
                support: bundle.confusion.row_sum(c),
            })
            .collect(),
    };
    let path = dir.join("summary.json");
    std::fs::write(&path, serde_json::to_string_pretty(&summary)?)?;
    written.push(path);
    Ok(written)
}
