use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{Pipeline, SPECTROGRAM_WIDTH};
use crate::micronet::TrainConfig;
use crate::radar::RadarConfig;
use crate::scene::SimNoise;

pub const SCHEMA_VERSION: u32 = 1;

/// One entry of a simulated dataset directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub label: u8,
    pub subject: u8,
}

/// `manifest.json` written next to simulated recordings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub seed: u64,
    pub config: RadarConfig,
    pub records: Vec<DatasetEntry>,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Manifest(format!("cannot read dataset manifest {}: {e}", path.display())))?;
        let m: DatasetManifest = serde_json::from_str(&text)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(Error::Manifest(format!("unsupported schema version {}", m.schema_version)));
        }
        Ok(m)
    }
}

/// Where an experiment's recordings come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    /// A directory produced by `simulate`, addressed by its manifest file.
    Files { manifest: PathBuf },
    /// Rendered in memory from the built-in templates.
    Synthetic {
        subjects: u8,
        repetitions: u32,
        seed: u64,
        #[serde(default)]
        noise: SimNoise,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRule {
    pub train_subjects: Vec<u8>,
    pub test_subjects: Vec<u8>,
}

impl Default for SplitRule {
    fn default() -> Self {
        SplitRule {
            train_subjects: (0..6).collect(),
            test_subjects: vec![6, 7],
        }
    }
}

impl SplitRule {
    pub fn validate(&self) -> Result<()> {
        if self.train_subjects.is_empty() || self.test_subjects.is_empty() {
            return Err(Error::Manifest("train and test subject sets must be nonempty".into()));
        }
        let train: HashSet<u8> = self.train_subjects.iter().copied().collect();
        let overlap: Vec<u8> = self.test_subjects.iter().copied().filter(|s| train.contains(s)).collect();
        if !overlap.is_empty() {
            return Err(Error::Manifest(format!("subjects {overlap:?} are in both train and test sets")));
        }
        Ok(())
    }

    pub fn is_train(&self, subject: u8) -> bool {
        self.train_subjects.contains(&subject)
    }

    pub fn is_test(&self, subject: u8) -> bool {
        self.test_subjects.contains(&subject)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub schema_version: u32,
    pub dataset: DatasetSource,
    #[serde(default)]
    pub split: SplitRule,
    pub pipeline: Pipeline,
    /// `timeseries-1d` or `spectrogram-2d`; defaults to the pipeline's model.
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default = "default_width")]
    pub spectrogram_width: usize,
}

fn default_width() -> usize {
    SPECTROGRAM_WIDTH
}

impl ExperimentManifest {
    /// Default synthetic experiment: 8 subjects, 30 repetitions, 6/2 split.
    pub fn synthetic(pipeline: Pipeline, seed: u64) -> Self {
        ExperimentManifest {
            schema_version: SCHEMA_VERSION,
            dataset: DatasetSource::Synthetic {
                subjects: 8,
                repetitions: 30,
                seed,
                noise: SimNoise::default(),
            },
            split: SplitRule::default(),
            pipeline,
            model: None,
            train: TrainConfig {
                seed,
                ..TrainConfig::default()
            },
            spectrogram_width: SPECTROGRAM_WIDTH,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Manifest(format!("cannot read experiment manifest {}: {e}", path.display())))?;
        let mut m: ExperimentManifest = serde_json::from_str(&text)?;
        if let DatasetSource::Files { manifest } = &mut m.dataset {
            if manifest.is_relative() {
                if let Some(dir) = path.parent() {
                    *manifest = dir.join(&*manifest);
                }
            }
        }
        m.validate()?;
        Ok(m)
    }

    pub fn model_name(&self) -> &str {
        match (&self.model, self.pipeline) {
            (Some(m), _) => m,
            (None, Pipeline::Timeseries) => "timeseries-1d",
            (None, Pipeline::Spectrogram) => "spectrogram-2d",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Manifest(format!("unsupported schema version {}", self.schema_version)));
        }
        self.split.validate()?;
        let expected = match self.pipeline {
            Pipeline::Timeseries => "timeseries-1d",
            Pipeline::Spectrogram => "spectrogram-2d",
        };
        if self.model_name() != expected {
            return Err(Error::Manifest(format!(
                "model {} does not fit the {} pipeline",
                self.model_name(),
                self.pipeline.name()
            )));
        }
        if let DatasetSource::Synthetic { subjects, .. } = self.dataset {
            if let Some(&s) = self.split.train_subjects.iter().chain(&self.split.test_subjects).find(|&&s| s >= subjects) {
                return Err(Error::Manifest(format!("subject {s} does not exist in a {subjects}-subject dataset")));
            }
        }
        self.train.validate()
    }
}
