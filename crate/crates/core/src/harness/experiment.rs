use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{preprocess, DatasetManifest, DatasetSource, ExperimentManifest, InputLayout, Normalizer, Pipeline, SCHEMA_VERSION};
use crate::micronet::{
    build_1d_model, build_2d_model, count_ops, train_repeated, Dataset, Model, ModelSpec, OpCountReport,
    ReferenceFigures, RunSummary, TrainConfig,
};
use crate::radar::{read_recording_file, GestureRecord};
use crate::scene::{plan_dataset, GestureTemplate};

/// Published parameter count and MFLOPs of the time-series network.
pub const REFERENCE_1D: ReferenceFigures = ReferenceFigures {
    params: 70_784,
    mflops: 3.719,
};

/// Published parameter count and MFLOPs of the spectrogram network.
pub const REFERENCE_2D: ReferenceFigures = ReferenceFigures {
    params: 51_488,
    mflops: 8.960,
};

/// One preprocessed recording.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedRecord {
    pub label: u8,
    pub subject: u8,
    pub input: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedData {
    pub pipeline: Pipeline,
    pub layout: InputLayout,
    pub records: Vec<PreparedRecord>,
    pub seconds: f64,
}

/// Loads or renders the recordings of `source`, one at a time, and applies
/// each requested pipeline to every record. Records of subjects outside
/// `keep` are skipped.
pub fn prepare_source(
    source: &DatasetSource,
    pipelines: &[Pipeline],
    width: usize,
    keep: impl Fn(u8) -> bool + Sync,
) -> Result<Vec<PreparedData>> {
    let start = Instant::now();
    let process = |rec: GestureRecord| -> Result<Vec<(Vec<f32>, InputLayout)>> {
        pipelines.iter().map(|&p| preprocess(&rec, p, width)).collect()
    };
    let rows: Vec<(u8, u8, Vec<(Vec<f32>, InputLayout)>)> = match source {
        DatasetSource::Synthetic {
            subjects,
            repetitions,
            seed,
            noise,
        } => {
            let plan = plan_dataset(&GestureTemplate::all(), *subjects, *repetitions, &Default::default(), noise, *seed)?;
            let wanted: Vec<usize> = (0..plan.len()).filter(|&i| keep(plan.records[i].subject)).collect();
            wanted
                .into_par_iter()
                .map(|i| {
                    let rec = plan.render(i)?;
                    Ok((rec.label, rec.subject, process(rec)?))
                })
                .collect::<Result<_>>()?
        }
        DatasetSource::Files { manifest } => {
            let m = DatasetManifest::load(manifest)?;
            let dir = manifest.parent().unwrap_or(Path::new("."));
            let wanted: Vec<_> = m.records.iter().filter(|e| keep(e.subject)).collect();
            wanted
                .into_par_iter()
                .map(|e| {
                    let path = dir.join(&e.path);
                    if !path.exists() {
                        return Err(Error::Manifest(format!("missing recording {}", path.display())));
                    }
                    let rec = read_recording_file(&path)?;
                    if rec.label != e.label || rec.subject != e.subject {
                        return Err(Error::Manifest(format!("{} disagrees with its manifest entry", path.display())));
                    }
                    Ok((rec.label, rec.subject, process(rec)?))
                })
                .collect::<Result<_>>()?
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    let mut out: Vec<PreparedData> = Vec::with_capacity(pipelines.len());
    for (k, &pipeline) in pipelines.iter().enumerate() {
        let layout = match rows.first() {
            Some(r) => r.2[k].1,
            None => return Err(Error::Manifest("dataset selects no recordings".into())),
        };
        let records = rows
            .iter()
            .map(|(label, subject, inputs)| {
                if inputs[k].1 != layout {
                    return Err(Error::Validation("recordings differ in shape".into()));
                }
                Ok(PreparedRecord {
                    label: *label,
                    subject: *subject,
                    input: inputs[k].0.clone(),
                })
            })
            .collect::<Result<_>>()?;
        out.push(PreparedData {
            pipeline,
            layout,
            records,
            seconds,
        });
    }
    Ok(out)
}

pub fn prepare(manifest: &ExperimentManifest) -> Result<PreparedData> {
    manifest.validate()?;
    let split = &manifest.split;
    let mut v = prepare_source(&manifest.dataset, &[manifest.pipeline], manifest.spectrogram_width, |s| {
        split.is_train(s) || split.is_test(s)
    })?;
    Ok(v.remove(0))
}

pub fn model_for(pipeline: Pipeline, layout: InputLayout) -> Result<ModelSpec> {
    match pipeline {
        Pipeline::Timeseries => build_1d_model(layout.width),
        Pipeline::Spectrogram => build_2d_model(layout.height, layout.width),
    }
}

pub fn reference_for(pipeline: Pipeline) -> ReferenceFigures {
    match pipeline {
        Pipeline::Timeseries => REFERENCE_1D,
        Pipeline::Spectrogram => REFERENCE_2D,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub train_records: usize,
    pub test_records: usize,
    pub train_subjects: Vec<u8>,
    pub test_subjects: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub preprocess_seconds: f64,
    pub train_seconds: f64,
}

/// Metrics JSON of one experiment. Everything except `timing` is a
/// deterministic function of the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub pipeline: Pipeline,
    pub model: String,
    pub input: InputLayout,
    pub dataset: DatasetSummary,
    pub train_config: TrainConfig,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub accuracies: Vec<f64>,
    /// Summed over repetitions, `[true][predicted]`.
    pub confusion: Vec<Vec<u32>>,
    pub ops: OpCountReport,
    pub runs: Vec<RunSummary>,
    pub timing: Timing,
}

impl ExperimentReport {
    /// Copy with wall-clock fields zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        ExperimentReport {
            timing: Timing {
                preprocess_seconds: 0.0,
                train_seconds: 0.0,
            },
            ..self.clone()
        }
    }
}

/// Report plus what is needed to reuse the trained networks.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub models: Vec<Model<f32>>,
    pub normalizer: Normalizer,
}

/// Splits prepared data by subject and z-scores both halves with statistics
/// of the training half.
pub fn split_and_normalize(
    data: &PreparedData,
    manifest: &ExperimentManifest,
) -> Result<(Dataset<f32>, Dataset<f32>, Normalizer)> {
    let split = &manifest.split;
    split.validate()?;
    let train: Vec<&PreparedRecord> = data.records.iter().filter(|r| split.is_train(r.subject)).collect();
    let test: Vec<&PreparedRecord> = data.records.iter().filter(|r| split.is_test(r.subject)).collect();
    // leak check on the actual records, independent of the rule above
    let train_ids: std::collections::HashSet<u8> = train.iter().map(|r| r.subject).collect();
    if test.iter().any(|r| train_ids.contains(&r.subject)) {
        return Err(Error::Manifest("a subject appears in both train and test records".into()));
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::Manifest("split leaves an empty train or test set".into()));
    }
    let normalizer = Normalizer::fit(train.iter().map(|r| r.input.as_slice()), data.layout)?;
    let build = |rows: &[&PreparedRecord]| -> Result<Dataset<f32>> {
        let mut inputs = Vec::with_capacity(rows.len() * data.layout.len());
        for r in rows {
            let start = inputs.len();
            inputs.extend_from_slice(&r.input);
            normalizer.apply(&mut inputs[start..]);
        }
        Dataset::new(inputs, rows.iter().map(|r| r.label as usize).collect(), data.layout.len())
    };
    Ok((build(&train)?, build(&test)?, normalizer))
}

pub fn run_prepared(manifest: &ExperimentManifest, data: &PreparedData) -> Result<ExperimentOutcome> {
    manifest.validate()?;
    if data.pipeline != manifest.pipeline {
        return Err(Error::Manifest("prepared data belongs to another pipeline".into()));
    }
    let (train, test, normalizer) = split_and_normalize(data, manifest)?;
    let spec = model_for(manifest.pipeline, data.layout)?;
    let ops = count_ops(&spec)?.with_reference(reference_for(manifest.pipeline));
    let start = Instant::now();
    let (report, models) = train_repeated(&spec, &train, &test, &manifest.train)?;
    let train_seconds = start.elapsed().as_secs_f64();
    let accuracies = report
        .runs
        .iter()
        .map(|r| r.test.as_ref().map_or(0.0, |e| e.accuracy))
        .collect();
    let mut train_subjects: Vec<u8> = manifest.split.train_subjects.clone();
    let mut test_subjects: Vec<u8> = manifest.split.test_subjects.clone();
    train_subjects.sort_unstable();
    test_subjects.sort_unstable();
    Ok(ExperimentOutcome {
        report: ExperimentReport {
            schema_version: SCHEMA_VERSION,
            pipeline: manifest.pipeline,
            model: spec.name.clone(),
            input: data.layout,
            dataset: DatasetSummary {
                train_records: train.len(),
                test_records: test.len(),
                train_subjects,
                test_subjects,
            },
            train_config: manifest.train,
            mean_accuracy: report.mean_accuracy,
            std_accuracy: report.std_accuracy,
            accuracies,
            confusion: report.confusion,
            ops,
            runs: report.runs,
            timing: Timing {
                preprocess_seconds: data.seconds,
                train_seconds,
            },
        },
        models,
        normalizer,
    })
}

/// Preprocesses the manifest's dataset with its pipeline, trains
/// `train.repetitions` seeded networks and reports mean and spread of the
/// test accuracy.
pub fn run_experiment(manifest: &ExperimentManifest) -> Result<ExperimentOutcome> {
    let data = prepare(manifest)?;
    run_prepared(manifest, &data)
}
