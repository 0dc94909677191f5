use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use fmcw_gesture::conventional::{spectrograms, write_spectrograms, write_spectrograms_csv, BeamformingGrid};
use fmcw_gesture::harness::{
    bench_complexity, load_classifier, measure_latency, prepare, prepare_source, run_prepared, save_classifier,
    write_bench_csv, BenchConfig, CheckpointMeta, DatasetEntry, DatasetManifest,
    ExperimentManifest, Pipeline, SCHEMA_VERSION,
};
use fmcw_gesture::micronet::{evaluate, Dataset};
use fmcw_gesture::radar::{read_recording_file, write_recording_file, write_sidecar};
use fmcw_gesture::scene::{plan_dataset, GestureClass, GestureTemplate, SimNoise};
use fmcw_gesture::timeseries::{extract_features, write_features, write_features_csv};
use fmcw_gesture::{Error, Result};

#[derive(Parser)]
#[command(name = "fmcw", version, about = "FMCW radar gesture sensing toolkit")]
struct Cli {
    /// Seed for simulation and training; overrides the manifest when given.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Experiment manifest (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic dataset as RGR1 recordings plus manifest.json.
    Simulate {
        #[arg(long, default_value_t = 10)]
        classes: usize,
        #[arg(long, default_value_t = 8)]
        subjects: u8,
        #[arg(long, default_value_t = 30)]
        reps: u32,
        /// Disable thermal noise, clutter and random frame phase.
        #[arg(long)]
        clean: bool,
    },
    /// Export features or spectrograms for every recording of a dataset.
    Preprocess {
        #[arg(long)]
        pipeline: Pipeline,
        /// Dataset manifest written by `simulate`.
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the experiment in --config; writes metrics.json and model.mnc.
    Train,
    /// Evaluate a checkpoint on the test split of --config.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Operation counts and timing of both pipelines over an (N, M) grid.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [16, 32, 64, 128])]
        chirps: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [32, 64, 128, 256])]
        samples: Vec<usize>,
        #[arg(long, default_value_t = 30)]
        reps: usize,
        #[arg(long, default_value_t = 4)]
        frames: usize,
    },
    /// Preprocessing and inference latency for one recording.
    Latency {
        #[arg(long)]
        checkpoint: PathBuf,
        /// RGR1 file; a synthetic 2 s recording is used when absent.
        #[arg(long)]
        recording: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        runs: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    fs::create_dir_all(&cli.out)?;
    let seed = cli.seed;
    let manifest = || -> Result<ExperimentManifest> {
        let path = cli
            .config
            .as_ref()
            .ok_or_else(|| Error::Validation("--config <manifest.json> is required".into()))?;
        let mut m = ExperimentManifest::load(path)?;
        if let Some(s) = seed {
            m.train.seed = s;
        }
        Ok(m)
    };
    match &cli.command {
        Command::Simulate {
            classes,
            subjects,
            reps,
            clean,
        } => simulate(&cli.out, *classes, *subjects, *reps, *clean, seed.unwrap_or(0)),
        Command::Preprocess { pipeline, input } => preprocess_dataset(&cli.out, *pipeline, input),
        Command::Train => train(&cli.out, &manifest()?),
        Command::Eval { checkpoint } => eval(&cli.out, &manifest()?, checkpoint),
        Command::Bench {
            chirps,
            samples,
            reps,
            frames,
        } => {
            let report = bench_complexity(&BenchConfig {
                chirps: chirps.clone(),
                samples: samples.clone(),
                repetitions: *reps,
                frames: *frames,
            })?;
            write_json(&cli.out.join("bench.json"), &report)?;
            write_bench_csv(&report, &mut BufWriter::new(File::create(cli.out.join("bench.csv"))?))?;
            println!(
                "slopes (complex MACs): timeseries {:.3}, fft {:.3}",
                report.slopes.timeseries_macs.slope, report.slopes.fft_macs.slope
            );
            Ok(())
        }
        Command::Latency {
            checkpoint,
            recording,
            runs,
        } => {
            let (model, meta) = load_classifier(checkpoint)?;
            let record = match recording {
                Some(p) => read_recording_file(p)?,
                None => {
                    let plan = plan_dataset(
                        &[GestureTemplate::new(GestureClass::LeftRight)],
                        2,
                        1,
                        &Default::default(),
                        &SimNoise::default(),
                        seed.unwrap_or(0),
                    )?;
                    plan.render(0)?
                }
            };
            let report = measure_latency(&record, &model, &meta, *runs)?;
            write_json(&cli.out.join("latency.json"), &report)?;
            println!(
                "preprocessing {:.3} ms, inference {:.3} ms (median of {})",
                report.preprocessing.median * 1e3,
                report.inference.median * 1e3,
                runs
            );
            Ok(())
        }
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn simulate(out: &Path, classes: usize, subjects: u8, reps: u32, clean: bool, seed: u64) -> Result<()> {
    if classes == 0 || classes > GestureClass::ALL.len() {
        return Err(Error::Validation(format!("--classes must be in 1..=10, got {classes}")));
    }
    let templates: Vec<GestureTemplate> = GestureClass::ALL[..classes].iter().map(|&c| GestureTemplate::new(c)).collect();
    let noise = if clean { SimNoise::none() } else { SimNoise::default() };
    let plan = plan_dataset(&templates, subjects, reps, &Default::default(), &noise, seed)?;
    let entries: Vec<DatasetEntry> = (0..plan.len())
        .into_par_iter()
        .map(|i| {
            let spec = plan.records[i];
            let name = format!("s{}_{}_r{:02}.rgr", spec.subject, spec.class.name(), spec.repetition);
            let rec = plan.render(i)?;
            let path = out.join(&name);
            write_recording_file(&rec, &path)?;
            write_sidecar(&rec, &path)?;
            Ok(DatasetEntry {
                path: name,
                label: rec.label,
                subject: rec.subject,
            })
        })
        .collect::<Result<_>>()?;
    let manifest = DatasetManifest {
        schema_version: SCHEMA_VERSION,
        seed,
        config: plan.config.clone(),
        records: entries,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    println!("wrote {} recordings to {}", manifest.records.len(), out.display());
    Ok(())
}

fn preprocess_dataset(out: &Path, pipeline: Pipeline, input: &Path) -> Result<()> {
    let manifest = DatasetManifest::load(input)?;
    let dir = input.parent().unwrap_or(Path::new("."));
    manifest.records.par_iter().try_for_each(|e| -> Result<()> {
        let path = dir.join(&e.path);
        if !path.exists() {
            return Err(Error::Manifest(format!("missing recording {}", path.display())));
        }
        let rec = read_recording_file(&path)?;
        let stem = Path::new(&e.path).file_stem().and_then(|s| s.to_str()).unwrap_or("record");
        match pipeline {
            Pipeline::Timeseries => {
                let f = extract_features(&rec.cube)?;
                write_features(&f, &mut BufWriter::new(File::create(out.join(format!("{stem}.fts")))?))?;
                write_features_csv(&f, &mut BufWriter::new(File::create(out.join(format!("{stem}.csv")))?))?;
            }
            Pipeline::Spectrogram => {
                let s = spectrograms(&rec.cube, &BeamformingGrid::default())?;
                write_spectrograms(&s, &mut BufWriter::new(File::create(out.join(format!("{stem}.spg")))?))?;
                write_spectrograms_csv(&s, &mut BufWriter::new(File::create(out.join(format!("{stem}.csv")))?))?;
            }
        }
        Ok(())
    })?;
    println!("{} {} exports in {}", manifest.records.len(), pipeline.name(), out.display());
    Ok(())
}

fn train(out: &Path, manifest: &ExperimentManifest) -> Result<()> {
    let data = prepare(manifest)?;
    let outcome = run_prepared(manifest, &data)?;
    write_json(&out.join("metrics.json"), &outcome.report)?;
    let meta = CheckpointMeta {
        pipeline: manifest.pipeline,
        spectrogram_width: manifest.spectrogram_width,
        normalizer: outcome.normalizer.clone(),
    };
    save_classifier(&outcome.models[0], &meta, out.join("model.mnc"))?;
    let mut csv = BufWriter::new(File::create(out.join("history.csv"))?);
    writeln!(csv, "repetition,epoch,loss,train_accuracy")?;
    for run in &outcome.report.runs {
        for e in &run.history {
            writeln!(csv, "{},{},{},{}", run.repetition, e.epoch, e.loss, e.train_accuracy)?;
        }
    }
    println!(
        "{}: test accuracy {:.2}% +- {:.2}% over {} runs",
        outcome.report.model,
        100.0 * outcome.report.mean_accuracy,
        100.0 * outcome.report.std_accuracy,
        outcome.report.runs.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    schema_version: u32,
    pipeline: Pipeline,
    test_records: usize,
    accuracy: f64,
    confusion: Vec<Vec<u32>>,
}

fn eval(out: &Path, manifest: &ExperimentManifest, checkpoint: &Path) -> Result<()> {
    manifest.validate()?;
    let (model, meta) = load_classifier(checkpoint)?;
    if meta.pipeline != manifest.pipeline {
        return Err(Error::Validation("checkpoint was trained on another pipeline".into()));
    }
    let split = &manifest.split;
    let data = prepare_source(&manifest.dataset, &[meta.pipeline], meta.spectrogram_width, |s| split.is_test(s))?.remove(0);
    let mut inputs = Vec::with_capacity(data.records.len() * data.layout.len());
    for r in &data.records {
        let start = inputs.len();
        inputs.extend_from_slice(&r.input);
        meta.normalizer.apply(&mut inputs[start..]);
    }
    let labels = data.records.iter().map(|r| r.label as usize).collect();
    let test = Dataset::new(inputs, labels, data.layout.len())?;
    let ev = evaluate(&model, &test)?;
    let report = EvalReport {
        schema_version: SCHEMA_VERSION,
        pipeline: manifest.pipeline,
        test_records: test.len(),
        accuracy: ev.accuracy,
        confusion: ev.confusion,
    };
    write_json(&out.join("eval.json"), &report)?;
    println!("test accuracy {:.2}% on {} recordings", 100.0 * report.accuracy, report.test_records);
    Ok(())
}
