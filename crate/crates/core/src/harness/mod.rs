//! Experiment driver: pretraining, streaming evaluation, sweeps and the
//! on-disk formats (results CSV, summary JSON, weight snapshots, JSON-lines
//! streams).

mod config;
mod stream_io;
mod sweep;
mod weights_io;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adapt::{AolConfig, AolEngine, BAolEngine, FrozenEngine, OnlineEngine, OptimizerState};
use crate::error::{AolError, Result};
use crate::predictor::{batch_loss, init_weights, loss_and_gradient, WeightVector};
use crate::scenegen::generate_stream;
use crate::trajcore::{ade, fde, Trajectory};

pub use config::{ExperimentConfig, Framework, PretrainConfig, ScriptRef};
pub use stream_io::{load_stream, save_stream, write_jsonl};
pub use sweep::{run_sweep, SweepAxis, SweepRow, SweepTable};
pub use weights_io::{decode_weights, encode_weights, load_weights, save_weights, MAGIC};

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// splitmix64 over (base, repeat, stream tag).
fn derive_seed(base: u64, repeat: usize, tag: u64) -> u64 {
    let mut z = base
        .wrapping_add((repeat as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(tag.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const TAG_PRETRAIN_STREAM: u64 = 1;

/// Pretrained weights for repeat 0.
pub fn pretrain(cfg: &ExperimentConfig) -> Result<WeightVector> {
    pretrain_repeat(cfg, 0)
}

/// Full-batch optimizer steps on every confident sample of the pretrain
/// script, starting from `init_weights(predictor, run_seed)`.
pub fn pretrain_repeat(cfg: &ExperimentConfig, repeat: usize) -> Result<WeightVector> {
    let spec = &cfg.predictor;
    let mut w = init_weights(spec, cfg.run_seed(repeat))?;
    if w.is_empty() || cfg.pretrain.epochs == 0 {
        return Ok(w);
    }
    let script = cfg.pretrain.script.resolve()?.with_seed(derive_seed(
        cfg.pretrain.seed,
        repeat,
        TAG_PRETRAIN_STREAM,
    ));
    let stream = generate_stream(&script)?;
    let batch: Vec<(&Trajectory, &Trajectory)> = stream
        .iter()
        .filter(|s| s.confidence >= cfg.aol.trainer.confidence_min)
        .map(|s| (&s.observed, &s.pseudo_label))
        .collect();
    if batch.is_empty() {
        return Ok(w);
    }
    let lr = cfg.pretrain.lr.unwrap_or(cfg.aol.trainer.lr);
    let mut state = OptimizerState::new();
    for _ in 0..cfg.pretrain.epochs {
        let (_, grad) = loss_and_gradient(spec, &w, &batch)?;
        state.apply(cfg.aol.trainer.optimizer, lr, w.values_mut(), grad.values());
    }
    if w.values().iter().any(|v| !v.is_finite()) {
        return Err(AolError::config("pretraining diverged; lower pretrain.lr"));
    }
    Ok(w)
}

/// Mean scaled-unit training loss of `w` on the pretrain stream of `repeat`.
pub fn pretrain_loss(cfg: &ExperimentConfig, repeat: usize, w: &WeightVector) -> Result<f64> {
    let script = cfg.pretrain.script.resolve()?.with_seed(derive_seed(
        cfg.pretrain.seed,
        repeat,
        TAG_PRETRAIN_STREAM,
    ));
    let stream = generate_stream(&script)?;
    let batch: Vec<_> = stream
        .iter()
        .map(|s| (&s.observed, &s.pseudo_label))
        .collect();
    batch_loss(&cfg.predictor, w, &batch)
}

/// One per (seed, sample).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment_id: String,
    pub seed: u64,
    pub sample_id: u64,
    pub regime_tag: String,
    pub ade: f64,
    pub fde: f64,
    pub selected_slave_id: u64,
    pub slave_count: usize,
    pub train_loss_after: f64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub count: usize,
    pub mean_ade: f64,
    pub median_ade: f64,
    pub mean_fde: f64,
    pub median_fde: f64,
    pub mean_elapsed_ms: f64,
}

impl MetricSummary {
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a ResultRow>) -> Self {
        let rows: Vec<&ResultRow> = rows.into_iter().collect();
        let ades: Vec<f64> = rows.iter().map(|r| r.ade).collect();
        let fdes: Vec<f64> = rows.iter().map(|r| r.fde).collect();
        let elapsed: Vec<f64> = rows.iter().map(|r| r.elapsed_ms).collect();
        MetricSummary {
            count: rows.len(),
            mean_ade: mean(&ades),
            median_ade: median(&ades),
            mean_fde: mean(&fdes),
            median_fde: median(&fdes),
            mean_elapsed_ms: mean(&elapsed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    #[serde(flatten)]
    pub metrics: MetricSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment_id: String,
    pub framework: Framework,
    pub repeats: usize,
    pub overall: MetricSummary,
    pub per_regime: BTreeMap<String, MetricSummary>,
    pub per_seed: Vec<SeedSummary>,
}

impl Summary {
    pub fn from_rows(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Self {
        let mut tags: BTreeMap<String, Vec<&ResultRow>> = BTreeMap::new();
        for r in rows {
            tags.entry(r.regime_tag.clone()).or_default().push(r);
        }
        let per_seed = (0..cfg.repeats)
            .map(|rep| {
                let seed = cfg.run_seed(rep);
                SeedSummary {
                    seed,
                    metrics: MetricSummary::from_rows(rows.iter().filter(|r| r.seed == seed)),
                }
            })
            .collect();
        Summary {
            experiment_id: cfg.id.clone(),
            framework: cfg.framework,
            repeats: cfg.repeats,
            overall: MetricSummary::from_rows(rows),
            per_regime: tags
                .into_iter()
                .map(|(k, v)| (k, MetricSummary::from_rows(v)))
                .collect(),
            per_seed,
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
}

fn build_engine(
    cfg: &ExperimentConfig,
    repeat: usize,
    weights: WeightVector,
) -> Result<Box<dyn OnlineEngine>> {
    let spec = cfg.predictor;
    Ok(match cfg.framework {
        Framework::None => Box::new(FrozenEngine::new(spec, weights)?),
        Framework::Baol => Box::new(BAolEngine::new(spec, cfg.aol.trainer.clone(), weights)?),
        Framework::Aol => {
            let aol = AolConfig {
                rng_seed: cfg.aol.rng_seed.wrapping_add(repeat as u64),
                ..cfg.aol.clone()
            };
            Box::new(AolEngine::new(spec, aol, weights)?)
        }
    })
}

/// Streams one repeat through the configured framework.
pub fn run_repeat(cfg: &ExperimentConfig, repeat: usize) -> Result<Vec<ResultRow>> {
    let seed = cfg.run_seed(repeat);
    let weights = pretrain_repeat(cfg, repeat)?;
    let mut engine = build_engine(cfg, repeat, weights)?;
    let stream = generate_stream(&cfg.script.resolve()?.with_seed(seed))?;
    stream
        .iter()
        .map(|sample| {
            let report = engine.step(sample)?;
            Ok(ResultRow {
                experiment_id: cfg.id.clone(),
                seed,
                sample_id: sample.sample_id,
                regime_tag: sample.regime_tag.clone(),
                ade: ade(&report.emitted_prediction, &sample.future_truth)?.value(),
                fde: fde(&report.emitted_prediction, &sample.future_truth)?.value(),
                selected_slave_id: report.selected_slave_id,
                slave_count: report.slave_count,
                train_loss_after: report.train_loss_after,
                elapsed_ms: report.elapsed_ms,
            })
        })
        .collect()
}

/// Runs every repeat, then writes `results.csv` and `summary.json` when an
/// output directory is configured.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for repeat in 0..cfg.repeats {
        rows.extend(run_repeat(cfg, repeat)?);
    }
    let summary = Summary::from_rows(cfg, &rows);
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir).map_err(|e| AolError::io(dir, e))?;
        write_results_csv(&rows, &dir.join(RESULTS_FILE))?;
        write_json(&summary, &dir.join(SUMMARY_FILE))?;
    }
    Ok(ExperimentOutcome { rows, summary })
}

pub fn write_results_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| AolError::io(path, e))
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_io(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(AolError::from))
        .collect()
}

pub(crate) fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| AolError::io(path, e))
}

pub(crate) fn csv_io(path: &Path, e: csv::Error) -> AolError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => AolError::io(path, io),
            other => AolError::config(format!("{other:?}")),
        }
    } else {
        AolError::Csv(e)
    }
}
