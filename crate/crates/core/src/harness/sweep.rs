use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{csv_io, run_experiment, ExperimentConfig, Framework};
use crate::adapt::Replacement;
use crate::error::{AolError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    NSlaves,
    K,
    Epochs,
    Replacement,
    CopyBest,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::NSlaves => "n_slaves",
            SweepAxis::K => "k",
            SweepAxis::Epochs => "epochs",
            SweepAxis::Replacement => "replacement",
            SweepAxis::CopyBest => "copy_best",
        }
    }

    fn check_framework(self, framework: Framework) -> Result<()> {
        let ok = match self {
            SweepAxis::K | SweepAxis::Epochs => framework != Framework::None,
            _ => framework == Framework::Aol,
        };
        if ok {
            Ok(())
        } else {
            Err(AolError::config(format!(
                "axis {self} does not apply to framework {}",
                framework.as_str()
            )))
        }
    }

    /// Copy of `base` with this axis set to `value`.
    pub fn apply(self, base: &ExperimentConfig, value: &str) -> Result<ExperimentConfig> {
        let mut cfg = base.clone();
        let bad = || AolError::config(format!("invalid value `{value}` for axis {self}"));
        let int = || value.trim().parse::<usize>().map_err(|_| bad());
        match self {
            SweepAxis::NSlaves => cfg.aol.max_slaves = int()?,
            SweepAxis::K => cfg.aol.trainer.k = int()?,
            SweepAxis::Epochs => cfg.aol.trainer.epochs = int()?,
            SweepAxis::Replacement => {
                cfg.aol.replacement = match value.trim() {
                    "lru" => Replacement::Lru,
                    "random" => Replacement::Random,
                    "fifo" => Replacement::Fifo,
                    _ => return Err(bad()),
                }
            }
            SweepAxis::CopyBest => {
                cfg.aol.copy_best_to_master = value.trim().parse().map_err(|_| bad())?
            }
        }
        cfg.id = format!("{}_{}_{}", base.id, self, value.trim());
        if let Some(dir) = &base.output_dir {
            cfg.output_dir = Some(dir.join(format!("{}_{}", self, value.trim())));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = AolError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_slaves" => Ok(SweepAxis::NSlaves),
            "k" => Ok(SweepAxis::K),
            "epochs" => Ok(SweepAxis::Epochs),
            "replacement" => Ok(SweepAxis::Replacement),
            "copy_best" => Ok(SweepAxis::CopyBest),
            other => Err(AolError::config(format!("unknown sweep axis `{other}`"))),
        }
    }
}

/// One per (axis value, seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub seed: u64,
    pub samples: usize,
    pub mean_ade: f64,
    pub median_ade: f64,
    pub mean_fde: f64,
    pub median_fde: f64,
    pub mean_elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_FILE: &str = "sweep.csv";

impl SweepTable {
    /// Rows for one axis value.
    pub fn rows_for<'a>(&'a self, value: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.value == value)
    }

    /// Sample-weighted mean over seeds of a per-seed metric.
    pub fn pooled(&self, value: &str, metric: impl Fn(&SweepRow) -> f64) -> f64 {
        let (sum, n) = self.rows_for(value).fold((0.0, 0usize), |(s, n), r| {
            (s + metric(r) * r.samples as f64, n + r.samples)
        });
        if n == 0 {
            f64::NAN
        } else {
            sum / n as f64
        }
    }
}

/// Runs `run_experiment` once per value with everything else fixed and
/// writes `sweep.csv` (long format) into the base output directory.
pub fn run_sweep(
    base: &ExperimentConfig,
    axis: SweepAxis,
    values: &[String],
) -> Result<SweepTable> {
    base.validate()?;
    axis.check_framework(base.framework)?;
    if values.is_empty() {
        return Err(AolError::config("sweep needs at least one value"));
    }
    let configs = values
        .iter()
        .map(|v| axis.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (value, cfg) in values.iter().zip(&configs) {
        let outcome = run_experiment(cfg)?;
        for s in &outcome.summary.per_seed {
            rows.push(SweepRow {
                axis: axis.to_string(),
                value: value.trim().to_string(),
                seed: s.seed,
                samples: s.metrics.count,
                mean_ade: s.metrics.mean_ade,
                median_ade: s.metrics.median_ade,
                mean_fde: s.metrics.mean_fde,
                median_fde: s.metrics.median_fde,
                mean_elapsed_ms: s.metrics.mean_elapsed_ms,
            });
        }
    }
    if let Some(dir) = &base.output_dir {
        std::fs::create_dir_all(dir).map_err(|e| AolError::io(dir, e))?;
        let path = dir.join(SWEEP_FILE);
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_io(&path, e))?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| AolError::io(&path, e))?;
    }
    Ok(SweepTable { axis, rows })
}
