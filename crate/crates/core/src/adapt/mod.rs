//! Online adaptation engines.
//!
//! Three engines share the [`OnlineEngine`] interface: [`FrozenEngine`]
//! (no adaptation), [`BAolEngine`] (one master, one slave, the slave switched
//! to the master after every step) and [`AolEngine`] (a bounded list of
//! context snapshots, best-slave selection and replacement).

mod aol;
mod baol;
mod slaves;
mod trainer;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{AolError, Result};
use crate::predictor::{predict, PredictorSpec, WeightVector};
use crate::trajcore::{mse_loss, Sample, Trajectory};

pub use aol::AolEngine;
pub use baol::BAolEngine;
pub use slaves::{Replacement, SlaveEntry, SlaveList, SnapshotOutcome};
pub use trainer::{
    train_master, train_master_with_state, Optimizer, OptimizerState, TrainOutcome, TrainerConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Score slaves against the current sample's pseudo-label.
    #[default]
    Faithful,
    /// Score slaves on the newest sample whose label horizon has elapsed,
    /// and train only on such samples.
    Causal,
}

fn default_max_slaves() -> usize {
    10
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AolConfig {
    /// Total slave-list capacity, including the master-synced `s0`.
    #[serde(default = "default_max_slaves")]
    pub max_slaves: usize,
    #[serde(default)]
    pub replacement: Replacement,
    #[serde(default = "default_true")]
    pub copy_best_to_master: bool,
    #[serde(default)]
    pub selection_mode: SelectionMode,
    #[serde(default)]
    pub trainer: TrainerConfig,
    #[serde(default)]
    pub rng_seed: u64,
}

impl Default for AolConfig {
    fn default() -> Self {
        AolConfig {
            max_slaves: default_max_slaves(),
            replacement: Replacement::default(),
            copy_best_to_master: true,
            selection_mode: SelectionMode::default(),
            trainer: TrainerConfig::default(),
            rng_seed: 0,
        }
    }
}

impl AolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_slaves < 1 {
            return Err(AolError::config("max_slaves must be >= 1"));
        }
        self.trainer.validate()
    }
}

/// Everything an engine reports about one processed sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub sample_id: u64,
    pub emitted_prediction: Trajectory,
    pub selected_slave_id: u64,
    /// Ids of the scored slaves, parallel to `per_slave_mse`.
    pub slave_ids: Vec<u64>,
    pub per_slave_mse: Vec<f64>,
    pub slave_count: usize,
    pub evicted_slave_id: Option<u64>,
    pub train_loss_before: f64,
    pub train_loss_after: f64,
    pub train_skipped: bool,
    pub elapsed_ms: f64,
}

impl StepReport {
    /// Copy with the wall-clock field zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> StepReport {
        StepReport {
            elapsed_ms: 0.0,
            ..self.clone()
        }
    }

    pub fn selected_mse(&self) -> Option<f64> {
        self.slave_ids
            .iter()
            .position(|&id| id == self.selected_slave_id)
            .map(|i| self.per_slave_mse[i])
    }
}

pub trait OnlineEngine: Send {
    fn step(&mut self, sample: &Sample) -> Result<StepReport>;

    /// Current master (or frozen) weights.
    fn master(&self) -> &WeightVector;
}

/// Predicts with fixed weights; never trains.
#[derive(Debug, Clone)]
pub struct FrozenEngine {
    spec: PredictorSpec,
    weights: WeightVector,
}

impl FrozenEngine {
    pub fn new(spec: PredictorSpec, weights: WeightVector) -> Result<Self> {
        spec.validate()?;
        weights.check_matches(&spec)?;
        Ok(FrozenEngine { spec, weights })
    }
}

impl OnlineEngine for FrozenEngine {
    fn step(&mut self, sample: &Sample) -> Result<StepReport> {
        let start = std::time::Instant::now();
        sample.validate(self.spec.t_obs, self.spec.t_pred)?;
        let pred = predict(&self.spec, &self.weights, &sample.observed)?;
        let score = mse_loss(&pred, &sample.pseudo_label)?;
        Ok(StepReport {
            sample_id: sample.sample_id,
            emitted_prediction: pred,
            selected_slave_id: 0,
            slave_ids: vec![0],
            per_slave_mse: vec![score],
            slave_count: 1,
            evicted_slave_id: None,
            train_loss_before: 0.0,
            train_loss_after: 0.0,
            train_skipped: true,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    fn master(&self) -> &WeightVector {
        &self.weights
    }
}

/// The newest confident samples, bounded by `min(k, batch_cap)`.
#[derive(Debug, Clone)]
pub(crate) struct RecentWindow {
    cap: usize,
    confidence_min: f64,
    samples: VecDeque<Sample>,
}

impl RecentWindow {
    pub(crate) fn new(cfg: &TrainerConfig) -> Self {
        RecentWindow {
            cap: cfg.batch_size(),
            confidence_min: cfg.confidence_min,
            samples: VecDeque::with_capacity(cfg.batch_size()),
        }
    }

    pub(crate) fn push(&mut self, sample: &Sample) {
        if sample.confidence < self.confidence_min {
            return;
        }
        if self.samples.len() == self.cap {
            self.samples.pop_front();
        }
        self.samples.push_back(sample.clone());
    }

    pub(crate) fn as_slice(&mut self) -> &[Sample] {
        self.samples.make_contiguous()
    }
}

/// Index of the minimum score; ties go to the earliest entry.
pub(crate) fn argmin(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s < scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_prefers_first_on_ties() {
        assert_eq!(argmin(&[1.0, 1.0, 0.5, 0.5]), 2);
        assert_eq!(argmin(&[0.0, 0.0, 0.0]), 0);
        assert_eq!(argmin(&[3.0]), 0);
    }

    #[test]
    fn config_defaults_from_empty_json() {
        let cfg: AolConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, AolConfig::default());
        assert_eq!(cfg.max_slaves, 10);
        assert_eq!(cfg.trainer.k, 1);
        assert_eq!(cfg.trainer.epochs, 3);
        assert_eq!(cfg.trainer.lr, 0.001);
        assert!(cfg.copy_best_to_master);
        assert_eq!(cfg.replacement, Replacement::Lru);
    }

    #[test]
    fn zero_capacity_is_a_config_error() {
        let cfg = AolConfig {
            max_slaves: 0,
            ..AolConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(AolError::Config(_))));
    }
}
