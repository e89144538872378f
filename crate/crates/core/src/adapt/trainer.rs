use serde::{Deserialize, Serialize};

use crate::error::{AolError, Result};
use crate::predictor::{batch_loss, loss_and_gradient, PredictorSpec, WeightVector};
use crate::trajcore::{Sample, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    /// Plain gradient descent, `w <- w - lr * grad`.
    Sgd,
    /// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
    #[default]
    Adam,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// Optimizer moments that persist across updates of one master.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimizerState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl OptimizerState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn apply(&mut self, optimizer: Optimizer, lr: f64, w: &mut [f64], grad: &[f64]) {
        match optimizer {
            Optimizer::Sgd => {
                self.t += 1;
                for (wi, gi) in w.iter_mut().zip(grad) {
                    *wi -= lr * gi;
                }
            }
            Optimizer::Adam => {
                if self.m.len() != w.len() {
                    self.m = vec![0.0; w.len()];
                    self.v = vec![0.0; w.len()];
                    self.t = 0;
                }
                self.t += 1;
                let c1 = 1.0 - BETA1.powi(self.t as i32);
                let c2 = 1.0 - BETA2.powi(self.t as i32);
                for i in 0..w.len() {
                    self.m[i] = BETA1 * self.m[i] + (1.0 - BETA1) * grad[i];
                    self.v[i] = BETA2 * self.v[i] + (1.0 - BETA2) * grad[i] * grad[i];
                    w[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + ADAM_EPS);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainerConfig {
    /// Number of recent confident samples per update.
    pub k: usize,
    pub epochs: usize,
    pub lr: f64,
    pub confidence_min: f64,
    pub batch_cap: usize,
    pub optimizer: Optimizer,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            k: 1,
            epochs: 3,
            lr: 0.001,
            confidence_min: 0.5,
            batch_cap: 64,
            optimizer: Optimizer::default(),
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(AolError::config("k must be >= 1"));
        }
        if self.epochs < 1 {
            return Err(AolError::config("epochs must be >= 1"));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(AolError::config(format!("lr must be > 0, got {}", self.lr)));
        }
        if !(0.0..=1.0).contains(&self.confidence_min) {
            return Err(AolError::config("confidence_min must be in [0, 1]"));
        }
        if self.batch_cap < 1 {
            return Err(AolError::config("batch_cap must be >= 1"));
        }
        Ok(())
    }

    pub fn batch_size(&self) -> usize {
        self.k.min(self.batch_cap).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub weights: WeightVector,
    /// Loss before the first epoch; 0 when skipped.
    pub loss_before: f64,
    /// Loss after the last epoch; 0 when skipped.
    pub loss_after: f64,
    /// No confident sample was available, so no update happened.
    pub skipped: bool,
}

/// `epochs` full-batch optimizer steps on the newest confident samples in
/// `recent`, starting from fresh optimizer state.
///
/// Targets are the pseudo-labels. Returns the input weights unchanged (and
/// `skipped = true`) when no sample passes the confidence filter.
pub fn train_master(
    master: &WeightVector,
    recent: &[Sample],
    cfg: &TrainerConfig,
    spec: &PredictorSpec,
) -> Result<TrainOutcome> {
    train_master_with_state(master, recent, cfg, spec, &mut OptimizerState::new())
}

/// [`train_master`] continuing from, and updating, `state`.
pub fn train_master_with_state(
    master: &WeightVector,
    recent: &[Sample],
    cfg: &TrainerConfig,
    spec: &PredictorSpec,
    state: &mut OptimizerState,
) -> Result<TrainOutcome> {
    master.check_matches(spec)?;
    let confident: Vec<&Sample> = recent
        .iter()
        .filter(|s| s.confidence >= cfg.confidence_min)
        .collect();
    let take = cfg.batch_size().min(confident.len());
    let batch: Vec<(&Trajectory, &Trajectory)> = confident[confident.len() - take..]
        .iter()
        .map(|s| (&s.observed, &s.pseudo_label))
        .collect();
    if batch.is_empty() {
        return Ok(TrainOutcome {
            weights: master.clone(),
            loss_before: 0.0,
            loss_after: 0.0,
            skipped: true,
        });
    }
    if master.is_empty() {
        let loss = batch_loss(spec, master, &batch)?;
        return Ok(TrainOutcome {
            weights: master.clone(),
            loss_before: loss,
            loss_after: loss,
            skipped: false,
        });
    }

    let mut w = master.clone();
    let mut loss_before = 0.0;
    for epoch in 0..cfg.epochs {
        let (loss, grad) = loss_and_gradient(spec, &w, &batch)?;
        if epoch == 0 {
            loss_before = loss;
        }
        state.apply(cfg.optimizer, cfg.lr, w.values_mut(), grad.values());
    }
    if w.values().iter().any(|v| !v.is_finite()) {
        return Err(AolError::contract(
            "gradient step produced non-finite weights; lower lr or coord_scale",
        ));
    }
    let loss_after = batch_loss(spec, &w, &batch)?;
    Ok(TrainOutcome {
        weights: w,
        loss_before,
        loss_after,
        skipped: false,
    })
}
