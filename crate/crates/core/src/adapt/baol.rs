use std::time::Instant;

use super::{
    train_master_with_state, OnlineEngine, OptimizerState, RecentWindow, StepReport, TrainerConfig,
};
use crate::error::Result;
use crate::predictor::{predict, PredictorSpec, WeightVector};
use crate::trajcore::{mse_loss, Sample};

/// One master that trains on every step and one slave that predicts. The
/// slave is switched to the master's weights after each update.
#[derive(Debug, Clone)]
pub struct BAolEngine {
    spec: PredictorSpec,
    cfg: TrainerConfig,
    master: WeightVector,
    slave: WeightVector,
    recent: RecentWindow,
    optimizer: OptimizerState,
}

impl BAolEngine {
    pub fn new(spec: PredictorSpec, cfg: TrainerConfig, pretrained: WeightVector) -> Result<Self> {
        spec.validate()?;
        cfg.validate()?;
        pretrained.check_matches(&spec)?;
        Ok(BAolEngine {
            recent: RecentWindow::new(&cfg),
            optimizer: OptimizerState::new(),
            spec,
            cfg,
            slave: pretrained.clone(),
            master: pretrained,
        })
    }

    pub fn slave(&self) -> &WeightVector {
        &self.slave
    }
}

impl OnlineEngine for BAolEngine {
    fn step(&mut self, sample: &Sample) -> Result<StepReport> {
        let start = Instant::now();
        sample.validate(self.spec.t_obs, self.spec.t_pred)?;

        let pred = predict(&self.spec, &self.slave, &sample.observed)?;
        let score = mse_loss(&pred, &sample.pseudo_label)?;

        self.recent.push(sample);
        let out = train_master_with_state(
            &self.master,
            self.recent.as_slice(),
            &self.cfg,
            &self.spec,
            &mut self.optimizer,
        )?;
        self.master = out.weights;
        self.slave = self.master.clone();

        Ok(StepReport {
            sample_id: sample.sample_id,
            emitted_prediction: pred,
            selected_slave_id: 0,
            slave_ids: vec![0],
            per_slave_mse: vec![score],
            slave_count: 1,
            evicted_slave_id: None,
            train_loss_before: out.loss_before,
            train_loss_after: out.loss_after,
            train_skipped: out.skipped,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    fn master(&self) -> &WeightVector {
        &self.master
    }
}
