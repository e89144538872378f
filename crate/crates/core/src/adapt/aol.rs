use std::collections::VecDeque;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    argmin, train_master_with_state, AolConfig, OnlineEngine, OptimizerState, RecentWindow,
    SelectionMode, SlaveEntry, SlaveList, StepReport,
};
use crate::error::{AolError, Result};
use crate::predictor::{predict, PredictorSpec, WeightVector};
use crate::trajcore::{mse_loss, Sample, Trajectory};

/// Master plus a bounded list of context snapshots.
///
/// Per sample: sync `s0` to the master, let every slave predict, pick the
/// slave with the lowest MSE against the selection target, snapshot `s0`
/// when it wins, optionally copy a winning snapshot back into the master,
/// then train the master.
#[derive(Debug, Clone)]
pub struct AolEngine {
    spec: PredictorSpec,
    cfg: AolConfig,
    master: WeightVector,
    slaves: SlaveList,
    recent: RecentWindow,
    /// Causal mode: samples whose label horizon has not elapsed yet.
    pending: VecDeque<Sample>,
    /// Causal mode: newest sample whose label has arrived.
    arrived: Option<Sample>,
    rng: ChaCha8Rng,
    optimizer: OptimizerState,
}

impl AolEngine {
    pub fn new(spec: PredictorSpec, cfg: AolConfig, pretrained: WeightVector) -> Result<Self> {
        spec.validate()?;
        cfg.validate()?;
        pretrained.check_matches(&spec)?;
        Ok(AolEngine {
            recent: RecentWindow::new(&cfg.trainer),
            slaves: SlaveList::new(pretrained.clone(), cfg.max_slaves, 0)?,
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            master: pretrained,
            pending: VecDeque::new(),
            arrived: None,
            optimizer: OptimizerState::new(),
            spec,
            cfg,
        })
    }

    pub fn config(&self) -> &AolConfig {
        &self.cfg
    }

    /// Deep copy of the current slave list.
    pub fn slave_list_snapshot(&self) -> Vec<SlaveEntry> {
        self.slaves.entries().to_vec()
    }

    fn advance_causal_window(&mut self, current: u64) {
        let horizon = self.spec.t_pred as u64;
        while let Some(front) = self.pending.front() {
            if front.sample_id + horizon > current {
                break;
            }
            let s = self.pending.pop_front().expect("front exists");
            self.recent.push(&s);
            self.arrived = Some(s);
        }
    }

    fn score(&self, preds: &[Trajectory], sample: &Sample) -> Result<Vec<f64>> {
        match self.cfg.selection_mode {
            SelectionMode::Faithful => preds
                .iter()
                .map(|p| mse_loss(p, &sample.pseudo_label))
                .collect(),
            SelectionMode::Causal => match &self.arrived {
                Some(old) => self
                    .slaves
                    .entries()
                    .iter()
                    .map(|e| {
                        mse_loss(
                            &predict(&self.spec, &e.weights, &old.observed)?,
                            &old.pseudo_label,
                        )
                    })
                    .collect(),
                None => Ok(vec![0.0; preds.len()]),
            },
        }
    }
}

impl OnlineEngine for AolEngine {
    fn step(&mut self, sample: &Sample) -> Result<StepReport> {
        let start = Instant::now();
        sample.validate(self.spec.t_obs, self.spec.t_pred)?;
        let stamp = sample.sample_id;
        if self.slaves.entries().iter().any(|e| e.last_used > stamp) {
            return Err(AolError::contract(format!(
                "sample id {stamp} goes backwards in the stream"
            )));
        }
        if self.cfg.selection_mode == SelectionMode::Causal {
            self.advance_causal_window(stamp);
        }

        // (a) s0 tracks the master.
        self.slaves.sync_s0(self.master.clone());

        // (b) every slave predicts.
        let preds = self
            .slaves
            .entries()
            .iter()
            .map(|e| predict(&self.spec, &e.weights, &sample.observed))
            .collect::<Result<Vec<_>>>()?;

        // (c) lowest MSE wins; ties go to the lowest id.
        let scores = self.score(&preds, sample)?;
        let best = argmin(&scores);
        let slave_ids: Vec<u64> = self.slaves.entries().iter().map(|e| e.slave_id).collect();
        let best_id = slave_ids[best];

        // (d)
        let emitted = preds[best].clone();
        self.slaves.mark_used(best_id, stamp)?;

        // (e) s0 won: keep a copy of the current context.
        let mut evicted = None;
        if best_id == 0 {
            if let Some(out) = self
                .slaves
                .snapshot(stamp, self.cfg.replacement, &mut self.rng)
            {
                evicted = out.evicted;
            }
        }

        // (f) a stored context won: continue training from it.
        if self.cfg.copy_best_to_master && best_id != 0 {
            self.master = self.slaves.entries()[best].weights.clone();
        }

        // (g)
        match self.cfg.selection_mode {
            SelectionMode::Faithful => self.recent.push(sample),
            SelectionMode::Causal => self.pending.push_back(sample.clone()),
        }
        let out = train_master_with_state(
            &self.master,
            self.recent.as_slice(),
            &self.cfg.trainer,
            &self.spec,
            &mut self.optimizer,
        )?;
        self.master = out.weights;

        Ok(StepReport {
            sample_id: stamp,
            emitted_prediction: emitted,
            selected_slave_id: best_id,
            slave_ids,
            per_slave_mse: scores,
            slave_count: self.slaves.len(),
            evicted_slave_id: evicted,
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
