//! Adaptive online learning for streaming pedestrian trajectory prediction.
//!
//! - [`trajcore`]: trajectories, samples, ADE/FDE and the MSE loss.
//! - [`predictor`]: the predictor contract and three small architectures.
//! - [`adapt`]: the online trainer and the frozen, B-AOL and AOL engines.
//! - [`scenegen`]: synthetic regime-switching streams.
//! - [`harness`]: pretraining, experiments, sweeps and file formats.

pub mod adapt;
pub mod error;
pub mod harness;
pub mod predictor;
pub mod scenegen;
pub mod trajcore;

pub use adapt::{
    AolConfig, AolEngine, BAolEngine, FrozenEngine, OnlineEngine, Replacement, SelectionMode,
    SlaveEntry, SlaveList, StepReport, TrainerConfig,
};
pub use error::{AolError, Result};
pub use harness::{ExperimentConfig, Framework, ResultRow, ScriptRef, Summary, SweepAxis};
pub use predictor::{Arch, PredictorSpec, WeightVector};
pub use scenegen::{RegimeKind, RegimeScript, Segment};
pub use trajcore::{ade, fde, mse_loss, DisplacementError, Point, Sample, Trajectory};
