use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adapt::AolConfig;
use crate::error::{AolError, Result};
use crate::predictor::PredictorSpec;
use crate::scenegen::{preset, RegimeScript};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Framework {
    /// Pretrained weights, never updated.
    None,
    Baol,
    Aol,
}

impl Framework {
    pub fn as_str(self) -> &'static str {
        match self {
            Framework::None => "none",
            Framework::Baol => "baol",
            Framework::Aol => "aol",
        }
    }
}

/// Either a preset name or an inline script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScriptRef {
    Preset(String),
    Inline(RegimeScript),
}

impl ScriptRef {
    pub fn preset(name: &str) -> Self {
        ScriptRef::Preset(name.to_string())
    }

    pub fn resolve(&self) -> Result<RegimeScript> {
        match self {
            ScriptRef::Preset(name) => preset(name),
            ScriptRef::Inline(script) => Ok(script.clone()),
        }
    }
}

fn default_pretrain_epochs() -> usize {
    100
}

fn default_pretrain_script() -> ScriptRef {
    ScriptRef::preset("stationary")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PretrainConfig {
    #[serde(default = "default_pretrain_epochs")]
    pub epochs: usize,
    #[serde(default = "default_pretrain_script")]
    pub script: ScriptRef,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the online trainer's learning rate.
    #[serde(default)]
    pub lr: Option<f64>,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        PretrainConfig {
            epochs: default_pretrain_epochs(),
            script: default_pretrain_script(),
            seed: 0,
            lr: None,
        }
    }
}

fn default_id() -> String {
    "experiment".to_string()
}

fn default_repeats() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_id")]
    pub id: String,
    pub framework: Framework,
    pub predictor: PredictorSpec,
    #[serde(default)]
    pub aol: AolConfig,
    pub script: ScriptRef,
    #[serde(default)]
    pub pretrain: PretrainConfig,
    /// Where `results.csv` and `summary.json` go; nothing is written if unset.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Base seed; repeat `r` runs with seed `seed + r`.
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(framework: Framework, predictor: PredictorSpec, script: ScriptRef) -> Self {
        ExperimentConfig {
            id: default_id(),
            framework,
            predictor,
            aol: AolConfig::default(),
            script,
            pretrain: PretrainConfig::default(),
            output_dir: None,
            repeats: default_repeats(),
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| AolError::config(format!("config json: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AolError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats < 1 {
            return Err(AolError::config("repeats must be >= 1"));
        }
        self.predictor.validate()?;
        self.aol.validate()?;
        if let Some(lr) = self.pretrain.lr {
            if !(lr.is_finite() && lr > 0.0) {
                return Err(AolError::config("pretrain.lr must be > 0"));
            }
        }
        for (what, script) in [
            ("script", &self.script),
            ("pretrain.script", &self.pretrain.script),
        ] {
            let s = script.resolve()?;
            s.validate()?;
            if (s.t_obs, s.t_pred) != (self.predictor.t_obs, self.predictor.t_pred) {
                return Err(AolError::config(format!(
                    "{what} horizons ({}, {}) differ from the predictor's ({}, {})",
                    s.t_obs, s.t_pred, self.predictor.t_obs, self.predictor.t_pred
                )));
            }
        }
        Ok(())
    }

    pub fn run_seed(&self, repeat: usize) -> u64 {
        self.seed.wrapping_add(repeat as u64)
    }
}
