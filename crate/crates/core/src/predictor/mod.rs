//! Pluggable trajectory predictors.
//!
//! Every architecture consumes the observed displacement sequence
//! `d_t = x_{t+1} - x_t` (multiplied by `coord_scale`) and emits `t_pred`
//! displacements that are accumulated from the last observed point. Working
//! in displacement space makes all predictors translation equivariant.
//!
//! The [`Predictor`] trait is the contract an architecture implements: a
//! forward pass that records a tape, and a backward pass that turns output
//! gradients into parameter gradients. The free functions in this module
//! dispatch on a [`PredictorSpec`].

mod constant_velocity;
mod linear;
mod recurrent;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AolError, Result};
use crate::trajcore::{Point, Trajectory};

pub use constant_velocity::ConstantVelocity;
pub use linear::Linear;
pub use recurrent::Recurrent;

/// A displacement in scaled units.
pub type Disp = [f64; 2];

pub const DEFAULT_HIDDEN_SIZE: usize = 32;
pub const DEFAULT_COORD_SCALE: f64 = 1e-3;
const INIT_RANGE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arch {
    ConstantVelocity,
    Linear,
    Recurrent,
}

impl Arch {
    pub fn as_str(self) -> &'static str {
        match self {
            Arch::ConstantVelocity => "constant_velocity",
            Arch::Linear => "linear",
            Arch::Recurrent => "recurrent",
        }
    }
}

impl fmt::Display for Arch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Arch {
    type Err = AolError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant_velocity" => Ok(Arch::ConstantVelocity),
            "linear" => Ok(Arch::Linear),
            "recurrent" => Ok(Arch::Recurrent),
            other => Err(AolError::UnknownArch(other.to_string())),
        }
    }
}

fn default_hidden() -> usize {
    DEFAULT_HIDDEN_SIZE
}

fn default_scale() -> f64 {
    DEFAULT_COORD_SCALE
}

fn default_horizon() -> usize {
    10
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorSpec {
    #[serde(rename = "arch_id")]
    pub arch: Arch,
    #[serde(default = "default_horizon")]
    pub t_obs: usize,
    #[serde(default = "default_horizon")]
    pub t_pred: usize,
    /// Only meaningful for [`Arch::Recurrent`].
    #[serde(default = "default_hidden")]
    pub hidden_size: usize,
    /// Pixels to model units.
    #[serde(default = "default_scale")]
    pub coord_scale: f64,
}

impl PredictorSpec {
    pub fn new(arch: Arch) -> Self {
        PredictorSpec {
            arch,
            t_obs: 10,
            t_pred: 10,
            hidden_size: DEFAULT_HIDDEN_SIZE,
            coord_scale: DEFAULT_COORD_SCALE,
        }
    }

    pub fn with_horizons(mut self, t_obs: usize, t_pred: usize) -> Self {
        self.t_obs = t_obs;
        self.t_pred = t_pred;
        self
    }

    pub fn with_hidden_size(mut self, hidden_size: usize) -> Self {
        self.hidden_size = hidden_size;
        self
    }

    pub fn with_coord_scale(mut self, coord_scale: f64) -> Self {
        self.coord_scale = coord_scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_obs < 2 {
            return Err(AolError::config(format!(
                "t_obs must be >= 2, got {}",
                self.t_obs
            )));
        }
        if self.t_pred < 1 {
            return Err(AolError::config("t_pred must be >= 1"));
        }
        if self.hidden_size < 1 {
            return Err(AolError::config("hidden_size must be >= 1"));
        }
        if !(self.coord_scale.is_finite() && self.coord_scale > 0.0) {
            return Err(AolError::config(format!(
                "coord_scale must be finite and > 0, got {}",
                self.coord_scale
            )));
        }
        Ok(())
    }
}

/// Flat parameter vector tagged with the architecture it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    arch: Arch,
    values: Vec<f64>,
}

impl WeightVector {
    pub fn new(spec: &PredictorSpec, values: Vec<f64>) -> Result<Self> {
        let expected = param_count(spec)?;
        if values.len() != expected {
            return Err(AolError::contract(format!(
                "{} expects {expected} parameters, got {}",
                spec.arch,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AolError::contract(
                "weight vector contains non-finite values",
            ));
        }
        Ok(WeightVector {
            arch: spec.arch,
            values,
        })
    }

    pub fn zeros(spec: &PredictorSpec) -> Result<Self> {
        Self::new(spec, vec![0.0; param_count(spec)?])
    }

    pub fn arch(&self) -> Arch {
        self.arch
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn check_matches(&self, spec: &PredictorSpec) -> Result<()> {
        if self.arch != spec.arch {
            return Err(AolError::contract(format!(
                "weights are for {}, predictor is {}",
                self.arch, spec.arch
            )));
        }
        let expected = param_count(spec)?;
        if self.values.len() != expected {
            return Err(AolError::contract(format!(
                "{} expects {expected} parameters, weights have {}",
                spec.arch,
                self.values.len()
            )));
        }
        Ok(())
    }
}

/// A trainable (or parameterless) displacement-sequence model.
pub trait Predictor {
    /// Intermediate values the backward pass needs.
    type Tape;

    fn param_count(&self) -> usize;

    /// Maps observed displacements to `t_pred` predicted displacements.
    fn forward(&self, w: &[f64], observed: &[Disp]) -> (Vec<Disp>, Self::Tape);

    /// Accumulates d(loss)/d(w) into `grad_w` given d(loss)/d(output).
    fn backward(&self, w: &[f64], tape: &Self::Tape, grad_out: &[Disp], grad_w: &mut [f64]);
}

fn scaled_displacements(observed: &Trajectory, scale: f64) -> Vec<Disp> {
    observed
        .points()
        .windows(2)
        .map(|p| [(p[1].x - p[0].x) * scale, (p[1].y - p[0].y) * scale])
        .collect()
}

fn accumulate(last: Point, disp: &[Disp], scale: f64) -> Result<Trajectory> {
    let mut cum = [0.0, 0.0];
    let points = disp
        .iter()
        .map(|d| {
            cum[0] += d[0];
            cum[1] += d[1];
            Point::new(last.x + cum[0] / scale, last.y + cum[1] / scale)
        })
        .collect();
    Trajectory::new(points)
}

fn check_observed(spec: &PredictorSpec, observed: &Trajectory) -> Result<()> {
    if observed.len() != spec.t_obs {
        return Err(AolError::contract(format!(
            "observed length {} != t_obs {}",
            observed.len(),
            spec.t_obs
        )));
    }
    Ok(())
}

pub fn predict_with<P: Predictor>(
    net: &P,
    spec: &PredictorSpec,
    w: &WeightVector,
    observed: &Trajectory,
) -> Result<Trajectory> {
    check_observed(spec, observed)?;
    w.check_matches(spec)?;
    let disp = scaled_displacements(observed, spec.coord_scale);
    let (out, _) = net.forward(w.values(), &disp);
    accumulate(observed.last(), &out, spec.coord_scale)
}

pub fn loss_and_gradient_with<P: Predictor>(
    net: &P,
    spec: &PredictorSpec,
    w: &WeightVector,
    batch: &[(&Trajectory, &Trajectory)],
) -> Result<(f64, WeightVector)> {
    if batch.is_empty() {
        return Err(AolError::EmptyBatch);
    }
    w.check_matches(spec)?;
    let scale = spec.coord_scale;
    let norm = 1.0 / (batch.len() * spec.t_pred) as f64;
    let mut grad = vec![0.0; w.len()];
    let mut loss = 0.0;
    let mut grad_out = vec![[0.0; 2]; spec.t_pred];
    for (observed, target) in batch {
        check_observed(spec, observed)?;
        if target.len() != spec.t_pred {
            return Err(AolError::contract(format!(
                "target length {} != t_pred {}",
                target.len(),
                spec.t_pred
            )));
        }
        let disp = scaled_displacements(observed, scale);
        let (out, tape) = net.forward(w.values(), &disp);
        let last = observed.last();

        // Residuals of the accumulated positions, relative to the last
        // observed point, in scaled units.
        let mut cum = [0.0, 0.0];
        let mut resid = Vec::with_capacity(spec.t_pred);
        for (d, y) in out.iter().zip(target.points()) {
            cum[0] += d[0];
            cum[1] += d[1];
            let r = [
                cum[0] - (y.x - last.x) * scale,
                cum[1] - (y.y - last.y) * scale,
            ];
            loss += (r[0] * r[0] + r[1] * r[1]) * norm;
            resid.push(r);
        }
        // Each output displacement feeds every later position.
        let mut suffix = [0.0, 0.0];
        for t in (0..spec.t_pred).rev() {
            suffix[0] += 2.0 * norm * resid[t][0];
            suffix[1] += 2.0 * norm * resid[t][1];
            grad_out[t] = suffix;
        }
        net.backward(w.values(), &tape, &grad_out, &mut grad);
    }
    Ok((
        loss,
        WeightVector {
            arch: w.arch,
            values: grad,
        },
    ))
}

macro_rules! dispatch {
    ($spec:expr, $net:ident => $body:expr) => {{
        let spec: &PredictorSpec = $spec;
        spec.validate()?;
        match spec.arch {
            Arch::ConstantVelocity => {
                let $net = ConstantVelocity::new(spec.t_pred);
                $body
            }
            Arch::Linear => {
                let $net = Linear::new(spec.t_obs, spec.t_pred);
                $body
            }
            Arch::Recurrent => {
                let $net = Recurrent::new(spec.hidden_size, spec.t_pred);
                $body
            }
        }
    }};
}

pub fn param_count(spec: &PredictorSpec) -> Result<usize> {
    dispatch!(spec, net => Ok(net.param_count()))
}

/// Deterministic i.i.d. uniform initialisation in `[-0.1, 0.1]`.
pub fn init_weights(spec: &PredictorSpec, seed: u64) -> Result<WeightVector> {
    let n = param_count(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n)
        .map(|_| rng.random_range(-INIT_RANGE..=INIT_RANGE))
        .collect();
    WeightVector::new(spec, values)
}

pub fn predict(
    spec: &PredictorSpec,
    w: &WeightVector,
    observed: &Trajectory,
) -> Result<Trajectory> {
    dispatch!(spec, net => predict_with(&net, spec, w, observed))
}

/// Mean over the batch of the scaled-unit squared-distance loss, and its
/// exact gradient with respect to `w`.
pub fn loss_and_gradient(
    spec: &PredictorSpec,
    w: &WeightVector,
    batch: &[(&Trajectory, &Trajectory)],
) -> Result<(f64, WeightVector)> {
    dispatch!(spec, net => loss_and_gradient_with(&net, spec, w, batch))
}

/// Loss only; skips the backward pass.
pub fn batch_loss(
    spec: &PredictorSpec,
    w: &WeightVector,
    batch: &[(&Trajectory, &Trajectory)],
) -> Result<f64> {
    if batch.is_empty() {
        return Err(AolError::EmptyBatch);
    }
    let scale2 = spec.coord_scale * spec.coord_scale;
    let mut total = 0.0;
    for (observed, target) in batch {
        let pred = predict(spec, w, observed)?;
        total += crate::trajcore::mse_loss(&pred, target)? * scale2;
    }
    Ok(total / batch.len() as f64)
}
