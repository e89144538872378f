//! Synthetic regime-switching pedestrian streams.
//!
//! Each sample is one pedestrian walking at a constant base speed with a
//! small random heading wander, seen through a camera whose ego motion is
//! added to every image coordinate. Regime kinds control the heading
//! distribution and whether the camera jumps abruptly.
//!
//! Every regime kind has one scene context per stream (nominal heading,
//! nominal speed, camera drift), drawn from its own random stream. Samples
//! of a kind scatter around that context, so a revisited kind brings back
//! the same dynamics.

mod presets;

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{AolError, Result};
use crate::trajcore::{Point, Sample, Trajectory};

pub use presets::{preset, rapid_switch, script_presets, PRESET_NAMES};

const FRAME_WIDTH: f64 = 1280.0;
const FRAME_HEIGHT: f64 = 960.0;
const START_MARGIN: f64 = 200.0;
/// Per-sample heading spread (radians) around the context heading.
const HEADING_SPREAD: f64 = 0.3;
/// Per-sample relative speed spread around the context speed.
const SPEED_SPREAD: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    /// Smooth camera drift, uniform heading.
    Stable,
    /// Smooth drift plus random camera jumps.
    Abrupt,
    /// Pedestrians head towards decreasing y.
    Toward,
    /// Pedestrians head towards increasing y.
    Away,
    /// Pedestrians cross horizontally.
    Cross,
    /// Each sample draws the stable or the abrupt camera model.
    Mixed,
}

impl RegimeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeKind::Stable => "stable",
            RegimeKind::Abrupt => "abrupt",
            RegimeKind::Toward => "toward",
            RegimeKind::Away => "away",
            RegimeKind::Cross => "cross",
            RegimeKind::Mixed => "mixed",
        }
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: RegimeKind,
    pub n_samples: usize,
}

impl Segment {
    pub fn new(kind: RegimeKind, n_samples: usize) -> Self {
        Segment { kind, n_samples }
    }
}

/// Declarative description of a stream: ordered segments plus noise levels.
/// Lengths are pixels, speeds pixels per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegimeScript {
    pub segments: Vec<Segment>,
    pub t_obs: usize,
    pub t_pred: usize,
    pub label_noise_sigma: f64,
    pub low_conf_prob: f64,
    pub obs_noise_sigma: f64,
    /// Per-frame heading random-walk step, radians.
    pub curvature_sigma: f64,
    /// Upper bound on the per-segment smooth camera drift speed.
    pub ego_drift_max: f64,
    pub abrupt_jump_range: (f64, f64),
    pub abrupt_jump_prob: f64,
    pub base_speed_range: (f64, f64),
    pub seed: u64,
}

impl Default for RegimeScript {
    fn default() -> Self {
        RegimeScript {
            segments: vec![Segment::new(RegimeKind::Stable, 200)],
            t_obs: 10,
            t_pred: 10,
            label_noise_sigma: 2.0,
            low_conf_prob: 0.1,
            obs_noise_sigma: 0.5,
            curvature_sigma: 0.05,
            ego_drift_max: 2.0,
            abrupt_jump_range: (20.0, 60.0),
            abrupt_jump_prob: 0.3,
            base_speed_range: (3.0, 12.0),
            seed: 0,
        }
    }
}

impl RegimeScript {
    pub fn with_segments(segments: Vec<Segment>) -> Self {
        RegimeScript {
            segments,
            ..RegimeScript::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// All noise sources and camera motion switched off.
    pub fn noise_free(mut self) -> Self {
        self.label_noise_sigma = 0.0;
        self.low_conf_prob = 0.0;
        self.obs_noise_sigma = 0.0;
        self.curvature_sigma = 0.0;
        self.ego_drift_max = 0.0;
        self.abrupt_jump_prob = 0.0;
        self
    }

    pub fn total_samples(&self) -> usize {
        self.segments.iter().map(|s| s.n_samples).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(AolError::config("script has no segments"));
        }
        if self.segments.iter().any(|s| s.n_samples == 0) {
            return Err(AolError::config("every segment needs n_samples >= 1"));
        }
        if self.t_obs < 2 || self.t_pred < 1 {
            return Err(AolError::config("script needs t_obs >= 2 and t_pred >= 1"));
        }
        let sigmas = [
            self.label_noise_sigma,
            self.obs_noise_sigma,
            self.curvature_sigma,
            self.ego_drift_max,
        ];
        if sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(AolError::config("noise levels must be finite and >= 0"));
        }
        for (name, p) in [
            ("low_conf_prob", self.low_conf_prob),
            ("abrupt_jump_prob", self.abrupt_jump_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(AolError::config(format!("{name} must be in [0, 1]")));
            }
        }
        for (name, (lo, hi)) in [
            ("abrupt_jump_range", self.abrupt_jump_range),
            ("base_speed_range", self.base_speed_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
                return Err(AolError::config(format!("{name} must be ordered and >= 0")));
            }
        }
        Ok(())
    }
}

/// Camera state for one frame of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneFrame {
    pub frame_id: u64,
    /// Cumulative camera displacement added to the image coordinates.
    pub ego_offset: Point,
}

/// Generator internals for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTrace {
    pub frames: Vec<SceneFrame>,
    pub speed: f64,
    pub camera_drift: Point,
    pub jumps: Vec<Point>,
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn gauss(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sigma * z
}

/// Scene context shared by all samples of one regime kind in a stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeContext {
    pub heading: f64,
    pub speed: f64,
    pub camera_drift: Point,
}

impl RegimeKind {
    const ALL: [RegimeKind; 6] = [
        RegimeKind::Stable,
        RegimeKind::Abrupt,
        RegimeKind::Toward,
        RegimeKind::Away,
        RegimeKind::Cross,
        RegimeKind::Mixed,
    ];

    fn index(self) -> u64 {
        RegimeKind::ALL.iter().position(|k| *k == self).unwrap() as u64
    }
}

/// The context of `kind` for a stream with `script.seed`. Independent of the
/// segment layout.
pub fn regime_context(script: &RegimeScript, kind: RegimeKind) -> RegimeContext {
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    rng.set_stream(1 + kind.index());
    let uniform_heading = 2.0 * PI * rng.random::<f64>();
    let coin = rng.random::<f64>();
    let heading = match kind {
        RegimeKind::Stable | RegimeKind::Abrupt | RegimeKind::Mixed => uniform_heading,
        RegimeKind::Toward => -PI / 2.0,
        RegimeKind::Away => PI / 2.0,
        RegimeKind::Cross if coin < 0.5 => 0.0,
        RegimeKind::Cross => PI,
    };
    let speed = uniform(&mut rng, script.base_speed_range);
    let drift_r = script.ego_drift_max * rng.random::<f64>().sqrt();
    let drift_a = 2.0 * PI * rng.random::<f64>();
    RegimeContext {
        heading,
        speed,
        camera_drift: Point::new(drift_r * drift_a.cos(), drift_r * drift_a.sin()),
    }
}

/// Generates the stream together with its per-sample camera internals.
pub fn generate_stream_traced(script: &RegimeScript) -> Result<Vec<(Sample, SampleTrace)>> {
    script.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    let frames_per_sample = script.t_obs + script.t_pred;
    let mut out = Vec::with_capacity(script.total_samples());
    let mut sample_id = 0u64;
    let (speed_lo, speed_hi) = script.base_speed_range;

    for segment in &script.segments {
        let ctx = regime_context(script, segment.kind);
        let drift = ctx.camera_drift;

        for _ in 0..segment.n_samples {
            let jumpy = match segment.kind {
                RegimeKind::Abrupt => true,
                RegimeKind::Mixed => rng.random::<f64>() < 0.5,
                _ => false,
            };
            let speed = (ctx.speed * (1.0 + uniform(&mut rng, (-SPEED_SPREAD, SPEED_SPREAD))))
                .clamp(speed_lo, speed_hi);
            let mut heading = ctx.heading + uniform(&mut rng, (-HEADING_SPREAD, HEADING_SPREAD));
            let mut world = Point::new(
                uniform(&mut rng, (START_MARGIN, FRAME_WIDTH - START_MARGIN)),
                uniform(&mut rng, (START_MARGIN, FRAME_HEIGHT - START_MARGIN)),
            );
            let mut ego = Point::default();

            let mut frames = Vec::with_capacity(frames_per_sample);
            let mut jumps = Vec::new();
            let mut image = Vec::with_capacity(frames_per_sample);
            for t in 0..frames_per_sample {
                image.push(Point::new(world.x + ego.x, world.y + ego.y));
                frames.push(SceneFrame {
                    frame_id: sample_id * frames_per_sample as u64 + t as u64,
                    ego_offset: ego,
                });

                world.x += speed * heading.cos();
                world.y += speed * heading.sin();
                heading += gauss(&mut rng, script.curvature_sigma);

                ego.x += drift.x;
                ego.y += drift.y;
                let fire = rng.random::<f64>();
                let magnitude = uniform(&mut rng, script.abrupt_jump_range);
                let angle = 2.0 * PI * rng.random::<f64>();
                if jumpy && fire < script.abrupt_jump_prob {
                    let jump = Point::new(magnitude * angle.cos(), magnitude * angle.sin());
                    ego.x += jump.x;
                    ego.y += jump.y;
                    jumps.push(jump);
                }
            }

            let observed: Vec<Point> = image[..script.t_obs]
                .iter()
                .map(|p| {
                    let nx = gauss(&mut rng, script.obs_noise_sigma);
                    let ny = gauss(&mut rng, script.obs_noise_sigma);
                    Point::new(p.x + nx, p.y + ny)
                })
                .collect();
            let future = image[script.t_obs..].to_vec();
            let label: Vec<Point> = future
                .iter()
                .map(|p| {
                    let nx = gauss(&mut rng, script.label_noise_sigma);
                    let ny = gauss(&mut rng, script.label_noise_sigma);
                    Point::new(p.x + nx, p.y + ny)
                })
                .collect();
            let confidence = if rng.random::<f64>() < script.low_conf_prob {
                0.0
            } else {
                1.0
            };

            out.push((
                Sample {
                    sample_id,
                    pedestrian_id: sample_id,
                    observed: Trajectory::new(observed)?,
                    future_truth: Trajectory::new(future)?,
                    pseudo_label: Trajectory::new(label)?,
                    confidence,
                    regime_tag: segment.kind.to_string(),
                },
                SampleTrace {
                    frames,
                    speed,
                    camera_drift: drift,
                    jumps,
                },
            ));
            sample_id += 1;
        }
    }
    Ok(out)
}

/// Deterministic stream for `script` (seed included).
pub fn generate_stream(script: &RegimeScript) -> Result<Vec<Sample>> {
    Ok(generate_stream_traced(script)?
        .into_iter()
        .map(|(s, _)| s)
        .collect())
}
