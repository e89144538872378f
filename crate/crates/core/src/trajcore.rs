//! Trajectories, stream samples and the displacement metrics.
//!
//! Coordinates are pixels in image space. [`ade`] and [`fde`] report mean and
//! final Euclidean displacement; [`mse_loss`] is the squared-distance objective
//! used for training and slave selection.

use serde::{Deserialize, Serialize};

use crate::error::{AolError, Result};

/// A 2D image position in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Ordered, non-empty sequence of finite points. Immutable once built.
///
/// Serialized as a JSON array of `[x, y]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Trajectory {
    points: Vec<Point>,
}

impl Trajectory {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(AolError::contract(
                "trajectory must have at least one point",
            ));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(AolError::contract(format!(
                "trajectory point {i} is not finite"
            )));
        }
        Ok(Trajectory { points })
    }

    pub fn from_xy(xy: &[(f64, f64)]) -> Result<Self> {
        Self::new(xy.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for the `len`/`is_empty` pairing.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Point {
        self.points[self.points.len() - 1]
    }

    /// Copy with every point shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Trajectory {
        Trajectory {
            points: self
                .points
                .iter()
                .map(|p| Point::new(p.x + dx, p.y + dy))
                .collect(),
        }
    }
}

impl TryFrom<Vec<[f64; 2]>> for Trajectory {
    type Error = AolError;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Trajectory::new(v.into_iter().map(Point::from).collect())
    }
}

impl From<Trajectory> for Vec<[f64; 2]> {
    fn from(t: Trajectory) -> Self {
        t.points.into_iter().map(Into::into).collect()
    }
}

/// One pedestrian observation at a stream timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub sample_id: u64,
    pub pedestrian_id: u64,
    pub observed: Trajectory,
    pub future_truth: Trajectory,
    /// Tracker-style label for the future window; the only target the
    /// online engines ever train or select on.
    pub pseudo_label: Trajectory,
    pub confidence: f64,
    pub regime_tag: String,
}

impl Sample {
    pub fn t_obs(&self) -> usize {
        self.observed.len()
    }

    pub fn t_pred(&self) -> usize {
        self.future_truth.len()
    }

    pub fn validate(&self, t_obs: usize, t_pred: usize) -> Result<()> {
        if self.observed.len() != t_obs {
            return Err(AolError::contract(format!(
                "sample {}: observed length {} != t_obs {t_obs}",
                self.sample_id,
                self.observed.len()
            )));
        }
        if self.future_truth.len() != t_pred || self.pseudo_label.len() != t_pred {
            return Err(AolError::contract(format!(
                "sample {}: future/pseudo-label lengths {}/{} != t_pred {t_pred}",
                self.sample_id,
                self.future_truth.len(),
                self.pseudo_label.len()
            )));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(AolError::contract(format!(
                "sample {}: confidence {} outside [0, 1]",
                self.sample_id, self.confidence
            )));
        }
        Ok(())
    }
}

/// A displacement error in pixels; non-negative and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct DisplacementError(f64);

impl DisplacementError {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<DisplacementError> for f64 {
    fn from(e: DisplacementError) -> f64 {
        e.0
    }
}

fn check_pair(pred: &Trajectory, truth: &Trajectory) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(AolError::contract(format!(
            "trajectory length mismatch: {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    Ok(())
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(AolError::contract(
            "metric overflowed to a non-finite value",
        ))
    }
}

/// Average displacement error: mean per-point Euclidean distance.
pub fn ade(pred: &Trajectory, truth: &Trajectory) -> Result<DisplacementError> {
    check_pair(pred, truth)?;
    let sum: f64 = pred
        .points()
        .iter()
        .zip(truth.points())
        .map(|(p, t)| p.dist(t))
        .sum();
    finite(sum / pred.len() as f64).map(DisplacementError)
}

/// Final displacement error: Euclidean distance between the last points.
pub fn fde(pred: &Trajectory, truth: &Trajectory) -> Result<DisplacementError> {
    check_pair(pred, truth)?;
    finite(pred.last().dist(&truth.last())).map(DisplacementError)
}

/// Mean squared per-point distance.
pub fn mse_loss(pred: &Trajectory, target: &Trajectory) -> Result<f64> {
    check_pair(pred, target)?;
    let sum: f64 = pred
        .points()
        .iter()
        .zip(target.points())
        .map(|(p, t)| p.dist_sq(t))
        .sum();
    finite(sum / pred.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(xy: &[(f64, f64)]) -> Trajectory {
        Trajectory::from_xy(xy).unwrap()
    }

    #[test]
    fn identical_trajectories_have_zero_error() {
        let t = traj(&[(1.0, 2.0), (3.0, 5.0), (8.0, 13.0)]);
        assert_eq!(ade(&t, &t).unwrap().value(), 0.0);
        assert_eq!(fde(&t, &t).unwrap().value(), 0.0);
        assert_eq!(mse_loss(&t, &t).unwrap(), 0.0);
    }

    #[test]
    fn three_four_five_offset() {
        let truth = traj(&[(0.0, 0.0), (10.0, -2.0), (7.5, 1.0)]);
        let pred = truth.translated(3.0, 4.0);
        assert_eq!(ade(&pred, &truth).unwrap().value(), 5.0);
        assert_eq!(mse_loss(&pred, &truth).unwrap(), 25.0);
    }

    #[test]
    fn worked_two_point_example() {
        let pred = traj(&[(0.0, 0.0), (2.0, 0.0)]);
        let truth = traj(&[(1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(ade(&pred, &truth).unwrap().value(), 1.5);
        assert_eq!(mse_loss(&pred, &truth).unwrap(), 2.5);
    }

    #[test]
    fn fde_uses_final_point_only() {
        let pred = traj(&[(100.0, 100.0), (10.0, 0.0)]);
        let truth = traj(&[(0.0, 0.0), (10.0, 5.0)]);
        assert_eq!(fde(&pred, &truth).unwrap().value(), 5.0);

        let pred = traj(&[(2.0, 3.0)]);
        let truth = traj(&[(5.0, 7.0)]);
        assert_eq!(fde(&pred, &truth).unwrap().value(), 5.0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let a = traj(&[(0.0, 0.0), (1.0, 1.0)]);
        let b = traj(&[(0.0, 0.0)]);
        assert!(matches!(ade(&a, &b), Err(AolError::Contract(_))));
        assert!(matches!(fde(&a, &b), Err(AolError::Contract(_))));
        assert!(matches!(mse_loss(&a, &b), Err(AolError::Contract(_))));
    }

    #[test]
    fn non_finite_and_empty_trajectories_are_rejected() {
        assert!(Trajectory::from_xy(&[(0.0, f64::NAN)]).is_err());
        assert!(Trajectory::from_xy(&[(f64::INFINITY, 0.0)]).is_err());
        assert!(Trajectory::new(vec![]).is_err());
    }

    #[test]
    fn overflowing_metric_is_an_error() {
        let a = traj(&[(-1e308, 0.0)]);
        let b = traj(&[(1e308, 0.0)]);
        assert!(ade(&a, &b).is_err());
    }

    #[test]
    fn json_shape_is_point_pairs() {
        let t = traj(&[(1.0, 2.0), (3.5, -4.0)]);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.5,-4.0]]");
        let back: Trajectory = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<Trajectory>("[]").is_err());
    }
}
