#![allow(dead_code)]

use aol_core::predictor::{init_weights, loss_and_gradient, PredictorSpec, WeightVector};
use aol_core::{Point, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random walk-ish trajectory in pixels.
pub fn random_trajectory(rng: &mut ChaCha8Rng, len: usize) -> Trajectory {
    let mut p = Point::new(rng.random_range(0.0..1280.0), rng.random_range(0.0..960.0));
    let v = (rng.random_range(-12.0..12.0), rng.random_range(-12.0..12.0));
    let pts = (0..len)
        .map(|_| {
            p = Point::new(
                p.x + v.0 + rng.random_range(-3.0..3.0),
                p.y + v.1 + rng.random_range(-3.0..3.0),
            );
            p
        })
        .collect();
    Trajectory::new(pts).unwrap()
}

pub fn random_batch(
    rng: &mut ChaCha8Rng,
    spec: &PredictorSpec,
    size: usize,
) -> Vec<(Trajectory, Trajectory)> {
    (0..size)
        .map(|_| {
            let obs = random_trajectory(rng, spec.t_obs);
            let last = obs.last();
            let target = random_trajectory(rng, spec.t_pred);
            let first = target.points()[0];
            (obs, target.translated(last.x - first.x, last.y - first.y))
        })
        .collect()
}

/// Central finite differences of the batch loss, one coordinate at a time.
pub fn finite_difference_gradient(
    spec: &PredictorSpec,
    w: &WeightVector,
    batch: &[(&Trajectory, &Trajectory)],
    step: f64,
) -> Vec<f64> {
    let loss_at = |values: Vec<f64>| {
        let w = WeightVector::new(spec, values).unwrap();
        loss_and_gradient(spec, &w, batch).unwrap().0
    };
    (0..w.len())
        .map(|i| {
            let mut plus = w.values().to_vec();
            let mut minus = w.values().to_vec();
            plus[i] += step;
            minus[i] -= step;
            (loss_at(plus) - loss_at(minus)) / (2.0 * step)
        })
        .collect()
}

pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-8))
        .fold(0.0, f64::max)
}

/// Worst analytic-vs-numeric relative error over `instances` random cases.
pub fn gradient_check(spec: &PredictorSpec, instances: u64, seed: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(i));
        let w = init_weights(spec, seed + i).unwrap();
        // Scale weights up so tanh leaves its linear regime.
        let w = WeightVector::new(spec, w.values().iter().map(|v| v * 5.0).collect()).unwrap();
        let size = rng.random_range(1..=3);
        let owned = random_batch(&mut rng, spec, size);
        let batch: Vec<_> = owned.iter().map(|(o, t)| (o, t)).collect();
        let (_, grad) = loss_and_gradient(spec, &w, &batch).unwrap();
        let fd = finite_difference_gradient(spec, &w, &batch, 1e-5);
        worst = worst.max(max_relative_error(grad.values(), &fd));
    }
    worst
}

/// Per-point loop versions of the displacement metrics.
pub fn oracle_ade(pred: &Trajectory, truth: &Trajectory) -> f64 {
    let (p, t) = (pred.points(), truth.points());
    let mut sum = 0.0;
    for i in 0..p.len() {
        let dx = p[i].x - t[i].x;
        let dy = p[i].y - t[i].y;
        sum += (dx * dx + dy * dy).sqrt();
    }
    sum / p.len() as f64
}

pub fn oracle_fde(pred: &Trajectory, truth: &Trajectory) -> f64 {
    let (p, t) = (pred.points(), truth.points());
    let i = p.len() - 1;
    ((p[i].x - t[i].x).powi(2) + (p[i].y - t[i].y).powi(2)).sqrt()
}

pub fn oracle_mse(pred: &Trajectory, truth: &Trajectory) -> f64 {
    let (p, t) = (pred.points(), truth.points());
    let mut sum = 0.0;
    for i in 0..p.len() {
        sum += (p[i].x - t[i].x).powi(2) + (p[i].y - t[i].y).powi(2);
    }
    sum / p.len() as f64
}

/// Brute-force LRU list: s0 first, then snapshots in insertion order.
pub struct LruOracle {
    /// `(slave_id, last_used)`
    pub entries: Vec<(u64, u64)>,
    pub capacity: usize,
    next_id: u64,
}

impl LruOracle {
    pub fn new(capacity: usize) -> Self {
        LruOracle {
            entries: vec![(0, 0)],
            capacity,
            next_id: 1,
        }
    }

    pub fn select(&mut self, id: u64, stamp: u64) {
        for e in self.entries.iter_mut() {
            if e.0 == id {
                e.1 = stamp;
            }
        }
    }

    /// Returns `(inserted, evicted)`, or `None` when no snapshot fits.
    pub fn snapshot(&mut self, stamp: u64) -> Option<(u64, Option<u64>)> {
        if self.capacity == 1 {
            return None;
        }
        let mut evicted = None;
        if self.entries.len() == self.capacity {
            let mut victim = 1;
            for i in 1..self.entries.len() {
                let (id, used) = self.entries[i];
                let (best_id, best_used) = self.entries[victim];
                if used < best_used || (used == best_used && id < best_id) {
                    victim = i;
                }
            }
            evicted = Some(self.entries.remove(victim).0);
        }
        let id = self.next_id;
        self.next_id += 1;
        self.entries.push((id, stamp));
        Some((id, evicted))
    }
}

/// Replays `events` random select/snapshot events against a `SlaveList` and
/// the oracle. Returns the number of disagreements.
pub fn lru_mismatches(capacity: usize, events: usize, seed: u64) -> usize {
    use aol_core::adapt::{Replacement, SlaveList};
    use aol_core::predictor::Arch;

    let spec = PredictorSpec::new(Arch::ConstantVelocity);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut list = SlaveList::new(WeightVector::zeros(&spec).unwrap(), capacity, 0).unwrap();
    let mut oracle = LruOracle::new(capacity);
    let mut mismatches = 0;
    for i in 0..events as u64 {
        // Stamps repeat so ties on last_used occur.
        let stamp = 1 + i / 3;
        if rng.random_bool(0.5) {
            let ids: Vec<u64> = list.entries().iter().map(|e| e.slave_id).collect();
            let id = ids[rng.random_range(0..ids.len())];
            list.mark_used(id, stamp).unwrap();
            oracle.select(id, stamp);
        } else {
            let got = list
                .snapshot(stamp, Replacement::Lru, &mut rng)
                .map(|o| (o.inserted, o.evicted));
            if got != oracle.snapshot(stamp) {
                mismatches += 1;
            }
        }
        let got: Vec<(u64, u64)> = list
            .entries()
            .iter()
            .map(|e| (e.slave_id, e.last_used))
            .collect();
        let mut want = oracle.entries.clone();
        want.sort();
        if got != want {
            mismatches += 1;
        }
    }
    mismatches
}
