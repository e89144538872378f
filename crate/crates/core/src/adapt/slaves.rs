//! The bounded slave list and its replacement policies.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AolError, Result};
use crate::predictor::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Replacement {
    /// Evict the snapshot least recently selected as best.
    #[default]
    Lru,
    Random,
    /// Evict the oldest snapshot.
    Fifo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlaveEntry {
    /// 0 is the master-synced slave; snapshots get fresh increasing ids.
    pub slave_id: u64,
    pub weights: WeightVector,
    /// Stamp of the last selection as best (creation stamp until then).
    pub last_used: u64,
    pub created_at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnapshotOutcome {
    pub inserted: u64,
    pub evicted: Option<u64>,
}

/// `s0` followed by up to `capacity - 1` snapshots, ordered by id.
///
/// `s0` is never evicted. LRU victims come from an ordered
/// `(last_used, slave_id)` index so eviction is `O(log n)`.
#[derive(Debug, Clone)]
pub struct SlaveList {
    entries: Vec<SlaveEntry>,
    capacity: usize,
    next_id: u64,
    recency: BTreeSet<(u64, u64)>,
}

impl SlaveList {
    pub fn new(s0: WeightVector, capacity: usize, stamp: u64) -> Result<Self> {
        if capacity < 1 {
            return Err(AolError::config("slave list capacity must be >= 1"));
        }
        Ok(SlaveList {
            entries: vec![SlaveEntry {
                slave_id: 0,
                weights: s0,
                last_used: stamp,
                created_at: stamp,
            }],
            capacity,
            next_id: 1,
            recency: BTreeSet::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn entries(&self) -> &[SlaveEntry] {
        &self.entries
    }

    pub fn get(&self, slave_id: u64) -> Option<&SlaveEntry> {
        self.position(slave_id).map(|i| &self.entries[i])
    }

    fn position(&self, slave_id: u64) -> Option<usize> {
        self.entries
            .binary_search_by_key(&slave_id, |e| e.slave_id)
            .ok()
    }

    pub fn sync_s0(&mut self, weights: WeightVector) {
        self.entries[0].weights = weights;
    }

    /// Records a selection of `slave_id` at `stamp`.
    pub fn mark_used(&mut self, slave_id: u64, stamp: u64) -> Result<()> {
        let i = self
            .position(slave_id)
            .ok_or_else(|| AolError::contract(format!("no slave with id {slave_id}")))?;
        let entry = &mut self.entries[i];
        if slave_id != 0 {
            self.recency.remove(&(entry.last_used, slave_id));
            self.recency.insert((stamp, slave_id));
        }
        entry.last_used = stamp;
        Ok(())
    }

    /// Saves a copy of `s0`. Appends while below capacity, otherwise replaces
    /// a snapshot chosen by `policy`. Returns `None` when the capacity leaves
    /// no room for any snapshot.
    pub fn snapshot<R: Rng>(
        &mut self,
        stamp: u64,
        policy: Replacement,
        rng: &mut R,
    ) -> Option<SnapshotOutcome> {
        if self.capacity == 1 {
            return None;
        }
        let evicted = if self.entries.len() < self.capacity {
            None
        } else {
            let victim = match policy {
                Replacement::Lru => self.recency.first().map(|&(_, id)| id)?,
                Replacement::Random => {
                    self.entries[rng.random_range(1..self.entries.len())].slave_id
                }
                Replacement::Fifo => {
                    self.entries[1..]
                        .iter()
                        .min_by_key(|e| (e.created_at, e.slave_id))?
                        .slave_id
                }
            };
            let i = self.position(victim)?;
            let gone = self.entries.remove(i);
            self.recency.remove(&(gone.last_used, gone.slave_id));
            Some(victim)
        };
        let id = self.next_id;
        self.next_id += 1;
        self.entries.push(SlaveEntry {
            slave_id: id,
            weights: self.entries[0].weights.clone(),
            last_used: stamp,
            created_at: stamp,
        });
        self.recency.insert((stamp, id));
        Some(SnapshotOutcome {
            inserted: id,
            evicted,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::{Arch, PredictorSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn weights(v: f64) -> WeightVector {
        let spec = PredictorSpec::new(Arch::Recurrent).with_hidden_size(1);
        WeightVector::new(&spec, vec![v; 8]).unwrap()
    }

    #[test]
    fn fresh_list_has_only_s0() {
        let list = SlaveList::new(weights(0.0), 10, 0).unwrap();
        assert_eq!(list.len(), 1);
        assert_eq!(list.entries()[0].slave_id, 0);
        assert!(SlaveList::new(weights(0.0), 0, 0).is_err());
    }

    #[test]
    fn appends_until_full_then_evicts_lru() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut list = SlaveList::new(weights(0.0), 3, 0).unwrap();
        let a = list.snapshot(1, Replacement::Lru, &mut rng).unwrap();
        let b = list.snapshot(2, Replacement::Lru, &mut rng).unwrap();
        assert_eq!((a.inserted, a.evicted), (1, None));
        assert_eq!((b.inserted, b.evicted), (2, None));
        assert_eq!(list.len(), 3);

        list.mark_used(1, 3).unwrap();
        let c = list.snapshot(4, Replacement::Lru, &mut rng).unwrap();
        assert_eq!(c.evicted, Some(2));
        let ids: Vec<u64> = list.entries().iter().map(|e| e.slave_id).collect();
        assert_eq!(ids, vec![0, 1, 3]);
    }

    #[test]
    fn snapshot_copies_current_s0() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut list = SlaveList::new(weights(0.0), 4, 0).unwrap();
        list.sync_s0(weights(0.5));
        let out = list.snapshot(1, Replacement::Lru, &mut rng).unwrap();
        assert_eq!(list.get(out.inserted).unwrap().weights, weights(0.5));
    }

    #[test]
    fn fifo_evicts_oldest_even_if_recently_used() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut list = SlaveList::new(weights(0.0), 3, 0).unwrap();
        list.snapshot(1, Replacement::Fifo, &mut rng);
        list.snapshot(2, Replacement::Fifo, &mut rng);
        list.mark_used(1, 3).unwrap();
        let out = list.snapshot(4, Replacement::Fifo, &mut rng).unwrap();
        assert_eq!(out.evicted, Some(1));
    }

    #[test]
    fn capacity_one_never_snapshots() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut list = SlaveList::new(weights(0.0), 1, 0).unwrap();
        for stamp in 1..20 {
            assert!(list.snapshot(stamp, Replacement::Lru, &mut rng).is_none());
            list.mark_used(0, stamp).unwrap();
        }
        assert_eq!(list.len(), 1);
    }

    #[test]
    fn random_never_evicts_s0() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut list = SlaveList::new(weights(0.0), 4, 0).unwrap();
        for stamp in 1..500 {
            let out = list.snapshot(stamp, Replacement::Random, &mut rng).unwrap();
            assert_ne!(out.evicted, Some(0));
            assert_eq!(list.entries()[0].slave_id, 0);
            assert!(list.len() <= 4);
        }
    }

    #[test]
    fn unknown_slave_cannot_be_marked() {
        let mut list = SlaveList::new(weights(0.0), 3, 0).unwrap();
        assert!(list.mark_used(7, 1).is_err());
    }
}
