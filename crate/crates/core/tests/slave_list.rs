mod common;

use aol_core::adapt::{Replacement, SlaveList};
use aol_core::predictor::{Arch, PredictorSpec, WeightVector};
use common::lru_mismatches;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn lru_matches_list_scan_oracle() {
    for n in [1, 2, 5, 10] {
        assert_eq!(lru_mismatches(n, 10_000, n as u64), 0, "n = {n}");
    }
}

proptest! {
    #[test]
    fn lru_matches_oracle_on_short_logs(n in 1usize..12, events in 1usize..300, seed in any::<u64>()) {
        prop_assert_eq!(lru_mismatches(n, events, seed), 0);
    }

    #[test]
    fn s0_survives_every_policy(n in 1usize..6, seed in any::<u64>(), policy in prop_oneof![
        Just(Replacement::Lru), Just(Replacement::Random), Just(Replacement::Fifo)
    ]) {
        let spec = PredictorSpec::new(Arch::ConstantVelocity);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut list = SlaveList::new(WeightVector::zeros(&spec).unwrap(), n, 0).unwrap();
        for stamp in 1..50 {
            let out = list.snapshot(stamp, policy, &mut rng);
            prop_assert_eq!(out.is_none(), n == 1);
            prop_assert_ne!(out.and_then(|o| o.evicted), Some(0));
            prop_assert_eq!(list.entries()[0].slave_id, 0);
            prop_assert!(list.len() <= n);
        }
    }
}

#[test]
fn fifo_evicts_oldest_snapshot() {
    let spec = PredictorSpec::new(Arch::ConstantVelocity);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut list = SlaveList::new(WeightVector::zeros(&spec).unwrap(), 3, 0).unwrap();
    list.snapshot(1, Replacement::Fifo, &mut rng);
    list.snapshot(2, Replacement::Fifo, &mut rng);
    list.mark_used(2, 3).unwrap();
    list.mark_used(1, 4).unwrap();
    let out = list.snapshot(5, Replacement::Fifo, &mut rng).unwrap();
    assert_eq!(out.evicted, Some(1));
}
