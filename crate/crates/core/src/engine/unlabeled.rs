//! Unlabeled chip-firing: the closed-form stable profile and a brute-force
//! simulator that checks it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::tree::{TreeShape, VertexId, ROOT};
use crate::{Error, Result};

/// Runaway guard for [`unlabeled_simulate`], in fires.
pub const DEFAULT_UNLABELED_GUARD: u64 = 1 << 40;

/// Chips per vertex on each layer of the stable configuration; entry `m`
/// describes layer `m + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerProfile {
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnlabeledOutcome {
    pub counts: BTreeMap<VertexId, u64>,
    /// Number of fires of each vertex.
    pub odometer: BTreeMap<VertexId, u64>,
}

impl UnlabeledOutcome {
    pub fn total_fires(&self) -> u64 {
        self.odometer.values().sum()
    }
}

/// Stable layer profile for `n_chips` chips started on the root: with
/// `N_ell <= n < N_{ell+1}`, layer `i + 1` holds `a_i + 1` chips per vertex
/// where `a_{ell-1} .. a_0` are the base-k digits of `n - N_ell`.
pub fn unlabeled_profile(shape: TreeShape, n_chips: u64) -> LayerProfile {
    assert!(n_chips >= 1, "at least one chip is required");
    let mut ell = 1;
    while shape.vertices_through_layer(ell + 1) <= n_chips {
        ell += 1;
    }
    let k = u64::from(shape.k());
    let mut rest = n_chips - shape.vertices_through_layer(ell);
    let counts = (0..ell)
        .map(|_| {
            let digit = rest % k;
            rest /= k;
            digit + 1
        })
        .collect();
    LayerProfile { counts }
}

/// Stabilizes an unlabeled configuration, firing each vertex as many times
/// as it can at once.
pub fn unlabeled_stabilize(
    shape: TreeShape,
    mut counts: BTreeMap<VertexId, u64>,
    guard: u64,
) -> Result<UnlabeledOutcome> {
    let k = u64::from(shape.k());
    let mut odometer: BTreeMap<VertexId, u64> = BTreeMap::new();
    let mut pending: BTreeSet<VertexId> = counts.iter().filter(|(_, c)| **c > k).map(|(v, _)| *v).collect();
    let mut fired: u64 = 0;
    while let Some(v) = pending.pop_first() {
        let c = counts.get(&v).copied().unwrap_or(0);
        if c <= k {
            continue;
        }
        // the root gets one chip back per fire through its self-loop
        let times = if v == ROOT { (c - 1) / k } else { c / (k + 1) };
        fired = fired.saturating_add(times);
        if fired > guard {
            return Err(Error::StepLimitExceeded(guard));
        }
        *odometer.entry(v).or_default() += times;
        let left = if v == ROOT { c - times * k } else { c - times * (k + 1) };
        if left == 0 {
            counts.remove(&v);
        } else {
            counts.insert(v, left);
        }
        let parent = (v != ROOT).then(|| shape.parent(v));
        for dest in parent.into_iter().chain(shape.children(v)) {
            let slot = counts.entry(dest).or_default();
            *slot += times;
            if *slot > k {
                pending.insert(dest);
            }
        }
    }
    Ok(UnlabeledOutcome { counts, odometer })
}

/// Per-vertex counts of the unique stable configuration reached from
/// `n_chips` chips on the root.
pub fn unlabeled_simulate(shape: TreeShape, n_chips: u64) -> Result<BTreeMap<VertexId, u64>> {
    let mut start = BTreeMap::new();
    start.insert(ROOT, n_chips);
    Ok(unlabeled_stabilize(shape, start, DEFAULT_UNLABELED_GUARD)?.counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn shape(k: u32) -> TreeShape {
        TreeShape::new(k).unwrap()
    }

    #[test]
    fn profile_examples() {
        assert_eq!(unlabeled_profile(shape(2), 7).counts, vec![1, 1, 1]);
        assert_eq!(unlabeled_profile(shape(2), 10).counts, vec![2, 2, 1]);
        assert_eq!(unlabeled_profile(shape(3), 13).counts, vec![1, 1, 1]);
        assert_eq!(unlabeled_profile(shape(2), 1).counts, vec![1]);
    }

    #[test]
    fn simulate_examples() {
        let seven = unlabeled_simulate(shape(2), 7).unwrap();
        assert_eq!(seven, (0..7).map(|v| (VertexId(v), 1)).collect());
        let one = unlabeled_simulate(shape(2), 1).unwrap();
        assert_eq!(one, [(ROOT, 1)].into_iter().collect());
        let four = unlabeled_simulate(shape(4), 21).unwrap();
        assert_eq!(four, (0..21).map(|v| (VertexId(v), 1)).collect());
    }

    #[test]
    fn seven_binary_chips_fire_six_times() {
        // root three times, each child once, root once more
        let mut start = BTreeMap::new();
        start.insert(ROOT, 7);
        let out = unlabeled_stabilize(shape(2), start, 100).unwrap();
        assert_eq!(out.odometer.get(&ROOT), Some(&4));
        assert_eq!(out.odometer.get(&VertexId(1)), Some(&1));
        assert_eq!(out.total_fires(), 6);
    }

    #[test]
    fn guard_trips() {
        let mut start = BTreeMap::new();
        start.insert(ROOT, 100);
        assert_eq!(unlabeled_stabilize(shape(2), start, 3), Err(Error::StepLimitExceeded(3)));
    }
}
