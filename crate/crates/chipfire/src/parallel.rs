//! Level-synchronous breadth-first enumeration on a rayon pool.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use chipfire_core::enumeration::{
    enumerate_stable, EnumerationOptions, EnumerationResult, PackedState, Resolution, Scratch, SearchOrder, StateSpace,
};
use chipfire_core::Configuration;
use dashmap::DashSet;
use rayon::prelude::*;

use crate::{Error, Result};

/// Enumerates on `threads` workers. Falls back to the sequential search for
/// one thread, depth-first order or witness recording.
pub fn enumerate_parallel(
    config: &Configuration,
    options: &EnumerationOptions,
    threads: usize,
) -> Result<EnumerationResult> {
    if threads <= 1 || options.record_witnesses || options.order == SearchOrder::DepthFirst {
        return Ok(enumerate_stable(config, options)?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    let space = StateSpace::new(config, options.endgame_shortcut)?;
    Ok(pool.install(|| search(&space, options)))
}

fn search(space: &StateSpace, options: &EnumerationOptions) -> EnumerationResult {
    let limits = options.limits;
    let stable: DashSet<PackedState> = DashSet::new();
    let explored = AtomicU64::new(0);
    let memo_hits = AtomicU64::new(0);
    let truncated = AtomicBool::new(false);

    let mut level = vec![space.start().clone()];
    while !level.is_empty() && !truncated.load(Ordering::Relaxed) {
        let next: DashSet<PackedState> = DashSet::new();
        level.par_iter().for_each_init(Scratch::default, |scratch, state| {
            if truncated.load(Ordering::Relaxed) {
                return;
            }
            if explored.fetch_add(1, Ordering::Relaxed) >= limits.max_states || stable.len() as u64 >= limits.max_stable
            {
                truncated.store(true, Ordering::Relaxed);
                return;
            }
            match space.resolve(state, scratch) {
                Resolution::Stable => {
                    stable.insert(state.clone());
                }
                Resolution::Endgame(done) => {
                    stable.insert(done);
                }
                Resolution::Open => {
                    let mut hits = 0;
                    space.for_each_successor(state, scratch, |s, _, _| {
                        if !next.insert(s) {
                            hits += 1;
                        }
                    });
                    memo_hits.fetch_add(hits, Ordering::Relaxed);
                }
            }
        });
        level = next.into_iter().collect();
    }

    let truncated = truncated.into_inner();
    EnumerationResult {
        stable_set: stable.iter().map(|s| space.to_config(&s)).collect(),
        // the state that tripped the limit was counted but not expanded
        states_explored: explored.into_inner().min(limits.max_states),
        memo_hits: memo_hits.into_inner(),
        truncated,
        witnesses: Default::default(),
    }
}
