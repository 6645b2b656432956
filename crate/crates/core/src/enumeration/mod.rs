//! Exhaustive enumeration of the stable configurations reachable from a
//! configuration.
//!
//! The firing vector of a path is determined by the unlabeled configuration
//! it ends at, so every path to a given state has the same length. A
//! breadth-first search may therefore forget a level once the next one is
//! built and still see every state exactly once. The depth-first order keeps
//! one global visited set instead.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::engine::{endgame_start, run_waves, run_waves_traced, Configuration, FiringMove};
use crate::tree::{TreeShape, VertexId};
use crate::{Error, Result};

mod space;

pub use self::space::{PackedState, Resolution, Scratch, StateSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Distinct states expanded or resolved.
    pub max_states: u64,
    pub max_stable: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 100_000_000, max_stable: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchOrder {
    #[default]
    BreadthFirst,
    DepthFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub limits: Limits,
    /// Finish endgame-start states with [`run_waves`] instead of searching.
    pub endgame_shortcut: bool,
    pub order: SearchOrder,
    /// Keep one firing sequence per stable configuration.
    pub record_witnesses: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            limits: Limits::default(),
            endgame_shortcut: true,
            order: SearchOrder::default(),
            record_witnesses: false,
        }
    }
}

impl EnumerationOptions {
    pub fn with_limits(limits: Limits) -> Self {
        EnumerationOptions { limits, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EnumerationResult {
    pub stable_set: BTreeSet<Configuration>,
    pub states_explored: u64,
    /// Successors that had already been discovered.
    pub memo_hits: u64,
    pub truncated: bool,
    /// Firing sequence from the start to each stable configuration; empty
    /// unless requested.
    pub witnesses: BTreeMap<Configuration, Vec<FiringMove>>,
}

/// How a state was first discovered, for witness reconstruction.
enum Origin {
    Start,
    Fire(PackedState, FiringMove),
}

struct Search<'a> {
    space: &'a StateSpace,
    options: &'a EnumerationOptions,
    scratch: Scratch,
    stable: HashSet<PackedState>,
    /// Stable states reached through the endgame shortcut, with the
    /// endgame start they came from.
    via_endgame: HashMap<PackedState, PackedState>,
    origins: HashMap<PackedState, Origin>,
    explored: u64,
    memo_hits: u64,
    truncated: bool,
}

impl<'a> Search<'a> {
    fn new(space: &'a StateSpace, options: &'a EnumerationOptions) -> Self {
        let mut origins = HashMap::new();
        if options.record_witnesses {
            origins.insert(space.start().clone(), Origin::Start);
        }
        Search {
            space,
            options,
            scratch: Scratch::default(),
            stable: HashSet::new(),
            via_endgame: HashMap::new(),
            origins,
            explored: 0,
            memo_hits: 0,
            truncated: false,
        }
    }

    fn over_limit(&mut self) -> bool {
        let limits = self.options.limits;
        if self.explored >= limits.max_states || self.stable.len() as u64 >= limits.max_stable {
            self.truncated = true;
        }
        self.truncated
    }

    /// Resolves `state`; returns its undiscovered successors when it is open.
    /// `claim` marks a successor as discovered and reports whether it was new.
    fn visit(&mut self, state: &PackedState, mut claim: impl FnMut(&PackedState) -> bool) -> Vec<PackedState> {
        self.explored += 1;
        match self.space.resolve(state, &mut self.scratch) {
            Resolution::Stable => {
                self.stable.insert(state.clone());
                Vec::new()
            }
            Resolution::Endgame(done) => {
                if self.stable.insert(done.clone()) && self.options.record_witnesses {
                    self.via_endgame.insert(done, state.clone());
                }
                Vec::new()
            }
            Resolution::Open => {
                let mut out = Vec::new();
                let record = self.options.record_witnesses;
                let space = self.space;
                let origins = &mut self.origins;
                let mut hits = 0;
                space.for_each_successor(state, &mut self.scratch, |next, v, chosen| {
                    if claim(&next) {
                        if record {
                            origins
                                .entry(next.clone())
                                .or_insert_with(|| Origin::Fire(state.clone(), space.move_for(v, chosen)));
                        }
                        out.push(next);
                    } else {
                        hits += 1;
                    }
                });
                self.memo_hits += hits;
                out
            }
        }
    }

    fn run(&mut self) {
        let start = self.space.start().clone();
        match self.options.order {
            SearchOrder::BreadthFirst => {
                let mut level = alloc::vec![start];
                while !level.is_empty() {
                    let mut next_level: HashSet<PackedState> = HashSet::new();
                    let mut fresh = Vec::new();
                    for state in &level {
                        if self.over_limit() {
                            return;
                        }
                        fresh.extend(self.visit(state, |s| next_level.insert(s.clone())));
                    }
                    level = fresh;
                }
            }
            SearchOrder::DepthFirst => {
                let mut seen: HashSet<PackedState> = HashSet::new();
                seen.insert(start.clone());
                let mut stack = alloc::vec![start];
                while let Some(state) = stack.pop() {
                    if self.over_limit() {
                        return;
                    }
                    let fresh = self.visit(&state, |s| seen.insert(s.clone()));
                    stack.extend(fresh);
                }
            }
        }
    }

    fn path_to(&self, mut state: PackedState) -> Vec<FiringMove> {
        let mut moves = Vec::new();
        while let Some(Origin::Fire(prev, mv)) = self.origins.get(&state) {
            moves.push(mv.clone());
            state = prev.clone();
        }
        moves.reverse();
        moves
    }

    fn witness(&self, state: &PackedState) -> Vec<FiringMove> {
        match self.via_endgame.get(state) {
            Some(begin) => {
                let mut moves = self.path_to(begin.clone());
                let ell = self.space.endgame_ell().expect("shortcut was active");
                let start = endgame_start(ell, self.space.to_config(begin)).expect("shape already checked");
                moves.extend(run_waves_traced(&start).expect("endgame fires are forced").1);
                moves
            }
            None => self.path_to(state.clone()),
        }
    }

    fn finish(self) -> EnumerationResult {
        let witnesses = if self.options.record_witnesses {
            self.stable.iter().map(|s| (self.space.to_config(s), self.witness(s))).collect()
        } else {
            BTreeMap::new()
        };
        EnumerationResult {
            stable_set: self.stable.iter().map(|s| self.space.to_config(s)).collect(),
            states_explored: self.explored,
            memo_hits: self.memo_hits,
            truncated: self.truncated,
            witnesses,
        }
    }
}

pub fn enumerate_stable(config: &Configuration, options: &EnumerationOptions) -> Result<EnumerationResult> {
    let space = StateSpace::new(config, options.endgame_shortcut)?;
    let mut search = Search::new(&space, options);
    search.run();
    Ok(search.finish())
}

/// Number of stable configurations reachable from `N_{k,ell}` chips on the
/// root.
pub fn count_z(shape: TreeShape, ell: u32, options: &EnumerationOptions) -> Result<u64> {
    let result = enumerate_stable(&Configuration::initial(shape, ell), options)?;
    if result.truncated {
        return Err(Error::Truncated);
    }
    Ok(result.stable_set.len() as u64)
}

/// Whether the search, with the shortcut off, finds exactly the waves
/// result.
pub fn verify_endgame_confluence(ell: u32, config: &Configuration, limits: Limits) -> Result<bool> {
    let start = endgame_start(ell, config.clone())?;
    let expected = run_waves(&start)?;
    let options = EnumerationOptions { limits, endgame_shortcut: false, ..EnumerationOptions::default() };
    let result = enumerate_stable(config, &options)?;
    if result.truncated {
        return Err(Error::Truncated);
    }
    Ok(result.stable_set.len() == 1 && result.stable_set.contains(&expected))
}

/// Distinct rank patterns of the stable configurations inside the subtree
/// at `subtree_root`, re-rooted at vertex 0.
pub fn subtree_orderings(result: &EnumerationResult, subtree_root: VertexId) -> Result<BTreeSet<Configuration>> {
    if result.truncated {
        return Err(Error::Truncated);
    }
    Ok(result.stable_set.iter().map(|c| c.restrict_to_subtree(subtree_root).normalized()).collect())
}
