//! Compact state encoding for the search.
//!
//! Chips are fixed for a whole enumeration, so a state is just the vertex
//! of each chip, in label order. When every vertex index fits in `bits`
//! bits and `bits * chips <= 128` the state packs into a `u128`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::engine::for_each_combination;
use crate::engine::{
    endgame_offenders, median_slot, run_waves_traced, unlabeled_stabilize, Chip, Configuration, FiringMove,
    DEFAULT_UNLABELED_GUARD,
};
use crate::tree::{TreeShape, VertexId};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PackedState {
    Narrow(u128),
    Wide(Box<[u32]>),
}

/// What to do with a state taken off the frontier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    Stable,
    /// Endgame start; holds the forced stable outcome.
    Endgame(PackedState),
    Open,
}

/// Reusable buffers for [`StateSpace::for_each_successor`].
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    positions: Vec<u32>,
    order: Vec<(u32, u32)>,
    next: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct StateSpace {
    shape: TreeShape,
    labels: Vec<Chip>,
    bits: u32,
    narrow: bool,
    endgame_ell: Option<u32>,
    start: PackedState,
}

impl StateSpace {
    /// Prepares the encoding for everything reachable from `config`.
    /// `endgame_shortcut` resolves endgame-start states by waves when the
    /// chip count is exactly `N_{k,ell}` for some `ell >= 2`.
    pub fn new(config: &Configuration, endgame_shortcut: bool) -> Result<Self> {
        let shape = config.shape();
        let labels = config.labels();
        let k = u64::from(shape.k());
        // least action: no legal sequence fires a vertex more often than
        // the unlabeled stabilization does
        let reach = unlabeled_stabilize(shape, config.counts(), DEFAULT_UNLABELED_GUARD)?;
        let max_vertex =
            reach.odometer.keys().map(|v| k * v.0 + k).chain(config.occupied().map(|(v, _)| v.0)).max().unwrap_or(0);
        let bits = (64 - max_vertex.leading_zeros()).max(1);
        assert!(max_vertex <= u64::from(u32::MAX), "vertex indices beyond u32 are not supported");
        let narrow = (bits as usize) * labels.len() <= 128;
        let endgame_ell = if endgame_shortcut {
            (2..64)
                .take_while(|&ell| shape.vertices_through_layer(ell) <= labels.len() as u64)
                .find(|&ell| shape.vertices_through_layer(ell) == labels.len() as u64)
        } else {
            None
        };
        let mut space = StateSpace { shape, labels, bits, narrow, endgame_ell, start: PackedState::Narrow(0) };
        space.start = space.encode_config(config);
        Ok(space)
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn start(&self) -> &PackedState {
        &self.start
    }

    pub fn chip_count(&self) -> usize {
        self.labels.len()
    }

    pub fn endgame_ell(&self) -> Option<u32> {
        self.endgame_ell
    }

    fn encode(&self, positions: &[u32]) -> PackedState {
        if self.narrow {
            let mut word: u128 = 0;
            for (i, p) in positions.iter().enumerate() {
                word |= u128::from(*p) << (i as u32 * self.bits);
            }
            PackedState::Narrow(word)
        } else {
            PackedState::Wide(positions.into())
        }
    }

    fn decode_into(&self, state: &PackedState, out: &mut Vec<u32>) {
        out.clear();
        match state {
            PackedState::Narrow(word) => {
                let mask = (1u128 << self.bits) - 1;
                out.extend((0..self.labels.len()).map(|i| ((word >> (i as u32 * self.bits)) & mask) as u32));
            }
            PackedState::Wide(p) => out.extend_from_slice(p),
        }
    }

    pub fn encode_config(&self, config: &Configuration) -> PackedState {
        let mut positions = alloc::vec![0u32; self.labels.len()];
        for (v, chips) in config.occupied() {
            for c in chips {
                let i = self.labels.binary_search(c).expect("chip belongs to this space");
                positions[i] = v.0 as u32;
            }
        }
        self.encode(&positions)
    }

    pub fn to_config(&self, state: &PackedState) -> Configuration {
        let mut positions = Vec::new();
        self.decode_into(state, &mut positions);
        let placements = positions.iter().zip(&self.labels).map(|(p, c)| (VertexId(u64::from(*p)), [*c]));
        Configuration::from_placements(self.shape, placements).expect("labels are distinct")
    }

    /// Fills `scratch.order` with `(vertex, chip index)` sorted by vertex,
    /// then chip index (which is label order).
    fn group(&self, state: &PackedState, scratch: &mut Scratch) {
        self.decode_into(state, &mut scratch.positions);
        scratch.order.clear();
        scratch.order.extend(scratch.positions.iter().enumerate().map(|(i, p)| (*p, i as u32)));
        scratch.order.sort_unstable();
    }

    pub fn resolve(&self, state: &PackedState, scratch: &mut Scratch) -> Resolution {
        self.group(state, scratch);
        let k = self.shape.k() as usize;
        let mut stable = true;
        for run in scratch.order.chunk_by(|a, b| a.0 == b.0) {
            if run.len() > k {
                stable = false;
                break;
            }
        }
        if stable {
            return Resolution::Stable;
        }
        if let Some(ell) = self.endgame_ell {
            let counts =
                scratch.order.chunk_by(|a, b| a.0 == b.0).map(|run| (VertexId(u64::from(run[0].0)), run.len()));
            if endgame_offenders(self.shape, ell, counts).is_empty() {
                let config = self.to_config(state);
                let start = crate::engine::endgame_start(ell, config).expect("shape already checked");
                let (done, _) = run_waves_traced(&start).expect("endgame fires are forced");
                return Resolution::Endgame(self.encode_config(&done));
            }
        }
        Resolution::Open
    }

    /// Calls `f(successor, vertex, selected chip indices)` for every legal
    /// move out of `state`, in the order of [`Configuration::legal_moves`].
    pub fn for_each_successor(
        &self,
        state: &PackedState,
        scratch: &mut Scratch,
        mut f: impl FnMut(PackedState, u32, &[usize]),
    ) {
        self.group(state, scratch);
        let k = self.shape.k() as usize;
        let median = median_slot(k);
        let Scratch { positions, order, next } = scratch;
        let mut chosen: Vec<usize> = Vec::with_capacity(k + 1);
        for run in order.chunk_by(|a, b| a.0 == b.0) {
            if run.len() <= k {
                continue;
            }
            let v = VertexId(u64::from(run[0].0));
            let parent = self.shape.parent(v).0 as u32;
            for_each_combination(run.len(), k + 1, |idx| {
                next.clear();
                next.extend_from_slice(positions);
                chosen.clear();
                let mut slot = 1;
                for (rank, &j) in idx.iter().enumerate() {
                    let chip = run[j].1 as usize;
                    chosen.push(chip);
                    next[chip] = if rank == median {
                        parent
                    } else {
                        let c = self.shape.child(v, slot).0 as u32;
                        slot += 1;
                        c
                    };
                }
                f(self.encode(next), run[0].0, &chosen);
            });
        }
    }

    pub fn move_for(&self, vertex: u32, chosen: &[usize]) -> FiringMove {
        FiringMove::new(VertexId(u64::from(vertex)), chosen.iter().map(|&i| self.labels[i]))
            .expect("distinct chip indices")
    }
}
