//! Structural checks on stable configurations, flattening into
//! permutations, and the replayable lower-bound construction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::engine::{Chip, Configuration};
use crate::tree::{Side, VertexId};

mod construction;
mod flatten;

pub use self::construction::{
    construction_choices, construction_prefix, replay_lower_bound_construction, ConstructionChoice, ConstructionPrefix,
    ConstructionReplay, SubtreePlan,
};
pub use self::flatten::{flatten, inversions, max_inversions, FlattenRule, FlattenedPermutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    MinMaxDescendants,
    ZigzagRelation,
    Ballot,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::MinMaxDescendants => "minmax",
            Property::ZigzagRelation => "zigzag-relation",
            Property::Ballot => "ballot",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub property: Property,
    pub holds: bool,
    /// Offending `(vertex, chip)` pairs.
    pub witnesses: Vec<(VertexId, Chip)>,
    /// Number of places the property applied to.
    pub checked: usize,
}

impl PropertyVerdict {
    fn new(property: Property, witnesses: Vec<(VertexId, Chip)>, checked: usize) -> Self {
        PropertyVerdict { property, holds: witnesses.is_empty(), witnesses, checked }
    }
}

pub fn check(property: Property, config: &Configuration) -> PropertyVerdict {
    match property {
        Property::MinMaxDescendants => check_minmax_descendants(config),
        Property::ZigzagRelation => check_zigzag_relation(config),
        Property::Ballot => check_ballot(config),
    }
}

/// Sorted chips of every subtree that holds any, keyed by subtree root.
fn subtree_chips(config: &Configuration) -> BTreeMap<VertexId, Vec<Chip>> {
    let shape = config.shape();
    let mut pending: BTreeMap<VertexId, Vec<Chip>> = config.occupied().map(|(v, l)| (v, l.to_vec())).collect();
    let mut done = BTreeMap::new();
    // parents have smaller indices, so the largest pending vertex is complete
    while let Some((v, mut chips)) = pending.pop_last() {
        chips.sort_unstable();
        if !v.is_root() {
            pending.entry(shape.parent(v)).or_default().extend_from_slice(&chips);
        }
        done.insert(v, chips);
    }
    done
}

/// Deepest occupied straight descendant of `v` on `side`.
fn bottom_straight(config: &Configuration, v: VertexId, side: Side) -> VertexId {
    let shape = config.shape();
    let last = config.occupied().last().map_or(0, |(w, _)| w.0);
    let mut best = v;
    let mut cur = v;
    loop {
        cur = shape.straight_descendant(cur, side, 1);
        if cur.0 > last {
            return best;
        }
        if !config.chips_at(cur).is_empty() {
            best = cur;
        }
    }
}

/// The smallest chip of every occupied subtree sits on its bottom straight
/// left descendant and the largest on its bottom straight right descendant.
pub fn check_minmax_descendants(config: &Configuration) -> PropertyVerdict {
    let subtrees = subtree_chips(config);
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for (v, _) in config.occupied() {
        let chips = &subtrees[&v];
        let (lo, hi) = (chips[0], chips[chips.len() - 1]);
        checked += 1;
        if !config.chips_at(bottom_straight(config, v, Side::Left)).contains(&lo) {
            witnesses.push((v, lo));
        }
        if !config.chips_at(bottom_straight(config, v, Side::Right)).contains(&hi) {
            witnesses.push((v, hi));
        }
    }
    PropertyVerdict::new(Property::MinMaxDescendants, witnesses, checked)
}

/// For a left child `s` of a right child, the left children of `s` increase
/// and stay below `s` and its right children; mirrored for a right child
/// of a left child. Applies where `s` and all its children hold one chip
/// and the parent of `s` is not the root.
pub fn check_zigzag_relation(config: &Configuration) -> PropertyVerdict {
    let shape = config.shape();
    let half = shape.half() as usize;
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for (s, _) in config.occupied() {
        let Some(cs) = config.single_chip(s) else { continue };
        let parent = shape.parent(s);
        if s.is_root() || parent.is_root() {
            continue;
        }
        let Some(children) = shape.children(s).map(|c| config.single_chip(c)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let (left, right) = children.split_at(half);
        let ok = if shape.is_left_child(s) && shape.is_right_child(parent) {
            left.windows(2).all(|w| w[0] < w[1])
                && left.last().is_none_or(|&top| right.iter().chain([&cs]).all(|&c| top < c))
        } else if shape.is_right_child(s) && shape.is_left_child(parent) {
            right.windows(2).all(|w| w[0] < w[1])
                && right.first().is_none_or(|&bottom| left.iter().chain([&cs]).all(|&c| bottom > c))
        } else {
            continue;
        };
        checked += 1;
        if !ok {
            witnesses.push((s, cs));
        }
    }
    PropertyVerdict::new(Property::ZigzagRelation, witnesses, checked)
}

/// For every vertex and children `a < b`, the `i`th smallest chip under
/// `a` is below the `i`th smallest chip under `b`.
pub fn check_ballot(config: &Configuration) -> PropertyVerdict {
    let shape = config.shape();
    let subtrees = subtree_chips(config);
    let empty = Vec::new();
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for &v in subtrees.keys() {
        let lists: Vec<(VertexId, &Vec<Chip>)> =
            shape.children(v).map(|c| (c, subtrees.get(&c).unwrap_or(&empty))).collect();
        for (a, (_, under_a)) in lists.iter().enumerate() {
            for (b_vertex, under_b) in &lists[a + 1..] {
                checked += 1;
                if let Some((_, &cb)) = under_a.iter().zip(under_b.iter()).find(|(ca, cb)| ca >= cb) {
                    witnesses.push((*b_vertex, cb));
                }
            }
        }
    }
    PropertyVerdict::new(Property::Ballot, witnesses, checked)
}

/// Convenience for tests and reports: `v`'s bottom straight descendant.
pub fn bottom_straight_descendant(config: &Configuration, v: VertexId, side: Side) -> VertexId {
    bottom_straight(config, v, side)
}
