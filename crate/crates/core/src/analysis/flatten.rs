use alloc::vec::Vec;

use crate::engine::{Chip, Configuration};
use crate::enumeration::EnumerationResult;
use crate::tree::{VertexId, ROOT};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FlattenRule {
    /// Left children's subtrees, the vertex, then right children's subtrees.
    #[default]
    Inorder,
    /// All child subtrees left to right, then the vertex.
    ChildrenFirst,
}

impl FlattenRule {
    pub fn name(self) -> &'static str {
        match self {
            FlattenRule::Inorder => "inorder",
            FlattenRule::ChildrenFirst => "children-first",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlattenedPermutation {
    pub sequence: Vec<Chip>,
    pub rule: FlattenRule,
}

/// Reads a one-chip-per-vertex configuration left to right.
pub fn flatten(config: &Configuration, rule: FlattenRule) -> Result<FlattenedPermutation> {
    if let Some((v, _)) = config.occupied().find(|(_, l)| l.len() > 1) {
        return Err(Error::MultipleChips(v));
    }
    let last = config.occupied().last().map_or(0, |(v, _)| v.0);
    let mut sequence = Vec::with_capacity(config.total_chips());
    walk(config, rule, ROOT, last, &mut sequence);
    Ok(FlattenedPermutation { sequence, rule })
}

fn walk(config: &Configuration, rule: FlattenRule, v: VertexId, last: u64, out: &mut Vec<Chip>) {
    if v.0 > last {
        return;
    }
    let shape = config.shape();
    let split = match rule {
        FlattenRule::Inorder => shape.half() as usize,
        FlattenRule::ChildrenFirst => shape.k() as usize,
    };
    for (i, child) in shape.children(v).enumerate() {
        if i == split {
            out.extend_from_slice(config.chips_at(v));
        }
        walk(config, rule, child, last, out);
    }
    if split == shape.k() as usize {
        out.extend_from_slice(config.chips_at(v));
    }
}

/// Pairs `i < j` with `seq[i] > seq[j]`, by merge sort.
pub fn inversions(seq: &[Chip]) -> u64 {
    fn sort_count(v: &mut [Chip], buf: &mut Vec<Chip>) -> u64 {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = sort_count(&mut v[..mid], buf) + sort_count(&mut v[mid..], buf);
        buf.clear();
        let (mut i, mut j) = (0, mid);
        while i < mid && j < n {
            if v[i] <= v[j] {
                buf.push(v[i]);
                i += 1;
            } else {
                // every remaining left element exceeds v[j]
                count += (mid - i) as u64;
                buf.push(v[j]);
                j += 1;
            }
        }
        buf.extend_from_slice(&v[i..mid]);
        buf.extend_from_slice(&v[j..]);
        v.copy_from_slice(buf);
        count
    }
    let mut work = seq.to_vec();
    sort_count(&mut work, &mut Vec::with_capacity(seq.len()))
}

/// Largest inversion count over the stable set, with the first
/// configuration (in set order) attaining it.
pub fn max_inversions(result: &EnumerationResult, rule: FlattenRule) -> Result<(u64, Configuration)> {
    if result.truncated {
        return Err(Error::Truncated);
    }
    let mut best: Option<(u64, &Configuration)> = None;
    for c in &result.stable_set {
        let n = inversions(&flatten(c, rule)?.sequence);
        if best.is_none_or(|(b, _)| n > b) {
            best = Some((n, c));
        }
    }
    best.map(|(n, c)| (n, c.clone())).ok_or_else(|| Error::OutOfRange("empty stable set".into()))
}
