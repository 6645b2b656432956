//! Labeled configurations and the firing rule.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::tree::{TreeShape, VertexId, ROOT};
use crate::{Error, Result};

mod endgame;
mod stabilize;
mod unlabeled;

pub(crate) use self::endgame::endgame_offenders;
pub use self::endgame::{endgame_from_labels, endgame_start, run_waves, run_waves_traced, EndgameStart};
pub use self::stabilize::{odometer, replay, stabilize, Policy, Stabilization, StepLimit};
pub use self::unlabeled::{
    unlabeled_profile, unlabeled_simulate, unlabeled_stabilize, LayerProfile, UnlabeledOutcome, DEFAULT_UNLABELED_GUARD,
};

/// A chip label. Labels are positive.
pub type Chip = u32;

/// Selected chips for one fire of one vertex, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiringMove {
    vertex: VertexId,
    selected: Vec<Chip>,
}

impl FiringMove {
    pub fn new(vertex: VertexId, chips: impl IntoIterator<Item = Chip>) -> Result<Self> {
        let mut selected: Vec<Chip> = chips.into_iter().collect();
        selected.sort_unstable();
        if let Some(w) = selected.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateChip(w[0]));
        }
        Ok(FiringMove { vertex, selected })
    }

    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    pub fn selected(&self) -> &[Chip] {
        &self.selected
    }
}

impl fmt::Display for FiringMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fire {}:", self.vertex)?;
        for c in &self.selected {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

/// Where each chip sits. Vertices with no chips are absent and every
/// per-vertex list is sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    shape: TreeShape,
    chips: BTreeMap<VertexId, Vec<Chip>>,
}

/// Deterministic byte serialization of a configuration: arity, then each
/// occupied vertex in ascending order followed by its sorted labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl Configuration {
    pub fn empty(shape: TreeShape) -> Self {
        Configuration { shape, chips: BTreeMap::new() }
    }

    pub fn from_placements<I, L>(shape: TreeShape, placements: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, L)>,
        L: IntoIterator<Item = Chip>,
    {
        let mut chips: BTreeMap<VertexId, Vec<Chip>> = BTreeMap::new();
        for (v, labels) in placements {
            chips.entry(v).or_default().extend(labels);
        }
        chips.retain(|_, l| !l.is_empty());
        let mut seen: Vec<Chip> = Vec::new();
        for labels in chips.values_mut() {
            labels.sort_unstable();
            seen.extend_from_slice(labels);
        }
        seen.sort_unstable();
        if seen.first() == Some(&0) {
            return Err(Error::ZeroLabel);
        }
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateChip(w[0]));
        }
        Ok(Configuration { shape, chips })
    }

    /// Chips `1..=n` on the root.
    pub fn with_root_chips(shape: TreeShape, n: u32) -> Self {
        let mut chips = BTreeMap::new();
        if n > 0 {
            chips.insert(ROOT, (1..=n).collect());
        }
        Configuration { shape, chips }
    }

    /// Chips `1..=N_{k,ell}` on the root.
    pub fn initial(shape: TreeShape, ell: u32) -> Self {
        let n = shape.vertices_through_layer(ell);
        let n = Chip::try_from(n).expect("chip count exceeds label range");
        Self::with_root_chips(shape, n)
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn chips_at(&self, v: VertexId) -> &[Chip] {
        self.chips.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Occupied vertices in ascending order.
    pub fn occupied(&self) -> impl Iterator<Item = (VertexId, &[Chip])> + '_ {
        self.chips.iter().map(|(v, c)| (*v, c.as_slice()))
    }

    pub fn occupied_count(&self) -> usize {
        self.chips.len()
    }

    pub fn total_chips(&self) -> usize {
        self.chips.values().map(Vec::len).sum()
    }

    /// All labels, ascending.
    pub fn labels(&self) -> Vec<Chip> {
        let mut all: Vec<Chip> = self.chips.values().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    pub fn locate(&self, chip: Chip) -> Option<VertexId> {
        self.chips.iter().find(|(_, l)| l.binary_search(&chip).is_ok()).map(|(v, _)| *v)
    }

    /// Deepest occupied layer, 0 when empty.
    pub fn max_layer(&self) -> u32 {
        self.chips.keys().map(|v| self.shape.layer(*v)).max().unwrap_or(0)
    }

    pub fn counts(&self) -> BTreeMap<VertexId, u64> {
        self.chips.iter().map(|(v, l)| (*v, l.len() as u64)).collect()
    }

    pub fn is_stable(&self) -> bool {
        let k = self.shape.k() as usize;
        self.chips.values().all(|l| l.len() <= k)
    }

    /// The single chip on `v`, if it holds exactly one.
    pub fn single_chip(&self, v: VertexId) -> Option<Chip> {
        match self.chips_at(v) {
            [c] => Some(*c),
            _ => None,
        }
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        let mut bytes = Vec::with_capacity(8 + self.total_chips() * 4 + self.chips.len() * 12);
        bytes.extend_from_slice(&self.shape.k().to_le_bytes());
        for (v, labels) in &self.chips {
            bytes.extend_from_slice(&v.0.to_le_bytes());
            bytes.extend_from_slice(&(labels.len() as u32).to_le_bytes());
            for c in labels {
                bytes.extend_from_slice(&c.to_le_bytes());
            }
        }
        CanonicalKey(bytes)
    }

    /// Fires `mv`, returning the new configuration.
    pub fn fire(&self, mv: &FiringMove) -> Result<Configuration> {
        let mut next = self.clone();
        next.fire_mut(mv)?;
        Ok(next)
    }

    pub(crate) fn fire_mut(&mut self, mv: &FiringMove) -> Result<()> {
        let k = self.shape.k() as usize;
        if mv.selected.len() != k + 1 {
            return Err(Error::WrongSelectionSize { expected: k + 1, got: mv.selected.len() });
        }
        let v = mv.vertex;
        let held = self.chips.get_mut(&v).ok_or(Error::ChipNotPresent { vertex: v, chip: mv.selected[0] })?;
        for c in &mv.selected {
            if held.binary_search(c).is_err() {
                return Err(Error::ChipNotPresent { vertex: v, chip: *c });
            }
        }
        held.retain(|c| mv.selected.binary_search(c).is_err());
        if held.is_empty() {
            self.chips.remove(&v);
        }
        let median = median_slot(k);
        let parent = self.shape.parent(v);
        let mut slot = 1;
        for (i, c) in mv.selected.iter().enumerate() {
            let dest = if i == median {
                parent
            } else {
                let d = self.shape.child(v, slot);
                slot += 1;
                d
            };
            insert_sorted(self.chips.entry(dest).or_default(), *c);
        }
        Ok(())
    }

    /// Number of legal moves, `sum over v of C(m_v, k+1)`.
    pub fn legal_move_count(&self) -> u128 {
        let r = self.shape.k() as u64 + 1;
        self.chips.values().map(|l| binomial_u128(l.len() as u64, r)).sum()
    }

    /// All legal moves, by vertex and then lexicographically by chip set.
    pub fn legal_moves(&self) -> Vec<FiringMove> {
        let r = self.shape.k() as usize + 1;
        let mut moves = Vec::new();
        for (v, labels) in &self.chips {
            if labels.len() < r {
                continue;
            }
            for_each_combination(labels.len(), r, |idx| {
                moves.push(FiringMove { vertex: *v, selected: idx.iter().map(|&i| labels[i]).collect() });
            });
        }
        moves
    }

    /// The `index`th entry of [`Configuration::legal_moves`] without
    /// materializing the list.
    pub fn legal_move_at(&self, mut index: u128) -> Option<FiringMove> {
        let r = self.shape.k() as u64 + 1;
        for (v, labels) in &self.chips {
            let here = binomial_u128(labels.len() as u64, r);
            if index < here {
                let idx = unrank_combination(labels.len() as u64, r, index);
                return Some(FiringMove {
                    vertex: *v,
                    selected: idx.into_iter().map(|i| labels[i as usize]).collect(),
                });
            }
            index -= here;
        }
        None
    }

    /// Chips of the subtree rooted at `subtree_root`, re-indexed so the
    /// subtree root becomes vertex 0.
    pub fn restrict_to_subtree(&self, subtree_root: VertexId) -> Configuration {
        let chips = self
            .chips
            .iter()
            .filter_map(|(v, l)| self.shape.relative(subtree_root, *v).map(|rel| (rel, l.clone())))
            .collect();
        Configuration { shape: self.shape, chips }
    }

    /// Labels replaced by their ranks `1..=n`.
    pub fn normalized(&self) -> Configuration {
        let labels = self.labels();
        let rank = |c: &Chip| labels.binary_search(c).expect("label present") as Chip + 1;
        let chips = self.chips.iter().map(|(v, l)| (*v, l.iter().map(rank).collect())).collect();
        Configuration { shape: self.shape, chips }
    }

    /// Places the chips of `inner` (indexed relative to `subtree_root`)
    /// into this configuration.
    pub fn graft(&mut self, subtree_root: VertexId, inner: &Configuration) -> Result<()> {
        if inner.shape != self.shape {
            return Err(Error::ShapeMismatch);
        }
        for (rel, labels) in &inner.chips {
            let v = self.shape.embed(subtree_root, *rel);
            let held = self.chips.entry(v).or_default();
            for c in labels {
                insert_sorted(held, *c);
            }
        }
        Ok(())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, labels)) in self.chips.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}:[")?;
            for (j, c) in labels.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("}")
    }
}

/// 0-based position of the chip sent to the parent among `k + 1` sorted
/// selected chips: the `ceil((k+1)/2)`th smallest.
#[inline]
pub fn median_slot(k: usize) -> usize {
    (k + 2) / 2 - 1
}

fn insert_sorted(list: &mut Vec<Chip>, c: Chip) {
    let pos = list.binary_search(&c).unwrap_or_else(|p| p);
    list.insert(pos, c);
}

pub(crate) fn binomial_u128(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// Calls `f` with every `r`-subset of `0..n` as ascending indices, in
/// lexicographic order.
pub(crate) fn for_each_combination(n: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let mut i = r;
        while i > 0 && idx[i - 1] == i - 1 + n - r {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The `rank`th `r`-subset of `0..n` in lexicographic order.
fn unrank_combination(n: u64, r: u64, mut rank: u128) -> Vec<u64> {
    let mut out = Vec::with_capacity(r as usize);
    let mut next = 0;
    for slot in 0..r {
        let remaining = r - slot - 1;
        let mut x = next;
        loop {
            let with_x = binomial_u128(n - x - 1, remaining);
            if rank < with_x {
                break;
            }
            rank -= with_x;
            x += 1;
        }
        out.push(x);
        next = x + 1;
    }
    out
}
