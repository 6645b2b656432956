//! Index arithmetic for the infinite looped k-ary tree.
//!
//! Nothing is materialized: a vertex is its breadth-first index. The root is
//! vertex 0 on layer 1 and is its own parent.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Arity of the tree. Always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeShape {
    k: u32,
}

/// Breadth-first vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexId(pub u64);

pub const ROOT: VertexId = VertexId(0);

impl VertexId {
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_root(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for VertexId {
    fn from(v: u64) -> Self {
        VertexId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl TreeShape {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArity(k));
        }
        Ok(TreeShape { k })
    }

    #[inline]
    pub fn k(self) -> u32 {
        self.k
    }

    #[inline]
    fn k64(self) -> u64 {
        u64::from(self.k)
    }

    /// Number of left children, `floor(k/2)`.
    #[inline]
    pub fn half(self) -> u32 {
        self.k / 2
    }

    /// `(k^ell - 1) / (k - 1)`: the number of vertices on layers `1..=ell`.
    /// Panics on `u64` overflow.
    pub fn vertices_through_layer(self, ell: u32) -> u64 {
        let mut total: u64 = 0;
        let mut width: u64 = 1;
        for _ in 0..ell {
            total = total.checked_add(width).expect("vertex count overflows u64");
            width = width.saturating_mul(self.k64());
        }
        total
    }

    /// Children of `v` from left to right.
    pub fn children(self, v: VertexId) -> impl Iterator<Item = VertexId> + Clone {
        let base = self.k64() * v.0;
        (1..=self.k64()).map(move |a| VertexId(base + a))
    }

    /// The `a`th child of `v`, `a` in `1..=k`.
    #[inline]
    pub fn child(self, v: VertexId, a: u32) -> VertexId {
        debug_assert!(a >= 1 && a <= self.k);
        VertexId(self.k64() * v.0 + u64::from(a))
    }

    /// Parent of `v`; the root is its own parent.
    #[inline]
    pub fn parent(self, v: VertexId) -> VertexId {
        if v.0 == 0 {
            v
        } else {
            VertexId((v.0 - 1) / self.k64())
        }
    }

    /// Layer of `v`, with the root on layer 1.
    pub fn layer(self, v: VertexId) -> u32 {
        let mut layer = 1;
        let mut cur = v;
        while !cur.is_root() {
            cur = self.parent(cur);
            layer += 1;
        }
        layer
    }

    /// Slot `a` in `1..=k` such that `v = k*parent(v) + a`.
    pub fn child_index(self, v: VertexId) -> Result<u32> {
        if v.is_root() {
            return Err(Error::RootHasNoSlot);
        }
        Ok(((v.0 - 1) % self.k64()) as u32 + 1)
    }

    pub fn is_left_child(self, v: VertexId) -> bool {
        matches!(self.child_index(v), Ok(a) if a <= self.half())
    }

    pub fn is_right_child(self, v: VertexId) -> bool {
        matches!(self.child_index(v), Ok(a) if a > self.half())
    }

    /// Follow the leftmost (or rightmost) child `depth` times.
    pub fn straight_descendant(self, v: VertexId, side: Side, depth: u32) -> VertexId {
        let slot = match side {
            Side::Left => 1,
            Side::Right => self.k,
        };
        (0..depth).fold(v, |cur, _| self.child(cur, slot))
    }

    /// Zigzag of `length` vertices from `start`.
    ///
    /// A left child steps to its rightmost child and a right child to its
    /// leftmost child. The root has no slot; it is treated as a right child
    /// (first step to the leftmost child) unless `root_first` is
    /// [`Side::Right`].
    pub fn zigzag_path(self, start: VertexId, length: usize, root_first: Side) -> Vec<VertexId> {
        let mut path = Vec::with_capacity(length);
        let mut cur = start;
        for _ in 0..length {
            path.push(cur);
            let next_side = if cur.is_root() {
                root_first
            } else if self.is_left_child(cur) {
                Side::Right
            } else {
                Side::Left
            };
            cur = self.straight_descendant(cur, next_side, 1);
        }
        path
    }

    /// Child slots on the path from `ancestor` down to `v`, or `None` when
    /// `v` is not in the subtree of `ancestor`.
    pub fn path_from(self, ancestor: VertexId, v: VertexId) -> Option<Vec<u32>> {
        let mut slots = Vec::new();
        let mut cur = v;
        while cur != ancestor {
            if cur.is_root() || cur.0 < ancestor.0 {
                return None;
            }
            slots.push(self.child_index(cur).ok()?);
            cur = self.parent(cur);
        }
        slots.reverse();
        Some(slots)
    }

    /// Index of `v` inside the subtree rooted at `subtree_root`, where the
    /// subtree root becomes vertex 0.
    pub fn relative(self, subtree_root: VertexId, v: VertexId) -> Option<VertexId> {
        let slots = self.path_from(subtree_root, v)?;
        Some(slots.into_iter().fold(ROOT, |cur, a| self.child(cur, a)))
    }

    /// Inverse of [`TreeShape::relative`].
    pub fn embed(self, subtree_root: VertexId, rel: VertexId) -> VertexId {
        let slots = self.path_from(ROOT, rel).expect("every vertex descends from the root");
        slots.into_iter().fold(subtree_root, |cur, a| self.child(cur, a))
    }

    pub fn is_in_subtree(self, subtree_root: VertexId, v: VertexId) -> bool {
        self.path_from(subtree_root, v).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn shape(k: u32) -> TreeShape {
        TreeShape::new(k).unwrap()
    }

    fn ids(v: &[u64]) -> Vec<VertexId> {
        v.iter().copied().map(VertexId).collect()
    }

    #[test]
    fn arity_below_two_rejected() {
        assert_eq!(TreeShape::new(1), Err(Error::InvalidArity(1)));
        assert_eq!(TreeShape::new(0), Err(Error::InvalidArity(0)));
    }

    #[test]
    fn children_examples() {
        assert_eq!(shape(4).children(VertexId(0)).collect::<Vec<_>>(), ids(&[1, 2, 3, 4]));
        assert_eq!(shape(2).children(VertexId(2)).collect::<Vec<_>>(), ids(&[5, 6]));
        assert_eq!(shape(3).children(VertexId(5)).collect::<Vec<_>>(), ids(&[16, 17, 18]));
    }

    #[test]
    fn parent_examples() {
        assert_eq!(shape(4).parent(VertexId(4)), VertexId(0));
        assert_eq!(shape(2).parent(VertexId(0)), VertexId(0));
        assert_eq!(shape(3).parent(VertexId(17)), VertexId(5));
    }

    #[test]
    fn layer_examples() {
        assert_eq!(shape(2).layer(VertexId(0)), 1);
        assert_eq!(shape(2).layer(VertexId(6)), 3);
        assert_eq!(shape(4).layer(VertexId(5)), 3);
        assert_eq!(shape(4).layer(VertexId(4)), 2);
    }

    #[test]
    fn child_index_examples() {
        let s4 = shape(4);
        assert_eq!(s4.child_index(VertexId(3)), Ok(3));
        assert!(s4.is_right_child(VertexId(3)));
        assert_eq!(shape(2).child_index(VertexId(1)), Ok(1));
        assert!(shape(2).is_left_child(VertexId(1)));
        assert_eq!(shape(3).child_index(VertexId(2)), Ok(2));
        assert!(shape(3).is_right_child(VertexId(2)));
        assert_eq!(s4.child_index(VertexId(0)), Err(Error::RootHasNoSlot));
        assert!(!s4.is_left_child(VertexId(0)) && !s4.is_right_child(VertexId(0)));
    }

    #[test]
    fn straight_descendant_examples() {
        assert_eq!(shape(2).straight_descendant(VertexId(0), Side::Left, 2), VertexId(3));
        assert_eq!(shape(4).straight_descendant(VertexId(0), Side::Right, 2), VertexId(20));
        for k in 2..6 {
            assert_eq!(shape(k).straight_descendant(VertexId(7), Side::Right, 0), VertexId(7));
        }
    }

    #[test]
    fn zigzag_examples() {
        assert_eq!(shape(3).zigzag_path(ROOT, 3, Side::Left), ids(&[0, 1, 6]));
        assert_eq!(shape(2).zigzag_path(ROOT, 1, Side::Left), ids(&[0]));
        assert_eq!(shape(4).zigzag_path(ROOT, 3, Side::Left), ids(&[0, 1, 8]));
        // mirrored start
        assert_eq!(shape(4).zigzag_path(ROOT, 3, Side::Right), ids(&[0, 4, 17]));
    }

    #[test]
    fn zigzag_alternates_after_first_step() {
        for k in 2..7 {
            let s = shape(k);
            for first in [Side::Left, Side::Right] {
                let path = s.zigzag_path(ROOT, 8, first);
                for pair in path[1..].windows(2) {
                    assert_ne!(s.is_left_child(pair[0]), s.is_left_child(pair[1]));
                    assert_eq!(s.parent(pair[1]), pair[0]);
                }
            }
        }
    }

    #[test]
    fn index_arithmetic_round_trips_exhaustively() {
        for k in 2..=6u32 {
            let s = shape(k);
            for v in 0..10_000u64 {
                let v = VertexId(v);
                let layer = s.layer(v);
                for (a, c) in (1..=k).zip(s.children(v)) {
                    assert_eq!(s.parent(c), v);
                    assert_eq!(s.child_index(c), Ok(a));
                    assert_eq!(s.layer(c), layer + 1);
                }
                // layer brackets the breadth-first index
                assert!(s.vertices_through_layer(layer - 1) <= v.0);
                assert!(v.0 < s.vertices_through_layer(layer));
            }
        }
    }

    #[test]
    fn relative_and_embed_are_inverse() {
        let s = shape(3);
        let root = VertexId(5);
        for rel in 0..40u64 {
            let v = s.embed(root, VertexId(rel));
            assert!(s.is_in_subtree(root, v));
            assert_eq!(s.relative(root, v), Some(VertexId(rel)));
        }
        assert_eq!(s.relative(root, VertexId(6)), None);
        assert_eq!(s.relative(root, VertexId(1)), None);
        assert_eq!(s.path_from(ROOT, VertexId(17)), Some(vec![1, 2, 2]));
    }
}
