//! Labeled chip-firing on infinite looped k-ary trees.
//!
//! Vertices are breadth-first indices (root = 0, the `j`th child of `v` is
//! `k*v + j`). Chips are distinct positive labels. A vertex holding at least
//! `k + 1` chips may fire any `k + 1` of them: the median one travels to the
//! parent (the root keeps it through its self-loop) and the remaining `k` go
//! to the children in ascending order.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and the multi-threaded enumerator live in the `chipfire` crate.

#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

pub mod analysis;
pub mod bounds;
pub mod engine;
pub mod enumeration;
mod error;
pub mod tree;

pub use crate::engine::{Chip, Configuration, FiringMove};
pub use crate::error::Error;
pub use crate::tree::{Side, TreeShape, VertexId};

pub type Result<T, E = Error> = core::result::Result<T, E>;
