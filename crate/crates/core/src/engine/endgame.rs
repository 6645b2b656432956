//! The endgame: root with `k + 1` chips, `k` chips on every vertex of
//! layers `2..ell`, nothing deeper. From there every fire is forced and the
//! firing order does not matter, so the stable result is computed by waves.

use alloc::vec::Vec;

use super::{Chip, Configuration, FiringMove};
use crate::tree::{TreeShape, VertexId};
use crate::{Error, Result};

/// A configuration validated to have the endgame-start shape for `ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndgameStart {
    config: Configuration,
    ell: u32,
}

impl EndgameStart {
    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn into_config(self) -> Configuration {
        self.config
    }
}

/// Vertices whose chip count departs from the endgame-start shape.
pub(crate) fn endgame_offenders(
    shape: TreeShape,
    ell: u32,
    counts: impl Iterator<Item = (VertexId, usize)>,
) -> Vec<VertexId> {
    let k = shape.k() as usize;
    let inner = shape.vertices_through_layer(ell.saturating_sub(1));
    let mut offenders = Vec::new();
    let mut next_expected: u64 = 0;
    for (v, held) in counts {
        // vertices skipped over are empty but should hold chips
        offenders.extend((next_expected..v.0.min(inner)).map(VertexId));
        next_expected = next_expected.max(v.0 + 1);
        let want = if v.0 == 0 {
            k + 1
        } else if v.0 < inner {
            k
        } else {
            0
        };
        if held != want {
            offenders.push(v);
        }
    }
    offenders.extend((next_expected..inner).map(VertexId));
    offenders
}

pub fn endgame_start(ell: u32, config: Configuration) -> Result<EndgameStart> {
    if ell < 2 {
        return Err(Error::OutOfRange(alloc::format!("endgame depth {ell}")));
    }
    let offenders = endgame_offenders(config.shape(), ell, config.occupied().map(|(v, l)| (v, l.len())));
    if !offenders.is_empty() {
        return Err(Error::NotEndgameShape(offenders));
    }
    Ok(EndgameStart { config, ell })
}

/// Endgame start holding `labels` in order: the first `k + 1` on the root,
/// then `k` on each vertex of layers `2..ell` by index.
pub fn endgame_from_labels(shape: TreeShape, ell: u32, labels: &[Chip]) -> Result<EndgameStart> {
    if ell < 2 {
        return Err(Error::OutOfRange(alloc::format!("endgame depth {ell}")));
    }
    let k = shape.k() as usize;
    let expected = shape.vertices_through_layer(ell);
    if labels.len() as u64 != expected {
        return Err(Error::OutOfRange(alloc::format!("{} labels for an endgame of {expected} chips", labels.len())));
    }
    let (root, rest) = labels.split_at(k + 1);
    let placements =
        core::iter::once((VertexId(0), root)).chain(rest.chunks(k).zip(1u64..).map(|(c, v)| (VertexId(v), c)));
    let config = Configuration::from_placements(shape, placements.map(|(v, c)| (v, c.iter().copied())))?;
    endgame_start(ell, config)
}

/// Runs the endgame wave by wave: wave `w` fires vertices
/// `0..N_{k,ell-w}` once each, in index order.
pub fn run_waves(start: &EndgameStart) -> Result<Configuration> {
    run_waves_traced(start).map(|(c, _)| c)
}

pub fn run_waves_traced(start: &EndgameStart) -> Result<(Configuration, Vec<FiringMove>)> {
    let shape = start.config.shape();
    let k = shape.k() as usize;
    let mut cur = start.config.clone();
    let mut trace = Vec::new();
    for wave in 1..start.ell {
        let last = shape.vertices_through_layer(start.ell - wave);
        for v in (0..last).map(VertexId) {
            let held = cur.chips_at(v);
            if held.len() != k + 1 {
                return Err(Error::VertexNotReady { wave: wave as usize, vertex: v, held: held.len() });
            }
            let mv = FiringMove { vertex: v, selected: held.to_vec() };
            cur.fire_mut(&mv)?;
            trace.push(mv);
        }
    }
    debug_assert!(cur.is_stable());
    Ok((cur, trace))
}
