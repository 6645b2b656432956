use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::unlabeled::{unlabeled_stabilize, DEFAULT_UNLABELED_GUARD};
use super::{Configuration, FiringMove};
use crate::tree::VertexId;
use crate::{Error, Result};

/// How [`stabilize`] picks the next move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Policy {
    /// Replay the given moves; the configuration must be stable afterwards.
    Script(Vec<FiringMove>),
    /// Always the first entry of [`Configuration::legal_moves`].
    Lowest,
    /// Uniform over the legal moves, driven by ChaCha8 seeded with `seed`.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepLimit {
    /// Ten times the number of fires of the unlabeled stabilization.
    #[default]
    Auto,
    Fires(u64),
}

impl StepLimit {
    fn resolve(self, config: &Configuration) -> Result<u64> {
        match self {
            StepLimit::Fires(n) => Ok(n),
            StepLimit::Auto => {
                let out = unlabeled_stabilize(config.shape(), config.counts(), DEFAULT_UNLABELED_GUARD)?;
                Ok(out.total_fires().saturating_mul(10))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilization {
    pub config: Configuration,
    pub trace: Vec<FiringMove>,
}

impl Stabilization {
    pub fn odometer(&self) -> BTreeMap<VertexId, u64> {
        odometer(&self.trace)
    }
}

/// Fires per vertex in a trace.
pub fn odometer(trace: &[FiringMove]) -> BTreeMap<VertexId, u64> {
    let mut out = BTreeMap::new();
    for mv in trace {
        *out.entry(mv.vertex()).or_default() += 1;
    }
    out
}

/// Applies `moves` in order without requiring a stable result.
pub fn replay(config: &Configuration, moves: &[FiringMove]) -> Result<Configuration> {
    let mut cur = config.clone();
    for (step, mv) in moves.iter().enumerate() {
        cur.fire_mut(mv).map_err(|e| Error::ScriptIllegal { step, reason: format!("{e}") })?;
    }
    Ok(cur)
}

pub fn stabilize(config: &Configuration, policy: &Policy, limit: StepLimit) -> Result<Stabilization> {
    let limit = limit.resolve(config)?;
    let mut cur = config.clone();
    let mut trace = Vec::new();
    match policy {
        Policy::Script(moves) => {
            if moves.len() as u64 > limit {
                return Err(Error::StepLimitExceeded(limit));
            }
            cur = replay(&cur, moves)?;
            if !cur.is_stable() {
                return Err(Error::ScriptIncomplete);
            }
            trace.extend(moves.iter().cloned());
        }
        Policy::Lowest => {
            while let Some(mv) = cur.legal_move_at(0) {
                push_move(&mut cur, &mut trace, mv, limit)?;
            }
        }
        Policy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            loop {
                let count = cur.legal_move_count();
                if count == 0 {
                    break;
                }
                let pick = rng.random_range(0..count);
                let mv = cur.legal_move_at(pick).expect("index below move count");
                push_move(&mut cur, &mut trace, mv, limit)?;
            }
        }
    }
    Ok(Stabilization { config: cur, trace })
}

fn push_move(cur: &mut Configuration, trace: &mut Vec<FiringMove>, mv: FiringMove, limit: u64) -> Result<()> {
    if trace.len() as u64 >= limit {
        return Err(Error::StepLimitExceeded(limit));
    }
    cur.fire_mut(&mv)?;
    trace.push(mv);
    Ok(())
}
