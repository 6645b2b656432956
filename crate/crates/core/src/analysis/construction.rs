//! Replay of the lower-bound construction: two scripted root fires that
//! plant "uneasy" chips, symmetric root fires around the stationary chip
//! `m`, then independent stabilization of each child's subtree with every
//! chip that climbs to the root sent straight back.

use alloc::format;
use alloc::vec::Vec;

use crate::bounds::n_chips;
use crate::engine::{for_each_combination, median_slot, stabilize, Chip, Configuration, FiringMove, Policy, StepLimit};
use crate::tree::{TreeShape, VertexId, ROOT};
use crate::{Error, Result};

/// One choice of `i` and the uneasy chips `c` (sent right) and `c'` (sent
/// left), each ascending with `i` entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstructionChoice {
    pub i: usize,
    pub c: Vec<Chip>,
    pub c_prime: Vec<Chip>,
}

/// How each child's subtree is stabilized once the root holds only `m`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SubtreePlan {
    #[default]
    Lowest,
    /// One trace per child, left to right, in coordinates relative to that
    /// child as a looped root.
    Traces(Vec<Vec<FiringMove>>),
}

/// State after the symmetric root phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionPrefix {
    pub config: Configuration,
    pub trace: Vec<FiringMove>,
    pub stationary: Chip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionReplay {
    pub config: Configuration,
    pub trace: Vec<FiringMove>,
    pub stationary: Chip,
    pub after_root_phase: Configuration,
}

struct Params {
    shape: TreeShape,
    n: Chip,
    half: Chip,
    ceil: Chip,
    m: Chip,
    ell: u32,
}

impl Params {
    fn new(k: u32, ell: u32) -> Result<Self> {
        let shape = TreeShape::new(k)?;
        if ell < 3 {
            return Err(Error::OutOfRange(format!("construction needs ell >= 3, got {ell}")));
        }
        let n = Chip::try_from(n_chips(k, ell))
            .map_err(|_| Error::OutOfRange(format!("too many chips for ell = {ell}")))?;
        let half = k / 2;
        let ceil = k - half;
        Ok(Params { shape, n, half, ceil, m: (n - 1) / k * half + 1, ell })
    }

    /// Inclusive range for the `c` chips.
    fn c_range(&self) -> (Chip, Chip) {
        (self.half + 2, self.m - 1)
    }

    /// Inclusive range for the `c'` chips; may be empty.
    fn c_prime_range(&self, i: Chip) -> (Chip, i64) {
        (self.m + 1, i64::from(self.n) - 2 * i64::from(self.ceil) + i64::from(i) - 1)
    }

    fn validate(&self, choice: &ConstructionChoice) -> Result<()> {
        let bad = |what: &str| Err(Error::ChoiceOutOfRange(format!("{what} in {choice:?}")));
        if choice.i > self.half as usize {
            return bad("i above floor(k/2)");
        }
        if choice.c.len() != choice.i || choice.c_prime.len() != choice.i {
            return bad("wrong number of chips");
        }
        let ascending = |v: &[Chip]| v.windows(2).all(|w| w[0] < w[1]);
        if !ascending(&choice.c) || !ascending(&choice.c_prime) {
            return bad("chips not ascending");
        }
        let (lo, hi) = self.c_range();
        if choice.c.iter().any(|&c| c < lo || c > hi) {
            return bad("c outside its range");
        }
        let (lo, hi) = self.c_prime_range(choice.i as Chip);
        if choice.c_prime.iter().any(|&c| c < lo || i64::from(c) > hi) {
            return bad("c' outside its range");
        }
        Ok(())
    }
}

/// Every legal choice at `(k, ell)`; there are `eta(k, ell)` of them.
pub fn construction_choices(k: u32, ell: u32) -> Result<Vec<ConstructionChoice>> {
    let p = Params::new(k, ell)?;
    let mut out = Vec::new();
    for i in 0..=p.half as usize {
        let (c_lo, c_hi) = p.c_range();
        let (cp_lo, cp_hi) = p.c_prime_range(i as Chip);
        let c_pool: Vec<Chip> = (c_lo..=c_hi).collect();
        let cp_pool: Vec<Chip> = if cp_hi < i64::from(cp_lo) { Vec::new() } else { (cp_lo..=cp_hi as Chip).collect() };
        if c_pool.len() < i || cp_pool.len() < i {
            continue;
        }
        let mut cs = Vec::new();
        for_each_combination(c_pool.len(), i, |idx| cs.push(idx.iter().map(|&j| c_pool[j]).collect::<Vec<_>>()));
        let mut cps = Vec::new();
        for_each_combination(cp_pool.len(), i, |idx| cps.push(idx.iter().map(|&j| cp_pool[j]).collect::<Vec<_>>()));
        for c in &cs {
            for cp in &cps {
                out.push(ConstructionChoice { i, c: c.clone(), c_prime: cp.clone() });
            }
        }
    }
    Ok(out)
}

fn fire_logged(config: &mut Configuration, trace: &mut Vec<FiringMove>, mv: FiringMove) -> Result<()> {
    *config = config.fire(&mv).map_err(|e| Error::SymmetryViolated(format!("{mv}: {e}")))?;
    trace.push(mv);
    Ok(())
}

fn ensure_stationary(config: &Configuration, m: Chip) -> Result<()> {
    if config.chips_at(ROOT).contains(&m) {
        Ok(())
    } else {
        Err(Error::SymmetryViolated(format!("stationary chip {m} left the root")))
    }
}

/// Runs the two planting fires and the symmetric root phase, leaving `m`
/// alone on the root and `N_{k,ell-1}` chips on every child.
pub fn construction_prefix(k: u32, ell: u32, choice: &ConstructionChoice) -> Result<ConstructionPrefix> {
    let p = Params::new(k, ell)?;
    p.validate(choice)?;
    let i = choice.i as Chip;
    let mut config = Configuration::initial(p.shape, ell);
    let mut trace = Vec::new();

    let first = (1..=p.half + 1).chain(choice.c.iter().copied()).chain(p.n - p.ceil + i + 1..=p.n);
    fire_logged(&mut config, &mut trace, FiringMove::new(ROOT, first)?)?;

    let d = (1..p.m).filter(|x| *x > p.half && !choice.c.contains(x)).take((p.half - i) as usize);
    let tail = p.n - 2 * p.ceil + i..=p.n - p.ceil + i;
    let second = d.chain(choice.c_prime.iter().copied()).chain(tail);
    fire_logged(&mut config, &mut trace, FiringMove::new(ROOT, second)?)?;
    ensure_stationary(&config, p.m)?;

    loop {
        let held = config.chips_at(ROOT);
        let below: Vec<Chip> = held.iter().copied().filter(|&c| c < p.m).collect();
        let above: Vec<Chip> = held.iter().copied().filter(|&c| c > p.m).collect();
        if below.is_empty() && above.is_empty() {
            break;
        }
        if below.len() < p.half as usize || above.len() < p.ceil as usize {
            return Err(Error::SymmetryViolated(format!(
                "{} chips below and {} above the stationary chip",
                below.len(),
                above.len()
            )));
        }
        let pick = below[..p.half as usize].iter().chain([&p.m]).chain(&above[..p.ceil as usize]).copied();
        fire_logged(&mut config, &mut trace, FiringMove::new(ROOT, pick)?)?;
        ensure_stationary(&config, p.m)?;
    }

    let per_child = p.shape.vertices_through_layer(p.ell - 1) as usize;
    for child in p.shape.children(ROOT) {
        let held = config.chips_at(child).len();
        if held != per_child {
            return Err(Error::SymmetryViolated(format!("child {child} holds {held} chips, expected {per_child}")));
        }
    }
    Ok(ConstructionPrefix { config, trace, stationary: p.m })
}

/// The whole construction for `choice`, ending in a stable configuration
/// with the stationary chip on the root.
pub fn replay_lower_bound_construction(
    k: u32,
    ell: u32,
    choice: &ConstructionChoice,
    plan: &SubtreePlan,
) -> Result<ConstructionReplay> {
    let prefix = construction_prefix(k, ell, choice)?;
    let shape = prefix.config.shape();
    let m = prefix.stationary;
    let children: Vec<VertexId> = shape.children(ROOT).collect();
    let traces: Vec<Vec<FiringMove>> = match plan {
        SubtreePlan::Lowest => children
            .iter()
            .map(|&c| Ok(stabilize(&prefix.config.restrict_to_subtree(c), &Policy::Lowest, StepLimit::Auto)?.trace))
            .collect::<Result<_>>()?,
        SubtreePlan::Traces(t) if t.len() == children.len() => t.clone(),
        SubtreePlan::Traces(t) => {
            return Err(Error::ChoiceOutOfRange(format!("{} subtree traces for {} children", t.len(), children.len())))
        }
    };

    let mut config = prefix.config.clone();
    let mut trace = prefix.trace.clone();
    let mut cursor = alloc::vec![0usize; children.len()];
    let mut pending: Vec<Option<Chip>> = alloc::vec![None; children.len()];
    let median = median_slot(k as usize);
    loop {
        let mut progressed = false;
        for (j, &child) in children.iter().enumerate() {
            while pending[j].is_none() && cursor[j] < traces[j].len() {
                let rel = &traces[j][cursor[j]];
                cursor[j] += 1;
                let mv = FiringMove::new(shape.embed(child, rel.vertex()), rel.selected().iter().copied())?;
                if rel.vertex().is_root() {
                    // the subtree's self-loop is really the root: wait for it
                    pending[j] = Some(rel.selected()[median]);
                }
                fire_logged(&mut config, &mut trace, mv)?;
                progressed = true;
            }
        }
        if pending.iter().all(Option::is_some) {
            let sent: Vec<Chip> = pending.iter().map(|c| c.expect("all pending")).collect();
            let mut sorted = sent.clone();
            sorted.insert(shape.half() as usize, m);
            if !sorted.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::SymmetryViolated(format!("chips {sent:?} cannot return around {m}")));
            }
            fire_logged(&mut config, &mut trace, FiringMove::new(ROOT, sorted)?)?;
            ensure_stationary(&config, m)?;
            pending.iter_mut().for_each(|p| *p = None);
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    if pending.iter().any(Option::is_some) || !config.is_stable() {
        return Err(Error::SymmetryViolated(format!("subtrees did not finish together: pending {pending:?}")));
    }
    Ok(ConstructionReplay { config, trace, stationary: m, after_root_phase: prefix.config })
}
