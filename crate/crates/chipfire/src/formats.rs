//! Configuration JSON, firing scripts, enumeration dumps and the JSON shapes
//! of reports.
//!
//! A configuration is `{"k": 2, "chips": {"0": [1, 3], "2": [2]}}`. A script
//! has one `fire <vertex>: <chips...>` per line; `#` starts a comment.

use std::collections::BTreeMap;
use std::io::Write;

use chipfire_core::analysis::PropertyVerdict;
use chipfire_core::bounds::BoundReport;
use chipfire_core::enumeration::{EnumerationResult, Limits};
use chipfire_core::{Chip, Configuration, FiringMove, TreeShape, VertexId};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub k: u32,
    pub chips: BTreeMap<u64, Vec<Chip>>,
}

impl From<&Configuration> for ConfigJson {
    fn from(c: &Configuration) -> Self {
        ConfigJson { k: c.shape().k(), chips: c.occupied().map(|(v, l)| (v.0, l.to_vec())).collect() }
    }
}

impl TryFrom<ConfigJson> for Configuration {
    type Error = Error;

    fn try_from(json: ConfigJson) -> Result<Self> {
        let shape = TreeShape::new(json.k)?;
        Ok(Configuration::from_placements(shape, json.chips.into_iter().map(|(v, l)| (VertexId(v), l)))?)
    }
}

pub fn parse_config(text: &str) -> Result<Configuration> {
    serde_json::from_str::<ConfigJson>(text)?.try_into()
}

pub fn config_to_json(c: &Configuration) -> String {
    serde_json::to_string(&ConfigJson::from(c)).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveJson {
    pub vertex: u64,
    pub chips: Vec<Chip>,
}

impl From<&FiringMove> for MoveJson {
    fn from(m: &FiringMove) -> Self {
        MoveJson { vertex: m.vertex().0, chips: m.selected().to_vec() }
    }
}

pub fn parse_script(text: &str) -> Result<Vec<FiringMove>> {
    let mut moves = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Script { line: i + 1, msg: msg.to_string() };
        let body = line.strip_prefix("fire").ok_or_else(|| err("expected `fire <vertex>: <chips>`"))?;
        let (vertex, chips) = body.split_once(':').ok_or_else(|| err("missing `:` after the vertex"))?;
        let vertex: u64 = vertex.trim().parse().map_err(|_| err("vertex is not a number"))?;
        let chips = chips
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<Chip>().map_err(|_| err("chip label is not a number")))
            .collect::<Result<Vec<_>>>()?;
        moves.push(FiringMove::new(VertexId(vertex), chips).map_err(|e| err(&e.to_string()))?);
    }
    Ok(moves)
}

pub fn format_script(moves: &[FiringMove]) -> String {
    moves.iter().map(|m| format!("{m}\n")).collect()
}

#[derive(Debug, Serialize)]
struct DumpSummary {
    record: &'static str,
    format_version: u32,
    k: u32,
    stable: usize,
    states_explored: u64,
    memo_hits: u64,
    truncated: bool,
    max_states: u64,
    max_stable: u64,
}

/// Newline-delimited JSON: one stable configuration per line, then a
/// summary record.
pub fn write_dump(out: &mut dyn Write, k: u32, result: &EnumerationResult, limits: Limits) -> std::io::Result<()> {
    for c in &result.stable_set {
        writeln!(out, "{}", config_to_json(c))?;
    }
    let summary = DumpSummary {
        record: "summary",
        format_version: FORMAT_VERSION,
        k,
        stable: result.stable_set.len(),
        states_explored: result.states_explored,
        memo_hits: result.memo_hits,
        truncated: result.truncated,
        max_states: limits.max_states,
        max_stable: limits.max_stable,
    };
    writeln!(out, "{}", serde_json::to_string(&summary).expect("plain data serializes"))
}

/// Reads the configurations of a dump back, skipping the summary.
pub fn read_dump(text: &str) -> Result<Vec<Configuration>> {
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let value: serde_json::Value = serde_json::from_str(line)?;
        if value.get("record").is_some() {
            continue;
        }
        out.push(serde_json::from_value::<ConfigJson>(value)?.try_into()?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundJson {
    pub kind: &'static str,
    pub k: u32,
    pub ell: u32,
    pub value_decimal: String,
    pub mantissa: String,
    pub exponent: u64,
}

impl From<&BoundReport> for BoundJson {
    fn from(r: &BoundReport) -> Self {
        let sci = r.sci();
        BoundJson {
            kind: r.kind.name(),
            k: r.k,
            ell: r.ell,
            value_decimal: r.value.to_string(),
            mantissa: sci.mantissa(),
            exponent: sci.exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictJson {
    pub property: &'static str,
    pub holds: bool,
    pub checked: usize,
    /// `[vertex, chip]` pairs.
    pub witnesses: Vec<(u64, Chip)>,
}

impl From<&PropertyVerdict> for VerdictJson {
    fn from(v: &PropertyVerdict) -> Self {
        VerdictJson {
            property: v.property.name(),
            holds: v.holds,
            checked: v.checked,
            witnesses: v.witnesses.iter().map(|(vx, c)| (vx.0, *c)).collect(),
        }
    }
}

/// A flattened permutation as one comma-separated line.
pub fn permutation_csv(seq: &[Chip]) -> String {
    seq.iter().map(Chip::to_string).collect::<Vec<_>>().join(",")
}
