use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use chipfire_core::analysis::{
    check, flatten, inversions, replay_lower_bound_construction, ConstructionChoice, FlattenRule, Property, SubtreePlan,
};
use chipfire_core::bounds::{
    binary_zigzag_bound, lower_bound_binary, lower_bound_general, naive_bound, zigzag_bound, BoundReport, Target,
};
use chipfire_core::engine::{endgame_from_labels, stabilize, unlabeled_profile, unlabeled_simulate, Policy, StepLimit};
use chipfire_core::enumeration::{verify_endgame_confluence, EnumerationOptions, Limits, SearchOrder};
use chipfire_core::{Chip, Configuration, TreeShape};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::*;
use crate::formats::{
    parse_config, parse_script, permutation_csv, read_dump, write_dump, BoundJson, ConfigJson, MoveJson, VerdictJson,
};
use crate::parallel::enumerate_parallel;
use crate::{Result, FORMAT_VERSION};

pub(super) fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Simulate(a) => simulate(a, out),
        Command::Enumerate(a) => enumerate(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Flatten(a) => flatten_cmd(a, out),
        Command::Construct(a) => construct(a, out),
        Command::Oracle(OracleCommand::Unlabeled(a)) => oracle_unlabeled(a, out),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn io(e: std::io::Error) -> Error {
    Error::Io { path: "<output>".into(), source: e }
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(out, "{text}").map_err(io)
}

fn emit_text(out: &mut dyn Write, lines: &[String]) -> Result<()> {
    writeln!(out, "format_version: {FORMAT_VERSION}").map_err(io)?;
    for line in lines {
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

fn shape(k: u32) -> Result<TreeShape> {
    Ok(TreeShape::new(k)?)
}

fn seed_or_draw(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

#[derive(Serialize)]
struct SimulateJson {
    format_version: u32,
    k: u32,
    ell: u32,
    policy: &'static str,
    seed: Option<u64>,
    fires: usize,
    config: ConfigJson,
    trace: Vec<MoveJson>,
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let start = Configuration::initial(shape(a.depth.k)?, a.depth.ell);
    let (policy, name, seed) = match (&a.script, a.policy) {
        (Some(path), _) => (Policy::Script(parse_script(&read(path)?)?), "script", None),
        (None, PolicyArg::Lowest) => (Policy::Lowest, "lowest", None),
        (None, PolicyArg::Random) => {
            let seed = seed_or_draw(a.seed);
            (Policy::Random { seed }, "random", Some(seed))
        }
    };
    let done = stabilize(&start, &policy, StepLimit::Auto)?;
    if a.json {
        emit_json(
            out,
            &SimulateJson {
                format_version: FORMAT_VERSION,
                k: a.depth.k,
                ell: a.depth.ell,
                policy: name,
                seed,
                fires: done.trace.len(),
                config: (&done.config).into(),
                trace: done.trace.iter().map(MoveJson::from).collect(),
            },
        )?;
    } else {
        let mut lines = vec![format!("k: {}", a.depth.k), format!("ell: {}", a.depth.ell), format!("policy: {name}")];
        lines.extend(seed.map(|s| format!("seed: {s}")));
        lines.push(format!("fires: {}", done.trace.len()));
        lines.push(format!("stable: {}", done.config));
        lines.push("trace:".into());
        lines.extend(done.trace.iter().map(|m| m.to_string()));
        emit_text(out, &lines)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EnumerateJson {
    format_version: u32,
    k: u32,
    ell: u32,
    z: usize,
    truncated: bool,
    states_explored: u64,
    memo_hits: u64,
    endgame_shortcut: bool,
    max_states: u64,
    max_stable: u64,
}

fn enumerate(a: EnumerateArgs, out: &mut dyn Write) -> Result<i32> {
    let start = Configuration::initial(shape(a.depth.k)?, a.depth.ell);
    let limits = Limits { max_states: a.max_states, max_stable: a.max_stable };
    let options = EnumerationOptions {
        limits,
        endgame_shortcut: !a.no_endgame_shortcut,
        order: match a.order {
            OrderArg::Bfs => SearchOrder::BreadthFirst,
            OrderArg::Dfs => SearchOrder::DepthFirst,
        },
        record_witnesses: false,
    };
    let result = enumerate_parallel(&start, &options, a.threads)?;
    if let Some(path) = &a.dump {
        let file = fs::File::create(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        let mut w = std::io::BufWriter::new(file);
        write_dump(&mut w, a.depth.k, &result, limits)
            .and_then(|_| w.flush())
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    }
    let z = result.stable_set.len();
    if a.json {
        emit_json(
            out,
            &EnumerateJson {
                format_version: FORMAT_VERSION,
                k: a.depth.k,
                ell: a.depth.ell,
                z,
                truncated: result.truncated,
                states_explored: result.states_explored,
                memo_hits: result.memo_hits,
                endgame_shortcut: options.endgame_shortcut,
                max_states: limits.max_states,
                max_stable: limits.max_stable,
            },
        )?;
    } else {
        let count = if result.truncated { format!("Z >= {z} (truncated)") } else { format!("Z = {z}") };
        emit_text(
            out,
            &[
                count,
                format!("states_explored: {}", result.states_explored),
                format!("memo_hits: {}", result.memo_hits),
                format!("truncated: {}", result.truncated),
            ],
        )?;
    }
    Ok(if result.truncated { EXIT_TRUNCATED } else { EXIT_OK })
}

#[derive(Serialize)]
struct BoundsJson {
    format_version: u32,
    reports: Vec<BoundJson>,
}

fn bounds(a: BoundsArgs, out: &mut dyn Write) -> Result<i32> {
    let (k, ell) = (a.depth.k, a.depth.ell);
    let target = match a.target {
        TargetArg::T => Target::T,
        TargetArg::Z => Target::Z,
    };
    let binary_only = |name: &str| -> Result<()> {
        if k == 2 {
            Ok(())
        } else {
            Err(Error::Usage(format!("--which {name} needs --k 2")))
        }
    };
    let reports: Vec<BoundReport> = match a.which {
        WhichArg::Naive => vec![naive_bound(k, ell)?],
        WhichArg::Zigzag => vec![zigzag_bound(k, ell, target)?],
        WhichArg::Binary => {
            binary_only("binary")?;
            vec![binary_zigzag_bound(ell, target)?]
        }
        WhichArg::LowerBinary => {
            binary_only("lower-binary")?;
            vec![lower_bound_binary(ell)?]
        }
        WhichArg::LowerGeneral => vec![lower_bound_general(k, ell)?],
        WhichArg::All => {
            let mut all = vec![naive_bound(k, ell), zigzag_bound(k, ell, Target::T), zigzag_bound(k, ell, Target::Z)];
            if k == 2 {
                all.push(binary_zigzag_bound(ell, Target::T));
                all.push(binary_zigzag_bound(ell, Target::Z));
                all.push(lower_bound_binary(ell));
            }
            all.push(lower_bound_general(k, ell));
            // bounds outside their stated range are left out
            all.into_iter().filter_map(|r| r.ok()).collect()
        }
    };
    if a.json {
        emit_json(
            out,
            &BoundsJson { format_version: FORMAT_VERSION, reports: reports.iter().map(BoundJson::from).collect() },
        )?;
    } else {
        let lines: Vec<String> = reports
            .iter()
            .map(|r| format!("{}(k={}, ell={}) = {} ({})", r.kind.name(), r.k, r.ell, r.value, r.sci()))
            .collect();
        emit_text(out, &lines)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Violation {
    detail: String,
    config: Option<ConfigJson>,
    witnesses: Vec<(u64, Chip)>,
}

#[derive(Serialize)]
struct VerifyJson {
    format_version: u32,
    property: &'static str,
    k: u32,
    ell: u32,
    source: String,
    seed: Option<u64>,
    cases: u64,
    checked: u64,
    holds: bool,
    violations: Vec<Violation>,
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let (k, ell) = (a.depth.k, a.depth.ell);
    let shape = shape(k)?;
    let limits = Limits { max_states: a.max_states, ..Limits::default() };
    let name = match a.property {
        PropertyArg::Minmax => "minmax",
        PropertyArg::ZigzagRelation => "zigzag-relation",
        PropertyArg::Ballot => "ballot",
        PropertyArg::EndgameConfluence => "endgame-confluence",
        PropertyArg::UnlabeledProfile => "unlabeled-profile",
    };
    let mut report = VerifyJson {
        format_version: FORMAT_VERSION,
        property: name,
        k,
        ell,
        source: String::new(),
        seed: None,
        cases: 0,
        checked: 0,
        holds: true,
        violations: Vec::new(),
    };
    match a.property {
        PropertyArg::Minmax | PropertyArg::ZigzagRelation | PropertyArg::Ballot => {
            let property = match a.property {
                PropertyArg::Minmax => Property::MinMaxDescendants,
                PropertyArg::ZigzagRelation => Property::ZigzagRelation,
                _ => Property::Ballot,
            };
            let start = Configuration::initial(shape, ell);
            let configs: Vec<Configuration> = match a.samples {
                Some(n) => {
                    let seed = seed_or_draw(a.seed);
                    report.seed = Some(seed);
                    report.source = format!("{n} random stabilizations");
                    (0..n)
                        .map(|i| {
                            let policy = Policy::Random { seed: seed.wrapping_add(i) };
                            Ok(stabilize(&start, &policy, StepLimit::Auto)?.config)
                        })
                        .collect::<Result<_>>()?
                }
                None => {
                    let options = EnumerationOptions::with_limits(limits);
                    let result = enumerate_parallel(&start, &options, a.threads)?;
                    if result.truncated {
                        return Err(chipfire_core::Error::Truncated.into());
                    }
                    report.source = "all stable configurations".into();
                    result.stable_set.into_iter().collect()
                }
            };
            for c in &configs {
                let verdict = VerdictJson::from(&check(property, c));
                report.cases += 1;
                report.checked += verdict.checked as u64;
                if !verdict.holds {
                    report.violations.push(Violation {
                        detail: format!("{c}"),
                        config: Some(c.into()),
                        witnesses: verdict.witnesses,
                    });
                }
            }
        }
        PropertyArg::EndgameConfluence => {
            if ell < 2 {
                return Err(Error::Usage("endgame-confluence needs --ell 2 or more".into()));
            }
            let seed = seed_or_draw(a.seed);
            let n = a.samples.unwrap_or(20);
            report.seed = Some(seed);
            report.source = format!("{n} random endgame labelings");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let total = shape.vertices_through_layer(ell) as Chip;
            for _ in 0..n {
                let mut labels: Vec<Chip> = (1..=total).collect();
                labels.shuffle(&mut rng);
                let start = endgame_from_labels(shape, ell, &labels)?.into_config();
                report.cases += 1;
                report.checked += 1;
                if !verify_endgame_confluence(ell, &start, limits)? {
                    report.violations.push(Violation {
                        detail: format!("{start}"),
                        config: Some((&start).into()),
                        witnesses: Vec::new(),
                    });
                }
            }
        }
        PropertyArg::UnlabeledProfile => {
            let last = shape.vertices_through_layer(ell);
            report.source = format!("chip counts 1..={last}");
            for n in 1..=last {
                report.cases += 1;
                let counts = unlabeled_simulate(shape, n)?;
                let profile = unlabeled_profile(shape, n);
                for (v, c) in &counts {
                    report.checked += 1;
                    let want = profile.counts.get(shape.layer(*v) as usize - 1).copied();
                    if want != Some(*c) {
                        report.violations.push(Violation {
                            detail: format!("{n} chips: vertex {v} holds {c}, closed form {want:?}"),
                            config: None,
                            witnesses: Vec::new(),
                        });
                    }
                }
                let layers_used = counts.keys().map(|v| shape.layer(*v)).max().unwrap_or(0);
                if layers_used as usize != profile.counts.len() {
                    report.violations.push(Violation {
                        detail: format!("{n} chips: {layers_used} layers used, closed form {}", profile.counts.len()),
                        config: None,
                        witnesses: Vec::new(),
                    });
                }
            }
        }
    }
    report.holds = report.violations.is_empty();
    if a.json {
        emit_json(out, &report)?;
    } else {
        let mut lines = vec![format!("property: {name}"), format!("k: {k}"), format!("ell: {ell}")];
        lines.push(format!("source: {}", report.source));
        lines.extend(report.seed.map(|s| format!("seed: {s}")));
        lines.push(format!("cases: {}", report.cases));
        lines.push(format!("checked: {}", report.checked));
        lines.push(format!("result: {}", if report.holds { "holds" } else { "violated" }));
        for v in &report.violations {
            let at: Vec<String> = v.witnesses.iter().map(|(vx, c)| format!("chip {c} at {vx}")).collect();
            lines.push(format!("violation: {} {}", v.detail, at.join(", ")).trim_end().to_string());
        }
        emit_text(out, &lines)?;
    }
    Ok(if report.holds { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct FlattenJson {
    format_version: u32,
    rule: &'static str,
    permutations: Vec<FlatEntry>,
    max_inversions: u64,
}

#[derive(Serialize)]
struct FlatEntry {
    permutation: Vec<Chip>,
    inversions: u64,
}

fn flatten_cmd(a: FlattenArgs, out: &mut dyn Write) -> Result<i32> {
    let rule = match a.rule {
        RuleArg::Inorder => FlattenRule::Inorder,
        RuleArg::ChildrenFirst => FlattenRule::ChildrenFirst,
    };
    let configs = match (&a.config, &a.dump) {
        (Some(path), _) => vec![parse_config(&read(path)?)?],
        (None, Some(path)) => read_dump(&read(path)?)?,
        (None, None) => return Err(Error::Usage("one of --config or --dump is required".into())),
    };
    let entries = configs
        .iter()
        .map(|c| {
            let permutation = flatten(c, rule)?.sequence;
            let inversions = inversions(&permutation);
            Ok(FlatEntry { permutation, inversions })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_inversions = entries.iter().map(|e| e.inversions).max().unwrap_or(0);
    if a.json {
        emit_json(
            out,
            &FlattenJson { format_version: FORMAT_VERSION, rule: rule.name(), permutations: entries, max_inversions },
        )?;
    } else if a.config.is_some() {
        emit_text(
            out,
            &[
                format!("rule: {}", rule.name()),
                format!("permutation: {}", permutation_csv(&entries[0].permutation)),
                format!("inversions: {}", entries[0].inversions),
            ],
        )?;
    } else {
        let mut lines = vec![format!("rule: {}", rule.name()), format!("configurations: {}", entries.len())];
        lines.push(format!("max_inversions: {max_inversions}"));
        lines.extend(entries.iter().map(|e| permutation_csv(&e.permutation)));
        emit_text(out, &lines)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ConstructJson {
    format_version: u32,
    k: u32,
    ell: u32,
    i: usize,
    c: Vec<Chip>,
    c_prime: Vec<Chip>,
    stationary: Chip,
    after_root_phase: ConfigJson,
    config: ConfigJson,
    trace: Vec<MoveJson>,
}

fn construct(a: ConstructArgs, out: &mut dyn Write) -> Result<i32> {
    let choice = ConstructionChoice { i: a.i, c: a.c.clone(), c_prime: a.cprime.clone() };
    let r = replay_lower_bound_construction(a.depth.k, a.depth.ell, &choice, &SubtreePlan::Lowest)?;
    if a.json {
        emit_json(
            out,
            &ConstructJson {
                format_version: FORMAT_VERSION,
                k: a.depth.k,
                ell: a.depth.ell,
                i: a.i,
                c: a.c,
                c_prime: a.cprime,
                stationary: r.stationary,
                after_root_phase: (&r.after_root_phase).into(),
                config: (&r.config).into(),
                trace: r.trace.iter().map(MoveJson::from).collect(),
            },
        )?;
    } else {
        let mut lines = vec![
            format!("k: {}", a.depth.k),
            format!("ell: {}", a.depth.ell),
            format!("i: {}", a.i),
            format!("c: {}", permutation_csv(&a.c)),
            format!("cprime: {}", permutation_csv(&a.cprime)),
            format!("stationary: {}", r.stationary),
            format!("after_root_phase: {}", r.after_root_phase),
            format!("stable: {}", r.config),
            format!("fires: {}", r.trace.len()),
        ];
        if a.trace {
            lines.push("trace:".into());
            lines.extend(r.trace.iter().map(|m| m.to_string()));
        }
        emit_text(out, &lines)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OracleJson {
    format_version: u32,
    k: u32,
    chips: u64,
    /// Chips per vertex on each layer, from the top; `null` where the
    /// vertices of a layer disagree.
    simulated: Vec<Option<u64>>,
    closed_form: Vec<u64>,
    matches: bool,
}

fn oracle_unlabeled(a: UnlabeledArgs, out: &mut dyn Write) -> Result<i32> {
    let shape = shape(a.k)?;
    let counts = unlabeled_simulate(shape, a.chips)?;
    let mut layers: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for (v, c) in &counts {
        layers.entry(shape.layer(*v)).or_default().push(*c);
    }
    let simulated: Vec<Option<u64>> = layers
        .iter()
        .map(|(layer, cs)| {
            let full = cs.len() as u64 == u64::from(a.k).pow(layer - 1);
            (full && cs.iter().all(|c| *c == cs[0])).then_some(cs[0])
        })
        .collect();
    let closed_form = unlabeled_profile(shape, a.chips).counts;
    let matches = simulated.iter().copied().eq(closed_form.iter().map(|c| Some(*c)));
    if a.json {
        emit_json(
            out,
            &OracleJson { format_version: FORMAT_VERSION, k: a.k, chips: a.chips, simulated, closed_form, matches },
        )?;
    } else {
        let mut lines = vec![format!("k: {}", a.k), format!("chips: {}", a.chips)];
        for (i, s) in simulated.iter().enumerate() {
            let shown = s.map_or("uneven".to_string(), |c| c.to_string());
            lines.push(format!("layer {}: {shown} per vertex", i + 1));
        }
        lines.push(format!("closed_form: {}", if matches { "matches" } else { "differs" }));
        emit_text(out, &lines)?;
    }
    Ok(if matches { EXIT_OK } else { EXIT_VIOLATION })
}
