//! One line per acceptance criterion. Criterion 12 runs only with
//! `cargo test --release -p chipfire --test acceptance -- --ignored`.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use chipfire::formats::parse_script;
use chipfire::parallel::enumerate_parallel;
use chipfire_core::analysis::{
    bottom_straight_descendant, check_ballot, check_minmax_descendants, check_zigzag_relation, construction_choices,
    max_inversions, replay_lower_bound_construction, ConstructionChoice, FlattenRule, SubtreePlan,
};
use chipfire_core::bounds::{
    asymptotic_check, binary_zigzag_bound, lower_bound_binary, lower_bound_general, naive_bound, zigzag_bound,
    Scientific, Target,
};
use chipfire_core::engine::{
    endgame_from_labels, stabilize, unlabeled_profile, unlabeled_simulate, unlabeled_stabilize, Policy, StepLimit,
    DEFAULT_UNLABELED_GUARD,
};
use chipfire_core::enumeration::{
    count_z, enumerate_stable, verify_endgame_confluence, EnumerationOptions, EnumerationResult, Limits,
};
use chipfire_core::{Chip, Configuration, Side, TreeShape, VertexId};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ROOT: VertexId = VertexId(0);

fn shape(k: u32) -> TreeShape {
    TreeShape::new(k).unwrap()
}

fn script(name: &str) -> Vec<chipfire_core::FiringMove> {
    parse_script(&std::fs::read_to_string(common::data(name)).unwrap()).unwrap()
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = chipfire::cli::run(std::iter::once("chipfire").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn within(start: Instant, limit: Duration, what: &str) {
    let took = start.elapsed();
    assert!(took < limit, "{what} took {took:?}, limit {limit:?}");
}

fn criterion_1() {
    let start = Instant::now();
    let (code, out) = run_cli(&["enumerate", "--k", "2", "--ell", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("Z = 6"), "{out}");
    within(start, Duration::from_secs(10), "enumerate --k 2 --ell 3");

    let initial = Configuration::initial(shape(2), 3);
    let mut sets = Vec::new();
    for threads in [1, 4] {
        for endgame_shortcut in [true, false] {
            let options = EnumerationOptions { endgame_shortcut, ..Default::default() };
            let result = enumerate_parallel(&initial, &options, threads).unwrap();
            assert!(!result.truncated);
            sets.push(result.stable_set);
        }
    }
    assert_eq!(sets[0].len(), 6);
    assert!(sets.iter().all(|s| *s == sets[0]));
}

fn criterion_2() {
    for k in 2..=5 {
        let start = Instant::now();
        assert_eq!(count_z(shape(k), 2, &EnumerationOptions::default()).unwrap(), 1, "k={k}");
        within(start, Duration::from_secs(5), "Z(k, 2)");
    }
}

fn criterion_3() {
    let binary =
        stabilize(&Configuration::initial(shape(2), 3), &Policy::Script(script("binary_seven.fire")), StepLimit::Auto)
            .unwrap()
            .config;
    assert_eq!(binary.single_chip(ROOT), Some(3));
    assert_eq!(binary.single_chip(bottom_straight_descendant(&binary, ROOT, Side::Left)), Some(1));
    assert_eq!(binary.single_chip(bottom_straight_descendant(&binary, ROOT, Side::Right)), Some(7));

    let four = |name| {
        stabilize(&Configuration::initial(shape(4), 3), &Policy::Script(script(name)), StepLimit::Auto).unwrap().config
    };
    let left = four("four_ary_endgame.fire");
    let right = four("four_ary_deep_two.fire");
    assert!(left.is_stable() && right.is_stable());
    assert_ne!(left, right);
    assert_eq!(shape(4).layer(right.locate(2).unwrap()), 3);
}

fn criterion_4() {
    let big = |s: &str| s.parse::<BigUint>().unwrap();
    assert_eq!(zigzag_bound(4, 3, Target::Z).unwrap().value, big("3167841156480"));
    assert_eq!(naive_bound(4, 3).unwrap().value, big("121645100408832000"));
    assert_eq!(binary_zigzag_bound(4, Target::Z).unwrap().value, big("693000"));
    assert_eq!(zigzag_bound(2, 4, Target::Z).unwrap().value, big("18018000"));
    assert_eq!(lower_bound_binary(4).unwrap().value, big("936"));
    assert_eq!(lower_bound_binary(5).unwrap().value, big("148936320"));
    assert_eq!(lower_bound_general(4, 3).unwrap().value, big("484"));
}

/// `value` rounded to as many significant digits as `mantissa` has lands on
/// the printed mantissa, within 1%, at the printed exponent.
fn approx(value: &BigUint, mantissa: &str, exponent: u64) {
    let sig = mantissa.chars().filter(char::is_ascii_digit).count();
    let rounded = Scientific::round(value, sig);
    assert_eq!(rounded.exponent, exponent, "{value} vs {mantissa}e{exponent}");
    let got: f64 = rounded.mantissa().parse().unwrap();
    let want: f64 = mantissa.parse().unwrap();
    assert!((got - want).abs() <= 0.01 * want, "{value} rounds to {rounded}, printed {mantissa}e{exponent}");
    assert_eq!(rounded.mantissa(), mantissa);
}

fn criterion_5() {
    let zz = |k, ell| zigzag_bound(k, ell, Target::Z).unwrap().value;
    let bin = |ell| binary_zigzag_bound(ell, Target::Z).unwrap().value;
    approx(&naive_bound(4, 4).unwrap().value, "3.9", 124);
    approx(&naive_bound(4, 5).unwrap().value, "1.5", 712);
    approx(&zz(4, 4), "3.2", 99);
    approx(&zz(4, 5), "2.0", 601);
    approx(&bin(5), "2.9", 22);
    approx(&bin(6), "1.8", 65);
    approx(&bin(7), "1.5", 170);
    approx(&zz(2, 5), "1.1", 24);
    approx(&zz(2, 6), "2.5", 67);
    approx(&zz(2, 7), "3.1", 173);
    approx(&lower_bound_binary(6).unwrap().value, "1.9", 19);
    approx(&lower_bound_binary(7).unwrap().value, "1.3", 42);
    approx(&lower_bound_general(4, 4).unwrap().value, "3.02", 16);
    approx(&lower_bound_general(4, 5).unwrap().value, "1.6", 74);
    approx(&zz(4, 4), "3.2146", 99);
    approx(&zz(4, 5), "1.9761", 601);
}

fn criterion_6() {
    let start = Instant::now();
    for k in 2..=4 {
        for n in 1..=100u64 {
            let simulated = unlabeled_simulate(shape(k), n).unwrap();
            let profile = unlabeled_profile(shape(k), n).counts;
            let layers = simulated.keys().map(|v| shape(k).layer(*v)).max().unwrap();
            assert_eq!(layers as usize, profile.len(), "k={k} n={n}");
            for layer in 1..=layers {
                let first = shape(k).vertices_through_layer(layer - 1);
                for v in first..shape(k).vertices_through_layer(layer) {
                    let held = simulated.get(&VertexId(v)).copied().unwrap_or(0);
                    assert_eq!(held, profile[layer as usize - 1], "k={k} n={n} v={v}");
                }
            }
        }
    }
    within(start, Duration::from_secs(60), "profile oracle");
}

fn criterion_7() {
    for k in [2, 3] {
        let ell = 3;
        let total = shape(k).vertices_through_layer(ell) as Chip;
        let mut rng = ChaCha8Rng::seed_from_u64(2024 + u64::from(k));
        for _ in 0..20 {
            let mut labels: Vec<Chip> = (1..=total).collect();
            labels.shuffle(&mut rng);
            let start = endgame_from_labels(shape(k), ell, &labels).unwrap().into_config();
            assert!(verify_endgame_confluence(ell, &start, Limits::default()).unwrap());
            let options = EnumerationOptions { endgame_shortcut: false, ..Default::default() };
            let result = enumerate_stable(&start, &options).unwrap();
            assert!(!result.truncated);
            assert_eq!(result.stable_set.len(), 1, "{start}");
        }
    }
    for (k, ell) in [(2, 3), (2, 4), (3, 3)] {
        let initial = Configuration::initial(shape(k), ell);
        let unlabeled = unlabeled_stabilize(shape(k), initial.counts(), DEFAULT_UNLABELED_GUARD).unwrap();
        for seed in 0..50 {
            let out = stabilize(&initial, &Policy::Random { seed }, StepLimit::Auto).unwrap();
            assert_eq!(out.odometer(), unlabeled.odometer, "k={k} ell={ell} seed={seed}");
        }
    }
}

fn criterion_8() {
    let result = enumerate_stable(&Configuration::initial(shape(2), 3), &EnumerationOptions::default()).unwrap();
    assert_eq!(result.stable_set.len(), 6);
    for c in &result.stable_set {
        for verdict in [check_minmax_descendants(c), check_zigzag_relation(c), check_ballot(c)] {
            assert!(verdict.holds, "{:?} fails on {c}: {:?}", verdict.property, verdict.witnesses);
        }
    }
}

fn criterion_9() {
    let lower = lower_bound_binary(3).unwrap().value;
    let z = count_z(shape(2), 3, &EnumerationOptions::default()).unwrap();
    let upper = zigzag_bound(2, 3, Target::Z).unwrap().value;
    assert_eq!(lower, BigUint::from(6u32));
    assert_eq!(z, 6);
    assert_eq!(upper, BigUint::from(20u32));
    assert!(lower <= BigUint::from(z) && BigUint::from(z) <= upper);
}

fn criterion_10() {
    let choice = ConstructionChoice { i: 1, c: vec![3], c_prime: vec![13] };
    let walk = replay_lower_bound_construction(2, 4, &choice, &SubtreePlan::Lowest).unwrap();
    assert_eq!(walk.stationary, 8);
    let after = &walk.after_root_phase;
    assert_eq!(after.chips_at(ROOT), &[8]);
    assert_eq!(after.chips_at(VertexId(1)), &[1, 2, 4, 5, 6, 7, 13]);
    assert_eq!(after.chips_at(VertexId(2)), &[3, 9, 10, 11, 12, 14, 15]);

    for (k, ell) in [(2, 3), (2, 4), (3, 3), (4, 3)] {
        let mut results = BTreeSet::new();
        for choice in construction_choices(k, ell).unwrap() {
            let replay = replay_lower_bound_construction(k, ell, &choice, &SubtreePlan::Lowest).unwrap();
            let mut cur = Configuration::initial(shape(k), ell);
            for mv in &replay.trace {
                cur = cur.fire(mv).unwrap();
                assert_eq!(cur.locate(replay.stationary), Some(ROOT), "k={k} ell={ell} {choice:?} at {mv}");
            }
            assert_eq!(cur, replay.config);
            assert!(cur.is_stable());
            results.insert(cur);
        }
        assert_eq!(results.len(), construction_choices(k, ell).unwrap().len(), "k={k} ell={ell}");
    }
}

fn criterion_11() {
    let start = Instant::now();
    for k in 2..=5 {
        for ell in 4..=8 {
            assert!(asymptotic_check(k, ell).unwrap(), "k={k} ell={ell}");
        }
    }
    within(start, Duration::from_secs(1), "asymptotic checks");
}

/// Writes past the test harness's output capture so the lines show up in
/// every run.
fn line(text: String) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    let _ = out.flush();
}

fn report(n: u32, what: &str, f: fn()) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let took = start.elapsed();
    match &outcome {
        Ok(()) => line(format!("criterion {n:>2}: PASS  {what} ({took:.2?})")),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| e.downcast_ref::<&str>().copied())
                .unwrap_or("panic");
            line(format!("criterion {n:>2}: FAIL  {what}: {msg}"));
        }
    }
    outcome.is_ok()
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn()); 11] = [
        ("Z(2,3) = 6, same set across threads and shortcut", criterion_1),
        ("Z(k,2) = 1 for k in 2..=5", criterion_2),
        ("script replays", criterion_3),
        ("exact table values", criterion_4),
        ("approximate table values", criterion_5),
        ("closed-form unlabeled profile", criterion_6),
        ("endgame confluence and odometer invariance", criterion_7),
        ("properties on every stable configuration of (2,3)", criterion_8),
        ("lower bound <= Z(2,3) <= zigzag bound", criterion_9),
        ("lower-bound construction replays", criterion_10),
        ("zigzag bound below (N-3)!", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (what, f)) in criteria.into_iter().enumerate() {
        if !report(i as u32 + 1, what, f) {
            failed.push(i + 1);
        }
    }
    line("criterion 12: SKIP  full (2,4) enumeration; run with --ignored".into());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

fn criterion_12() {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let options = EnumerationOptions::with_limits(Limits { max_states: u64::MAX, max_stable: u64::MAX });
    let result: EnumerationResult =
        enumerate_parallel(&Configuration::initial(shape(2), 4), &options, threads).unwrap();
    assert!(!result.truncated, "enumeration truncated");
    let z = result.stable_set.len();
    line(format!("            Z(2,4) = {z}, {} states explored", result.states_explored));
    assert!((936..=18_018_000).contains(&z), "Z(2,4) = {z}");
    for c in &result.stable_set {
        let verdict = check_ballot(c);
        assert!(verdict.holds, "ballot fails on {c}: {:?}", verdict.witnesses);
    }
    let (best, witness) = max_inversions(&result, FlattenRule::Inorder).unwrap();
    line(format!("            max inversions {best} at {witness}"));
    assert_eq!(best, 25);
}

#[test]
#[ignore = "full (2,4) enumeration; minutes to hours"]
fn extended_acceptance() {
    assert!(report(12, "full (2,4) enumeration: bounds, ballot, 25 inversions", criterion_12));
}
