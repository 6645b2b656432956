//! Command-line front end. Every subcommand writes either plain text or
//! JSON; both start with the format version.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::Error;

mod commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "chipfire", version, about = "Labeled chip-firing on looped k-ary trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stabilize a configuration and print the result with its trace.
    Simulate(SimulateArgs),
    /// Count every stable configuration reachable from the start.
    Enumerate(EnumerateArgs),
    /// Exact upper and lower bounds.
    Bounds(BoundsArgs),
    /// Check a structural property; exits 1 on a violation.
    Verify(VerifyArgs),
    /// Read a one-chip-per-vertex configuration as a permutation.
    Flatten(FlattenArgs),
    /// Replay the lower-bound construction for one choice.
    Construct(ConstructArgs),
    /// Reference computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Args)]
pub struct Depth {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub k: u32,
    /// Number of layers filled by the start, `N = (k^ell - 1) / (k - 1)` chips.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub ell: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Lowest,
    Random,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub depth: Depth,
    /// Firing script to replay instead of a policy.
    #[arg(long, conflicts_with_all = ["policy", "seed"])]
    pub script: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "lowest")]
    pub policy: PolicyArg,
    /// Seed for the random policy; drawn and printed when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Bfs,
    Dfs,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub depth: Depth,
    /// Write every stable configuration as newline-delimited JSON.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 100_000_000)]
    pub max_states: u64,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_stable: u64,
    #[arg(long)]
    pub no_endgame_shortcut: bool,
    #[arg(long, value_enum, default_value = "bfs")]
    pub order: OrderArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    Naive,
    Zigzag,
    Binary,
    LowerBinary,
    LowerGeneral,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    #[value(name = "T")]
    T,
    #[value(name = "Z")]
    Z,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub depth: Depth,
    #[arg(long, value_enum, default_value = "all")]
    pub which: WhichArg,
    /// Whether the zigzag bounds count subtree orderings or stable
    /// configurations.
    #[arg(long, value_enum, default_value = "Z")]
    pub target: TargetArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    Minmax,
    ZigzagRelation,
    Ballot,
    EndgameConfluence,
    UnlabeledProfile,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub depth: Depth,
    #[arg(long, value_enum)]
    pub property: PropertyArg,
    /// Check this many random stabilizations (or random endgame labelings)
    /// instead of the full stable set.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 100_000_000)]
    pub max_states: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Inorder,
    ChildrenFirst,
}

#[derive(Debug, Args)]
pub struct FlattenArgs {
    /// Configuration JSON.
    #[arg(long, required_unless_present = "dump", conflicts_with = "dump")]
    pub config: Option<PathBuf>,
    /// Enumeration dump; prints one line per configuration and the maximum.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "inorder")]
    pub rule: RuleArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub depth: Depth,
    #[arg(long)]
    pub i: usize,
    /// Uneasy chips sent right, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub c: Vec<u32>,
    /// Uneasy chips sent left, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub cprime: Vec<u32>,
    /// Also print the firing trace.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Unlabeled stabilization by direct simulation, against the closed form.
    Unlabeled(UnlabeledArgs),
}

#[derive(Debug, Args)]
pub struct UnlabeledArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub k: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub chips: u64,
    #[arg(long)]
    pub json: bool,
}

/// Parses `args` (program name first) and runs the command, returning the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match commands::dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Core(chipfire_core::Error::Truncated) => EXIT_TRUNCATED,
                _ => EXIT_USAGE,
            }
        }
    }
}
