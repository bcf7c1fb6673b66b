use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use spacestat::families::{ComplexityMode, Family};
use spacestat::nwgen::Strategy;

/// Environment variable naming the directory for memoized complexity tables.
pub const CACHE_ENV: &str = "SPACESTAT_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "spacestat", version, about = "Space-bounded distinguishing complexity experiments")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Read the whole experiment configuration from a JSON file instead of flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct Common {
    #[arg(long, global = true, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,
    /// Longest program enumerated by the complexity search, in bits.
    #[arg(long, global = true, default_value_t = 16)]
    #[serde(default = "default_program_len")]
    pub program_len: usize,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_program_len() -> usize {
    16
}

/// Fully determines a run; echoed in every report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub common: Common,
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// CD^m of a string or set, optionally conditioned; all strings when no target is given.
    Cd(CdArgs),
    /// Counting invariant, deficiencies and the concatenation bound over a family.
    Deficiency(DeficiencyArgs),
    /// The explanation {y : CD^m(y) <= CD^m(x)} of every string.
    GoodModel(GoodModelArgs),
    /// Improved models through good subfamilies.
    Improve(ImproveArgs),
    /// Success frequencies of random subfamilies and the exact tail chain.
    LemmaProb(LemmaProbArgs),
    /// Seed search with the design generator, against brute force and Monte Carlo.
    NwSearch(NwSearchArgs),
    /// Sets from samplers.
    Dist2set(Dist2SetArgs),
    /// Symmetry of information on pairs of sets.
    Soi(SoiArgs),
    /// Evidence on whether every model can be improved.
    HypothesisScan(HypothesisScanArgs),
    /// A string that is typical for a set while the set is a bad explanation.
    ExampleSec2(ExampleArgs),
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct CdArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Target string.
    #[arg(long, conflicts_with = "set")]
    pub x: Option<String>,
    /// Target set as a mask: bit y is set iff y is a member.
    #[arg(long)]
    pub set: Option<u64>,
    /// Oracle set as a mask.
    #[arg(long)]
    pub given: Option<u64>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct DeficiencyArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    #[arg(long, default_value = "full")]
    pub family: Family,
    /// Space for the unconditional CD^p(x) inside delta; defaults to m.
    #[arg(long)]
    pub p: Option<usize>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct GoodModelArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long)]
    pub x: Option<String>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ImproveArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long, default_value = "ball")]
    pub family: Family,
    #[arg(long, default_value = "declared")]
    pub mode: ComplexityMode,
    #[arg(long, default_value = "nw")]
    pub strategy: Strategy,
    /// Restrict to one string.
    #[arg(long)]
    pub x: Option<String>,
    /// Restrict to one starting model, by family index.
    #[arg(long)]
    pub model: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub mc_trials: u64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct LemmaProbArgs {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value = "ball")]
    pub family: Family,
    /// Complexity class of the slice.
    #[arg(long, default_value_t = 7)]
    pub i: usize,
    /// Size class of the slice; defaults to n.
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, default_value = "declared")]
    pub mode: ComplexityMode,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct NwSearchArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long, default_value = "ball")]
    pub family: Family,
    #[arg(long, default_value_t = 4)]
    pub i: usize,
    #[arg(long, default_value_t = 3)]
    pub j: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value = "declared")]
    pub mode: ComplexityMode,
    #[arg(long, default_value_t = 10_000)]
    pub mc_trials: u64,
    /// Largest accepted gap between good-seed and good-mask fractions.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct Dist2SetArgs {
    /// Number of generated samplers.
    #[arg(long, default_value_t = 40)]
    pub samplers: u64,
    #[arg(long, default_value_t = 10)]
    pub max_tape: usize,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 5)]
    pub n_max: usize,
    /// Use this sampler file instead of generated samplers.
    #[arg(long)]
    pub sampler: Option<PathBuf>,
    /// Restrict to one output string.
    #[arg(long)]
    pub x: Option<String>,
    /// Smallest accepted agreement between the estimated and exact paths.
    #[arg(long, default_value_t = 0.95)]
    pub min_agreement: f64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SoiArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Program-length cap of the pair search.
    #[arg(long, default_value_t = 24)]
    pub pair_program_len: usize,
    /// Pair complexity bounds k of the reverse direction.
    #[arg(long, value_delimiter = ',', default_value = "16,19,21,23,24")]
    pub k: Vec<usize>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct HypothesisScanArgs {
    #[arg(long, default_value = "cylinder")]
    pub family: Family,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Space of the deficiencies; defaults to m.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub slack_budget: f64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ExampleArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 6)]
    pub m: usize,
}
