//! The `gradperc` command-line tool.
//!
//! Every subcommand writes its outputs plus a run manifest recording the
//! full parameter set; `gradperc replay <manifest>` reruns it and
//! reproduces the outputs byte for byte.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod oracle_tables;
pub mod output;
pub mod render;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gradperc::scaling::ExperimentSpec;
use serde::{Deserialize, Serialize};

pub use error::{CliError, CliResult};
pub use manifest::RunManifest;

pub const SEED_ENV: &str = "PERC_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "gradperc",
    version,
    about = "Gradient percolation experiments on the triangular lattice"
)]
pub struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Sample strips and measure their fronts, one CSV row per replica.
    Front(FrontArgs),
    /// Run a front-scaling experiment from a JSON spec and fit exponents.
    Sweep(SweepArgs),
    /// Estimate polychromatic arm probabilities over nested annuli.
    Arms(ArmsArgs),
    /// Estimate the characteristic length L(p).
    Charlen(CharlenArgs),
    /// Check near-critical scaling relations against recorded gates.
    NearCritical(NearCriticalArgs),
    /// Draw a sampled strip and its front as SVG.
    Render(RenderArgs),
    /// Compare the detectors with brute-force search on all small instances.
    EnumerateOracle(OracleArgs),
    /// Rerun a recorded command from its manifest.
    Replay(ReplayArgs),
}

fn min_8() -> clap::builder::RangedI64ValueParser<u32> {
    clap::value_parser!(u32).range(8..)
}

fn positive() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(1..)
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontArgs {
    /// Strip half-width N.
    #[arg(long = "N", value_parser = min_8())]
    #[serde(rename = "N")]
    pub n: u32,
    /// Strip length.
    #[arg(long, value_parser = min_8())]
    pub ell: u32,
    #[arg(long, default_value_t = 1, value_parser = positive())]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write each replica's front edges as JSON into this directory.
    #[arg(long)]
    #[serde(default)]
    pub edges_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Experiment spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Output CSV of per-N summaries.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the spec's seed.
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Abort with exit code 5 once a sweep point finishes past this budget.
    #[arg(long)]
    #[serde(default)]
    pub max_seconds: Option<f64>,
    /// The spec as read, recorded so replays do not depend on the file.
    #[arg(skip)]
    #[serde(default)]
    pub resolved: Option<ExperimentSpec>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmsArgs {
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Arm counts; the inner radius is m = j.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub j: Vec<u32>,
    /// Outer radii, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256,512")]
    pub radii: Vec<u32>,
    #[arg(long, default_value_t = 10_000, value_parser = positive())]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharlenArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub eps0: f64,
    #[arg(long, default_value_t = 2000, value_parser = positive())]
    pub samples: u64,
    /// Confidence multiplier z in the rule `estimate + z·stderr ≤ eps0`.
    #[arg(long, default_value_t = 4.0)]
    pub confidence: f64,
    #[arg(long, default_value_t = 4096)]
    pub max_n: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearCriticalArgs {
    /// Recipe JSON with the p list, sample sizes and gates.
    #[arg(long)]
    pub recipe: PathBuf,
    /// Output report (JSON).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    #[arg(skip)]
    #[serde(default)]
    pub resolved: Option<commands::NearCriticalRecipe>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderArgs {
    #[arg(long = "N", value_parser = min_8())]
    #[serde(rename = "N")]
    pub n: u32,
    #[arg(long, value_parser = min_8())]
    pub ell: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub replica: u64,
    /// Output SVG.
    #[arg(long)]
    pub out: PathBuf,
    /// Omit the ±N^(4/7) guide lines.
    #[arg(long)]
    #[serde(default)]
    pub no_band: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleArgs {
    /// Directory for the reference tables.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Seed of the fixed annulus backgrounds.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write the outputs into this directory instead of the recorded paths.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn moved(dir: &Path, path: &Path) -> PathBuf {
    dir.join(path.file_name().unwrap_or(path.as_os_str()))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Front(_) => "front",
            Command::Sweep(_) => "sweep",
            Command::Arms(_) => "arms",
            Command::Charlen(_) => "charlen",
            Command::NearCritical(_) => "near-critical",
            Command::Render(_) => "render",
            Command::EnumerateOracle(_) => "enumerate-oracle",
            Command::Replay(_) => "replay",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Front(a) => Some(a.seed),
            Command::Sweep(a) => a.seed.or(a.resolved.as_ref().map(|s| s.seed)),
            Command::Arms(a) => Some(a.seed),
            Command::Charlen(a) => Some(a.seed),
            Command::NearCritical(a) => a.seed.or(a.resolved.as_ref().map(|r| r.seed)),
            Command::Render(a) => Some(a.seed),
            Command::EnumerateOracle(a) => Some(a.seed),
            Command::Replay(_) => None,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Command::Front(a) => a.seed = seed,
            Command::Sweep(a) => a.seed = Some(seed),
            Command::Arms(a) => a.seed = seed,
            Command::Charlen(a) => a.seed = seed,
            Command::NearCritical(a) => a.seed = Some(seed),
            Command::Render(a) => a.seed = seed,
            Command::EnumerateOracle(a) => a.seed = seed,
            Command::Replay(_) => {}
        }
    }

    /// Where the run manifest goes.
    pub fn manifest_path(&self) -> Option<PathBuf> {
        match self {
            Command::Front(a) => Some(output::sibling(&a.out, "manifest.json")),
            Command::Sweep(a) => Some(output::sibling(&a.out, "manifest.json")),
            Command::Arms(a) => Some(output::sibling(&a.out, "manifest.json")),
            Command::Charlen(a) => Some(output::sibling(&a.out, "manifest.json")),
            Command::NearCritical(a) => Some(output::sibling(&a.out, "manifest.json")),
            Command::Render(a) => Some(output::sibling(&a.out, "manifest.json")),
            Command::EnumerateOracle(a) => Some(a.out_dir.join("manifest.json")),
            Command::Replay(_) => None,
        }
    }

    /// Points every output path into `dir`, keeping file names.
    pub fn redirect(&mut self, dir: &Path) {
        match self {
            Command::Front(a) => {
                a.out = moved(dir, &a.out);
                if let Some(e) = &a.edges_dir {
                    a.edges_dir = Some(moved(dir, e));
                }
            }
            Command::Sweep(a) => a.out = moved(dir, &a.out),
            Command::Arms(a) => a.out = moved(dir, &a.out),
            Command::Charlen(a) => a.out = moved(dir, &a.out),
            Command::NearCritical(a) => a.out = moved(dir, &a.out),
            Command::Render(a) => a.out = moved(dir, &a.out),
            Command::EnumerateOracle(a) => a.out_dir = dir.to_path_buf(),
            Command::Replay(_) => {}
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(t) = cli.threads {
        // Only the first configuration in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let mut command = cli.command;
    if !matches!(command, Command::Replay(_)) {
        if let Ok(raw) = std::env::var(SEED_ENV) {
            match raw.trim().parse::<u64>() {
                Ok(seed) => command.set_seed(seed),
                Err(_) => {
                    eprintln!("gradperc: usage: {SEED_ENV}={raw:?} is not an unsigned integer");
                    return 2;
                }
            }
        }
    }
    match commands::execute(command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gradperc: {e}");
            e.exit_code()
        }
    }
}
