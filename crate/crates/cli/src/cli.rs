use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "pamix", version, about = "Mixed random/preferential attachment: simulate, estimate, compare")]
#[command(args_override_self = true)]
pub struct Cli {
    /// TOML file of `key = value` pairs applied as flags of the subcommand
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for ensembles and prefix traces (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "params", rename_all = "lowercase")]
pub enum Command {
    /// Grow a network and write its attachment log
    Simulate(SimulateArgs),
    /// Estimate alpha from an attachment log
    Estimate(EstimateArgs),
    /// Stationary, finite-time and empirical in-degree distributions
    Dist(DistArgs),
    /// Replay a dated citation dataset and estimate alpha on it
    Cite(CiteArgs),
    /// Re-execute a run from its manifest
    #[serde(skip)]
    Rerun(RerunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Estimate(_) => "estimate",
            Command::Dist(_) => "dist",
            Command::Cite(_) => "cite",
            Command::Rerun(_) => "rerun",
        }
    }

    pub fn out_dir_mut(&mut self) -> Option<&mut PathBuf> {
        match self {
            Command::Simulate(a) => Some(&mut a.out.out_dir),
            Command::Estimate(a) => Some(&mut a.out.out_dir),
            Command::Dist(a) => Some(&mut a.out.out_dir),
            Command::Cite(a) => Some(&mut a.out.out_dir),
            Command::Rerun(_) => None,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct OutArgs {
    /// Directory for outputs and the run manifest
    #[arg(long, env = "PAMIX_OUT_DIR", default_value = "pamix-out")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Attachment edges per new node
    #[arg(long)]
    pub m: usize,
    /// Response edges per new node
    #[arg(long)]
    pub m_hat: usize,
    /// Weight of preferential attachment
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Seed network: `complete:N` or an edge-list file
    #[arg(value_name = "SEED")]
    #[serde(skip)]
    pub seed_positional: Option<String>,
    /// Same as the positional SEED
    #[arg(long = "seed", value_name = "SEED")]
    pub seed: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Growth steps
    #[arg(long)]
    pub steps: usize,
    /// Generator seed; drawn at random and reported when absent
    #[arg(long)]
    pub rng_seed: Option<u64>,
    /// Fail when the seed has fewer than max(m, m_hat) nodes instead of
    /// drawing with replacement while the network is that small
    #[arg(long)]
    pub strict_seed: bool,
    /// Also write the final edge list
    #[arg(long)]
    pub export_graph: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

impl SimulateArgs {
    pub fn seed_spec(&self) -> &str {
        self.seed_positional
            .as_deref()
            .or(self.seed.as_deref())
            .unwrap_or("complete:3")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mle,
    Em,
    Both,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct EmArgs {
    /// EM starting value
    #[arg(long, default_value_t = 0.5)]
    pub alpha_init: f64,
    /// EM stops once successive iterates differ by less than this
    #[arg(long, default_value_t = 1e-8)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Feed records of in-degree 0 to EM (they are dropped by default)
    #[arg(long)]
    pub keep_zero_indegree: bool,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    /// Attachment log CSV (`step,k,e_prev,n_prev`)
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    #[command(flatten)]
    pub em: EmArgs,
    /// Re-estimate on every prefix at the stride and write `t,alpha_hat` traces
    #[arg(long)]
    pub trace: bool,
    /// Also trace the single-step estimate (implies --trace)
    #[arg(long)]
    pub snapshot_mode: bool,
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct DistArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Largest in-degree of the theoretical table (default: 99.9th percentile)
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Mean empirical ccdf over this many simulated runs
    #[arg(long)]
    pub ensemble: Option<usize>,
    /// Growth steps per ensemble run, and of the finite-time recurrence
    #[arg(long, default_value_t = 20_000)]
    pub steps: usize,
    /// Seed network for ensembles and the finite-time recurrence
    #[arg(long, default_value = "complete:3")]
    pub seed: String,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    /// Empirical ccdf of an edge-list file
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Write the expected pmf after --steps steps of the finite-time recurrence
    #[arg(long)]
    pub finite_t: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct CiteArgs {
    /// Citation edges, `citing cited` per line
    #[arg(long)]
    pub edges: PathBuf,
    /// Publication dates, `id<TAB>YYYY-MM-DD` per line
    #[arg(long)]
    pub dates: PathBuf,
    /// Papers dated on or before this day form the seed with their citees
    #[arg(long, default_value = "1992-02-29")]
    pub cutoff: NaiveDate,
    /// Attachment edges per node for the theoretical overlay
    #[arg(long, default_value_t = 12)]
    pub m: usize,
    /// Response edges per node for the theoretical overlay
    #[arg(long, default_value_t = 0)]
    pub m_hat: usize,
    #[command(flatten)]
    pub em: EmArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Debug, Args)]
pub struct RerunArgs {
    /// manifest.json of an earlier run
    pub manifest: PathBuf,
    /// Write into this directory instead of the recorded one
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
