use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cbt",
    version,
    about = "Latency experiments for consensus-before-talk spectrum access"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form normalized latency of both etiquettes.
    Analytic(ScenarioArgs),
    /// Monte Carlo latency of the configured etiquette.
    Sim(ScenarioArgs),
    /// Gossip dissemination delay across coverage targets.
    Fig4(ScenarioArgs),
    /// Normalized latency against requester count for three span lengths.
    Fig5(ScenarioArgs),
    /// Normalized latency against population size.
    Fig6(ScenarioArgs),
    /// Requester count where the consensus etiquette overtakes contention.
    Crossing(ScenarioArgs),
}

/// Every scenario knob, all optional: unset flags fall back to the config
/// file, then the `CBT_SEED` environment variable (seed only), then the
/// preset, then the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Secondary users in the network.
    #[arg(long)]
    pub n: Option<u32>,
    /// Fresh access requesters per span.
    #[arg(long = "n-r")]
    pub n_r: Option<u32>,
    /// Vacant resource blocks per span.
    #[arg(long = "n-v")]
    pub n_v: Option<u32>,
    /// Span length in slots.
    #[arg(long)]
    pub mu: Option<u32>,
    /// Gossip fan-out per transmission opportunity.
    #[arg(long)]
    pub phi: Option<u32>,
    /// Coverage fraction at which dissemination counts as complete.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Service order: first verified first served, or fairness guarantee.
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    /// Consensus timestamp aggregation.
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationArg>,
    /// Mean divisor: stamp count or network size.
    #[arg(long = "mean-norm", value_enum)]
    pub mean_norm: Option<MeanNormArg>,
    /// Whether observers drop their own stamp before aggregating.
    #[arg(long = "exclude-observer", value_name = "BOOL")]
    pub exclude_observer: Option<bool>,
    /// Which etiquette `sim` runs.
    #[arg(long, value_enum)]
    pub etiquette: Option<EtiquetteArg>,
    /// Monte Carlo repetitions.
    #[arg(long)]
    pub runs: Option<u32>,
    /// Spans discarded before measurement starts.
    #[arg(long)]
    pub warmup: Option<u32>,
    /// Measured spans per run.
    #[arg(long)]
    pub spans: Option<u32>,
    /// Random seed (also settable via CBT_SEED).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Read `key = value` settings from this file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Table format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Emit per-run (fig4) or per-sample (sim) rows instead of aggregates.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Ffs,
    Fair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregationArg {
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeanNormArg {
    Count,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EtiquetteArg {
    Lbt,
    Cbt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Tsv,
}
