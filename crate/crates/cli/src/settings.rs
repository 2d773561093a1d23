use std::path::{Path, PathBuf};

use cbt_core::access::{Etiquette, ScenarioConfig};
use cbt_core::protocol::{Aggregation, ConsensusPolicy, MeanNormalization, Scheduling};

use crate::args::{
    AggregationArg, EtiquetteArg, FormatArg, MeanNormArg, PolicyArg, ScenarioArgs,
};
use crate::output::OutputFormat;

/// Field pins a preset applies before the environment, config file, and
/// flags get their say.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    None,
    Fig4,
    Fig5,
    Fig6,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub n: u32,
    pub n_r: u32,
    pub n_v: u32,
    pub mu: u32,
    pub phi: u32,
    pub gamma: f64,
    pub scheduling: Scheduling,
    pub aggregation: Aggregation,
    pub mean_norm: MeanNormalization,
    pub exclude_observer: bool,
    pub etiquette: Etiquette,
    pub runs: u32,
    pub warmup: u32,
    pub spans: u32,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub trace: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            n: 1000,
            n_r: 10,
            n_v: 100,
            mu: 1000,
            phi: 1,
            gamma: 0.999,
            scheduling: Scheduling::FirstVerifiedFirstServed,
            aggregation: Aggregation::Mean,
            mean_norm: MeanNormalization::ByCount,
            exclude_observer: true,
            etiquette: Etiquette::Cbt,
            runs: 10_000,
            warmup: 20,
            spans: 200,
            seed: 0,
            output: None,
            format: OutputFormat::Csv,
            trace: false,
        }
    }
}

/// Reads the seed fallback from `CBT_SEED`, if set.
pub fn seed_from_env() -> Result<Option<u64>, String> {
    match std::env::var("CBT_SEED") {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("CBT_SEED must be an unsigned integer, got '{raw}'")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err("CBT_SEED must be valid unicode".to_string())
        }
    }
}

impl Settings {
    /// Layers one run's configuration: defaults, then the preset's pins,
    /// then `CBT_SEED`, then the `--config` file, then explicit flags.
    pub fn resolve(
        args: &ScenarioArgs,
        env_seed: Option<u64>,
        preset: Preset,
    ) -> Result<Self, String> {
        let mut s = Settings::default();
        match preset {
            Preset::None => {}
            Preset::Fig4 => {
                s.n = 1000;
                s.phi = 1;
            }
            Preset::Fig5 => {
                s.n = 1000;
                s.n_v = 100;
            }
            Preset::Fig6 => {
                s.n_r = 10;
                s.mu = 2500;
            }
        }
        if let Some(seed) = env_seed {
            s.seed = seed;
        }
        if let Some(path) = &args.config {
            s.apply_file(path)?;
        }
        s.apply_flags(args);
        Ok(s)
    }

    fn apply_flags(&mut self, args: &ScenarioArgs) {
        if let Some(v) = args.n {
            self.n = v;
        }
        if let Some(v) = args.n_r {
            self.n_r = v;
        }
        if let Some(v) = args.n_v {
            self.n_v = v;
        }
        if let Some(v) = args.mu {
            self.mu = v;
        }
        if let Some(v) = args.phi {
            self.phi = v;
        }
        if let Some(v) = args.gamma {
            self.gamma = v;
        }
        if let Some(v) = args.policy {
            self.scheduling = match v {
                PolicyArg::Ffs => Scheduling::FirstVerifiedFirstServed,
                PolicyArg::Fair => Scheduling::FairnessGuarantee,
            };
        }
        if let Some(v) = args.aggregation {
            self.aggregation = match v {
                AggregationArg::Mean => Aggregation::Mean,
                AggregationArg::Median => Aggregation::Median,
            };
        }
        if let Some(v) = args.mean_norm {
            self.mean_norm = match v {
                MeanNormArg::Count => MeanNormalization::ByCount,
                MeanNormArg::N => MeanNormalization::ByN,
            };
        }
        if let Some(v) = args.exclude_observer {
            self.exclude_observer = v;
        }
        if let Some(v) = args.etiquette {
            self.etiquette = match v {
                EtiquetteArg::Lbt => Etiquette::Lbt,
                EtiquetteArg::Cbt => Etiquette::Cbt,
            };
        }
        if let Some(v) = args.runs {
            self.runs = v;
        }
        if let Some(v) = args.warmup {
            self.warmup = v;
        }
        if let Some(v) = args.spans {
            self.spans = v;
        }
        if let Some(v) = args.seed {
            self.seed = v;
        }
        if let Some(v) = &args.output {
            self.output = Some(v.clone());
        }
        if let Some(v) = args.format {
            self.format = match v {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Tsv => OutputFormat::Tsv,
            };
        }
        if args.trace {
            self.trace = true;
        }
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), String> {
        let name = path.display();
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {name}: {e}"))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(format!("{name} line {line}: expected 'key = value'"));
            };
            let key = key.trim();
            let value = value.trim();
            self.apply_entry(key, value)
                .map_err(|why| format!("{name} line {line}: {why}"))?;
        }
        Ok(())
    }

    fn apply_entry(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("invalid value '{value}' for {key}"))
        }
        match key {
            "n" => self.n = parse(key, value)?,
            "n_r" => self.n_r = parse(key, value)?,
            "n_v" => self.n_v = parse(key, value)?,
            "mu" => self.mu = parse(key, value)?,
            "phi" => self.phi = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "policy" => {
                self.scheduling = match value {
                    "ffs" => Scheduling::FirstVerifiedFirstServed,
                    "fair" => Scheduling::FairnessGuarantee,
                    _ => return Err(format!("invalid value '{value}' for policy")),
                }
            }
            "aggregation" => {
                self.aggregation = match value {
                    "mean" => Aggregation::Mean,
                    "median" => Aggregation::Median,
                    _ => return Err(format!("invalid value '{value}' for aggregation")),
                }
            }
            "mean_norm" => {
                self.mean_norm = match value {
                    "count" => MeanNormalization::ByCount,
                    "n" => MeanNormalization::ByN,
                    _ => return Err(format!("invalid value '{value}' for mean_norm")),
                }
            }
            "exclude_observer" => self.exclude_observer = parse(key, value)?,
            "etiquette" => {
                self.etiquette = match value {
                    "lbt" => Etiquette::Lbt,
                    "cbt" => Etiquette::Cbt,
                    _ => return Err(format!("invalid value '{value}' for etiquette")),
                }
            }
            "runs" => self.runs = parse(key, value)?,
            "warmup" => self.warmup = parse(key, value)?,
            "spans" => self.spans = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => {
                self.format = match value {
                    "csv" => OutputFormat::Csv,
                    "tsv" => OutputFormat::Tsv,
                    _ => return Err(format!("invalid value '{value}' for format")),
                }
            }
            "trace" => self.trace = parse(key, value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Range checks with the offending flag in the message. `needs_sim`
    /// adds the simulation-only constraints.
    pub fn validate(&self, needs_sim: bool) -> Result<(), String> {
        if self.n < 2 {
            return Err("--n must be at least 2".into());
        }
        if self.n_r > self.n {
            return Err("--n-r must not exceed --n".into());
        }
        if self.n_v == 0 {
            return Err("--n-v must be at least 1".into());
        }
        if self.mu == 0 {
            return Err("--mu must be at least 1".into());
        }
        if self.phi < 1 || self.phi > self.n - 1 {
            return Err("--phi must lie between 1 and --n minus 1".into());
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err("--gamma must lie in (0, 1]".into());
        }
        if self.runs == 0 {
            return Err("--runs must be at least 1".into());
        }
        if self.spans == 0 {
            return Err("--spans must be at least 1".into());
        }
        if needs_sim && self.n_r == 0 {
            return Err("--n-r must be at least 1 for a simulation".into());
        }
        Ok(())
    }

    pub fn policy(&self) -> ConsensusPolicy {
        ConsensusPolicy {
            aggregation: self.aggregation,
            exclude_observer: self.exclude_observer,
            include_generated: true,
            normalization: self.mean_norm,
            scheduling: self.scheduling,
            fairness_window: None,
        }
    }

    pub fn scenario(&self) -> ScenarioConfig {
        ScenarioConfig {
            n: self.n,
            n_r: self.n_r,
            n_v: self.n_v,
            mu: self.mu,
            phi: self.phi,
            gamma: self.gamma,
            policy: self.policy(),
            etiquette: self.etiquette,
            runs: self.runs,
            warmup_spans: self.warmup,
            measure_spans: self.spans,
            seed: self.seed,
        }
    }

    /// Comment header carrying the full effective configuration, written
    /// in the same `key = value` form the config file parser reads.
    pub fn header_comments(&self, command: &str) -> Vec<String> {
        let policy = match self.scheduling {
            Scheduling::FirstVerifiedFirstServed => "ffs",
            Scheduling::FairnessGuarantee => "fair",
        };
        let aggregation = match self.aggregation {
            Aggregation::Mean => "mean",
            Aggregation::Median => "median",
        };
        let mean_norm = match self.mean_norm {
            MeanNormalization::ByCount => "count",
            MeanNormalization::ByN => "n",
        };
        let etiquette = match self.etiquette {
            Etiquette::Lbt => "lbt",
            Etiquette::Cbt => "cbt",
        };
        vec![
            format!("cbt {command}"),
            format!("n = {}", self.n),
            format!("n_r = {}", self.n_r),
            format!("n_v = {}", self.n_v),
            format!("mu = {}", self.mu),
            format!("phi = {}", self.phi),
            format!("gamma = {}", self.gamma),
            format!("policy = {policy}"),
            format!("aggregation = {aggregation}"),
            format!("mean_norm = {mean_norm}"),
            format!("exclude_observer = {}", self.exclude_observer),
            format!("etiquette = {etiquette}"),
            format!("runs = {}", self.runs),
            format!("warmup = {}", self.warmup),
            format!("spans = {}", self.spans),
            format!("seed = {}", self.seed),
        ]
    }
}
