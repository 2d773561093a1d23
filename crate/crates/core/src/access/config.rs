use crate::protocol::ConsensusPolicy;

use super::AccessError;

/// Which etiquette a scenario simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Etiquette {
    Lbt,
    Cbt,
}

/// Full description of one Monte Carlo experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Secondary users in the network.
    pub n: u32,
    /// Users requesting access per span.
    pub n_r: u32,
    /// Accessible resource blocks per span.
    pub n_v: u32,
    /// Span length in slots.
    pub mu: u32,
    /// Gossip fan-out per holder per slot.
    pub phi: u32,
    /// Dissemination level required before consensus, in (0, 1].
    pub gamma: f64,
    pub policy: ConsensusPolicy,
    pub etiquette: Etiquette,
    /// Independent Monte Carlo repetitions.
    pub runs: u32,
    /// Spans discarded before measurement starts.
    pub warmup_spans: u32,
    /// Spans whose requests are measured.
    pub measure_spans: u32,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), AccessError> {
        if self.n < 2 {
            return Err(AccessError::InvalidConfig("n must be at least 2"));
        }
        if self.n_r > self.n {
            return Err(AccessError::InvalidConfig("n_r must not exceed n"));
        }
        if self.n_v == 0 {
            return Err(AccessError::InvalidConfig("n_v must be at least 1"));
        }
        if self.mu == 0 {
            return Err(AccessError::InvalidConfig("mu must be at least 1"));
        }
        if self.phi == 0 || self.phi >= self.n {
            return Err(AccessError::InvalidConfig("phi must be in [1, n-1]"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(AccessError::InvalidConfig("gamma must lie in (0, 1]"));
        }
        if self.runs == 0 {
            return Err(AccessError::InvalidConfig("runs must be at least 1"));
        }
        if self.measure_spans == 0 {
            return Err(AccessError::InvalidConfig("measure_spans must be at least 1"));
        }
        Ok(())
    }

    /// Slot range whose requests count toward the report.
    pub(crate) fn measure_window(&self) -> (u64, u64) {
        let mu = self.mu as u64;
        let lo = self.warmup_spans as u64 * mu;
        let hi = (self.warmup_spans as u64 + self.measure_spans as u64) * mu;
        (lo, hi)
    }

    /// Backlog size beyond which a run is declared divergent outright.
    pub(crate) fn backlog_hard_cap(&self) -> usize {
        10usize * self.n_v as usize * self.measure_spans as usize
    }
}

/// Aggregated end-to-end latencies of one scenario.
///
/// A run that diverges contributes no samples; when most runs diverge the
/// report as a whole is divergent and the means are infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyReport {
    /// Per-request latencies in slots, all non-divergent runs pooled.
    pub samples: Vec<u64>,
    /// Mean latency in slots; infinite when divergent.
    pub mean: f64,
    /// Mean divided by the span length.
    pub normalized_mean: f64,
    /// True when more than half the runs diverged.
    pub divergent: bool,
    /// Runs that ran to completion without diverging.
    pub runs_completed: u32,
    /// Runs whose backlog was flagged as growing without bound.
    pub divergent_runs: u32,
    pub seed: u64,
}

impl LatencyReport {
    pub(crate) fn assemble(
        samples: Vec<u64>,
        mu: u32,
        runs: u32,
        divergent_runs: u32,
        seed: u64,
    ) -> Self {
        let divergent = 2 * divergent_runs > runs;
        let mean = if divergent {
            f64::INFINITY
        } else if samples.is_empty() {
            0.0
        } else {
            samples.iter().map(|&s| s as f64).sum::<f64>() / samples.len() as f64
        };
        LatencyReport {
            samples,
            mean,
            normalized_mean: mean / mu as f64,
            divergent,
            runs_completed: runs - divergent_runs,
            divergent_runs,
            seed,
        }
    }

    /// Frees the per-request list while keeping the aggregates; sweeps
    /// over many points use this to bound memory.
    pub fn drop_samples(&mut self) {
        self.samples = Vec::new();
    }
}
