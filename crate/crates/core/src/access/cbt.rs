use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gossip::{disseminate, DisseminationSetup, GossipMode};
use crate::protocol::{
    consensus_timestamp, generate_sat, DistributedSpectrumLedger, KeyedHashScheme, LedgerHeader,
    SlotTime, SpectrumAccessTransaction, UserId,
};

use super::{monotone_backlog_growth, AccessError, Etiquette, LatencyReport, ScenarioConfig};

/// Dissemination plus one confirmation round per transaction.
const GOSSIP_ROUNDS: u32 = 2;

/// Who got which resource block in one span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAssignment {
    pub epoch: u64,
    /// (block index, user served on it), block-ascending.
    pub blocks: Vec<(u32, UserId)>,
}

/// Serves the consensus queue under the per-span block budget: requests
/// clearing consensus mid-span take the current span's remaining blocks,
/// leftovers take fresh blocks at following span boundaries. The k-th
/// service of a span takes block k, so assignments are injective by
/// construction.
struct ServiceEngine {
    mu: u64,
    n_v: u32,
    window: u64,
    used: u32,
    measure: (u64, u64),
    samples: Vec<u64>,
    assignments: Option<Vec<BlockAssignment>>,
}

impl ServiceEngine {
    fn new(cfg: &ScenarioConfig, want_detail: bool) -> Self {
        Self {
            mu: cfg.mu as u64,
            n_v: cfg.n_v,
            window: 0,
            used: 0,
            measure: cfg.measure_window(),
            samples: Vec::new(),
            assignments: want_detail.then(Vec::new),
        }
    }

    /// Serves queue leftovers at every span boundary up to `slot`.
    fn advance_to(&mut self, ledger: &mut DistributedSpectrumLedger, slot: u64) {
        while self.window < slot / self.mu {
            self.window += 1;
            self.used = 0;
            if !ledger.saq().is_empty() {
                self.serve_now(ledger, self.window * self.mu);
            }
        }
    }

    /// Serves as much of the queue as the current span's block budget
    /// still allows, at slot `now`. Returns how many were served.
    fn serve_now(&mut self, ledger: &mut DistributedSpectrumLedger, now: u64) -> usize {
        debug_assert_eq!(self.window, now / self.mu);
        let capacity = (self.n_v - self.used) as usize;
        if capacity == 0 {
            return 0;
        }
        let served = ledger.serve_ready(SlotTime(now), capacity);
        for entry in &served {
            if let Some(assignments) = &mut self.assignments {
                if assignments.last().map(|a| a.epoch) != Some(self.window) {
                    assignments.push(BlockAssignment { epoch: self.window, blocks: Vec::new() });
                }
                assignments.last_mut().unwrap().blocks.push((self.used, entry.origin));
            }
            self.used += 1;
            let generated = entry.sat_id.generated_at.0;
            if (self.measure.0..self.measure.1).contains(&generated) {
                self.samples.push(entry.served_at.0 - generated);
            }
        }
        served.len()
    }
}

fn sample_distinct_users(n: u32, k: u32, rng: &mut impl Rng) -> Vec<UserId> {
    let mut chosen: Vec<u32> = Vec::with_capacity(k as usize);
    // Floyd's sampling over user ids.
    for j in (n - k)..n {
        let pick = rng.gen_range(0..=j);
        if chosen.contains(&pick) {
            chosen.push(j);
        } else {
            chosen.push(pick);
        }
    }
    chosen.into_iter().map(UserId).collect()
}

enum RunOutcome {
    Completed { samples: Vec<u64>, assignments: Option<Vec<BlockAssignment>> },
    Divergent,
}

/// One seeded run.
///
/// Per span, the requesters' transactions gossip sequentially starting at
/// the span-end boundary (or later if earlier batches still occupy the
/// channel), two rounds each; the whole batch reaches consensus when its
/// last confirmation round completes, enters the queue with consensus
/// timestamps, and is served under the block budget. One ledger stands in
/// for all replicas: the replica-agreement property is exercised
/// separately at small scale, and the canonical observer sits outside the
/// population so observer exclusion has nothing to remove.
fn cbt_single_run(
    cfg: &ScenarioConfig,
    rng: &mut ChaCha8Rng,
    scheme: &KeyedHashScheme,
    want_detail: bool,
) -> Result<RunOutcome, AccessError> {
    let mu = cfg.mu as u64;
    let observer = UserId(cfg.n);
    let header = LedgerHeader { n_v: cfg.n_v, mu, epoch: 0 };
    let mut ledger = DistributedSpectrumLedger::new(observer, header, cfg.policy);
    let mut svc = ServiceEngine::new(cfg, want_detail);
    let total_spans = cfg.warmup_spans as u64 + cfg.measure_spans as u64;
    let hard_cap = cfg.backlog_hard_cap();
    let mut gossip_free = 0u64;
    let mut seq = 0u32;
    // (batch consensus slot, batch size): still-opaque work at boundaries.
    let mut in_flight: VecDeque<(u64, u32)> = VecDeque::new();
    let mut history: Vec<usize> = Vec::new();
    let mut span = 0u64;
    loop {
        if span < total_spans && cfg.n_r > 0 {
            let mut batch: Vec<SpectrumAccessTransaction> = sample_distinct_users(
                cfg.n,
                cfg.n_r,
                rng,
            )
            .into_iter()
            .map(|origin| {
                let generated = SlotTime(span * mu + rng.gen_range(0..mu));
                let sat = generate_sat(origin, generated, seq, scheme);
                seq += 1;
                sat
            })
            .collect();
            batch.sort_by_key(|sat| (sat.generated_at(), sat.origin()));
            let mut t = gossip_free.max((span + 1) * mu);
            let mut done = Vec::with_capacity(batch.len());
            for mut sat in batch {
                for _ in 0..GOSSIP_ROUNDS {
                    let setup = DisseminationSetup {
                        n: cfg.n,
                        phi: cfg.phi,
                        mode: GossipMode::Push,
                        start: SlotTime(t),
                        gamma_levels: std::slice::from_ref(&cfg.gamma),
                        slot_cap: None,
                    };
                    let (record, out) = disseminate(setup, sat, scheme, rng)
                        .map_err(|source| AccessError::Gossip { seed: cfg.seed, source })?;
                    t = record.completions[0].1 .0;
                    sat = out;
                }
                done.push(sat);
            }
            gossip_free = t;
            in_flight.push_back((t, done.len() as u32));
            svc.advance_to(&mut ledger, t);
            for sat in &done {
                let t_hat = consensus_timestamp(sat, observer, &cfg.policy, cfg.n)?;
                ledger.enqueue_sat(sat.sat_id(), t_hat)?;
            }
            svc.serve_now(&mut ledger, t);
        } else {
            svc.advance_to(&mut ledger, (span + 1) * mu);
        }
        // Wall-clock backlog at the boundary: requests whose consensus is
        // still pending there, plus whatever sits in the queue.
        let boundary = (span + 1) * mu;
        while in_flight.front().is_some_and(|&(c, _)| c <= boundary) {
            in_flight.pop_front();
        }
        let backlog =
            in_flight.iter().map(|&(_, k)| k as usize).sum::<usize>() + ledger.saq().len();
        history.push(backlog);
        if backlog > hard_cap || monotone_backlog_growth(&history) {
            return Ok(RunOutcome::Divergent);
        }
        span += 1;
        if span >= total_spans {
            let drained = in_flight.is_empty() && ledger.saq().is_empty();
            if drained || span >= total_spans + 50 {
                return Ok(RunOutcome::Completed {
                    samples: svc.samples,
                    assignments: svc.assignments,
                });
            }
        }
    }
}

fn run_all(
    cfg: &ScenarioConfig,
    want_detail: bool,
) -> Result<(LatencyReport, Vec<Vec<BlockAssignment>>), AccessError> {
    cfg.validate()?;
    if cfg.etiquette != Etiquette::Cbt {
        return Err(AccessError::InvalidConfig("etiquette must be cbt"));
    }
    let scheme = KeyedHashScheme::new(cfg.seed);
    let mut samples = Vec::new();
    let mut detail = Vec::new();
    let mut divergent_runs = 0;
    for run in 0..cfg.runs {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(run as u64);
        match cbt_single_run(cfg, &mut rng, &scheme, want_detail)? {
            RunOutcome::Completed { samples: s, assignments } => {
                samples.extend(s);
                if let Some(a) = assignments {
                    detail.push(a);
                }
            }
            RunOutcome::Divergent => divergent_runs += 1,
        }
    }
    let report = LatencyReport::assemble(samples, cfg.mu, cfg.runs, divergent_runs, cfg.seed);
    Ok((report, detail))
}

/// Simulates the ledger etiquette end to end: uniform request generation,
/// sequential two-round gossip per span batch, consensus-ordered queueing,
/// and collision-free block service. Deterministic in `cfg.seed`.
pub fn simulate_cbt(cfg: &ScenarioConfig) -> Result<LatencyReport, AccessError> {
    run_all(cfg, false).map(|(report, _)| report)
}

/// As [`simulate_cbt`], also returning each non-divergent run's per-span
/// block assignments for collision auditing.
pub fn simulate_cbt_detail(
    cfg: &ScenarioConfig,
) -> Result<(LatencyReport, Vec<Vec<BlockAssignment>>), AccessError> {
    run_all(cfg, true)
}
