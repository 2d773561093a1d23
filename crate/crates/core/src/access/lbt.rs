use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{monotone_backlog_growth, AccessError, Etiquette, LatencyReport, ScenarioConfig};

/// One contention round: every contender picks a block uniformly from
/// `n_v`; a contender succeeds iff its block is unshared. Returns the
/// per-contender success flags in draw order.
pub fn attempt_round(contenders: u32, n_v: u32, rng: &mut impl Rng) -> Vec<bool> {
    let mut occupancy = vec![0u32; n_v as usize];
    let picks: Vec<usize> =
        (0..contenders).map(|_| rng.gen_range(0..n_v as usize)).collect();
    for &block in &picks {
        occupancy[block] += 1;
    }
    picks.into_iter().map(|block| occupancy[block] == 1).collect()
}

enum RunOutcome {
    Completed(Vec<u64>),
    Divergent,
}

fn lbt_single_run(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> RunOutcome {
    let mu = cfg.mu as u64;
    let total_spans = cfg.warmup_spans as u64 + cfg.measure_spans as u64;
    let (measure_lo, measure_hi) = cfg.measure_window();
    let hard_cap = cfg.backlog_hard_cap();
    let mut samples = Vec::new();
    // Generation slots of requests still waiting to transmit.
    let mut backlog: Vec<u64> = Vec::new();
    let mut history: Vec<usize> = Vec::new();
    let mut occupancy = vec![0u32; cfg.n_v as usize];
    let mut span = 0u64;
    loop {
        // Requests arrive uniformly over the span and first contend at the
        // next boundary, together with everything backlogged. Arrivals
        // continue past the measured horizon so stragglers drain under
        // realistic contention.
        for _ in 0..cfg.n_r {
            backlog.push(span * mu + rng.gen_range(0..mu));
        }
        let boundary = (span + 1) * mu;
        occupancy.iter_mut().for_each(|o| *o = 0);
        let picks: Vec<usize> =
            backlog.iter().map(|_| rng.gen_range(0..cfg.n_v as usize)).collect();
        for &block in &picks {
            occupancy[block] += 1;
        }
        let mut kept = Vec::with_capacity(backlog.len());
        for (generated, block) in backlog.drain(..).zip(&picks) {
            if occupancy[*block] == 1 {
                if (measure_lo..measure_hi).contains(&generated) {
                    samples.push(boundary - generated);
                }
            } else {
                kept.push(generated);
            }
        }
        backlog = kept;
        history.push(backlog.len());
        if backlog.len() > hard_cap || monotone_backlog_growth(&history) {
            return RunOutcome::Divergent;
        }
        span += 1;
        if span >= total_spans {
            let unresolved =
                backlog.iter().any(|g| (measure_lo..measure_hi).contains(g));
            if !unresolved || span >= total_spans + 50 {
                return RunOutcome::Completed(samples);
            }
        }
    }
}

/// Simulates listen-before-talk contention: per span, fresh requesters
/// plus the backlog each pick one of `n_v` blocks; collisions back off a
/// full span. Latency runs from a request's generation slot to the
/// boundary of its first uncontended attempt. Deterministic in
/// `cfg.seed`; each run uses its own stream.
pub fn simulate_lbt(cfg: &ScenarioConfig) -> Result<LatencyReport, AccessError> {
    cfg.validate()?;
    if cfg.etiquette != Etiquette::Lbt {
        return Err(AccessError::InvalidConfig("etiquette must be lbt"));
    }
    if cfg.n_r == 0 {
        return Err(AccessError::InvalidConfig("n_r must be at least 1 for contention"));
    }
    let mut samples = Vec::new();
    let mut divergent_runs = 0;
    for run in 0..cfg.runs {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(run as u64);
        match lbt_single_run(cfg, &mut rng) {
            RunOutcome::Completed(run_samples) => samples.extend(run_samples),
            RunOutcome::Divergent => divergent_runs += 1,
        }
    }
    Ok(LatencyReport::assemble(samples, cfg.mu, cfg.runs, divergent_runs, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{lbt_latency, LatencyOutcome, LbtParams};
    use crate::protocol::ConsensusPolicy;

    fn cfg(n_r: u32, n_v: u32, mu: u32) -> ScenarioConfig {
        ScenarioConfig {
            n: 1000,
            n_r,
            n_v,
            mu,
            phi: 1,
            gamma: 0.999,
            policy: ConsensusPolicy::default(),
            etiquette: Etiquette::Lbt,
            runs: 4,
            warmup_spans: 20,
            measure_spans: 200,
            seed: 13,
        }
    }

    #[test]
    fn lone_requester_waits_half_a_span() {
        let mut c = cfg(1, 100, 1000);
        c.runs = 55;
        let report = simulate_lbt(&c).unwrap();
        assert!(report.samples.len() >= 10_000);
        assert!(!report.divergent);
        let half_span = 500.0;
        assert!(
            (report.mean - half_span).abs() / half_span < 0.05,
            "mean {} strays from half a span",
            report.mean
        );
    }

    #[test]
    fn light_load_matches_the_backlog_model() {
        let report = simulate_lbt(&cfg(10, 100, 1000)).unwrap();
        let params = LbtParams::new(10, 100, 1000).unwrap();
        let analytic = match lbt_latency(&params) {
            LatencyOutcome::Finite { normalized, .. } => normalized,
            LatencyOutcome::Divergent => unreachable!(),
        };
        let ratio = report.normalized_mean / analytic;
        assert!(
            (0.9..=1.1).contains(&ratio),
            "normalized mean {} vs analytic {analytic}",
            report.normalized_mean
        );
    }

    #[test]
    fn overload_is_flagged_divergent() {
        let mut c = cfg(40, 100, 1000);
        c.runs = 8;
        c.measure_spans = 100;
        let report = simulate_lbt(&c).unwrap();
        assert!(report.divergent);
        assert!(report.mean.is_infinite());
        assert_eq!(report.divergent_runs, 8);
    }

    #[test]
    fn per_attempt_success_rate_matches_the_collision_model() {
        // One designated contender's successes across rounds are
        // independent Bernoulli trials with the uncontended-block odds.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (m, n_v, rounds) = (10u32, 100u32, 60_000u32);
        let mut hits = 0u32;
        for _ in 0..rounds {
            if attempt_round(m, n_v, &mut rng)[0] {
                hits += 1;
            }
        }
        let p = (1.0 - 1.0 / n_v as f64).powi(m as i32 - 1);
        let sigma = (p * (1.0 - p) / rounds as f64).sqrt();
        let observed = hits as f64 / rounds as f64;
        assert!(
            (observed - p).abs() <= 3.0 * sigma,
            "observed {observed} vs model {p} (3 sigma = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn rejects_wrong_etiquette_and_idle_network() {
        let mut c = cfg(10, 100, 1000);
        c.etiquette = Etiquette::Cbt;
        assert!(matches!(simulate_lbt(&c), Err(AccessError::InvalidConfig(_))));
        let c = cfg(0, 100, 1000);
        assert!(matches!(simulate_lbt(&c), Err(AccessError::InvalidConfig(_))));
    }

    #[test]
    fn identical_configs_reproduce_reports() {
        let a = simulate_lbt(&cfg(10, 100, 1000)).unwrap();
        let b = simulate_lbt(&cfg(10, 100, 1000)).unwrap();
        assert_eq!(a, b);
    }
}
