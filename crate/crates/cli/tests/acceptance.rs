//! Acceptance gate: one test per release criterion, each asserting its
//! stated tolerance and runtime budget and printing one PASS line.

use std::process::Command;
use std::time::{Duration, Instant};

use cbt_core::access::{
    replica_agreement_trial, simulate_cbt, simulate_cbt_detail, simulate_lbt, Etiquette,
    ScenarioConfig,
};
use cbt_core::analytic::{
    cbt_latency, crossing_point, gossip_dissemination_delay, lbt_backlog_sequence,
    lbt_convergence_threshold, lbt_fixed_point, lbt_latency, CbtParams, LbtParams,
};
use cbt_core::gossip::{run_dissemination, GossipMode};
use cbt_core::protocol::{
    consensus_timestamp, generate_sat, verify_sat, Aggregation, ConsensusPolicy,
    DistributedSpectrumLedger, KeyedHashScheme, LedgerHeader, MeanNormalization, SlotTime, UserId,
};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scenario(n: u32, n_r: u32, n_v: u32, mu: u32, etiquette: Etiquette) -> ScenarioConfig {
    ScenarioConfig {
        n,
        n_r,
        n_v,
        mu,
        phi: 1,
        gamma: 0.999,
        policy: ConsensusPolicy::default(),
        etiquette,
        runs: 100,
        warmup_spans: 2,
        measure_spans: 10,
        seed: 0,
    }
}

#[test]
fn criterion_1_analytic_self_consistency() {
    let started = Instant::now();
    for n_r in 1..=36 {
        let p = LbtParams::new(n_r, 100, 1000).unwrap();
        let x = lbt_fixed_point(&p, 1e-12).unwrap();
        let residual = (x * 0.99f64.powf(x - 1.0) - f64::from(n_r)).abs();
        assert!(residual < 1e-9, "n_r={n_r}: residual {residual}");
        let seq = lbt_backlog_sequence(&p, 2000).unwrap();
        let stationary = *seq.last().unwrap();
        assert!(
            (stationary - x).abs() < 1e-4,
            "n_r={n_r}: sequence settles at {stationary}, fixed point {x}"
        );
    }
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("PASS criterion 1: fixed-point residual < 1e-9 and backlog recursion agrees for n_r 1..=36");
}

#[test]
fn criterion_2_lbt_divergence_threshold() {
    let started = Instant::now();
    let threshold = lbt_convergence_threshold(100).unwrap();
    assert!((36.9..=37.0).contains(&threshold), "threshold {threshold}");
    for n_r in 1..=36 {
        let p = LbtParams::new(n_r, 100, 1000).unwrap();
        assert!(!lbt_latency(&p).is_divergent(), "n_r={n_r} should be finite");
    }
    for n_r in 37..=100 {
        let p = LbtParams::new(n_r, 100, 1000).unwrap();
        assert!(lbt_latency(&p).is_divergent(), "n_r={n_r} should diverge");
    }
    let mut flagged = 0;
    for seed in 0..100u64 {
        let mut cfg = scenario(1000, 40, 100, 1000, Etiquette::Lbt);
        cfg.runs = 1;
        cfg.warmup_spans = 10;
        cfg.measure_spans = 100;
        cfg.seed = seed;
        if simulate_lbt(&cfg).unwrap().divergent {
            flagged += 1;
        }
    }
    assert!(flagged >= 95, "divergence flagged in only {flagged}/100 runs");
    assert!(started.elapsed() < Duration::from_secs(120));
    println!(
        "PASS criterion 2: threshold {threshold:.4}, finite through 36, divergent from 37, \
         overload flagged in {flagged}/100 seeded runs"
    );
}

#[test]
fn criterion_3_gossip_delay() {
    let started = Instant::now();
    let delay_model = gossip_dissemination_delay(&CbtParams::new(1000, 10, 1, 0.999, 1000).unwrap());
    assert!((delay_model - 13.815).abs() <= 0.01, "closed form {delay_model}");
    let levels = [0.5, 0.7, 0.9, 0.95, 0.98, 0.99, 1.0];
    let stats = run_dissemination(1000, 1, GossipMode::Push, &levels, 1000, 99).unwrap();
    let complete = stats.iter().find(|s| s.gamma == 1.0).unwrap();
    assert!(
        (13.5..=15.5).contains(&complete.mean_slots),
        "complete spread mean {}",
        complete.mean_slots
    );
    for level in stats.iter().filter(|s| s.gamma <= 0.99) {
        let analytic =
            gossip_dissemination_delay(&CbtParams::new(1000, 10, 1, level.gamma, 1000).unwrap());
        let ratio = level.mean_slots / analytic;
        assert!(
            (0.9..=1.1).contains(&ratio),
            "gamma {}: simulated {} vs analytic {analytic}",
            level.gamma,
            level.mean_slots
        );
    }
    assert!(started.elapsed() < Duration::from_secs(120));
    println!(
        "PASS criterion 3: complete spread mean {:.2} in [13.5, 15.5], model 13.815 +/- 0.01, \
         simulation within 10% through gamma 0.99",
        complete.mean_slots
    );
}

#[test]
fn criterion_4_latency_comparison() {
    let started = Instant::now();
    for n_r in 2..=36 {
        let lbt = lbt_latency(&LbtParams::new(n_r, 100, 10_000).unwrap()).slots().unwrap();
        let cbt = cbt_latency(&CbtParams::new(1000, n_r, 1, 0.999, 10_000).unwrap())
            .slots()
            .unwrap();
        assert!(cbt < lbt, "n_r={n_r}: cbt {cbt} not below lbt {lbt} at mu=10000");
    }
    let crossing = crossing_point(1000, 100, 1, 0.999, 1000, 1..=100).unwrap().unwrap();
    assert!((30..=36).contains(&crossing), "crossing at {crossing}");
    for (n_r, mu) in [(2u32, 1000u32), (10, 1000), (20, 1000), (34, 1000), (10, 10_000)] {
        let mut cfg = scenario(1000, n_r, 100, mu, Etiquette::Cbt);
        cfg.seed = 1234;
        let cbt_sim = simulate_cbt(&cfg).unwrap();
        let cbt_model =
            cbt_latency(&CbtParams::new(1000, n_r, 1, 0.999, mu).unwrap()).normalized().unwrap();
        let ratio = cbt_sim.normalized_mean / cbt_model;
        assert!(
            (0.85..=1.15).contains(&ratio),
            "cbt n_r={n_r} mu={mu}: sim {} vs model {cbt_model}",
            cbt_sim.normalized_mean
        );
        cfg.etiquette = Etiquette::Lbt;
        let lbt_sim = simulate_lbt(&cfg).unwrap();
        let lbt_model =
            lbt_latency(&LbtParams::new(n_r, 100, mu).unwrap()).normalized().unwrap();
        let ratio = lbt_sim.normalized_mean / lbt_model;
        assert!(
            (0.85..=1.15).contains(&ratio),
            "lbt n_r={n_r} mu={mu}: sim {} vs model {lbt_model}",
            lbt_sim.normalized_mean
        );
    }
    assert!(started.elapsed() < Duration::from_secs(600));
    println!(
        "PASS criterion 4: cbt analytic below lbt across n_r 2..=36 at mu=10000, \
         crossing at n_r={crossing}, simulation within 15% at 100 runs per point"
    );
}

#[test]
fn criterion_5_scalability() {
    let started = Instant::now();
    let populations = [100u32, 1000, 10_000];
    let xs: Vec<f64> = populations.iter().map(|&n| f64::from(n).ln()).collect();
    let ys: Vec<f64> = populations
        .iter()
        .map(|&n| {
            cbt_latency(&CbtParams::new(n, 10, 1, 0.999, 2500).unwrap()).normalized().unwrap()
        })
        .collect();
    let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 =
        xs.iter().zip(&ys).map(|(x, y)| (y - (intercept + slope * x)).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let r_squared = 1.0 - ss_res / ss_tot;
    assert!(r_squared > 0.999, "log fit r-squared {r_squared}");
    assert!(slope > 0.0);
    let lbt_reference = lbt_latency(&LbtParams::new(10, 100, 2500).unwrap()).normalized().unwrap();
    for _ in &populations {
        let again = lbt_latency(&LbtParams::new(10, 100, 2500).unwrap()).normalized().unwrap();
        assert_eq!(again, lbt_reference, "contention model must not depend on population");
    }
    assert!(started.elapsed() < Duration::from_secs(60));
    for n in [100u32, 1000] {
        let mut cfg = scenario(n, 10, 100, 2500, Etiquette::Cbt);
        cfg.runs = 30;
        cfg.measure_spans = 6;
        cfg.seed = 5;
        let cbt_sim = simulate_cbt(&cfg).unwrap();
        let cbt_model =
            cbt_latency(&CbtParams::new(n, 10, 1, 0.999, 2500).unwrap()).normalized().unwrap();
        let ratio = cbt_sim.normalized_mean / cbt_model;
        assert!(
            (0.85..=1.15).contains(&ratio),
            "cbt n={n}: sim {} vs model {cbt_model}",
            cbt_sim.normalized_mean
        );
        cfg.etiquette = Etiquette::Lbt;
        let lbt_sim = simulate_lbt(&cfg).unwrap();
        let ratio = lbt_sim.normalized_mean / lbt_reference;
        assert!(
            (0.85..=1.15).contains(&ratio),
            "lbt n={n}: sim {} vs model {lbt_reference}",
            lbt_sim.normalized_mean
        );
    }
    println!(
        "PASS criterion 5: log fit r-squared {r_squared:.6}, contention flat in n, \
         spot simulations within 15%"
    );
}

#[test]
fn criterion_6_protocol_properties() {
    let started = Instant::now();

    // (a) No block is ever assigned twice within a span.
    let mut cfg = scenario(50, 5, 10, 300, Etiquette::Cbt);
    cfg.gamma = 1.0;
    cfg.runs = 1;
    cfg.warmup_spans = 0;
    cfg.measure_spans = 10_000;
    cfg.seed = 6;
    let (report, detail) = simulate_cbt_detail(&cfg).unwrap();
    assert!(!report.divergent);
    let windows = &detail[0];
    assert!(windows.len() >= 9000, "only {} service windows", windows.len());
    let mut previous_epoch = None;
    for window in windows {
        assert!(previous_epoch < Some(window.epoch));
        previous_epoch = Some(window.epoch);
        let mut seen = std::collections::BTreeSet::new();
        for &(block, _) in &window.blocks {
            assert!(block < cfg.n_v);
            assert!(seen.insert(block), "block {block} reused in span {}", window.epoch);
        }
    }

    // (b) Every replica's queue equals the brute-force oracle order.
    let shared_median = ConsensusPolicy {
        aggregation: Aggregation::Median,
        exclude_observer: false,
        ..ConsensusPolicy::default()
    };
    for (n, sats, seed) in [(5u32, 12u32, 1u64), (17, 25, 2), (50, 40, 3)] {
        let trial = replica_agreement_trial(n, sats, shared_median, 500, seed).unwrap();
        assert!(trial.agreed, "replicas disagree at n={n}, seed={seed}");
    }

    // (c) Excluding the observer's own stamp moves a size-normalized mean
    // by at most range/n between any two observers.
    let n = 40u32;
    let policy = ConsensusPolicy {
        normalization: MeanNormalization::ByN,
        exclude_observer: true,
        ..ConsensusPolicy::default()
    };
    let scheme = KeyedHashScheme::new(8);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seq in 0..1000u32 {
        let origin = UserId(rng.gen_range(0..n));
        let generated = u64::from(rng.gen_range(0..1000u32));
        let mut sat = generate_sat(origin, SlotTime(generated), seq, &scheme);
        for v in (0..n).map(UserId).filter(|&v| v != origin) {
            let stamp = SlotTime(generated + u64::from(rng.gen_range(0..1000u32)));
            sat = verify_sat(v, sat, stamp, &scheme).unwrap();
        }
        let values: Vec<u64> = std::iter::once(generated)
            .chain(sat.verifications().values().map(|t| t.0))
            .collect();
        let range = (*values.iter().max().unwrap() - *values.iter().min().unwrap()) as f64;
        let estimates: Vec<f64> = (0..n)
            .map(|j| consensus_timestamp(&sat, UserId(j), &policy, n).unwrap())
            .collect();
        let spread = estimates.iter().cloned().fold(f64::MIN, f64::max)
            - estimates.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            spread <= range / f64::from(n) + 1e-9,
            "sat {seq}: observer spread {spread} exceeds {}",
            range / f64::from(n)
        );
    }

    // (d) A median queue puts honest early stamps first no matter how far
    // one verifier inflates its timestamp.
    let vector_policy = ConsensusPolicy {
        aggregation: Aggregation::Median,
        exclude_observer: false,
        include_generated: false,
        ..ConsensusPolicy::default()
    };
    for inflated in [98u64, 10_000, 1_000_000_000] {
        let honest = {
            let mut sat = generate_sat(UserId(9), SlotTime(1), 0, &scheme);
            for v in [1, 2, 3] {
                sat = verify_sat(UserId(v), sat, SlotTime(2), &scheme).unwrap();
            }
            sat
        };
        let cheated = {
            let mut sat = generate_sat(UserId(8), SlotTime(1), 1, &scheme);
            for v in [4, 5] {
                sat = verify_sat(UserId(v), sat, SlotTime(1), &scheme).unwrap();
            }
            verify_sat(UserId(6), sat, SlotTime(inflated), &scheme).unwrap()
        };
        let header = LedgerHeader { n_v: 10, mu: 100, epoch: 0 };
        let mut ledger = DistributedSpectrumLedger::new(UserId(0), header, vector_policy);
        for sat in [&honest, &cheated] {
            let t_hat = consensus_timestamp(sat, UserId(0), &vector_policy, 10).unwrap();
            ledger.enqueue_sat(sat.sat_id(), t_hat).unwrap();
        }
        assert_eq!(
            ledger.saq()[0].sat_id,
            cheated.sat_id(),
            "stamps {{1,1,{inflated}}} must order before {{2,2,2}}"
        );
    }

    assert!(started.elapsed() < Duration::from_secs(60));
    println!(
        "PASS criterion 6: collision-free over 10000 spans, replicas agree with the oracle, \
         observer exclusion bounded by range/n, median resists timestamp inflation"
    );
}

#[test]
fn criterion_7_preset_determinism() {
    let presets: [&[&str]; 4] = [
        &["fig4", "--runs", "100", "--seed", "11"],
        &["fig5", "--runs", "2", "--spans", "4", "--warmup", "1", "--seed", "7"],
        &["fig6", "--runs", "2", "--spans", "3", "--warmup", "1", "--seed", "5"],
        &["crossing", "--seed", "3"],
    ];
    for args in presets {
        let once = run_preset(args);
        let twice = run_preset(args);
        assert!(!once.is_empty());
        assert_eq!(once, twice, "{:?} not byte-identical across reruns", args);
    }
    println!("PASS criterion 7: fig4, fig5, fig6, and crossing are byte-identical across reruns");
}

fn run_preset(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_cbt"))
        .args(args)
        .env_remove("CBT_SEED")
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}
