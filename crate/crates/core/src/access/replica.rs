use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gossip::{disseminate, DisseminationSetup, GossipMode};
use crate::protocol::{
    consensus_timestamp, generate_sat, Aggregation, ConsensusPolicy, DistributedSpectrumLedger,
    LedgerHeader, MeanNormalization, SatId, SlotTime, UserId,
};

use super::AccessError;

/// Outcome of one replica-agreement experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicaTrial {
    /// Queue order each user's own replica arrived at.
    pub orders: Vec<Vec<SatId>>,
    /// Order from aggregating every stamp multiset directly and sorting
    /// once, bypassing the incremental queue.
    pub oracle: Vec<SatId>,
    pub agreed: bool,
}

/// Gossips `n_sats` randomly generated transactions to every user, has
/// each user build their own queue from their own consensus timestamps,
/// and compares all replicas against a brute-force reference order.
///
/// With observer exclusion off, every user aggregates the same stamp
/// multiset, so all replicas must agree exactly; with it on, replicas may
/// legitimately differ and `agreed` reports whether they happened to.
pub fn replica_agreement_trial(
    n: u32,
    n_sats: u32,
    policy: ConsensusPolicy,
    mu: u32,
    seed: u64,
) -> Result<ReplicaTrial, AccessError> {
    if n < 2 {
        return Err(AccessError::InvalidConfig("n must be at least 2"));
    }
    if n_sats == 0 {
        return Err(AccessError::InvalidConfig("n_sats must be at least 1"));
    }
    if mu == 0 {
        return Err(AccessError::InvalidConfig("mu must be at least 1"));
    }
    let scheme = crate::protocol::KeyedHashScheme::new(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sats = Vec::with_capacity(n_sats as usize);
    for seq in 0..n_sats {
        let origin = UserId(rng.gen_range(0..n));
        let generated = SlotTime(rng.gen_range(0..u64::from(mu)));
        let sat = generate_sat(origin, generated, seq, &scheme);
        let setup = DisseminationSetup {
            n,
            phi: 1,
            mode: GossipMode::Push,
            start: generated,
            gamma_levels: &[1.0],
            slot_cap: None,
        };
        let (_, full) = disseminate(setup, sat, &scheme, &mut rng)
            .map_err(|source| AccessError::Gossip { seed, source })?;
        sats.push(full);
    }

    let header = LedgerHeader { n_v: n, mu: u64::from(mu), epoch: 0 };
    let mut orders = Vec::with_capacity(n as usize);
    for user in (0..n).map(UserId) {
        let mut ledger = DistributedSpectrumLedger::new(user, header, policy);
        for sat in &sats {
            let t_hat = consensus_timestamp(sat, user, &policy, n)?;
            ledger.enqueue_sat(sat.sat_id(), t_hat)?;
        }
        orders.push(ledger.saq().iter().map(|e| e.sat_id).collect::<Vec<_>>());
    }

    let mut keyed: Vec<(f64, UserId, SatId)> = sats
        .iter()
        .map(|sat| {
            let mut values: Vec<u64> = sat.verifications().values().map(|t| t.0).collect();
            if policy.include_generated {
                values.push(sat.generated_at().0);
            }
            values.sort_unstable();
            let t_hat = match policy.aggregation {
                Aggregation::Median => values[(values.len() - 1) / 2] as f64,
                Aggregation::Mean => {
                    let sum: u64 = values.iter().sum();
                    let divisor = match policy.normalization {
                        MeanNormalization::ByCount => values.len() as f64,
                        MeanNormalization::ByN => f64::from(n),
                    };
                    sum as f64 / divisor
                }
            };
            (t_hat, sat.origin(), sat.sat_id())
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let oracle: Vec<SatId> = keyed.into_iter().map(|(_, _, id)| id).collect();

    let agreed = orders.iter().all(|order| *order == oracle);
    Ok(ReplicaTrial { orders, oracle, agreed })
}
