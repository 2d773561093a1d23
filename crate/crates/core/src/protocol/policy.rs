use super::sat::SpectrumAccessTransaction;
use super::{ProtocolError, UserId};

/// How the timestamp multiset collapses into one consensus value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Mean,
    Median,
}

/// Divisor used by the mean: the multiset size, or the network size `n`.
/// Dividing by `n` discounts transactions seen by few users, so sparsely
/// verified requests sort earlier (smaller value) only once widely spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanNormalization {
    ByCount,
    ByN,
}

/// Queue ordering discipline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduling {
    /// Strictly by consensus timestamp.
    FirstVerifiedFirstServed,
    /// Users served fewer times so far go first; timestamp breaks ties.
    FairnessGuarantee,
}

/// Rules every user applies identically when ranking queued transactions.
///
/// All users must run the same policy; agreement on queue order then
/// follows from agreement on ledger contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsensusPolicy {
    pub aggregation: Aggregation,
    /// Drop the observer's own entries from the multiset before
    /// aggregating. Different observers then aggregate different multisets,
    /// so exact cross-user agreement holds only when this is off.
    pub exclude_observer: bool,
    /// Count the generation slot as the origin's contribution.
    pub include_generated: bool,
    pub normalization: MeanNormalization,
    pub scheduling: Scheduling,
    /// With fairness scheduling, only service within the trailing window of
    /// this many epochs counts against a user; `None` counts all history.
    pub fairness_window: Option<u32>,
}

impl Default for ConsensusPolicy {
    fn default() -> Self {
        Self {
            aggregation: Aggregation::Mean,
            exclude_observer: true,
            include_generated: true,
            normalization: MeanNormalization::ByCount,
            scheduling: Scheduling::FirstVerifiedFirstServed,
            fairness_window: None,
        }
    }
}

/// Collapses a transaction's timestamp multiset into the value `observer`
/// uses to order its queue.
///
/// The multiset is the generation slot (standing in for the origin, when
/// included and not excluded as the observer's own) plus every verifier's
/// receive slot except, optionally, the observer's. Median is the lower
/// median of the sorted multiset, so it is always one of the recorded
/// slots. Errors if the policy empties the multiset.
pub fn consensus_timestamp(
    sat: &SpectrumAccessTransaction,
    observer: UserId,
    policy: &ConsensusPolicy,
    n: u32,
) -> Result<f64, ProtocolError> {
    let mut values: Vec<u64> = Vec::with_capacity(sat.verifications().len() + 1);
    if policy.include_generated && !(policy.exclude_observer && observer == sat.origin()) {
        values.push(sat.generated_at().0);
    }
    for (&user, &slot) in sat.verifications() {
        if policy.exclude_observer && user == observer {
            continue;
        }
        values.push(slot.0);
    }
    if values.is_empty() {
        return Err(ProtocolError::EmptyTimestampSet { sat_id: sat.sat_id() });
    }
    Ok(match policy.aggregation {
        Aggregation::Mean => {
            let sum: f64 = values.iter().map(|&v| v as f64).sum();
            let divisor = match policy.normalization {
                MeanNormalization::ByCount => values.len() as f64,
                MeanNormalization::ByN => n as f64,
            };
            sum / divisor
        }
        Aggregation::Median => {
            values.sort_unstable();
            values[(values.len() - 1) / 2] as f64
        }
    })
}
