//! End-to-end latency simulation of the two channel-access etiquettes.
//!
//! Listen-before-talk contends directly: requesters pick a resource block
//! at random each span and back off a full span on collision. The
//! ledger-based etiquette first disseminates each request by gossip, then
//! serves the consensus-ordered queue collision-free. Both simulators
//! produce latency reports over seeded Monte Carlo runs, and the sweep
//! driver tabulates them against the closed-form models along one
//! parameter axis.

mod cbt;
mod config;
mod lbt;
mod replica;
mod sweep;

pub use cbt::{simulate_cbt, simulate_cbt_detail, BlockAssignment};
pub use config::{Etiquette, LatencyReport, ScenarioConfig};
pub use lbt::{attempt_round, simulate_lbt};
pub use replica::{replica_agreement_trial, ReplicaTrial};
pub use sweep::{derive_seed, sweep, SweepAxis, SweepRow, SWEEP_CSV_HEADER};

use crate::gossip::GossipError;
use crate::protocol::ProtocolError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AccessError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(&'static str),
    #[error("gossip failed under seed {seed}: {source}")]
    Gossip {
        seed: u64,
        #[source]
        source: GossipError,
    },
    #[error("ledger rejected a transaction: {0}")]
    Protocol(#[from] ProtocolError),
}

/// Shared divergence heuristic: a backlog has started growing without
/// bound when the per-span means of ten consecutive five-span blocks are
/// strictly increasing. Block means wash out span-to-span noise that
/// virtually never yields fifty consecutive raw increases, while a
/// stationary backlog passes all nine comparisons with probability under
/// one in a million.
pub(crate) fn monotone_backlog_growth(history: &[usize]) -> bool {
    const WINDOW: usize = 50;
    const BLOCK: usize = 5;
    if history.len() < WINDOW {
        return false;
    }
    let tail = &history[history.len() - WINDOW..];
    let means: Vec<f64> = tail
        .chunks(BLOCK)
        .map(|block| block.iter().sum::<usize>() as f64 / BLOCK as f64)
        .collect();
    means.windows(2).all(|pair| pair[1] > pair[0])
}
