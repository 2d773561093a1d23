//! Ledger-based access coordination: signed spectrum access transactions,
//! per-user distributed spectrum ledgers, and the consensus timestamp
//! policies that turn scattered verification times into one shared service
//! order.
//!
//! Every access request travels the network as a
//! [`SpectrumAccessTransaction`]; each user that receives one checks its
//! signature and stamps it with the local receive slot. Once a transaction
//! has spread far enough, every user aggregates the accumulated timestamps
//! under a [`ConsensusPolicy`] and inserts the transaction into the
//! spectrum access queue of its own [`DistributedSpectrumLedger`]. Because
//! all users aggregate the same multiset with the same policy, the queues
//! agree, and serving them in order assigns resource blocks without
//! collisions.

mod dump;
mod ids;
mod ledger;
mod policy;
mod sat;
mod signature;

pub use dump::write_ledger_dump;
pub use ids::{SatId, SlotTime, UserId};
pub use ledger::{DistributedSpectrumLedger, LedgerHeader, SahEntry, SaqEntry};
pub use policy::{consensus_timestamp, Aggregation, ConsensusPolicy, MeanNormalization, Scheduling};
pub use sat::{generate_sat, signing_bytes, verify_sat, SatSequencer, SpectrumAccessTransaction};
pub use signature::{KeyedHashScheme, PublicKey, SecretKey, Signature, SignatureScheme};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProtocolError {
    #[error("signature check failed for transaction {sat_id}")]
    InvalidSignature { sat_id: SatId },
    #[error("user {verifier} cannot verify its own transaction {sat_id}")]
    SelfVerification { verifier: UserId, sat_id: SatId },
    #[error("verification slot {now} precedes the generation of {sat_id}")]
    VerificationBeforeGeneration { sat_id: SatId, now: SlotTime },
    #[error("transaction {sat_id} is already known to this ledger")]
    DuplicateSat { sat_id: SatId },
    #[error("epoch service requested at slot {now}, which is not a span boundary")]
    OffSpanBoundary { now: SlotTime },
    #[error("no timestamps left to aggregate for transaction {sat_id}")]
    EmptyTimestampSet { sat_id: SatId },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
