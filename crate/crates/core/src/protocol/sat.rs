use std::collections::{BTreeMap, HashMap};

use super::signature::{Signature, SignatureScheme};
use super::{ProtocolError, SatId, SlotTime, UserId};

/// A signed spectrum access request as it travels the gossip network.
///
/// The verification map collects, per verifying user, the slot at which
/// that user first received and checked the transaction. Entries are never
/// overwritten: re-receiving a transaction is a no-op, so the map reflects
/// first receipt. The origin never appears as a verifier; its stake in the
/// timestamp multiset is the generation slot itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumAccessTransaction {
    sat_id: SatId,
    signature: Signature,
    verifications: BTreeMap<UserId, SlotTime>,
}

impl SpectrumAccessTransaction {
    pub fn sat_id(&self) -> SatId {
        self.sat_id
    }

    pub fn origin(&self) -> UserId {
        self.sat_id.origin
    }

    pub fn generated_at(&self) -> SlotTime {
        self.sat_id.generated_at
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Verification slots keyed by verifier, in user-id order.
    pub fn verifications(&self) -> &BTreeMap<UserId, SlotTime> {
        &self.verifications
    }

    /// Records `verifier`'s receive slot without re-checking the
    /// signature; callers must have validated it (the gossip engine checks
    /// once at admission, which a deterministic scheme makes equivalent to
    /// per-receiver checks). Same idempotence and ordering rules as
    /// [`verify_sat`].
    pub(crate) fn record_verification(
        &mut self,
        verifier: UserId,
        now: SlotTime,
    ) -> Result<(), ProtocolError> {
        if verifier == self.origin() {
            return Err(ProtocolError::SelfVerification { verifier, sat_id: self.sat_id });
        }
        if now < self.generated_at() {
            return Err(ProtocolError::VerificationBeforeGeneration { sat_id: self.sat_id, now });
        }
        self.verifications.entry(verifier).or_insert(now);
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn tamper_generated_at(&mut self, generated_at: SlotTime) {
        self.sat_id.generated_at = generated_at;
    }
}

/// Canonical byte layout signed by the generator: origin, generation slot,
/// and sequence number, each big-endian and fixed-width.
pub fn signing_bytes(sat_id: &SatId) -> [u8; 16] {
    let mut bytes = [0u8; 16];
    bytes[0..4].copy_from_slice(&sat_id.origin.0.to_be_bytes());
    bytes[4..12].copy_from_slice(&sat_id.generated_at.0.to_be_bytes());
    bytes[12..16].copy_from_slice(&sat_id.seq.to_be_bytes());
    bytes
}

/// Creates and signs a fresh transaction for `user` at slot `now`.
///
/// `seq` must be unique per (user, slot); [`SatSequencer`] hands out such
/// numbers. The transaction starts with an empty verification map.
pub fn generate_sat(
    user: UserId,
    now: SlotTime,
    seq: u32,
    scheme: &dyn SignatureScheme,
) -> SpectrumAccessTransaction {
    let sat_id = SatId { origin: user, generated_at: now, seq };
    let (_, secret) = scheme.keypair(user);
    let signature = scheme.sign(&secret, &signing_bytes(&sat_id));
    SpectrumAccessTransaction { sat_id, signature, verifications: BTreeMap::new() }
}

/// Checks the generator's signature and records `verifier`'s receive slot.
///
/// Idempotent: a verifier already present leaves the transaction unchanged,
/// so replayed deliveries cannot move timestamps. Rejects self-verification
/// (the origin's timestamp is its generation slot) and receive slots before
/// generation.
pub fn verify_sat(
    verifier: UserId,
    mut sat: SpectrumAccessTransaction,
    now: SlotTime,
    scheme: &dyn SignatureScheme,
) -> Result<SpectrumAccessTransaction, ProtocolError> {
    if verifier == sat.origin() {
        return Err(ProtocolError::SelfVerification { verifier, sat_id: sat.sat_id });
    }
    if now < sat.generated_at() {
        return Err(ProtocolError::VerificationBeforeGeneration { sat_id: sat.sat_id, now });
    }
    let (public, _) = scheme.keypair(sat.origin());
    if !scheme.verify(&public, &signing_bytes(&sat.sat_id), &sat.signature) {
        return Err(ProtocolError::InvalidSignature { sat_id: sat.sat_id });
    }
    sat.verifications.entry(verifier).or_insert(now);
    Ok(sat)
}

/// Hands out per-user sequence numbers so that repeated requests within one
/// slot still produce distinct transaction ids.
#[derive(Debug, Default)]
pub struct SatSequencer {
    next: HashMap<UserId, u32>,
}

impl SatSequencer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generate(
        &mut self,
        user: UserId,
        now: SlotTime,
        scheme: &dyn SignatureScheme,
    ) -> SpectrumAccessTransaction {
        let seq = self.next.entry(user).or_insert(0);
        let sat = generate_sat(user, now, *seq, scheme);
        *seq += 1;
        sat
    }
}
