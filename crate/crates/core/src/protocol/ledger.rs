use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use rand::Rng;

use super::policy::{ConsensusPolicy, Scheduling};
use super::{ProtocolError, SatId, SlotTime, UserId};

/// Shared channel bookkeeping: how many resource blocks a span offers, how
/// long a span is, and which span the ledger has reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerHeader {
    /// Accessible resource blocks per span.
    pub n_v: u32,
    /// Span length in slots.
    pub mu: u64,
    /// Current span index; advances only at span boundaries.
    pub epoch: u64,
}

/// Queued access request: the transaction id plus the consensus timestamp
/// the owner computed for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaqEntry {
    pub sat_id: SatId,
    pub t_hat: f64,
}

/// Completed access: when the request was actually served.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SahEntry {
    pub sat_id: SatId,
    pub origin: UserId,
    pub served_at: SlotTime,
}

/// One user's replica of the shared spectrum ledger: a priority queue of
/// pending requests and an append-only history of completed ones.
///
/// All replicas run the same policy, so replicas that agree on the queued
/// transactions and their consensus timestamps agree on service order.
/// The queue is kept sorted by the scheduling key at all times; under
/// fairness scheduling the key includes the origin's service count, so the
/// remainder is re-sorted whenever counts change.
#[derive(Debug, Clone)]
pub struct DistributedSpectrumLedger {
    owner: UserId,
    header: LedgerHeader,
    policy: ConsensusPolicy,
    saq: Vec<SaqEntry>,
    sah: Vec<SahEntry>,
    /// Every id ever enqueued; membership spans both queue and history.
    known: BTreeSet<SatId>,
    /// (origin, epoch served) per history entry, for windowed fairness.
    service_log: Vec<(UserId, u64)>,
    counts: HashMap<UserId, u32>,
}

fn compare_entries(
    a: &SaqEntry,
    b: &SaqEntry,
    scheduling: Scheduling,
    counts: &HashMap<UserId, u32>,
) -> Ordering {
    if scheduling == Scheduling::FairnessGuarantee {
        let ca = counts.get(&a.sat_id.origin).copied().unwrap_or(0);
        let cb = counts.get(&b.sat_id.origin).copied().unwrap_or(0);
        match ca.cmp(&cb) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    a.t_hat
        .total_cmp(&b.t_hat)
        .then_with(|| a.sat_id.origin.cmp(&b.sat_id.origin))
        .then_with(|| a.sat_id.cmp(&b.sat_id))
}

/// Draws `count` distinct slots from `[start, start + mu)`, ascending, so
/// head-of-queue requests get the earliest service slots.
fn sorted_service_slots<R: Rng + ?Sized>(
    rng: &mut R,
    start: u64,
    mu: u64,
    count: usize,
) -> Vec<u64> {
    debug_assert!(count as u64 <= mu);
    let mut chosen = BTreeSet::new();
    // Floyd's sampling: uniform over all count-subsets of the span.
    for j in (mu - count as u64)..mu {
        let pick = rng.gen_range(0..=j);
        if !chosen.insert(pick) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().map(|offset| start + offset).collect()
}

impl DistributedSpectrumLedger {
    pub fn new(owner: UserId, header: LedgerHeader, policy: ConsensusPolicy) -> Self {
        Self {
            owner,
            header,
            policy,
            saq: Vec::new(),
            sah: Vec::new(),
            known: BTreeSet::new(),
            service_log: Vec::new(),
            counts: HashMap::new(),
        }
    }

    pub fn owner(&self) -> UserId {
        self.owner
    }

    pub fn header(&self) -> &LedgerHeader {
        &self.header
    }

    pub fn policy(&self) -> &ConsensusPolicy {
        &self.policy
    }

    /// Pending requests in service order.
    pub fn saq(&self) -> &[SaqEntry] {
        &self.saq
    }

    /// Completed requests in service order.
    pub fn sah(&self) -> &[SahEntry] {
        &self.sah
    }

    /// Times `user` was served, restricted to the trailing fairness window
    /// when one is configured.
    pub fn served_count(&self, user: UserId) -> u32 {
        match self.policy.fairness_window {
            None => self.counts.get(&user).copied().unwrap_or(0),
            Some(window) => {
                let floor = self.header.epoch.saturating_sub(window as u64);
                self.service_log
                    .iter()
                    .filter(|&&(origin, epoch)| origin == user && epoch >= floor)
                    .count() as u32
            }
        }
    }

    fn refresh_counts(&mut self) {
        if let Some(window) = self.policy.fairness_window {
            let floor = self.header.epoch.saturating_sub(window as u64);
            self.counts.clear();
            for &(origin, epoch) in &self.service_log {
                if epoch >= floor {
                    *self.counts.entry(origin).or_insert(0) += 1;
                }
            }
        }
    }

    fn resort(&mut self) {
        let scheduling = self.policy.scheduling;
        let counts = &self.counts;
        self.saq.sort_by(|a, b| compare_entries(a, b, scheduling, counts));
    }

    /// Inserts a request at its scheduled position.
    ///
    /// The caller supplies the consensus timestamp it computed for the
    /// transaction; the ledger only orders. Ids already queued or already
    /// served are rejected, which makes redelivery harmless.
    pub fn enqueue_sat(&mut self, sat_id: SatId, t_hat: f64) -> Result<(), ProtocolError> {
        if !self.known.insert(sat_id) {
            return Err(ProtocolError::DuplicateSat { sat_id });
        }
        let entry = SaqEntry { sat_id, t_hat };
        let scheduling = self.policy.scheduling;
        let counts = &self.counts;
        let at = self
            .saq
            .binary_search_by(|probe| compare_entries(probe, &entry, scheduling, counts))
            .unwrap_err();
        self.saq.insert(at, entry);
        Ok(())
    }

    /// Serves one full span starting at `now`: pops up to `n_v` head
    /// requests, stamps them with distinct slots drawn uniformly over the
    /// span (ascending, matching queue order), and advances the epoch.
    pub fn serve_epoch<R: Rng + ?Sized>(
        &mut self,
        now: SlotTime,
        rng: &mut R,
    ) -> Result<Vec<SahEntry>, ProtocolError> {
        if now.0 % self.header.mu != 0 {
            return Err(ProtocolError::OffSpanBoundary { now });
        }
        let count = self.saq.len().min(self.header.n_v as usize).min(self.header.mu as usize);
        let slots = sorted_service_slots(rng, now.0, self.header.mu, count);
        let served: Vec<SahEntry> = self
            .saq
            .drain(..count)
            .zip(slots)
            .map(|(entry, slot)| SahEntry {
                sat_id: entry.sat_id,
                origin: entry.sat_id.origin,
                served_at: SlotTime(slot),
            })
            .collect();
        self.record_service(&served);
        self.header.epoch += 1;
        self.after_service_update();
        Ok(served)
    }

    /// Serves up to `limit` head requests immediately at `now`, without
    /// touching the epoch. Lets a driving simulation serve requests the
    /// moment they clear consensus instead of once per span.
    pub fn serve_ready(&mut self, now: SlotTime, limit: usize) -> Vec<SahEntry> {
        let count = self.saq.len().min(limit);
        let served: Vec<SahEntry> = self
            .saq
            .drain(..count)
            .map(|entry| SahEntry {
                sat_id: entry.sat_id,
                origin: entry.sat_id.origin,
                served_at: now,
            })
            .collect();
        self.record_service(&served);
        self.after_service_update();
        served
    }

    /// Marks a span boundary without serving anything.
    pub fn advance_epoch(&mut self) {
        self.header.epoch += 1;
        self.after_service_update();
    }

    fn record_service(&mut self, served: &[SahEntry]) {
        for entry in served {
            self.sah.push(*entry);
            self.service_log.push((entry.origin, self.header.epoch));
            *self.counts.entry(entry.origin).or_insert(0) += 1;
        }
    }

    fn after_service_update(&mut self) {
        if self.policy.scheduling == Scheduling::FairnessGuarantee {
            self.refresh_counts();
            self.resort();
        }
    }

    #[cfg(test)]
    fn assert_sorted(&self) {
        let scheduling = self.policy.scheduling;
        for pair in self.saq.windows(2) {
            assert_ne!(
                compare_entries(&pair[0], &pair[1], scheduling, &self.counts),
                Ordering::Greater,
                "queue out of order: {:?} before {:?}",
                pair[0],
                pair[1]
            );
        }
    }
}
