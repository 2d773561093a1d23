//! Slotted epidemic dissemination of signed transactions.
//!
//! Every user gets one transmission opportunity per slot, placed uniformly
//! at random within the slot. A user that receives a transaction early in a
//! slot relays it at its own opportunity later in the same slot, so
//! in-slot cascades occur exactly as they would on a continuous timeline;
//! per-slot holder counts then track the continuous logistic growth curve
//! instead of the slower doubling of lockstep rounds. Receipts are stamped
//! at the next slot boundary, which keeps two-user spread deterministic:
//! one holder, one target, delay one slot.
//!
//! Push mode has holders transmit to `phi` random targets; pull mode has
//! users still missing a transaction poll one random user each; hybrid
//! switches from push to pull once a configured fraction holds the
//! transaction. Signatures are checked when a transaction is admitted to
//! the engine; per-receipt verification then only records the timestamp,
//! since a deterministic scheme returns the same verdict for every
//! receiver.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::protocol::{
    signing_bytes, KeyedHashScheme, SatId, SignatureScheme, SlotTime, SpectrumAccessTransaction,
    UserId,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GossipError {
    #[error("invalid gossip parameter: {0}")]
    InvalidParam(&'static str),
    #[error("transaction {sat_id} failed signature admission")]
    RejectedSat { sat_id: SatId },
    #[error("dissemination still incomplete after {cap} slots (n={n})")]
    SlotCapExceeded { n: u32, cap: u64 },
}

/// Spreading discipline for a slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GossipMode {
    /// Holders transmit to `phi` random targets each slot.
    Push,
    /// Users missing a transaction poll one random user each slot.
    Pull,
    /// Push until `switch_fraction` of users hold every in-flight
    /// transaction, then pull.
    Hybrid { switch_fraction: f64 },
}

/// One transaction's spread through the network.
#[derive(Debug, Clone)]
struct Flight {
    sat: SpectrumAccessTransaction,
    holders: Vec<bool>,
    holder_count: u32,
    /// Holder count at each slot boundary since the flight started.
    counts: Vec<u32>,
}

/// Dissemination engine state: population, mode, clock, and the set of
/// in-flight transactions. Multiple flights ride the same transmission
/// opportunities (every contact carries all transactions the sender holds).
#[derive(Debug, Clone)]
pub struct GossipState {
    n: u32,
    phi: u32,
    mode: GossipMode,
    clock: SlotTime,
    slots_elapsed: u64,
    slot_cap: u64,
    flights: Vec<Flight>,
    /// Flights held per user; a user transmits iff it holds at least one.
    held: Vec<u32>,
    slot_gen: u64,
    phase_stamp: Vec<u64>,
    phase_value: Vec<u32>,
    sched_stamp: Vec<u64>,
}

fn default_slot_cap(n: u32) -> u64 {
    (100.0 * (n as f64).ln() + 1000.0) as u64
}

/// Smallest holder count that satisfies coverage level `gamma`, clamped to
/// at least the origin itself. The epsilon absorbs binary rounding in
/// products like 0.9 * 1000.
pub fn coverage_target(n: u32, gamma: f64) -> u32 {
    let raw = (gamma * n as f64 - 1e-9).ceil();
    (raw.max(1.0) as u32).min(n)
}

impl GossipState {
    pub fn new(n: u32, phi: u32, mode: GossipMode, start: SlotTime) -> Result<Self, GossipError> {
        if n < 2 {
            return Err(GossipError::InvalidParam("n must be at least 2"));
        }
        if phi == 0 || phi >= n {
            return Err(GossipError::InvalidParam("phi must be in [1, n-1]"));
        }
        if let GossipMode::Hybrid { switch_fraction } = mode {
            if !(0.0..=1.0).contains(&switch_fraction) {
                return Err(GossipError::InvalidParam("switch_fraction must lie in [0, 1]"));
            }
        }
        Ok(Self {
            n,
            phi,
            mode,
            clock: start,
            slots_elapsed: 0,
            slot_cap: default_slot_cap(n),
            flights: Vec::new(),
            held: vec![0; n as usize],
            slot_gen: 0,
            phase_stamp: vec![0; n as usize],
            phase_value: vec![0; n as usize],
            sched_stamp: vec![0; n as usize],
        })
    }

    /// Replaces the runaway guard; tests use a tiny cap to exercise the
    /// error path.
    pub fn set_slot_cap(&mut self, cap: u64) {
        self.slot_cap = cap;
    }

    pub fn clock(&self) -> SlotTime {
        self.clock
    }

    pub fn flight_count(&self) -> usize {
        self.flights.len()
    }

    pub fn holder_count(&self, flight: usize) -> u32 {
        self.flights[flight].holder_count
    }

    /// Holder counts per slot boundary, starting at 1 for the origin.
    pub fn holder_counts(&self, flight: usize) -> &[u32] {
        &self.flights[flight].counts
    }

    pub fn sat(&self, flight: usize) -> &SpectrumAccessTransaction {
        &self.flights[flight].sat
    }

    pub fn into_sat(mut self, flight: usize) -> SpectrumAccessTransaction {
        self.flights.swap_remove(flight).sat
    }

    pub fn is_complete(&self) -> bool {
        self.flights.iter().all(|f| f.holder_count == self.n)
    }

    /// Admits a transaction, checking its signature once on behalf of all
    /// future receivers. The origin holds it from the start.
    pub fn add_sat(
        &mut self,
        sat: SpectrumAccessTransaction,
        scheme: &dyn SignatureScheme,
    ) -> Result<usize, GossipError> {
        let origin = sat.origin();
        if origin.0 >= self.n {
            return Err(GossipError::InvalidParam("origin outside the population"));
        }
        let (public, _) = scheme.keypair(origin);
        if !scheme.verify(&public, &signing_bytes(&sat.sat_id()), sat.signature()) {
            return Err(GossipError::RejectedSat { sat_id: sat.sat_id() });
        }
        let mut holders = vec![false; self.n as usize];
        holders[origin.0 as usize] = true;
        self.held[origin.0 as usize] += 1;
        self.flights.push(Flight { sat, holders, holder_count: 1, counts: vec![1] });
        Ok(self.flights.len() - 1)
    }

    /// Marks `users` as already holding flight `flight`, stamping their
    /// verifications at the current clock. Scenario setup shortcut for
    /// studying late-phase behavior.
    pub fn seed_holders(
        &mut self,
        flight: usize,
        users: impl IntoIterator<Item = UserId>,
    ) -> Result<(), GossipError> {
        let now = self.clock;
        for user in users {
            if user.0 >= self.n {
                return Err(GossipError::InvalidParam("seeded holder outside the population"));
            }
            let f = &mut self.flights[flight];
            if !f.holders[user.0 as usize] {
                f.holders[user.0 as usize] = true;
                f.holder_count += 1;
                self.held[user.0 as usize] += 1;
                if user != f.sat.origin() {
                    f.sat
                        .record_verification(user, now)
                        .expect("seeding stamps at or after generation");
                }
                *f.counts.last_mut().unwrap() = f.holder_count;
            }
        }
        Ok(())
    }

    fn phase(&mut self, user: usize, rng: &mut impl Rng) -> u32 {
        if self.phase_stamp[user] != self.slot_gen {
            self.phase_stamp[user] = self.slot_gen;
            self.phase_value[user] = rng.gen();
        }
        self.phase_value[user]
    }

    /// Delivers every flight `from` holds and `to` lacks; returns whether
    /// `to` went from holding nothing to holding something.
    fn deliver(&mut self, from: usize, to: usize, stamp: SlotTime) -> bool {
        let was_idle = self.held[to] == 0;
        let mut received = false;
        for f in &mut self.flights {
            if f.holders[from] && !f.holders[to] {
                f.holders[to] = true;
                f.holder_count += 1;
                f.sat
                    .record_verification(UserId(to as u32), stamp)
                    .expect("receipt stamps follow generation");
                received = true;
                self.held[to] += 1;
            }
        }
        received && was_idle
    }

    fn pick_target(&self, from: usize, rng: &mut impl Rng) -> usize {
        let raw = rng.gen_range(0..self.n as usize - 1);
        if raw >= from {
            raw + 1
        } else {
            raw
        }
    }

    /// One push slot: each holder transmits to `phi` distinct targets at a
    /// random moment within the slot; users reached before their own
    /// moment relay in the same slot.
    pub fn gossip_step(&mut self, rng: &mut impl Rng) -> Result<(), GossipError> {
        self.check_cap()?;
        self.slot_gen += 1;
        let stamp = SlotTime(self.clock.0 + 1);
        let mut heap: BinaryHeap<Reverse<(u32, usize)>> = BinaryHeap::new();
        for user in 0..self.n as usize {
            if self.held[user] > 0 {
                self.sched_stamp[user] = self.slot_gen;
                let p = self.phase(user, rng);
                heap.push(Reverse((p, user)));
            }
        }
        let mut contacted: Vec<usize> = Vec::with_capacity(self.phi as usize);
        while let Some(Reverse((now_phase, from))) = heap.pop() {
            contacted.clear();
            for pick in 0..self.phi {
                // phi is tiny; retrying duplicate targets beats set
                // machinery and is a single draw for phi = 1.
                let to = loop {
                    let t = self.pick_target(from, rng);
                    if pick == 0 || !contacted.contains(&t) {
                        break t;
                    }
                };
                if self.phi > 1 {
                    contacted.push(to);
                }
                let newly_holding = self.deliver(from, to, stamp);
                if newly_holding && self.sched_stamp[to] != self.slot_gen {
                    self.sched_stamp[to] = self.slot_gen;
                    let q = self.phase(to, rng);
                    if q > now_phase {
                        heap.push(Reverse((q, to)));
                    }
                }
            }
        }
        self.finish_slot();
        Ok(())
    }

    /// One pull slot: each user still missing a flight polls one random
    /// user at a random moment; a poll finding a fresher peer copies
    /// everything the peer holds, and the requester serves still-later
    /// polls in the same slot.
    pub fn pull_step(&mut self, rng: &mut impl Rng) -> Result<(), GossipError> {
        self.check_cap()?;
        self.slot_gen += 1;
        let stamp = SlotTime(self.clock.0 + 1);
        let want = self.flights.len() as u32;
        let mut heap: BinaryHeap<Reverse<(u32, usize)>> = BinaryHeap::new();
        for user in 0..self.n as usize {
            if self.held[user] < want {
                let p = self.phase(user, rng);
                heap.push(Reverse((p, user)));
            }
        }
        while let Some(Reverse((_, from))) = heap.pop() {
            if self.held[from] == want {
                continue;
            }
            let peer = self.pick_target(from, rng);
            self.deliver(peer, from, stamp);
        }
        self.finish_slot();
        Ok(())
    }

    /// Advances one slot under the configured mode.
    pub fn step(&mut self, rng: &mut impl Rng) -> Result<(), GossipError> {
        match self.mode {
            GossipMode::Push => self.gossip_step(rng),
            GossipMode::Pull => self.pull_step(rng),
            GossipMode::Hybrid { switch_fraction } => {
                let slowest = self
                    .flights
                    .iter()
                    .map(|f| f.holder_count)
                    .min()
                    .unwrap_or(self.n) as f64;
                if slowest / self.n as f64 >= switch_fraction {
                    self.pull_step(rng)
                } else {
                    self.gossip_step(rng)
                }
            }
        }
    }

    fn check_cap(&self) -> Result<(), GossipError> {
        if self.slots_elapsed >= self.slot_cap && !self.is_complete() {
            return Err(GossipError::SlotCapExceeded { n: self.n, cap: self.slot_cap });
        }
        Ok(())
    }

    fn finish_slot(&mut self) {
        self.clock.0 += 1;
        self.slots_elapsed += 1;
        for f in &mut self.flights {
            f.counts.push(f.holder_count);
        }
    }
}

/// Spread trace of one transaction: holder counts per slot and the first
/// slot each requested coverage level was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct DisseminationRecord {
    pub sat_id: SatId,
    pub start: SlotTime,
    /// `holder_counts[k]` is the holder count `k` slots after `start`;
    /// the first entry is 1 (the origin).
    pub holder_counts: Vec<u32>,
    /// (coverage level, slot it was first reached), in request order.
    pub completions: Vec<(f64, SlotTime)>,
}

impl DisseminationRecord {
    /// Slots from start until `gamma` coverage, by request order lookup.
    pub fn delay(&self, gamma: f64) -> Option<u64> {
        self.completions
            .iter()
            .find(|(level, _)| *level == gamma)
            .map(|(_, slot)| slot.0 - self.start.0)
    }
}

/// Static description of one dissemination run.
#[derive(Debug, Clone, Copy)]
pub struct DisseminationSetup<'a> {
    pub n: u32,
    pub phi: u32,
    pub mode: GossipMode,
    pub start: SlotTime,
    /// Coverage levels to time, each in (0, 1].
    pub gamma_levels: &'a [f64],
    /// Overrides the default runaway guard when set.
    pub slot_cap: Option<u64>,
}

/// Spreads one transaction until every requested coverage level is
/// reached; returns the spread trace and the transaction with its
/// accumulated verification stamps.
pub fn disseminate(
    setup: DisseminationSetup<'_>,
    sat: SpectrumAccessTransaction,
    scheme: &dyn SignatureScheme,
    rng: &mut impl Rng,
) -> Result<(DisseminationRecord, SpectrumAccessTransaction), GossipError> {
    if setup.gamma_levels.is_empty() {
        return Err(GossipError::InvalidParam("at least one coverage level is required"));
    }
    if setup.gamma_levels.iter().any(|g| !(*g > 0.0 && *g <= 1.0)) {
        return Err(GossipError::InvalidParam("coverage levels must lie in (0, 1]"));
    }
    let mut state = GossipState::new(setup.n, setup.phi, setup.mode, setup.start)?;
    if let Some(cap) = setup.slot_cap {
        state.set_slot_cap(cap);
    }
    let sat_id = sat.sat_id();
    state.add_sat(sat, scheme)?;
    let targets: Vec<u32> =
        setup.gamma_levels.iter().map(|&g| coverage_target(setup.n, g)).collect();
    let goal = *targets.iter().max().unwrap();
    let mut completions: Vec<Option<SlotTime>> = targets
        .iter()
        .map(|&t| if state.holder_count(0) >= t { Some(setup.start) } else { None })
        .collect();
    while state.holder_count(0) < goal {
        state.step(rng)?;
        let count = state.holder_count(0);
        let now = state.clock();
        for (slot, &target) in completions.iter_mut().zip(&targets) {
            if slot.is_none() && count >= target {
                *slot = Some(now);
            }
        }
    }
    let record = DisseminationRecord {
        sat_id,
        start: setup.start,
        holder_counts: state.holder_counts(0).to_vec(),
        completions: setup
            .gamma_levels
            .iter()
            .copied()
            .zip(completions.into_iter().map(|s| s.expect("loop exits only when all levels hit")))
            .collect(),
    };
    Ok((record, state.into_sat(0)))
}

/// First-passage statistics for one coverage level across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelStats {
    pub gamma: f64,
    pub target: u32,
    pub mean_slots: f64,
    pub std_dev_slots: f64,
    pub runs: u32,
}

fn summarize(gamma: f64, target: u32, delays: &[u64]) -> LevelStats {
    let runs = delays.len() as u32;
    let mean = delays.iter().map(|&d| d as f64).sum::<f64>() / runs as f64;
    let var = if runs > 1 {
        delays.iter().map(|&d| (d as f64 - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0)
    } else {
        0.0
    };
    LevelStats { gamma, target, mean_slots: mean, std_dev_slots: var.sqrt(), runs }
}

/// Repeats a fresh single-transaction dissemination `runs` times and
/// aggregates first-passage delays per coverage level. Deterministic in
/// `seed`; each run uses its own stream of the same generator.
pub fn run_dissemination(
    n: u32,
    phi: u32,
    mode: GossipMode,
    gamma_levels: &[f64],
    runs: u32,
    seed: u64,
) -> Result<Vec<LevelStats>, GossipError> {
    Ok(run_dissemination_with_records(n, phi, mode, gamma_levels, runs, seed)?.0)
}

/// As [`run_dissemination`], also returning every run's spread trace for
/// trace output.
pub fn run_dissemination_with_records(
    n: u32,
    phi: u32,
    mode: GossipMode,
    gamma_levels: &[f64],
    runs: u32,
    seed: u64,
) -> Result<(Vec<LevelStats>, Vec<DisseminationRecord>), GossipError> {
    if runs == 0 {
        return Err(GossipError::InvalidParam("runs must be at least 1"));
    }
    let scheme = KeyedHashScheme::new(seed);
    let mut records = Vec::with_capacity(runs as usize);
    let mut delays: Vec<Vec<u64>> = vec![Vec::with_capacity(runs as usize); gamma_levels.len()];
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let sat = crate::protocol::generate_sat(UserId(0), SlotTime(0), run, &scheme);
        let setup = DisseminationSetup {
            n,
            phi,
            mode,
            start: SlotTime(0),
            gamma_levels,
            slot_cap: None,
        };
        let (record, _) = disseminate(setup, sat, &scheme, &mut rng)?;
        for (bucket, (_, slot)) in delays.iter_mut().zip(&record.completions) {
            bucket.push(slot.0 - record.start.0);
        }
        records.push(record);
    }
    let stats = gamma_levels
        .iter()
        .zip(&delays)
        .map(|(&gamma, bucket)| summarize(gamma, coverage_target(n, gamma), bucket))
        .collect();
    Ok((stats, records))
}
