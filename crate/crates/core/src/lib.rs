//! Consensus-before-talk (CBT) spectrum etiquette toolkit.
//!
//! Secondary users coordinate access to the vacant resource blocks of a
//! licensed band in one of two ways: classic listen-before-talk (LBT)
//! contention, where collisions force a fixed back-off, or
//! consensus-before-talk, where every access request is flooded through
//! the network as a signed spectrum access transaction and all users
//! derive one shared service order from the accumulated verification
//! timestamps.
//!
//! The crate is organised around that comparison:
//!
//! * [`analytic`]: closed-form mean-latency models for both etiquettes
//!   (contention backlog recursion, convergence threshold, logistic spread
//!   delay) used as the reference curves;
//! * [`protocol`]: access transactions, signature stub, per-user ledgers
//!   with queue/history, and the consensus timestamp policies;
//! * [`gossip`]: deterministic slotted gossip engine (push, pull, hybrid)
//!   with per-slot holder tracking and first-passage records;
//! * [`access`]: end-to-end Monte Carlo simulators for both etiquettes and
//!   the sweep driver behind the experiment tables.

pub mod access;
pub mod analytic;
pub mod gossip;
pub mod protocol;
