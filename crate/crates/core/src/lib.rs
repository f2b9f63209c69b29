//! Deterministic timeslot simulator for a slashing proof-of-stake protocol.
//!
//! The crate simulates a three-stage Tendermint variant (epoch-based
//! validator rotation, certificates of guilt, a Dolev-Strong recovery
//! procedure that agrees on a post-slashing genesis block) under scripted
//! Byzantine attacks, and evaluates the economic outcome of each run:
//! investment and valuation series, the honest and Byzantine value ratios,
//! and a verdict classifying every consistency violation as cheap or
//! expensive for the attacker.
//!
//! The simulation kernel is single-threaded and fully deterministic: a
//! (scenario, seed) pair reproduces its trace byte for byte. Whole runs are
//! independent and can execute in parallel.

pub mod chain;
pub mod digest;
pub mod ids;
pub mod msg;
pub mod net;
pub mod permitter;
pub mod stake;
pub mod time;
pub mod trace;
pub mod votes;

pub use digest::Digest;
pub use ids::{Identifier, PlayerId, Signer};
pub use time::Timeslot;
