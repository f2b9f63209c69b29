//! Permitter oracles modeling external resources.
//!
//! A query (b, sigma) asks for a proof of work on sigma backed by b units of
//! the player's resource balance at the current timeslot. A single-use
//! permitter caps the sum of b over a player's same-timeslot queries at its
//! balance; a multi-use permitter caps each b individually. Budgets bind for
//! Byzantine players too, and over-budget queries are rejected outright and
//! logged, never clipped.
//!
//! A probabilistic permitter samples b independent uniform 256-bit strings
//! and answers with the lexicographically smallest; a deterministic permitter
//! answers with a keyed hash of (timeslot, b, sigma). Responses carry an
//! oracle signature, simulated by a mint registry.

use crate::digest::Digest;
use crate::ids::PlayerId;
use crate::time::{ActivitySchedule, Timeslot};
use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UseMode {
    Single,
    Multi,
}

/// Resource balances: a fixed per-player amount while the player is active,
/// zero when inactive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ResourceAllocation {
    pub per_player: BTreeMap<PlayerId, u64>,
}

impl ResourceAllocation {
    pub fn balance(&self, sched: &ActivitySchedule, p: PlayerId, t: Timeslot) -> u64 {
        if sched.active_at(p, t) {
            self.per_player.get(&p).copied().unwrap_or(0)
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermitterConfig {
    pub oracle: u32,
    pub use_mode: UseMode,
    pub deterministic: bool,
    pub allocation: ResourceAllocation,
    pub r_max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermitterResponse {
    pub sigma: Digest,
    pub tau: Digest,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryRejection {
    #[error("query with b = 0 is degenerate: there is no minimum of zero samples")]
    ZeroBudget,
    #[error("budget {b} exceeds balance {balance} at {t}")]
    OverBalance { b: u64, balance: u64, t: Timeslot },
    #[error("single-use budget exhausted: {spent} + {b} > balance {balance} at {t}")]
    SingleUseExhausted {
        spent: u64,
        b: u64,
        balance: u64,
        t: Timeslot,
    },
}

pub struct Permitter {
    pub cfg: PermitterConfig,
    /// Single-use spend per player at the current timeslot.
    spent: BTreeMap<PlayerId, u64>,
    spent_at: Timeslot,
    /// Registry of minted responses, standing in for oracle signatures.
    minted: BTreeSet<(Digest, Digest)>,
}

impl Permitter {
    pub fn new(cfg: PermitterConfig) -> Self {
        Permitter {
            cfg,
            spent: BTreeMap::new(),
            spent_at: Timeslot(0),
            minted: BTreeSet::new(),
        }
    }

    fn roll_timeslot(&mut self, t: Timeslot) {
        if self.spent_at != t {
            self.spent.clear();
            self.spent_at = t;
        }
    }

    /// Answers (b, sigma) for player `p` at `t`, enforcing the use-mode
    /// budget against the player's balance.
    pub fn submit_query(
        &mut self,
        sched: &ActivitySchedule,
        p: PlayerId,
        t: Timeslot,
        b: u64,
        sigma: Digest,
        rng: &mut ChaCha8Rng,
    ) -> Result<PermitterResponse, QueryRejection> {
        self.roll_timeslot(t);
        if b == 0 {
            return Err(QueryRejection::ZeroBudget);
        }
        let balance = self.cfg.allocation.balance(sched, p, t);
        if b > balance {
            return Err(QueryRejection::OverBalance { b, balance, t });
        }
        if self.cfg.use_mode == UseMode::Single {
            let spent = self.spent.get(&p).copied().unwrap_or(0);
            if spent + b > balance {
                return Err(QueryRejection::SingleUseExhausted {
                    spent,
                    b,
                    balance,
                    t,
                });
            }
            self.spent.insert(p, spent + b);
        }
        let tau = if self.cfg.deterministic {
            deterministic_tau(self.cfg.oracle, t, b, sigma)
        } else {
            min_of_uniform_samples(b, rng)
        };
        self.minted.insert((sigma, tau));
        Ok(PermitterResponse { sigma, tau })
    }

    /// Oracle-signature check: true iff this permitter minted (sigma, tau).
    /// Deterministic permitters also verify by recomputation so responses
    /// embedded in relayed messages can be checked without the registry.
    pub fn verify(&self, sigma: Digest, tau: Digest, t: Timeslot, b: u64) -> bool {
        if self.cfg.deterministic {
            tau == deterministic_tau(self.cfg.oracle, t, b, sigma)
        } else {
            self.minted.contains(&(sigma, tau))
        }
    }
}

pub fn deterministic_tau(oracle: u32, t: Timeslot, b: u64, sigma: Digest) -> Digest {
    let mut h = Sha256::new();
    h.update(b"perm-det");
    h.update(oracle.to_be_bytes());
    h.update(t.0.to_be_bytes());
    h.update(b.to_be_bytes());
    h.update(sigma.0);
    Digest(h.finalize().into())
}

/// Lexicographic minimum of b independent uniform 256-bit strings, compared
/// as unsigned bytes.
fn min_of_uniform_samples(b: u64, rng: &mut ChaCha8Rng) -> Digest {
    let mut best = [0xffu8; 32];
    let mut buf = [0u8; 32];
    for _ in 0..b {
        rng.fill_bytes(&mut buf);
        if buf < best {
            best = buf;
        }
    }
    Digest(best)
}

/// Leading zero bits of a 256-bit string (the "quality" of a response).
pub fn leading_zero_bits(d: Digest) -> u32 {
    let mut n = 0;
    for byte in d.0 {
        if byte == 0 {
            n += 8;
        } else {
            n += byte.leading_zeros();
            break;
        }
    }
    n
}

/// Verifies both external rho-boundedness bullets over a run horizon: the
/// total balance stays in [1, r_max] and the Byzantine share stays <= rho.
/// Returns the first offending timeslot, if any.
pub fn check_external_rho_bounded(
    cfg: &PermitterConfig,
    sched: &ActivitySchedule,
    byzantine: &BTreeSet<PlayerId>,
    rho: num_rational::Ratio<i128>,
    horizon: Timeslot,
) -> Option<Timeslot> {
    for t in 1..=horizon.0 {
        let t = Timeslot(t);
        let total: u64 = sched
            .patterns
            .keys()
            .map(|&p| cfg.allocation.balance(sched, p, t))
            .sum();
        if total == 0 || total > cfg.r_max {
            return Some(t);
        }
        let byz: u64 = byzantine
            .iter()
            .map(|&p| cfg.allocation.balance(sched, p, t))
            .sum();
        if num_rational::Ratio::from_integer(byz as i128)
            > rho * num_rational::Ratio::from_integer(total as i128)
        {
            return Some(t);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use rand::SeedableRng;

    fn setup(use_mode: UseMode, deterministic: bool) -> (Permitter, ActivitySchedule) {
        let sched = ActivitySchedule::all_always([PlayerId(0), PlayerId(1)]);
        let cfg = PermitterConfig {
            oracle: 0,
            use_mode,
            deterministic,
            allocation: ResourceAllocation {
                per_player: [(PlayerId(0), 5), (PlayerId(1), 5)].into(),
            },
            r_max: 100,
        };
        (Permitter::new(cfg), sched)
    }

    #[test]
    fn zero_budget_is_rejected() {
        let (mut perm, sched) = setup(UseMode::Single, false);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = perm
            .submit_query(&sched, PlayerId(0), Timeslot(1), 0, Digest::ZERO, &mut rng)
            .unwrap_err();
        assert_eq!(err, QueryRejection::ZeroBudget);
    }

    #[test]
    fn single_use_budget_sums_across_queries() {
        let (mut perm, sched) = setup(UseMode::Single, false);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            perm.submit_query(&sched, PlayerId(0), Timeslot(1), 1, Digest::ZERO, &mut rng)
                .unwrap();
        }
        assert!(matches!(
            perm.submit_query(&sched, PlayerId(0), Timeslot(1), 1, Digest::ZERO, &mut rng),
            Err(QueryRejection::SingleUseExhausted { .. })
        ));
        // Budget resets at the next timeslot.
        perm.submit_query(&sched, PlayerId(0), Timeslot(2), 5, Digest::ZERO, &mut rng)
            .unwrap();
    }

    #[test]
    fn multi_use_caps_each_query_separately() {
        let (mut perm, sched) = setup(UseMode::Multi, false);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..3 {
            perm.submit_query(&sched, PlayerId(0), Timeslot(1), 5, Digest::ZERO, &mut rng)
                .unwrap();
        }
        assert!(matches!(
            perm.submit_query(&sched, PlayerId(0), Timeslot(1), 6, Digest::ZERO, &mut rng),
            Err(QueryRejection::OverBalance { .. })
        ));
    }

    #[test]
    fn b_one_returns_a_single_sample_and_same_seed_same_tau() {
        let (mut perm, sched) = setup(UseMode::Single, false);
        let mut rng1 = ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let r1 = perm
            .submit_query(&sched, PlayerId(0), Timeslot(1), 1, Digest::ZERO, &mut rng1)
            .unwrap();
        let mut buf = [0u8; 32];
        rng2.fill_bytes(&mut buf);
        assert_eq!(r1.tau, Digest(buf));
        assert!(perm.verify(r1.sigma, r1.tau, Timeslot(1), 1));
        assert!(!perm.verify(r1.sigma, Digest::ZERO, Timeslot(1), 1));
    }

    #[test]
    fn deterministic_mode_answers_by_recomputable_hash() {
        let (mut perm, sched) = setup(UseMode::Single, true);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = perm
            .submit_query(&sched, PlayerId(0), Timeslot(3), 2, Digest::ZERO, &mut rng)
            .unwrap();
        assert_eq!(r.tau, deterministic_tau(0, Timeslot(3), 2, Digest::ZERO));
        assert!(perm.verify(r.sigma, r.tau, Timeslot(3), 2));
    }

    #[test]
    fn external_rho_check_flags_fraction_violations() {
        let (perm, sched) = setup(UseMode::Single, false);
        let byz: BTreeSet<_> = [PlayerId(1)].into();
        // Equal split: passes at rho = 1/2, flagged at t=1 for rho = 49/100.
        assert_eq!(
            check_external_rho_bounded(&perm.cfg, &sched, &byz, Ratio::new(1, 2), Timeslot(10)),
            None
        );
        assert_eq!(
            check_external_rho_bounded(&perm.cfg, &sched, &byz, Ratio::new(49, 100), Timeslot(10)),
            Some(Timeslot(1))
        );
        // All-honest allocation passes for rho = 0.
        assert_eq!(
            check_external_rho_bounded(
                &perm.cfg,
                &sched,
                &BTreeSet::new(),
                Ratio::new(0, 1),
                Timeslot(10)
            ),
            None
        );
    }
}
