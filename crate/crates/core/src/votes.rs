//! Votes, quorum certificates and certificates of guilt.
//!
//! A vote binds (block, stake amount, stage, identifier, vprev). A quorum
//! certificate for a block and stage is a set of valid votes from distinct
//! identifiers whose stake, recomputed against the block's validator-set
//! transactions, reaches the quorum fraction of the total validating stake.
//! QCs are never first-class messages: they are shorthand for "every vote of
//! the set is in M".

use crate::digest::Digest;
use crate::ids::Identifier;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Stage = u8;

/// A stage-s vote for a block, carrying the voter's claimed stake `c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vote {
    pub block: Digest,
    pub c: u64,
    pub stage: Stage,
    pub id: Identifier,
    pub vprev: u64,
}

impl Vote {
    pub fn digest(&self) -> Digest {
        Digest::of("vote", self)
    }
}

/// A vote for an updated genesis block emitted at the end of recovery.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutputVote {
    pub genesis: Digest,
    pub c: u64,
    pub id: Identifier,
}

/// Quorum fraction, an exact rational (2/3 by default, 1 - rho_l in the
/// weakened-liveness variant).
pub type QuorumFraction = Ratio<i128>;

/// Whether `total_voted` units reach `q * total_stake`. Exact arithmetic; a
/// QC over zero validating stake is never accepted.
pub fn meets_quorum(total_voted: u64, total_stake: u64, q: QuorumFraction) -> bool {
    if total_stake == 0 || total_voted == 0 {
        return false;
    }
    Ratio::from_integer(total_voted as i128) >= q * Ratio::from_integer(total_stake as i128)
}

/// Accumulates votes for one (block, stage) target and answers quorum queries.
#[derive(Debug, Clone, Default)]
pub struct VoteSet {
    /// One vote per identifier; later duplicates for the same id are ignored.
    pub votes: BTreeMap<Identifier, Vote>,
}

impl VoteSet {
    pub fn insert(&mut self, v: Vote) {
        self.votes.entry(v.id).or_insert(v);
    }

    /// Sum of the stake of votes whose claimed `c` matches the stake table,
    /// skipping votes that lie about their weight (QC condition on stake).
    pub fn matching_stake(&self, stake_of: &BTreeMap<Identifier, u64>) -> u64 {
        self.votes
            .values()
            .filter(|v| stake_of.get(&v.id).copied().unwrap_or(0) == v.c && v.c > 0)
            .map(|v| v.c)
            .sum()
    }

    /// The canonical QC: all stake-matching votes, sorted by identifier.
    pub fn canonical_qc(&self, stake_of: &BTreeMap<Identifier, u64>) -> Vec<Vote> {
        self.votes
            .values()
            .filter(|v| stake_of.get(&v.id).copied().unwrap_or(0) == v.c && v.c > 0)
            .cloned()
            .collect()
    }
}

/// A certificate of guilt for an epoch: a stage-2 QC and a stage-1 QC for
/// incompatible blocks of that epoch, with v' >= v and vprev(Q') < v.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CertificateOfGuilt {
    pub epoch: u64,
    /// Stage-2 QC for block `b` (view v).
    pub q2: Vec<Vote>,
    /// Stage-1 QC for block `b'` (view v' >= v), with vprev(q1) < v.
    pub q1: Vec<Vote>,
}

impl CertificateOfGuilt {
    pub fn digest(&self) -> Digest {
        Digest::of("cog", self)
    }

    /// Identifiers voting in both QCs.
    pub fn implicated(&self) -> Vec<Identifier> {
        let in_q2: std::collections::BTreeSet<_> = self.q2.iter().map(|v| v.id).collect();
        let mut out: Vec<_> = self
            .q1
            .iter()
            .map(|v| v.id)
            .filter(|id| in_q2.contains(id))
            .collect();
        out.dedup();
        out
    }

    /// Total stake implicated, weighting each implicated identifier by its
    /// vote weight in q2.
    pub fn implicated_stake(&self) -> u64 {
        let impl_ids: std::collections::BTreeSet<_> = self.implicated().into_iter().collect();
        self.q2
            .iter()
            .filter(|v| impl_ids.contains(&v.id))
            .map(|v| v.c)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vote(id: u64, c: u64, stage: Stage) -> Vote {
        Vote {
            block: Digest::ZERO,
            c,
            stage,
            id: Identifier(id),
            vprev: 0,
        }
    }

    #[test]
    fn quorum_is_inclusive_and_exact() {
        let q = QuorumFraction::new(2, 3);
        // 2/3 of 3 units is exactly 2.
        assert!(meets_quorum(2, 3, q));
        assert!(!meets_quorum(1, 3, q));
        // 2/3 of 10 is 6.66..: 7 needed.
        assert!(!meets_quorum(6, 10, q));
        assert!(meets_quorum(7, 10, q));
        // Zero validating stake never certifies.
        assert!(!meets_quorum(0, 0, q));
        assert!(!meets_quorum(5, 0, q));
    }

    #[test]
    fn vote_set_drops_stake_mismatches() {
        let mut vs = VoteSet::default();
        vs.insert(vote(1, 25, 1));
        vs.insert(vote(2, 30, 1)); // lies about its stake
        let stake: BTreeMap<_, _> = [(Identifier(1), 25), (Identifier(2), 25)].into();
        assert_eq!(vs.matching_stake(&stake), 25);
        assert_eq!(vs.canonical_qc(&stake).len(), 1);
    }

    #[test]
    fn implication_is_the_intersection() {
        let cog = CertificateOfGuilt {
            epoch: 0,
            q2: vec![vote(1, 1, 2), vote(2, 1, 2)],
            q1: vec![vote(2, 1, 1), vote(3, 1, 1)],
        };
        assert_eq!(cog.implicated(), vec![Identifier(2)]);
        assert_eq!(cog.implicated_stake(), 1);
    }
}
