//! Blocks and the shared block store.
//!
//! A block is content-addressed and carries only its own transaction batch;
//! the cumulative sequence Tr and the validator-determining sequence Tval are
//! derived by walking parent links, so they are consistent by construction.
//! The store holds every structurally well-formed block seen anywhere in a
//! run; which blocks a given player knows about is tracked per player.
//!
//! Epoch e is responsible for confirming blocks of heights in (e*x, (e+1)*x].
//! A block is epoch-ending if its height is (e+1)*x; the genesis block stands
//! in as the ending block of epoch -1.

use crate::digest::Digest;
use crate::ids::Identifier;
use crate::stake::{stake_table, InitialDistribution, StakeParams, Transaction};
use crate::votes::{meets_quorum, QuorumFraction, Vote};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// The genesis block's digest sentinel.
pub const GENESIS: Digest = Digest::ZERO;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Block {
    pub height: u64,
    pub view: u64,
    pub epoch: u64,
    pub parent: Digest,
    /// Stage-1 QC for the parent; empty exactly for children of genesis.
    pub qc_prev: Vec<Vote>,
    pub txs: Vec<Transaction>,
    pub proposer: Identifier,
}

impl Block {
    pub fn digest(&self) -> Digest {
        Digest::of("block", self)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("parent {0} not known")]
    UnknownParent(Digest),
    #[error("height must be parent height + 1")]
    BadHeight,
    #[error("epoch must follow the parent epoch continuity rule")]
    BadEpoch,
    #[error("qc_prev is not a stage-1 quorum certificate for the parent")]
    BadQcPrev,
    #[error("transaction batch must end with an epoch marker iff the block is epoch-ending")]
    BadEpochMarker,
    #[error("vote vprev must equal the view of the parent's stage-1 QC")]
    BadVprev,
}

struct Entry {
    block: Block,
    tr: Arc<Vec<Transaction>>,
    /// Stake table for Tval(block) and its total: who votes on this block.
    tval: Arc<(BTreeMap<Identifier, u64>, u64)>,
}

/// Store of structurally well-formed blocks, shared by the whole run.
pub struct BlockStore {
    pub initial: InitialDistribution,
    pub params: StakeParams,
    /// Views (and heights) per epoch.
    pub x: u64,
    pub quorum: QuorumFraction,
    entries: BTreeMap<Digest, Entry>,
    genesis_tval: Arc<(BTreeMap<Identifier, u64>, u64)>,
}

impl BlockStore {
    pub fn new(
        initial: InitialDistribution,
        params: StakeParams,
        x: u64,
        quorum: QuorumFraction,
    ) -> Self {
        let table = stake_table(&initial, params, &[]);
        let total = table.values().sum();
        BlockStore {
            initial,
            params,
            x,
            quorum,
            entries: BTreeMap::new(),
            genesis_tval: Arc::new((table, total)),
        }
    }

    pub fn contains(&self, d: Digest) -> bool {
        d == GENESIS || self.entries.contains_key(&d)
    }

    pub fn get(&self, d: Digest) -> Option<&Block> {
        self.entries.get(&d).map(|e| &e.block)
    }

    pub fn height(&self, d: Digest) -> u64 {
        if d == GENESIS {
            0
        } else {
            self.entries[&d].block.height
        }
    }

    pub fn view(&self, d: Digest) -> u64 {
        if d == GENESIS {
            0
        } else {
            self.entries[&d].block.view
        }
    }

    pub fn epoch(&self, d: Digest) -> u64 {
        if d == GENESIS {
            0
        } else {
            self.entries[&d].block.epoch
        }
    }

    /// View of the block's own stage-1 parent QC, i.e. the parent's view.
    pub fn vprev(&self, d: Digest) -> u64 {
        if d == GENESIS {
            0
        } else {
            self.view(self.entries[&d].block.parent)
        }
    }

    /// Cumulative transaction sequence Tr(b).
    pub fn tr(&self, d: Digest) -> Arc<Vec<Transaction>> {
        if d == GENESIS {
            Arc::new(Vec::new())
        } else {
            self.entries[&d].tr.clone()
        }
    }

    /// Stake table over Tval(b) plus its total N(b).
    pub fn tval_table(&self, d: Digest) -> Arc<(BTreeMap<Identifier, u64>, u64)> {
        if d == GENESIS {
            self.genesis_tval.clone()
        } else {
            self.entries[&d].tval.clone()
        }
    }

    /// Is `d` epoch-`e(d)` ending? Genesis counts as ending epoch -1.
    pub fn is_epoch_ending(&self, d: Digest) -> bool {
        if d == GENESIS {
            return true;
        }
        let b = &self.entries[&d].block;
        b.height == (b.epoch + 1) * self.x
    }

    /// Walks parents from `descendant` down to the height of `ancestor`.
    pub fn is_ancestor(&self, ancestor: Digest, descendant: Digest) -> bool {
        if ancestor == descendant {
            return true;
        }
        let target_h = self.height(ancestor);
        let mut cur = descendant;
        while self.height(cur) > target_h {
            if cur == GENESIS {
                return false;
            }
            cur = self.entries[&cur].block.parent;
        }
        cur == ancestor
    }

    pub fn incompatible(&self, a: Digest, b: Digest) -> bool {
        !self.is_ancestor(a, b) && !self.is_ancestor(b, a)
    }

    /// Checks that `votes` form a stage-1 QC for `parent` (the block-embedded
    /// justification). Children of genesis must carry the empty QC.
    pub fn valid_parent_qc(&self, parent: Digest, votes: &[Vote]) -> bool {
        if parent == GENESIS {
            return votes.is_empty();
        }
        let tval = self.tval_table(parent);
        let parent_vprev = self.vprev(parent);
        let mut seen = std::collections::BTreeSet::new();
        let mut total = 0u64;
        for v in votes {
            if v.block != parent || v.stage != 1 || v.vprev != parent_vprev {
                return false;
            }
            if !seen.insert(v.id) {
                return false;
            }
            if tval.0.get(&v.id).copied().unwrap_or(0) != v.c || v.c == 0 {
                return false;
            }
            total += v.c;
        }
        meets_quorum(total, tval.1, self.quorum)
    }

    /// Inserts a block after checking every structural well-formedness rule.
    /// The parent must already be present.
    pub fn insert(&mut self, block: Block) -> Result<Digest, BlockError> {
        let d = block.digest();
        if self.entries.contains_key(&d) {
            return Ok(d);
        }
        if !self.contains(block.parent) {
            return Err(BlockError::UnknownParent(block.parent));
        }
        let parent_h = self.height(block.parent);
        if block.height != parent_h + 1 {
            return Err(BlockError::BadHeight);
        }
        let parent_e = self.epoch(block.parent);
        if self.is_epoch_ending(block.parent) {
            // Genesis "ends epoch -1", so its children must be epoch 0.
            let allowed = if block.parent == GENESIS {
                block.epoch == 0
            } else {
                block.epoch == parent_e || block.epoch == parent_e + 1
            };
            if !allowed {
                return Err(BlockError::BadEpoch);
            }
        } else if block.epoch != parent_e {
            return Err(BlockError::BadEpoch);
        }
        if !self.valid_parent_qc(block.parent, &block.qc_prev) {
            return Err(BlockError::BadQcPrev);
        }
        let ending = block.height == (block.epoch + 1) * self.x;
        let marker_ok = match block.txs.last() {
            Some(Transaction::EpochMarker { epoch, .. }) => ending && *epoch == block.epoch,
            _ => !ending,
        };
        // Epoch markers appear only as the final transaction of an ending block.
        let stray = block
            .txs
            .iter()
            .rev()
            .skip(1)
            .any(Transaction::is_epoch_marker);
        if !marker_ok || stray {
            return Err(BlockError::BadEpochMarker);
        }

        let parent_tr = self.tr(block.parent);
        let mut tr = (*parent_tr).clone();
        tr.extend(block.txs.iter().cloned());
        let tval = if block.epoch == parent_e && block.parent != GENESIS {
            self.tval_table(block.parent)
        } else if block.parent == GENESIS {
            self.genesis_tval.clone()
        } else {
            let table = stake_table(&self.initial, self.params, &parent_tr);
            let total = table.values().sum();
            Arc::new((table, total))
        };
        self.entries.insert(
            d,
            Entry {
                block,
                tr: Arc::new(tr),
                tval,
            },
        );
        Ok(d)
    }
}
