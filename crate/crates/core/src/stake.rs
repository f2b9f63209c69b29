//! Transactions and the escrow stake allocation function.
//!
//! Stake lives in a staking contract in quanta of N/x* per identifier. Escrow
//! membership changes only at epoch boundaries, marked by epoch transactions
//! at the end of epoch-ending blocks. Given a transaction sequence T, an
//! identifier's balance is determined by the longest prefix of T ending with
//! an epoch transaction: N/x* iff that prefix contains an add-to-escrow for
//! the identifier not followed by a remove-from-escrow, and no certificate of
//! guilt implicating it; otherwise 0. A sequence with no epoch transaction
//! leaves the initial distribution untouched.

use crate::digest::Digest;
use crate::ids::Identifier;
use crate::votes::CertificateOfGuilt;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Transaction {
    /// A payment or other stake-neutral transaction, signed by the environment.
    Benign { nonce: u64, memo: String },
    /// Put one quantum of stake in escrow for `id`. Duplicate adds are no-ops.
    AddEscrow { id: Identifier },
    /// Mark `id`'s stake for removal from escrow. A remove before any add is
    /// a no-op (the balance is already 0).
    RemoveEscrow { id: Identifier },
    /// Marks the end of an epoch; issued and signed by the proposer of the
    /// epoch-ending block.
    EpochMarker { epoch: u64, issuer: Identifier },
    /// A certificate of guilt, issued as a transaction by a recovery leader.
    Guilt {
        issuer: Identifier,
        cert: CertificateOfGuilt,
    },
}

impl Transaction {
    pub fn digest(&self) -> Digest {
        Digest::of("tx", self)
    }

    pub fn is_epoch_marker(&self) -> bool {
        matches!(self, Transaction::EpochMarker { .. })
    }
}

/// The initial stake distribution S*: a finite map from identifiers to units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct InitialDistribution {
    pub stake: BTreeMap<Identifier, u64>,
}

/// Parameters of the stake allocation function: total currency N and the
/// escrow quantum divisor x*, so each identifier holds 0 or N/x* units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StakeParams {
    pub total_currency: u64,
    pub quantum_divisor: u64,
}

impl StakeParams {
    pub fn quantum(&self) -> u64 {
        self.total_currency / self.quantum_divisor
    }
}

/// Balances of every identifier after executing `txs`, together with the
/// total. Evaluates the longest epoch-closed prefix as described above.
pub fn stake_table(
    initial: &InitialDistribution,
    params: StakeParams,
    txs: &[Transaction],
) -> BTreeMap<Identifier, u64> {
    let last_marker = txs.iter().rposition(Transaction::is_epoch_marker);
    let Some(end) = last_marker else {
        return initial.stake.clone();
    };
    let mut added: BTreeSet<Identifier> = BTreeSet::new();
    let mut implicated: BTreeSet<Identifier> = BTreeSet::new();
    for tx in &txs[..=end] {
        match tx {
            Transaction::AddEscrow { id } => {
                added.insert(*id);
            }
            Transaction::RemoveEscrow { id } => {
                added.remove(id);
            }
            Transaction::Guilt { cert, .. } => {
                implicated.extend(cert.implicated());
            }
            _ => {}
        }
    }
    added
        .into_iter()
        .filter(|id| !implicated.contains(id))
        .map(|id| (id, params.quantum()))
        .collect()
}

/// Stake of a single identifier after `txs` (0 for unknown identifiers).
pub fn eval_stake(
    initial: &InitialDistribution,
    params: StakeParams,
    txs: &[Transaction],
    id: Identifier,
) -> u64 {
    stake_table(initial, params, txs).get(&id).copied().unwrap_or(0)
}

/// Total stake over a table.
pub fn total_stake(table: &BTreeMap<Identifier, u64>) -> u64 {
    table.values().sum()
}

/// Transactions that zero out the balances of every identifier in `ids`, in
/// any order, once an epoch transaction closes the sequence.
pub fn zero_out_set(ids: &BTreeSet<Identifier>) -> Vec<Transaction> {
    ids.iter()
        .map(|id| Transaction::RemoveEscrow { id: *id })
        .collect()
}
