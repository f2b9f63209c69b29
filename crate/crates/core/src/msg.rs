//! The wire payloads a player can disseminate or receive.

use crate::chain::Block;
use crate::digest::Digest;
use crate::ids::Identifier;
use crate::stake::Transaction;
use crate::votes::{OutputVote, Vote};
use serde::{Deserialize, Serialize};

/// An updated genesis block produced by the recovery procedure. Its
/// transaction sequence is Tr(b) * G * epoch-marker, where b is the last
/// epoch-ending block confirmed before the violation epoch and G a
/// certificate of guilt for that epoch.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UpdatedGenesis {
    /// The epoch in which the consistency violation occurred.
    pub epoch: u64,
    pub txs: Vec<Transaction>,
}

impl UpdatedGenesis {
    pub fn digest(&self) -> Digest {
        Digest::of("ugen", self)
    }
}

/// A genesis proposal for the i-th Dolev-Strong instance of recovery.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenesisProposal {
    pub genesis: UpdatedGenesis,
    pub instance: u64,
}

/// A genesis proposal signed by a chain of distinct identifiers, the first of
/// which must be the instance leader.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignedChain {
    pub proposal: GenesisProposal,
    pub chain: Vec<Identifier>,
}

/// A block of the longest-chain protocol used in the dynamically available
/// setting. Carries the permitter response that authorizes it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LcBlock {
    pub height: u64,
    pub parent: Digest,
    pub miner: Identifier,
    pub slot: u64,
    /// The permitter response string for the query (1, sigma(parent, miner)).
    pub tau: [u8; 32],
    pub txs: Vec<Transaction>,
}

impl LcBlock {
    pub fn digest(&self) -> Digest {
        Digest::of("lcblock", self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Payload {
    Block(Block),
    Vote(Vote),
    Tx(Transaction),
    Recovery(SignedChain),
    OutputVote(OutputVote),
    LcBlock(LcBlock),
}

impl Payload {
    pub fn digest(&self) -> Digest {
        match self {
            Payload::Block(b) => b.digest(),
            Payload::Vote(v) => v.digest(),
            Payload::Tx(tx) => tx.digest(),
            Payload::Recovery(sc) => Digest::of("chainmsg", sc),
            Payload::OutputVote(v) => Digest::of("outvote", v),
            Payload::LcBlock(b) => b.digest(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Block(_) => "block",
            Payload::Vote(_) => "vote",
            Payload::Tx(_) => "tx",
            Payload::Recovery(_) => "recovery",
            Payload::OutputVote(_) => "output-vote",
            Payload::LcBlock(_) => "lc-block",
        }
    }
}
