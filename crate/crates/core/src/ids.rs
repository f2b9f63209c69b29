//! Players, identifiers and the simulated signature scheme.
//!
//! Signatures are simulation tokens rather than real cryptography: the kernel
//! refuses to accept a message whose signer identifier does not belong to the
//! disseminating player (or, for relayed objects, was not previously received
//! by it). Unforgeability therefore holds by construction, which is all the
//! properties under test require.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A player. Players own identifiers and are active or inactive per timeslot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlayerId(pub u32);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// An identifier (public key) owned by exactly one player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Identifier(pub u64);

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "id{}", self.0)
    }
}

/// Who minted a signature token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Signer {
    Environment,
    Id(Identifier),
    Oracle(u32),
}

impl fmt::Display for Signer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signer::Environment => write!(f, "env"),
            Signer::Id(id) => write!(f, "{id}"),
            Signer::Oracle(o) => write!(f, "oracle{o}"),
        }
    }
}
