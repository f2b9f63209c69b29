//! Append-only run traces.
//!
//! Every observable event of a run lands here as one structured record, and
//! the serialized form is line-delimited JSON, one record per line. Payload
//! contents appear once in a `MessageDef` record; all other records reference
//! payloads by digest. Replaying a scenario with the same seed reproduces the
//! trace byte for byte, and every checker in this crate (verdicts, lemma
//! suites, soundness audits) works from a stored trace without re-simulation.

use crate::digest::Digest;
use crate::ids::PlayerId;
use crate::msg::Payload;
use crate::time::Timeslot;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceRecord {
    Meta {
        scenario: String,
        seed: u64,
        horizon: u64,
        config: serde_json::Value,
    },
    MessageDef {
        digest: Digest,
        payload: Payload,
    },
    Disseminate {
        t: Timeslot,
        player: PlayerId,
        digest: Digest,
    },
    Deliver {
        t: Timeslot,
        player: PlayerId,
        digest: Digest,
    },
    EnvInject {
        t: Timeslot,
        player: PlayerId,
        digest: Digest,
    },
    OracleQuery {
        t: Timeslot,
        player: PlayerId,
        oracle: u32,
        budget: u64,
        sigma: Digest,
    },
    OracleResponse {
        t: Timeslot,
        player: PlayerId,
        oracle: u32,
        sigma: Digest,
        tau: Digest,
    },
    QueryRejected {
        t: Timeslot,
        player: PlayerId,
        oracle: u32,
        budget: u64,
        reason: String,
    },
    EpochEntered {
        t: Timeslot,
        player: PlayerId,
        epoch: u64,
    },
    LockSet {
        t: Timeslot,
        player: PlayerId,
        view: u64,
    },
    /// Emitted whenever a player's confirmed transaction sequence changes.
    ConfirmedSnapshot {
        t: Timeslot,
        player: PlayerId,
        anchor: Digest,
        seq: Vec<Digest>,
    },
    /// First time a player sees an epoch-ending block as confirmed.
    EpochEndingConfirmed {
        t: Timeslot,
        player: PlayerId,
        epoch: u64,
        block: Digest,
    },
    /// A consistency breach visible in this player's own view.
    ViolationSeen {
        t: Timeslot,
        player: PlayerId,
        what: String,
    },
    RecoveryTriggered {
        t: Timeslot,
        player: PlayerId,
        epoch: u64,
    },
    DsEnumerated {
        t: Timeslot,
        player: PlayerId,
        instance: u64,
        value: Digest,
    },
    RecoveryTerminated {
        t: Timeslot,
        player: PlayerId,
        genesis: Digest,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceLog {
    pub records: Vec<TraceRecord>,
}

impl TraceLog {
    pub fn push(&mut self, r: TraceRecord) {
        self.records.push(r);
    }

    /// Payload directory: digest -> payload, built from `MessageDef` records.
    pub fn message_defs(&self) -> BTreeMap<Digest, &Payload> {
        self.records
            .iter()
            .filter_map(|r| match r {
                TraceRecord::MessageDef { digest, payload } => Some((*digest, payload)),
                _ => None,
            })
            .collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> std::io::Result<TraceLog> {
        let mut records = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line)?);
        }
        Ok(TraceLog { records })
    }

    pub fn to_jsonl_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_jsonl(&mut out).expect("in-memory write");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip_preserves_records() {
        let mut log = TraceLog::default();
        log.push(TraceRecord::EpochEntered {
            t: Timeslot(1),
            player: PlayerId(0),
            epoch: 0,
        });
        log.push(TraceRecord::Deliver {
            t: Timeslot(2),
            player: PlayerId(1),
            digest: Digest::ZERO,
        });
        let bytes = log.to_jsonl_bytes();
        let back = TraceLog::read_jsonl(&bytes[..]).unwrap();
        assert_eq!(log, back);
    }
}
