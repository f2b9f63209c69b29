//! Timeslots and player activity schedules.
//!
//! Time is a global clock of discrete timeslots t = 1, 2, ... . A player may
//! be active or inactive at each timeslot; inactive players neither send nor
//! receive. The schedule is exogenous and fixed per scenario.

use crate::ids::PlayerId;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A discrete timeslot, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Timeslot(pub u64);

impl Timeslot {
    pub fn next(self) -> Timeslot {
        Timeslot(self.0 + 1)
    }
}

impl fmt::Display for Timeslot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// Per-player activity pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activity {
    Always,
    /// Active exactly on the listed inclusive ranges of timeslots.
    Ranges(Vec<(u64, u64)>),
}

impl Activity {
    pub fn active_at(&self, t: Timeslot) -> bool {
        match self {
            Activity::Always => true,
            Activity::Ranges(rs) => rs.iter().any(|&(a, b)| a <= t.0 && t.0 <= b),
        }
    }
}

/// Which players are active at each timeslot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivitySchedule {
    pub patterns: BTreeMap<PlayerId, Activity>,
}

impl ActivitySchedule {
    pub fn all_always(players: impl IntoIterator<Item = PlayerId>) -> Self {
        ActivitySchedule {
            patterns: players.into_iter().map(|p| (p, Activity::Always)).collect(),
        }
    }

    pub fn active_at(&self, p: PlayerId, t: Timeslot) -> bool {
        self.patterns.get(&p).map(|a| a.active_at(t)).unwrap_or(false)
    }

    pub fn active_set(&self, t: Timeslot) -> Vec<PlayerId> {
        self.patterns
            .keys()
            .copied()
            .filter(|&p| self.active_at(p, t))
            .collect()
    }

    /// First timeslot >= `from` at which `p` is active, up to `horizon` inclusive.
    pub fn first_active_at_or_after(
        &self,
        p: PlayerId,
        from: Timeslot,
        horizon: Timeslot,
    ) -> Option<Timeslot> {
        let mut t = from;
        while t <= horizon {
            if self.active_at(p, t) {
                return Some(t);
            }
            t = t.next();
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_active_skips_inactive_ranges() {
        let mut patterns = BTreeMap::new();
        patterns.insert(PlayerId(0), Activity::Ranges(vec![(1, 3), (7, 10)]));
        let sched = ActivitySchedule { patterns };
        assert_eq!(
            sched.first_active_at_or_after(PlayerId(0), Timeslot(4), Timeslot(20)),
            Some(Timeslot(7))
        );
        assert_eq!(
            sched.first_active_at_or_after(PlayerId(0), Timeslot(11), Timeslot(20)),
            None
        );
    }
}
