//! Network regimes and adversary-controlled delivery scheduling.
//!
//! Messages are disseminated, never sent point-to-point: every dissemination
//! is eventually received by every player, and the scenario (acting as the
//! adversary) chooses each per-recipient delivery timeslot within the bounds
//! of the active regime. Unscripted deliveries take exactly Delta, landing on
//! the recipient's first active timeslot at or after sent + Delta. A player
//! receives its own dissemination at the next timeslot it is active.

use crate::digest::Digest;
use crate::ids::PlayerId;
use crate::msg::Payload;
use crate::time::{ActivitySchedule, Timeslot};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetworkRegime {
    /// Delivery by the first active timeslot >= sent + Delta.
    Synchronous { delta: u64 },
    /// Same bound with sent replaced by max(GST, sent). GST is a scenario
    /// parameter that player logic never reads.
    PartialSynchrony { delta: u64, gst: u64 },
    /// Partial synchrony, plus delivery by sent + Delta* even before GST.
    StarBounded { delta: u64, gst: u64, delta_star: u64 },
    /// The relaxed variant: the Delta* bound applies only from `t0_star`
    /// onward, i.e. delivery by max(sent, t0_star) + Delta*. The scenario
    /// supplies its expected t0_star; the post-hoc trace check re-validates
    /// against the realized value.
    RelaxedStarBounded {
        delta: u64,
        gst: u64,
        delta_star: u64,
        t0_star: u64,
    },
}

impl NetworkRegime {
    pub fn delta(&self) -> u64 {
        match *self {
            NetworkRegime::Synchronous { delta } => delta,
            NetworkRegime::PartialSynchrony { delta, .. } => delta,
            NetworkRegime::StarBounded { delta, .. } => delta,
            NetworkRegime::RelaxedStarBounded { delta, .. } => delta,
        }
    }

    pub fn delta_star(&self) -> Option<u64> {
        match *self {
            NetworkRegime::StarBounded { delta_star, .. } => Some(delta_star),
            NetworkRegime::RelaxedStarBounded { delta_star, .. } => Some(delta_star),
            _ => None,
        }
    }

    /// The raw timeslot bound before adjusting for recipient activity: the
    /// earliest t' from which "received by every active t' >= bound" binds.
    pub fn raw_bound(&self, sent: Timeslot) -> u64 {
        match *self {
            NetworkRegime::Synchronous { delta } => sent.0 + delta,
            NetworkRegime::PartialSynchrony { delta, gst } => sent.0.max(gst) + delta,
            NetworkRegime::StarBounded {
                delta,
                gst,
                delta_star,
            } => (sent.0.max(gst) + delta).min(sent.0 + delta_star),
            NetworkRegime::RelaxedStarBounded {
                delta,
                gst,
                delta_star,
                t0_star,
            } => (sent.0.max(gst) + delta).min(sent.0.max(t0_star) + delta_star),
        }
    }

    /// Latest permissible delivery timeslot for (message, recipient): the
    /// recipient's first active timeslot at or after the raw bound. `None`
    /// means the bound never binds within the horizon, so the message may
    /// stay undelivered.
    pub fn latest_allowed(
        &self,
        sent: Timeslot,
        recipient: PlayerId,
        sched: &ActivitySchedule,
        horizon: Timeslot,
    ) -> Option<Timeslot> {
        sched.first_active_at_or_after(recipient, Timeslot(self.raw_bound(sent)), horizon)
    }
}

/// How the scenario wants one (message, recipient) pair delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayChoice {
    /// Exactly Delta (first active timeslot at or after sent + Delta).
    Default,
    /// Deliver at the given timeslot; validated against the regime.
    At(Timeslot),
    /// Deliver at the latest timeslot the regime allows.
    Bound,
    /// Do not deliver within the horizon; valid only when the regime bound
    /// never binds (e.g. the recipient is never active after it).
    Never,
}

/// Per-message, per-recipient delay control. Implemented by attack scripts;
/// honest scenarios use `DefaultDelays`.
pub trait DelayPolicy {
    fn choose(
        &self,
        sender: PlayerId,
        recipient: PlayerId,
        sent: Timeslot,
        payload: &Payload,
    ) -> DelayChoice;
}

pub struct DefaultDelays;

impl DelayPolicy for DefaultDelays {
    fn choose(&self, _: PlayerId, _: PlayerId, _: Timeslot, _: &Payload) -> DelayChoice {
        DelayChoice::Default
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error(
        "delivery of {digest} to {recipient} at {at} violates the regime bound {bound} \
         (disseminated at {sent})"
    )]
    PastBound {
        digest: Digest,
        recipient: PlayerId,
        at: Timeslot,
        bound: Timeslot,
        sent: Timeslot,
    },
    #[error("delivery of {digest} to {recipient} at {at} precedes dissemination at {sent}")]
    BeforeSend {
        digest: Digest,
        recipient: PlayerId,
        at: Timeslot,
        sent: Timeslot,
    },
    #[error("delivery of {digest} to {recipient} at {at}, but the recipient is inactive then")]
    InactiveRecipient {
        digest: Digest,
        recipient: PlayerId,
        at: Timeslot,
    },
    #[error(
        "{digest} to {recipient} may not stay undelivered: the regime bound binds at {bound}"
    )]
    MustDeliver {
        digest: Digest,
        recipient: PlayerId,
        bound: Timeslot,
    },
}

/// Resolves a delay choice into a concrete delivery slot (or `None` for a
/// valid "never"), rejecting anything outside the regime invariant.
pub fn resolve_delivery(
    regime: &NetworkRegime,
    sched: &ActivitySchedule,
    horizon: Timeslot,
    digest: Digest,
    recipient: PlayerId,
    sent: Timeslot,
    choice: DelayChoice,
) -> Result<Option<Timeslot>, ScheduleError> {
    let latest = regime.latest_allowed(sent, recipient, sched, horizon);
    let default_slot =
        sched.first_active_at_or_after(recipient, Timeslot(sent.0 + regime.delta()), horizon);
    let at = match choice {
        DelayChoice::Default => match default_slot {
            Some(t) => t,
            None => return Ok(None), // recipient never active again
        },
        DelayChoice::Bound => match latest {
            Some(t) => t,
            None => return Ok(None),
        },
        DelayChoice::Never => {
            return match latest {
                None => Ok(None),
                Some(bound) => Err(ScheduleError::MustDeliver {
                    digest,
                    recipient,
                    bound,
                }),
            };
        }
        DelayChoice::At(t) => t,
    };
    if at <= sent {
        return Err(ScheduleError::BeforeSend {
            digest,
            recipient,
            at,
            sent,
        });
    }
    if !sched.active_at(recipient, at) {
        return Err(ScheduleError::InactiveRecipient {
            digest,
            recipient,
            at,
        });
    }
    if let Some(bound) = latest {
        if at > bound {
            return Err(ScheduleError::PastBound {
                digest,
                recipient,
                at,
                bound,
                sent,
            });
        }
    }
    Ok(Some(at))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched2() -> ActivitySchedule {
        ActivitySchedule::all_always([PlayerId(0), PlayerId(1)])
    }

    fn resolve(
        regime: &NetworkRegime,
        sent: u64,
        choice: DelayChoice,
    ) -> Result<Option<Timeslot>, ScheduleError> {
        resolve_delivery(
            regime,
            &sched2(),
            Timeslot(1_000_000),
            Digest::ZERO,
            PlayerId(1),
            Timeslot(sent),
            choice,
        )
    }

    #[test]
    fn synchronous_bound_accepts_within_delta_and_rejects_past_it() {
        let r = NetworkRegime::Synchronous { delta: 3 };
        assert_eq!(
            resolve(&r, 10, DelayChoice::At(Timeslot(12))).unwrap(),
            Some(Timeslot(12))
        );
        let err = resolve(&r, 10, DelayChoice::At(Timeslot(14))).unwrap_err();
        assert!(matches!(err, ScheduleError::PastBound { bound, .. } if bound == Timeslot(13)));
    }

    #[test]
    fn partial_synchrony_allows_withholding_until_gst_plus_delta() {
        let r = NetworkRegime::PartialSynchrony { delta: 2, gst: 100 };
        // Disseminated at t=5, held back until t=102 = max(GST, 5) + 2.
        assert_eq!(
            resolve(&r, 5, DelayChoice::At(Timeslot(102))).unwrap(),
            Some(Timeslot(102))
        );
        assert!(resolve(&r, 5, DelayChoice::At(Timeslot(103))).is_err());
    }

    #[test]
    fn star_bound_binds_before_gst_with_equality_boundary() {
        let r = NetworkRegime::StarBounded {
            delta: 1,
            gst: 1_000_000,
            delta_star: 9,
        };
        // Boundary case Delta* = 9: dissemination at 5 may arrive at 14.
        assert_eq!(
            resolve(&r, 5, DelayChoice::At(Timeslot(14))).unwrap(),
            Some(Timeslot(14))
        );
        assert!(resolve(&r, 5, DelayChoice::At(Timeslot(15))).is_err());
        assert_eq!(resolve(&r, 5, DelayChoice::Bound).unwrap(), Some(Timeslot(14)));
    }

    #[test]
    fn never_requires_an_unreachable_bound() {
        let r = NetworkRegime::Synchronous { delta: 1 };
        assert!(matches!(
            resolve(&r, 5, DelayChoice::Never),
            Err(ScheduleError::MustDeliver { .. })
        ));
        // A recipient that goes inactive forever may stay unserved.
        let mut patterns = std::collections::BTreeMap::new();
        patterns.insert(PlayerId(1), crate::time::Activity::Ranges(vec![(1, 4)]));
        let sched = ActivitySchedule { patterns };
        let ok = resolve_delivery(
            &r,
            &sched,
            Timeslot(100),
            Digest::ZERO,
            PlayerId(1),
            Timeslot(5),
            DelayChoice::Never,
        );
        assert_eq!(ok.unwrap(), None);
    }

    #[test]
    fn delivery_must_land_on_an_active_timeslot_after_send() {
        let r = NetworkRegime::Synchronous { delta: 5 };
        assert!(matches!(
            resolve(&r, 10, DelayChoice::At(Timeslot(10))),
            Err(ScheduleError::BeforeSend { .. })
        ));
    }
}
