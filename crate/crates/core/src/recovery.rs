//! Action recovery: widget values at any point in history, restoring the
//! whole UI to a past state, and rebuilding a session from a raw log.
//!
//! A restore meta-event at seq `r` targeting `t` means every widget takes
//! the value it had at `t`. Resolution follows restore chains backwards;
//! since every target precedes its restore, the walk always terminates.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InteractionEvent, Seq, WidgetDescriptor, WidgetValue};
use crate::provenance::{ProvenanceSnapshot, Tracker, DEFAULT_PALETTE_SIZE};

/// Full UI state: one value per registered widget, in registration order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateMap(pub IndexMap<String, WidgetValue>);

impl StateMap {
    pub fn get(&self, widget_id: &str) -> Option<&WidgetValue> {
        self.0.get(widget_id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &WidgetValue)> {
        self.0.iter()
    }
}

/// Effective value of `widget_id` once every event up to and including
/// `seq` has been applied. A `seq` past the end of the log means "now".
pub fn value_at(snapshot: &ProvenanceSnapshot, widget_id: &str, seq: Seq) -> Result<WidgetValue> {
    let desc = snapshot
        .widget(widget_id)
        .ok_or_else(|| Error::UnknownWidgetId(widget_id.to_string()))?;
    let record = &snapshot.widget_stats(widget_id)?.record;
    let events = snapshot.events();
    let restores = snapshot.restore_seqs();

    let mut at = seq;
    loop {
        let own = record.seq_at_or_before(at);
        let n = restores.partition_point(|&r| r <= at);
        let restore = n.checked_sub(1).map(|i| restores[i]);
        match (own, restore) {
            (_, Some(r)) if own.is_none_or(|o| r > o) => {
                at = events[r as usize]
                    .restore_target()
                    .expect("restore_seqs only lists restore events");
            }
            (Some(o), _) => {
                return Ok(events[o as usize]
                    .value()
                    .expect("record seqs point at interaction events")
                    .clone());
            }
            (None, _) => return Ok(desc.initial_value.clone()),
        }
    }
}

/// State of every widget at `seq`.
pub fn state_at(snapshot: &ProvenanceSnapshot, seq: Seq) -> StateMap {
    StateMap(
        snapshot
            .widgets()
            .iter()
            .map(|w| {
                let v = value_at(snapshot, &w.id, seq).expect("registered widget");
                (w.id.clone(), v)
            })
            .collect(),
    )
}

/// Current effective state of every widget.
pub fn live_state(snapshot: &ProvenanceSnapshot) -> StateMap {
    state_at(snapshot, Seq::MAX)
}

/// Logs a restore meta-event targeting `seq` and returns the state the
/// host should apply to its controls.
pub fn restore_to(tracker: &mut Tracker, seq: Seq, wall_time: i64) -> Result<StateMap> {
    let len = tracker.len();
    if seq >= len {
        return Err(Error::SeqOutOfRange { seq, len });
    }
    let state = state_at(&tracker.snapshot(), seq);
    tracker.append_restore(seq, wall_time)?;
    Ok(state)
}

/// Rebuilds a snapshot by re-ingesting a stored log.
pub fn replay(
    descriptors: &[WidgetDescriptor],
    events: &[InteractionEvent],
) -> Result<ProvenanceSnapshot> {
    Ok(Tracker::from_log(descriptors, events, DEFAULT_PALETTE_SIZE)?.snapshot())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EventAction, ValueDomain, WidgetKind, WidgetSpec};

    fn tracker() -> Tracker {
        let mut t = Tracker::default();
        for id in ["A", "B"] {
            t.register_widget(WidgetSpec::new(
                id,
                WidgetKind::SingleSlider,
                ValueDomain::Numeric { min: 0.0, max: 100.0 },
                WidgetValue::Numeric(0.0),
            ))
            .unwrap();
        }
        t
    }

    fn num(v: f64) -> WidgetValue {
        WidgetValue::Numeric(v)
    }

    #[test]
    fn untouched_widget_keeps_initial_value() {
        let t = tracker();
        assert_eq!(value_at(&t.snapshot(), "A", 5).unwrap(), num(0.0));
        assert!(matches!(value_at(&t.snapshot(), "Z", 0), Err(Error::UnknownWidgetId(_))));
    }

    #[test]
    fn last_write_at_or_before() {
        let mut t = tracker();
        t.record_interaction("A", num(10.0), 0).unwrap();
        t.record_interaction("B", num(1.0), 0).unwrap();
        t.record_interaction("A", num(20.0), 0).unwrap();
        let snap = t.snapshot();
        assert_eq!(value_at(&snap, "A", 1).unwrap(), num(10.0));
        assert_eq!(value_at(&snap, "A", 2).unwrap(), num(20.0));
        assert_eq!(value_at(&snap, "B", 0).unwrap(), num(0.0));
    }

    #[test]
    fn restore_events_resolve_to_their_target() {
        let mut t = tracker();
        t.record_interaction("A", num(10.0), 0).unwrap();
        t.record_interaction("A", num(20.0), 0).unwrap();
        restore_to(&mut t, 0, 0).unwrap();
        let snap = t.snapshot();
        assert_eq!(value_at(&snap, "A", 2).unwrap(), num(10.0));
        assert_eq!(value_at(&snap, "A", 1).unwrap(), num(20.0));
        // Chains: restore to the restore.
        restore_to(&mut t, 1, 0).unwrap();
        restore_to(&mut t, 2, 0).unwrap();
        let snap = t.snapshot();
        assert_eq!(value_at(&snap, "A", 3).unwrap(), num(20.0));
        assert_eq!(value_at(&snap, "A", 4).unwrap(), num(10.0));
    }

    #[test]
    fn restore_to_prefix() {
        let mut t = tracker();
        t.record_interaction("A", num(1.0), 0).unwrap();
        t.record_interaction("B", num(5.0), 0).unwrap();
        t.record_interaction("A", num(2.0), 0).unwrap();
        let state = restore_to(&mut t, 1, 0).unwrap();
        assert_eq!(state.get("A"), Some(&num(1.0)));
        assert_eq!(state.get("B"), Some(&num(5.0)));
        assert_eq!(t.len(), 4);
        assert_eq!(live_state(&t.snapshot()), state);
    }

    #[test]
    fn restore_to_latest_is_identity_and_idempotent() {
        let mut t = tracker();
        t.record_interaction("A", num(1.0), 0).unwrap();
        t.record_interaction("B", num(5.0), 0).unwrap();
        let live = live_state(&t.snapshot());
        assert_eq!(restore_to(&mut t, 1, 0).unwrap(), live);
        let first = restore_to(&mut t, 0, 0).unwrap();
        let second = restore_to(&mut t, 0, 0).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn restore_to_first_event() {
        let mut t = tracker();
        t.record_interaction("B", num(7.0), 0).unwrap();
        let state = restore_to(&mut t, 0, 0).unwrap();
        assert_eq!(state.get("A"), Some(&num(0.0)));
        assert_eq!(state.get("B"), Some(&num(7.0)));
    }

    #[test]
    fn restore_out_of_range_leaves_log_untouched() {
        let mut t = tracker();
        assert!(matches!(restore_to(&mut t, 0, 0), Err(Error::SeqOutOfRange { seq: 0, len: 0 })));
        t.record_interaction("A", num(1.0), 0).unwrap();
        assert!(restore_to(&mut t, 1, 0).is_err());
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn replay_round_trip_and_gaps() {
        let mut t = tracker();
        assert_eq!(replay(t.snapshot().widgets(), &[]).unwrap().global_count(), 0);
        t.record_interaction("A", num(1.0), 5).unwrap();
        restore_to(&mut t, 0, 6).unwrap();
        let snap = t.snapshot();
        assert_eq!(replay(snap.widgets(), snap.events()).unwrap(), snap);

        let gap = vec![
            snap.events()[0].clone(),
            InteractionEvent {
                seq: 2,
                wall_time: 9,
                action: EventAction::Interaction {
                    widget_id: "A".into(),
                    value: num(3.0),
                },
            },
        ];
        assert!(matches!(
            replay(snap.widgets(), &gap),
            Err(Error::MalformedLog { seq: 2, .. })
        ));
    }
}
