mod common;

use proptest::prelude::*;

use common::random_tracker;
use spw_core::analysis::{co_interaction, untouched_widgets, usage_ranking};
use spw_core::model::{ValueDomain, WidgetKind, WidgetSpec, WidgetValue};
use spw_core::persist::{parse_session, serialize_session};
use spw_core::provenance::Tracker;
use spw_core::recovery::{replay, restore_to, state_at};

#[derive(Debug, Clone)]
enum Op {
    Interact { widget: usize, text: String, dt: i64 },
    Restore { target: u64, dt: i64 },
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        4 => (0..6usize, "[ab]{0,2}", -20i64..200).prop_map(|(widget, text, dt)| Op::Interact { widget, text, dt }),
        1 => (any::<u64>(), -20i64..200).prop_map(|(target, dt)| Op::Restore { target, dt }),
    ]
}

fn build(widgets: usize, ops: &[Op]) -> Tracker {
    let mut t = Tracker::default();
    for i in 0..widgets {
        t.register_widget(WidgetSpec::new(
            format!("w{i}"),
            WidgetKind::TextInput,
            ValueDomain::None,
            WidgetValue::text("init"),
        ))
        .unwrap();
    }
    let mut clock = 0;
    for op in ops {
        match op {
            Op::Interact { widget, text, dt } => {
                clock += dt;
                let id = format!("w{}", widget % widgets);
                t.record_interaction(&id, WidgetValue::text(text.as_str()), clock).unwrap();
            }
            Op::Restore { target, dt } => {
                clock += dt;
                if !t.is_empty() {
                    let seq = target % t.len();
                    restore_to(&mut t, seq, clock).unwrap();
                }
            }
        }
    }
    t
}

proptest! {
    #[test]
    fn seqs_are_dense_and_counts_consistent(widgets in 1..6usize, ops in prop::collection::vec(op(), 0..120)) {
        let snap = build(widgets, &ops).snapshot();
        for (i, ev) in snap.events().iter().enumerate() {
            prop_assert_eq!(ev.seq, i as u64);
            if let Some(target) = ev.restore_target() {
                prop_assert!(target < ev.seq);
            }
        }
        prop_assert!(snap.events().windows(2).all(|w| w[0].wall_time <= w[1].wall_time));
        let total: u64 = snap.per_widget().map(|(_, s)| s.count).sum();
        prop_assert_eq!(total, snap.interaction_count());
        prop_assert_eq!(
            snap.interaction_count() + snap.restore_seqs().len() as u64,
            snap.global_count()
        );
    }

    #[test]
    fn restoring_twice_gives_the_same_state(ops in prop::collection::vec(op(), 1..80), pick in any::<u64>()) {
        let mut t = build(4, &ops);
        prop_assume!(!t.is_empty());
        let seq = pick % t.len();
        let expected = state_at(&t.snapshot(), seq);
        let first = restore_to(&mut t, seq, 0).unwrap();
        let second = restore_to(&mut t, seq, 0).unwrap();
        prop_assert_eq!(&first, &expected);
        prop_assert_eq!(&second, &expected);
        let snap = t.snapshot();
        prop_assert_eq!(state_at(&snap, snap.global_count() - 1), expected);
    }

    #[test]
    fn co_interaction_grows_with_window(seed in any::<u64>(), k in 1..8usize) {
        let snap = random_tracker(seed, 150, 0.05).snapshot();
        let small = co_interaction(&snap, k).unwrap();
        let large = co_interaction(&snap, k + 1).unwrap();
        for (a, b, count) in small.pairs() {
            prop_assert!(large.get(a, b) >= count);
        }
        prop_assert!(large.len() >= small.len());
    }

    #[test]
    fn serialization_is_canonical(seed in any::<u64>(), len in 0..200usize, exported_at in any::<i64>()) {
        let snap = random_tracker(seed, len, 0.05).snapshot();
        let bytes = serialize_session(&snap, exported_at);
        let (widgets, events) = parse_session(&bytes).unwrap();
        let rebuilt = replay(&widgets, &events).unwrap();
        prop_assert_eq!(serialize_session(&rebuilt, exported_at), bytes);
        prop_assert_eq!(rebuilt, snap);
    }

    #[test]
    fn ranking_and_untouched_partition_the_widgets(widgets in 1..6usize, ops in prop::collection::vec(op(), 0..60)) {
        let snap = build(widgets, &ops).snapshot();
        let ranking = usage_ranking(&snap);
        let untouched = untouched_widgets(&snap);
        let mut ids: Vec<String> = ranking
            .iter()
            .filter(|(_, c)| *c > 0)
            .map(|(id, _)| id.clone())
            .chain(untouched.iter().cloned())
            .collect();
        ids.sort();
        let mut all: Vec<String> = snap.widgets().iter().map(|w| w.id.clone()).collect();
        all.sort();
        prop_assert_eq!(ids, all);
        prop_assert!(ranking.windows(2).all(|w| w[0].1 >= w[1].1));
        for id in &untouched {
            prop_assert_eq!(snap.widget_stats(id).unwrap().count, 0);
        }
    }
}
