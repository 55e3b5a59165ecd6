//! Audit and exploration-bias queries over snapshots.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EventAction, InteractionEvent, Seq, WidgetKind, WidgetValue};
use crate::provenance::{ProvenanceRecord, ProvenanceSnapshot};
use crate::recovery::value_at;

/// Widgets nobody has touched yet, in registration order.
pub fn untouched_widgets(snapshot: &ProvenanceSnapshot) -> Vec<String> {
    snapshot
        .per_widget()
        .filter(|(_, s)| s.count == 0)
        .map(|(w, _)| w.id.clone())
        .collect()
}

/// Every widget with its interaction count, busiest first. Ties keep
/// registration order.
pub fn usage_ranking(snapshot: &ProvenanceSnapshot) -> Vec<(String, u64)> {
    let mut ranking: Vec<(String, u64)> = snapshot
        .per_widget()
        .map(|(w, s)| (w.id.clone(), s.count))
        .collect();
    // Stable sort keeps registration order among equal counts.
    ranking.sort_by_key(|r| std::cmp::Reverse(r.1));
    ranking
}

/// Symmetric counts of how often two different widgets were used within
/// `window` interaction events of each other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoInteractionMatrix {
    pub window: usize,
    /// Keyed by the lexicographically ordered id pair.
    counts: BTreeMap<(String, String), u64>,
}

impl CoInteractionMatrix {
    fn key(a: &str, b: &str) -> (String, String) {
        if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        }
    }

    pub fn get(&self, a: &str, b: &str) -> u64 {
        self.counts.get(&Self::key(a, b)).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    /// Pairs by count descending, then by id pair.
    pub fn pairs(&self) -> Vec<(&str, &str, u64)> {
        let mut pairs: Vec<_> = self
            .counts
            .iter()
            .map(|((a, b), &c)| (a.as_str(), b.as_str(), c))
            .collect();
        pairs.sort_by_key(|p| std::cmp::Reverse(p.2));
        pairs
    }
}

pub fn co_interaction(snapshot: &ProvenanceSnapshot, window: usize) -> Result<CoInteractionMatrix> {
    if window < 1 {
        return Err(Error::InvalidWindow(window));
    }
    // Restores neither count nor take up window positions.
    let ids: Vec<&str> = snapshot.events().iter().filter_map(InteractionEvent::widget_id).collect();
    let mut counts = BTreeMap::new();
    for (i, a) in ids.iter().enumerate() {
        for b in ids.iter().skip(i + 1).take(window) {
            if a != b {
                *counts.entry(CoInteractionMatrix::key(a, b)).or_insert(0) += 1;
            }
        }
    }
    Ok(CoInteractionMatrix { window, counts })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidgetAudit {
    pub id: String,
    pub kind: WidgetKind,
    pub label: String,
    pub count: u64,
    pub first_seq: Option<Seq>,
    pub last_seq: Option<Seq>,
    pub first_wall_time: Option<i64>,
    pub last_wall_time: Option<i64>,
    /// Value of the widget's most recent interaction.
    pub last_value: Option<WidgetValue>,
    /// Effective value after all events, restores included.
    pub current_value: WidgetValue,
    pub record: ProvenanceRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub global_count: u64,
    pub interaction_count: u64,
    pub restore_count: u64,
    pub session_start: Option<i64>,
    pub session_end: Option<i64>,
    pub widgets: Vec<WidgetAudit>,
    pub events: Vec<InteractionEvent>,
}

pub fn audit_report(snapshot: &ProvenanceSnapshot) -> AuditReport {
    let events = snapshot.events();
    let widgets = snapshot
        .per_widget()
        .map(|(w, s)| {
            let value_of = |seq: Option<Seq>| {
                seq.and_then(|q| match &events[q as usize].action {
                    EventAction::Interaction { value, .. } => Some(value.clone()),
                    EventAction::Restore { .. } => None,
                })
            };
            WidgetAudit {
                id: w.id.clone(),
                kind: w.kind,
                label: w.label.clone(),
                count: s.count,
                first_seq: s.first_seq,
                last_seq: s.last_seq,
                first_wall_time: s.first_seq.map(|q| events[q as usize].wall_time),
                last_wall_time: s.last_wall_time,
                last_value: value_of(s.last_seq),
                current_value: value_at(snapshot, &w.id, Seq::MAX).expect("registered widget"),
                record: s.record.clone(),
            }
        })
        .collect();
    AuditReport {
        global_count: snapshot.global_count(),
        interaction_count: snapshot.interaction_count(),
        restore_count: snapshot.restore_seqs().len() as u64,
        session_start: snapshot.first_wall_time(),
        session_end: snapshot.last_wall_time(),
        widgets,
        events: events.to_vec(),
    }
}
