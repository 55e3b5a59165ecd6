//! The append-only interaction log, typed per-widget provenance records and
//! the cross-widget registry.
//!
//! A [`Tracker`] owns one session's state behind an `Arc`. Taking a
//! [`ProvenanceSnapshot`] is a reference-count bump; the next mutation
//! copies the state only if some snapshot is still alive, so snapshots are
//! never affected by later ingestion.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    validate_domain, validate_value, EventAction, InteractionEvent, Seq, ValueDomain,
    WidgetDescriptor, WidgetKind, WidgetSpec, WidgetValue,
};

pub const DEFAULT_PALETTE_SIZE: usize = 10;

/// A value as recorded at a given global sequence index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recorded<T> {
    pub seq: Seq,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericRecord {
    pub events: Vec<Recorded<f64>>,
    pub observed_min: Option<f64>,
    pub observed_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCount {
    pub low: f64,
    pub high: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangedRecord {
    pub events: Vec<Recorded<(f64, f64)>>,
    /// Distinct (low, high) pairs in order of first occurrence.
    pub pairs: Vec<PairCount>,
    pub domain_min: f64,
    pub domain_max: f64,
    pub lowest_low: Option<f64>,
    pub highest_high: Option<f64>,
    #[serde(skip)]
    pair_index: HashMap<(u64, u64), usize>,
}

impl RangedRecord {
    pub fn pair_count(&self, low: f64, high: f64) -> u64 {
        self.pair_index
            .get(&pair_key(low, high))
            .map_or(0, |&i| self.pairs[i].count)
    }
}

fn pair_key(low: f64, high: f64) -> (u64, u64) {
    // +0.0 and -0.0 are the same pair.
    ((low + 0.0).to_bits(), (high + 0.0).to_bits())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemCounts {
    pub item: String,
    /// Events in which the item went from unselected to selected.
    pub selection_count: u64,
    /// Events in which the item's membership changed either way.
    pub interaction_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionRecord {
    pub events: Vec<Recorded<BTreeSet<String>>>,
    /// One entry per option, in option order.
    pub items: Vec<ItemCounts>,
    #[serde(skip)]
    current: BTreeSet<String>,
}

impl SelectionRecord {
    pub fn item(&self, item: &str) -> Option<&ItemCounts> {
        self.items.iter().find(|c| c.item == item)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TextRecord {
    pub events: Vec<Recorded<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProvenanceRecord {
    Numeric(NumericRecord),
    Ranged(RangedRecord),
    Selection(SelectionRecord),
    Text(TextRecord),
}

impl ProvenanceRecord {
    fn new(desc: &WidgetDescriptor) -> Self {
        match desc.kind {
            WidgetKind::SingleSlider => ProvenanceRecord::Numeric(NumericRecord {
                events: Vec::new(),
                observed_min: None,
                observed_max: None,
            }),
            WidgetKind::RangeSlider => {
                let (domain_min, domain_max) = desc.domain.numeric_bounds().unwrap_or((0.0, 0.0));
                ProvenanceRecord::Ranged(RangedRecord {
                    events: Vec::new(),
                    pairs: Vec::new(),
                    domain_min,
                    domain_max,
                    lowest_low: None,
                    highest_high: None,
                    pair_index: HashMap::new(),
                })
            }
            WidgetKind::TextInput => ProvenanceRecord::Text(TextRecord { events: Vec::new() }),
            _ => {
                let items = match &desc.domain {
                    ValueDomain::Options(opts) => opts
                        .iter()
                        .map(|o| ItemCounts {
                            item: o.clone(),
                            selection_count: 0,
                            interaction_count: 0,
                        })
                        .collect(),
                    _ => Vec::new(),
                };
                let current = match &desc.initial_value {
                    WidgetValue::Selection(s) => s.clone(),
                    _ => BTreeSet::new(),
                };
                ProvenanceRecord::Selection(SelectionRecord {
                    events: Vec::new(),
                    items,
                    current,
                })
            }
        }
    }

    /// Folds one validated value into the record.
    fn push(&mut self, seq: Seq, value: &WidgetValue) {
        match (self, value) {
            (ProvenanceRecord::Numeric(r), &WidgetValue::Numeric(v)) => {
                r.events.push(Recorded { seq, value: v });
                r.observed_min = Some(r.observed_min.map_or(v, |m| m.min(v)));
                r.observed_max = Some(r.observed_max.map_or(v, |m| m.max(v)));
            }
            (ProvenanceRecord::Ranged(r), &WidgetValue::Range { low, high }) => {
                r.events.push(Recorded { seq, value: (low, high) });
                match r.pair_index.get(&pair_key(low, high)) {
                    Some(&i) => r.pairs[i].count += 1,
                    None => {
                        r.pair_index.insert(pair_key(low, high), r.pairs.len());
                        r.pairs.push(PairCount { low, high, count: 1 });
                    }
                }
                r.lowest_low = Some(r.lowest_low.map_or(low, |m| m.min(low)));
                r.highest_high = Some(r.highest_high.map_or(high, |m| m.max(high)));
            }
            (ProvenanceRecord::Selection(r), WidgetValue::Selection(next)) => {
                for counts in &mut r.items {
                    let was = r.current.contains(&counts.item);
                    let is = next.contains(&counts.item);
                    if was != is {
                        counts.interaction_count += 1;
                        if is {
                            counts.selection_count += 1;
                        }
                    }
                }
                r.current = next.clone();
                r.events.push(Recorded { seq, value: next.clone() });
            }
            (ProvenanceRecord::Text(r), WidgetValue::Text(s)) => {
                r.events.push(Recorded { seq, value: s.clone() });
            }
            // Values are validated against the kind before they get here.
            (rec, v) => unreachable!("value {v:?} does not fit record {rec:?}"),
        }
    }

    pub fn event_count(&self) -> usize {
        match self {
            ProvenanceRecord::Numeric(r) => r.events.len(),
            ProvenanceRecord::Ranged(r) => r.events.len(),
            ProvenanceRecord::Selection(r) => r.events.len(),
            ProvenanceRecord::Text(r) => r.events.len(),
        }
    }

    /// Seq of the latest recorded event at or before `seq`.
    pub fn seq_at_or_before(&self, seq: Seq) -> Option<Seq> {
        fn find<T>(events: &[Recorded<T>], seq: Seq) -> Option<Seq> {
            let n = events.partition_point(|e| e.seq <= seq);
            n.checked_sub(1).map(|i| events[i].seq)
        }
        match self {
            ProvenanceRecord::Numeric(r) => find(&r.events, seq),
            ProvenanceRecord::Ranged(r) => find(&r.events, seq),
            ProvenanceRecord::Selection(r) => find(&r.events, seq),
            ProvenanceRecord::Text(r) => find(&r.events, seq),
        }
    }

    pub fn as_numeric(&self) -> Option<&NumericRecord> {
        match self {
            ProvenanceRecord::Numeric(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_ranged(&self) -> Option<&RangedRecord> {
        match self {
            ProvenanceRecord::Ranged(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_selection(&self) -> Option<&SelectionRecord> {
        match self {
            ProvenanceRecord::Selection(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&TextRecord> {
        match self {
            ProvenanceRecord::Text(r) => Some(r),
            _ => None,
        }
    }
}

/// Frequency and recency of one widget plus its typed record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidgetStats {
    pub count: u64,
    pub first_seq: Option<Seq>,
    pub last_seq: Option<Seq>,
    pub last_wall_time: Option<i64>,
    pub record: ProvenanceRecord,
}

impl WidgetStats {
    fn new(desc: &WidgetDescriptor) -> Self {
        WidgetStats {
            count: 0,
            first_seq: None,
            last_seq: None,
            last_wall_time: None,
            record: ProvenanceRecord::new(desc),
        }
    }

    fn push(&mut self, seq: Seq, wall_time: i64, value: &WidgetValue) {
        self.count += 1;
        self.first_seq.get_or_insert(seq);
        self.last_seq = Some(seq);
        self.last_wall_time = Some(wall_time);
        self.record.push(seq, value);
    }

    pub fn is_used(&self) -> bool {
        self.count > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
struct SessionState {
    widgets: Vec<WidgetDescriptor>,
    index: HashMap<String, usize>,
    events: Vec<InteractionEvent>,
    stats: Vec<WidgetStats>,
    restores: Vec<Seq>,
}

/// Immutable view of a session: registry, full log and derived statistics.
#[derive(Debug, Clone)]
pub struct ProvenanceSnapshot {
    state: Arc<SessionState>,
}

impl PartialEq for ProvenanceSnapshot {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.state, &other.state) || self.state == other.state
    }
}

impl ProvenanceSnapshot {
    pub fn widgets(&self) -> &[WidgetDescriptor] {
        &self.state.widgets
    }

    pub fn events(&self) -> &[InteractionEvent] {
        &self.state.events
    }

    /// Number of events in the log, restore meta-events included.
    pub fn global_count(&self) -> u64 {
        self.state.events.len() as u64
    }

    pub fn interaction_count(&self) -> u64 {
        self.global_count() - self.state.restores.len() as u64
    }

    /// Seqs of all restore meta-events, ascending.
    pub fn restore_seqs(&self) -> &[Seq] {
        &self.state.restores
    }

    pub fn widget(&self, id: &str) -> Option<&WidgetDescriptor> {
        self.state.index.get(id).map(|&i| &self.state.widgets[i])
    }

    pub fn widget_stats(&self, id: &str) -> Result<&WidgetStats> {
        self.state
            .index
            .get(id)
            .map(|&i| &self.state.stats[i])
            .ok_or_else(|| Error::UnknownWidgetId(id.to_string()))
    }

    /// Widgets paired with their statistics, in registration order.
    pub fn per_widget(&self) -> impl Iterator<Item = (&WidgetDescriptor, &WidgetStats)> {
        self.state.widgets.iter().zip(&self.state.stats)
    }

    pub fn first_wall_time(&self) -> Option<i64> {
        self.state.events.first().map(|e| e.wall_time)
    }

    pub fn last_wall_time(&self) -> Option<i64> {
        self.state.events.last().map(|e| e.wall_time)
    }
}

impl Serialize for ProvenanceSnapshot {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;

        struct PerWidget<'a>(&'a ProvenanceSnapshot);
        impl Serialize for PerWidget<'_> {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_map(self.0.per_widget().map(|(w, s)| (&w.id, s)))
            }
        }

        let mut st = serializer.serialize_struct("ProvenanceSnapshot", 4)?;
        st.serialize_field("global_count", &self.global_count())?;
        st.serialize_field("widgets", self.widgets())?;
        st.serialize_field("events", self.events())?;
        st.serialize_field("per_widget", &PerWidget(self))?;
        st.end()
    }
}

/// Per-widget statistics lookup on a snapshot.
pub fn widget_stats<'a>(snapshot: &'a ProvenanceSnapshot, widget_id: &str) -> Result<&'a WidgetStats> {
    snapshot.widget_stats(widget_id)
}

/// Single-writer owner of one session's provenance.
#[derive(Debug, Clone)]
pub struct Tracker {
    state: Arc<SessionState>,
    palette_size: usize,
    coalescing_window_ms: Option<u64>,
}

impl Default for Tracker {
    fn default() -> Self {
        Tracker::new(DEFAULT_PALETTE_SIZE)
    }
}

impl Tracker {
    /// `palette_size` is clamped to at least 1.
    pub fn new(palette_size: usize) -> Self {
        Tracker {
            state: Arc::new(SessionState {
                widgets: Vec::new(),
                index: HashMap::new(),
                events: Vec::new(),
                stats: Vec::new(),
                restores: Vec::new(),
            }),
            palette_size: palette_size.max(1),
            coalescing_window_ms: None,
        }
    }

    /// Consecutive events on one widget closer than `window_ms` replace the
    /// previous event instead of appending a new one.
    pub fn with_coalescing(mut self, window_ms: Option<u64>) -> Self {
        self.coalescing_window_ms = window_ms;
        self
    }

    pub fn palette_size(&self) -> usize {
        self.palette_size
    }

    pub fn len(&self) -> u64 {
        self.state.events.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.state.events.is_empty()
    }

    pub fn widget_count(&self) -> usize {
        self.state.widgets.len()
    }

    pub fn snapshot(&self) -> ProvenanceSnapshot {
        ProvenanceSnapshot {
            state: Arc::clone(&self.state),
        }
    }

    pub fn register_widget(&mut self, spec: WidgetSpec) -> Result<WidgetDescriptor> {
        if spec.id.is_empty() {
            return Err(Error::InvalidDescriptor {
                id: spec.id,
                reason: "widget id must be non-empty".into(),
            });
        }
        if self.state.index.contains_key(&spec.id) {
            return Err(Error::DuplicateWidgetId(spec.id));
        }
        validate_domain(spec.kind, &spec.domain).map_err(|reason| Error::InvalidDescriptor {
            id: spec.id.clone(),
            reason,
        })?;
        validate_value(spec.kind, &spec.domain, &spec.initial_value).map_err(|reason| {
            Error::InvalidInitialValue {
                id: spec.id.clone(),
                reason,
            }
        })?;
        let registration_index = self.state.widgets.len();
        let desc = WidgetDescriptor {
            id: spec.id,
            kind: spec.kind,
            label: spec.label,
            domain: spec.domain,
            initial_value: spec.initial_value,
            registration_index,
            color_index: registration_index % self.palette_size,
        };
        self.push_descriptor(desc.clone());
        Ok(desc)
    }

    fn push_descriptor(&mut self, desc: WidgetDescriptor) {
        let state = Arc::make_mut(&mut self.state);
        state.index.insert(desc.id.clone(), state.widgets.len());
        state.stats.push(WidgetStats::new(&desc));
        state.widgets.push(desc);
    }

    fn clamp_time(&self, wall_time: i64) -> i64 {
        self.state
            .events
            .last()
            .map_or(wall_time, |prev| wall_time.max(prev.wall_time))
    }

    /// Appends one interaction and returns its seq. A regressing clock is
    /// clamped to the previous event's time.
    pub fn record_interaction(
        &mut self,
        widget_id: &str,
        value: WidgetValue,
        wall_time: i64,
    ) -> Result<Seq> {
        let idx = *self
            .state
            .index
            .get(widget_id)
            .ok_or_else(|| Error::UnknownWidgetId(widget_id.to_string()))?;
        self.state.widgets[idx]
            .validate_value(&value)
            .map_err(|reason| Error::InvalidValue {
                id: widget_id.to_string(),
                reason,
            })?;
        let wall_time = self.clamp_time(wall_time);

        if let Some(seq) = self.coalesce_target(widget_id, wall_time) {
            self.replace_last(idx, value, wall_time);
            return Ok(seq);
        }

        let state = Arc::make_mut(&mut self.state);
        let seq = state.events.len() as Seq;
        state.stats[idx].push(seq, wall_time, &value);
        state.events.push(InteractionEvent {
            seq,
            wall_time,
            action: EventAction::Interaction {
                widget_id: widget_id.to_string(),
                value,
            },
        });
        Ok(seq)
    }

    fn coalesce_target(&self, widget_id: &str, wall_time: i64) -> Option<Seq> {
        let window = self.coalescing_window_ms?;
        let last = self.state.events.last()?;
        match &last.action {
            EventAction::Interaction { widget_id: w, .. }
                if w == widget_id && (wall_time - last.wall_time) as u64 <= window =>
            {
                Some(last.seq)
            }
            _ => None,
        }
    }

    /// Overwrites the final log event (which belongs to widget `idx`) and
    /// rebuilds that widget's statistics.
    fn replace_last(&mut self, idx: usize, value: WidgetValue, wall_time: i64) {
        let state = Arc::make_mut(&mut self.state);
        let last = state.events.last_mut().expect("coalescing needs a previous event");
        last.wall_time = wall_time;
        if let EventAction::Interaction { value: v, .. } = &mut last.action {
            *v = value;
        }
        let id = &state.widgets[idx].id;
        let mut stats = WidgetStats::new(&state.widgets[idx]);
        for ev in &state.events {
            if let EventAction::Interaction { widget_id, value } = &ev.action {
                if widget_id == id {
                    stats.push(ev.seq, ev.wall_time, value);
                }
            }
        }
        state.stats[idx] = stats;
    }

    /// Appends a restore meta-event pointing at `target`.
    pub(crate) fn append_restore(&mut self, target: Seq, wall_time: i64) -> Result<Seq> {
        let len = self.len();
        if target >= len {
            return Err(Error::SeqOutOfRange { seq: target, len });
        }
        let wall_time = self.clamp_time(wall_time);
        let state = Arc::make_mut(&mut self.state);
        let seq = len;
        state.events.push(InteractionEvent {
            seq,
            wall_time,
            action: EventAction::Restore { target },
        });
        state.restores.push(seq);
        Ok(seq)
    }

    /// Rebuilds a tracker from stored descriptors and a stored log. Nothing
    /// is repaired: any violation of the log invariants is reported as
    /// [`Error::MalformedLog`] (or a descriptor error).
    pub fn from_log(
        descriptors: &[WidgetDescriptor],
        events: &[InteractionEvent],
        palette_size: usize,
    ) -> Result<Tracker> {
        let mut tracker = Tracker::new(palette_size);
        for desc in descriptors {
            tracker.admit_descriptor(desc)?;
        }
        for ev in events {
            tracker.ingest(ev)?;
        }
        Ok(tracker)
    }

    /// Adds a stored descriptor verbatim after checking it.
    pub(crate) fn admit_descriptor(&mut self, desc: &WidgetDescriptor) -> Result<()> {
        let bad = |reason: String| Error::InvalidDescriptor {
            id: desc.id.clone(),
            reason,
        };
        if desc.id.is_empty() {
            return Err(bad("widget id must be non-empty".into()));
        }
        if self.state.index.contains_key(&desc.id) {
            return Err(Error::DuplicateWidgetId(desc.id.clone()));
        }
        let pos = self.state.widgets.len();
        if desc.registration_index != pos {
            return Err(bad(format!(
                "registration_index {} does not match position {pos}",
                desc.registration_index
            )));
        }
        validate_domain(desc.kind, &desc.domain).map_err(bad)?;
        validate_value(desc.kind, &desc.domain, &desc.initial_value).map_err(|reason| {
            Error::InvalidInitialValue {
                id: desc.id.clone(),
                reason,
            }
        })?;
        self.push_descriptor(desc.clone());
        Ok(())
    }

    /// Appends a stored event verbatim after checking it against the log.
    pub(crate) fn ingest(&mut self, ev: &InteractionEvent) -> Result<()> {
        let malformed = |reason: String| Error::MalformedLog { seq: ev.seq, reason };
        let expected = self.len();
        if ev.seq != expected {
            return Err(malformed(format!("expected seq {expected}")));
        }
        if let Some(prev) = self.state.events.last() {
            if ev.wall_time < prev.wall_time {
                return Err(malformed(format!(
                    "wall_time {} precedes previous {}",
                    ev.wall_time, prev.wall_time
                )));
            }
        }
        match &ev.action {
            EventAction::Interaction { widget_id, value } => {
                let idx = *self
                    .state
                    .index
                    .get(widget_id)
                    .ok_or_else(|| malformed(format!("unknown widget id {widget_id:?}")))?;
                self.state.widgets[idx]
                    .validate_value(value)
                    .map_err(|r| malformed(format!("invalid value for {widget_id:?}: {r}")))?;
                let state = Arc::make_mut(&mut self.state);
                state.stats[idx].push(ev.seq, ev.wall_time, value);
                state.events.push(ev.clone());
            }
            EventAction::Restore { target } => {
                if *target >= ev.seq {
                    return Err(malformed(format!("restore_target {target} does not precede seq")));
                }
                let state = Arc::make_mut(&mut self.state);
                state.events.push(ev.clone());
                state.restores.push(ev.seq);
            }
        }
        Ok(())
    }
}
