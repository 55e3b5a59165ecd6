//! Host-facing session API: lifecycle, ingestion, change subscription and
//! the navigate/restore callback protocol.
//!
//! A [`Session`] is a cheap, clonable handle. Observers run synchronously on
//! the calling thread right after each mutation; a mutation attempted from
//! inside a callback fails with [`Error::Reentrancy`].

use std::cell::{Cell, RefCell};
use std::rc::Rc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::aggregate::{DEFAULT_AREA_MAX, DEFAULT_AREA_MIN};
use crate::layout::{
    compute_aggregate_layout, compute_temporal_layout, AggregateBox, AggregateParams, Palette,
    TemporalLayout, TemporalParams,
};
use crate::model::{Seq, WidgetDescriptor, WidgetSpec, WidgetValue};
use crate::persist::{parse_session, serialize_session};
use crate::provenance::{ProvenanceSnapshot, Tracker};
use crate::recovery::{restore_to, StateMap};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub palette: Option<Vec<String>>,
    pub coalescing_window_ms: Option<u64>,
    pub area_min: Option<f64>,
    pub area_max: Option<f64>,
}

impl SessionConfig {
    fn resolve(&self) -> Result<(Palette, f64, f64)> {
        let palette = match &self.palette {
            Some(colors) => Palette::new(colors.clone())?,
            None => Palette::default(),
        };
        let area_min = self.area_min.unwrap_or(DEFAULT_AREA_MIN);
        let area_max = self.area_max.unwrap_or(DEFAULT_AREA_MAX);
        if !(area_min > 0.0 && area_min < area_max && area_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "area bounds must satisfy 0 < min < max (got {area_min}, {area_max})"
            )));
        }
        Ok((palette, area_min, area_max))
    }
}

/// Receives session notifications. Every method defaults to a no-op.
pub trait ProvenanceObserver {
    fn on_change(&mut self, _snapshot: &ProvenanceSnapshot) {}
    fn on_navigate(&mut self, _widget_id: &str) {}
    fn on_restore(&mut self, _state: &StateMap) {}
}

/// Adapts a closure into an observer that only listens for changes.
pub struct OnChange<F>(pub F);

impl<F: FnMut(&ProvenanceSnapshot)> ProvenanceObserver for OnChange<F> {
    fn on_change(&mut self, snapshot: &ProvenanceSnapshot) {
        (self.0)(snapshot)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubscriptionId(pub u64);

type SharedObserver = Rc<RefCell<dyn ProvenanceObserver>>;
type Clock = Box<dyn Fn() -> i64>;

struct Inner {
    tracker: RefCell<Tracker>,
    palette: Palette,
    area: (f64, f64),
    observers: RefCell<Vec<(SubscriptionId, SharedObserver)>>,
    next_subscription: Cell<u64>,
    dispatch_depth: Cell<usize>,
    clock: RefCell<Clock>,
}

#[derive(Clone)]
pub struct Session {
    inner: Rc<Inner>,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session")
            .field("events", &self.inner.tracker.borrow().len())
            .field("observers", &self.inner.observers.borrow().len())
            .finish_non_exhaustive()
    }
}

pub fn system_clock_ms() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as i64)
}

pub fn create_session(config: &SessionConfig) -> Result<Session> {
    Session::new(config)
}

impl Session {
    pub fn new(config: &SessionConfig) -> Result<Session> {
        let (palette, area_min, area_max) = config.resolve()?;
        let tracker = Tracker::new(palette.len()).with_coalescing(config.coalescing_window_ms);
        Ok(Session::from_parts(tracker, palette, (area_min, area_max)))
    }

    fn from_parts(tracker: Tracker, palette: Palette, area: (f64, f64)) -> Session {
        Session {
            inner: Rc::new(Inner {
                tracker: RefCell::new(tracker),
                palette,
                area,
                observers: RefCell::new(Vec::new()),
                next_subscription: Cell::new(0),
                dispatch_depth: Cell::new(0),
                clock: RefCell::new(Box::new(system_clock_ms)),
            }),
        }
    }

    /// Rebuilds a session from an exported document.
    pub fn import(config: &SessionConfig, document: &[u8]) -> Result<Session> {
        let (palette, area_min, area_max) = config.resolve()?;
        let (widgets, events) = parse_session(document)?;
        let tracker = Tracker::from_log(&widgets, &events, palette.len())?
            .with_coalescing(config.coalescing_window_ms);
        Ok(Session::from_parts(tracker, palette, (area_min, area_max)))
    }

    /// Replaces the wall clock used for restores and [`Session::record_now`].
    pub fn set_clock(&self, clock: impl Fn() -> i64 + 'static) {
        *self.inner.clock.borrow_mut() = Box::new(clock);
    }

    fn now(&self) -> i64 {
        (self.inner.clock.borrow())()
    }

    pub fn palette(&self) -> &Palette {
        &self.inner.palette
    }

    pub fn palette_size(&self) -> usize {
        self.inner.palette.len()
    }

    pub fn snapshot(&self) -> ProvenanceSnapshot {
        self.inner.tracker.borrow().snapshot()
    }

    fn guard(&self) -> Result<()> {
        if self.inner.dispatch_depth.get() > 0 {
            Err(Error::Reentrancy)
        } else {
            Ok(())
        }
    }

    /// Registration is setup, not provenance: observers are not notified.
    pub fn register_widget(&self, spec: WidgetSpec) -> Result<WidgetDescriptor> {
        self.guard()?;
        self.inner.tracker.borrow_mut().register_widget(spec)
    }

    pub fn record_interaction(&self, widget_id: &str, value: WidgetValue, wall_time: i64) -> Result<Seq> {
        self.guard()?;
        let (seq, snapshot) = {
            let mut tracker = self.inner.tracker.borrow_mut();
            let seq = tracker.record_interaction(widget_id, value, wall_time)?;
            (seq, tracker.snapshot())
        };
        self.dispatch(|o| o.on_change(&snapshot));
        Ok(seq)
    }

    pub fn record_now(&self, widget_id: &str, value: WidgetValue) -> Result<Seq> {
        let now = self.now();
        self.record_interaction(widget_id, value, now)
    }

    pub fn subscribe<O: ProvenanceObserver + 'static>(&self, observer: O) -> SubscriptionId {
        self.subscribe_shared(Rc::new(RefCell::new(observer)))
    }

    /// Subscribes an observer the caller keeps a handle to.
    pub fn subscribe_shared(&self, observer: SharedObserver) -> SubscriptionId {
        let id = SubscriptionId(self.inner.next_subscription.get());
        self.inner.next_subscription.set(id.0 + 1);
        self.inner.observers.borrow_mut().push((id, observer));
        id
    }

    pub fn unsubscribe(&self, id: SubscriptionId) -> bool {
        let mut observers = self.inner.observers.borrow_mut();
        let before = observers.len();
        observers.retain(|(sid, _)| *sid != id);
        observers.len() != before
    }

    /// Asks every observer to bring `widget_id` into focus. Not a mutation.
    pub fn request_navigate(&self, widget_id: &str) -> Result<()> {
        if self.snapshot().widget(widget_id).is_none() {
            return Err(Error::UnknownWidgetId(widget_id.to_string()));
        }
        self.dispatch(|o| o.on_navigate(widget_id));
        Ok(())
    }

    /// Logs a restore to `seq`, then delivers `on_restore` followed by
    /// `on_change`.
    pub fn request_restore(&self, seq: Seq) -> Result<StateMap> {
        self.guard()?;
        let now = self.now();
        let (state, snapshot) = {
            let mut tracker = self.inner.tracker.borrow_mut();
            let state = restore_to(&mut tracker, seq, now)?;
            (state, tracker.snapshot())
        };
        self.dispatch(|o| o.on_restore(&state));
        self.dispatch(|o| o.on_change(&snapshot));
        Ok(state)
    }

    fn dispatch(&self, mut deliver: impl FnMut(&mut dyn ProvenanceObserver)) {
        let observers: Vec<SharedObserver> = self
            .inner
            .observers
            .borrow()
            .iter()
            .map(|(_, o)| Rc::clone(o))
            .collect();
        let depth = &self.inner.dispatch_depth;
        depth.set(depth.get() + 1);
        for observer in observers {
            // An observer already borrowed is the one currently running a
            // callback that triggered this dispatch; skip it.
            if let Ok(mut o) = observer.try_borrow_mut() {
                deliver(&mut *o);
            }
        }
        depth.set(depth.get() - 1);
    }

    pub fn aggregate_layout(&self, width: f64, height: f64) -> Result<Vec<AggregateBox>> {
        let (area_min, area_max) = self.inner.area;
        let params = AggregateParams::new(width, height).with_area(area_min, area_max);
        compute_aggregate_layout(&self.snapshot(), &params, &self.inner.palette)
    }

    pub fn temporal_layout(&self, params: &TemporalParams) -> TemporalLayout {
        compute_temporal_layout(&self.snapshot(), params, &self.inner.palette)
    }

    pub fn color_of(&self, widget_id: &str) -> Option<String> {
        self.snapshot()
            .widget(widget_id)
            .map(|w| self.inner.palette.color(w.registration_index).to_string())
    }

    pub fn export(&self, exported_at: i64) -> Vec<u8> {
        serialize_session(&self.snapshot(), exported_at)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ValueDomain, WidgetKind};

    #[derive(Default)]
    struct Log {
        calls: Vec<String>,
        counts: Vec<u64>,
    }

    impl ProvenanceObserver for Log {
        fn on_change(&mut self, s: &ProvenanceSnapshot) {
            self.calls.push("change".into());
            self.counts.push(s.global_count());
        }
        fn on_navigate(&mut self, id: &str) {
            self.calls.push(format!("navigate:{id}"));
        }
        fn on_restore(&mut self, _: &StateMap) {
            self.calls.push("restore".into());
        }
    }

    fn spec(id: &str) -> WidgetSpec {
        WidgetSpec::new(id, WidgetKind::TextInput, ValueDomain::None, WidgetValue::text(""))
    }

    fn session() -> Session {
        let s = create_session(&SessionConfig::default()).unwrap();
        s.set_clock(|| 1_000);
        s.register_widget(spec("x")).unwrap();
        s
    }

    #[test]
    fn config_validation() {
        assert_eq!(session().palette_size(), 10);
        let bad = SessionConfig {
            palette: Some(vec![]),
            ..Default::default()
        };
        assert!(matches!(create_session(&bad), Err(Error::InvalidConfig(_))));
        let bad = SessionConfig {
            area_min: Some(10.0),
            area_max: Some(5.0),
            ..Default::default()
        };
        assert!(matches!(create_session(&bad), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn sessions_are_independent() {
        let a = create_session(&SessionConfig::default()).unwrap();
        let b = create_session(&SessionConfig::default()).unwrap();
        a.register_widget(spec("x")).unwrap();
        b.register_widget(spec("x")).unwrap();
        a.record_interaction("x", WidgetValue::text("1"), 0).unwrap();
        assert_eq!(b.snapshot().global_count(), 0);
    }

    #[test]
    fn change_notifications_follow_mutations() {
        let s = session();
        let log = Rc::new(RefCell::new(Log::default()));
        let sub = s.subscribe_shared(log.clone());
        let other = Rc::new(RefCell::new(Log::default()));
        s.subscribe_shared(other.clone());
        for i in 0..3 {
            s.record_interaction("x", WidgetValue::text(i.to_string()), i).unwrap();
        }
        assert_eq!(log.borrow().counts, [1, 2, 3]);
        assert_eq!(other.borrow().counts, [1, 2, 3]);
        assert!(s.unsubscribe(sub));
        s.record_interaction("x", WidgetValue::text("z"), 9).unwrap();
        assert_eq!(log.borrow().counts.len(), 3);
        assert_eq!(other.borrow().counts.len(), 4);
    }

    #[test]
    fn navigation_is_a_signal_only() {
        let s = session();
        let log = Rc::new(RefCell::new(Log::default()));
        s.subscribe_shared(log.clone());
        s.request_navigate("x").unwrap();
        assert_eq!(log.borrow().calls, ["navigate:x"]);
        assert!(matches!(s.request_navigate("nope"), Err(Error::UnknownWidgetId(_))));
        assert_eq!(log.borrow().calls.len(), 1);
        assert_eq!(s.snapshot().global_count(), 0);
    }

    #[test]
    fn restore_callback_order() {
        let s = session();
        s.record_interaction("x", WidgetValue::text("a"), 0).unwrap();
        let log = Rc::new(RefCell::new(Log::default()));
        s.subscribe_shared(log.clone());
        let state = s.request_restore(0).unwrap();
        assert_eq!(state.get("x"), Some(&WidgetValue::text("a")));
        assert_eq!(log.borrow().calls, ["restore", "change"]);
        assert_eq!(s.snapshot().global_count(), 2);
        assert_eq!(s.snapshot().events()[1].wall_time, 1_000);

        assert!(matches!(s.request_restore(7), Err(Error::SeqOutOfRange { .. })));
        assert_eq!(log.borrow().calls.len(), 2);
        assert_eq!(s.snapshot().global_count(), 2);
    }

    #[test]
    fn reentrant_mutation_is_rejected() {
        let s = session();
        let handle = s.clone();
        let seen = Rc::new(RefCell::new(Vec::new()));
        let sink = seen.clone();
        s.subscribe(OnChange(move |_: &ProvenanceSnapshot| {
            let r = handle.record_interaction("x", WidgetValue::text("loop"), 0);
            sink.borrow_mut().push(r);
        }));
        s.record_interaction("x", WidgetValue::text("a"), 0).unwrap();
        assert_eq!(*seen.borrow(), [Err(Error::Reentrancy)]);
        assert_eq!(s.snapshot().global_count(), 1);
    }

    #[test]
    fn export_and_import() {
        let s = session();
        s.record_interaction("x", WidgetValue::text("a"), 5).unwrap();
        let doc = s.export(99);
        let back = Session::import(&SessionConfig::default(), &doc).unwrap();
        assert_eq!(back.snapshot(), s.snapshot());
        assert_eq!(back.color_of("x").as_deref(), Some("#1f77b4"));
    }
}
