//! Text-payload boundary for hosts that cannot link Rust types directly
//! (browser embedding). Every call takes and returns JSON text; results are
//! wrapped as `{"ok": ...}` or `{"error": {"kind": ..., "message": ...}}`.
//! Function names match the engine operations they forward to.

use std::collections::HashMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis;
use crate::embed::{ProvenanceObserver, Session, SessionConfig, SubscriptionId};
use crate::error::Error;
use crate::layout::{TemporalParams, TimeAxis};
use crate::model::{Seq, ValueDomain, WidgetKind, WidgetSpec, WidgetValue};
use crate::persist::serialize_session as render_document;
use crate::provenance::ProvenanceSnapshot;
use crate::recovery::{self, StateMap};

/// Receives `(notification, payload_json)` pairs, where notification is one
/// of `on_change`, `on_navigate` or `on_restore`.
pub type Callback = Box<dyn FnMut(&str, &str)>;

struct CallbackObserver(Callback);

impl ProvenanceObserver for CallbackObserver {
    fn on_change(&mut self, snapshot: &ProvenanceSnapshot) {
        let payload = serde_json::to_string(snapshot).expect("snapshots serialize");
        (self.0)("on_change", &payload)
    }
    fn on_navigate(&mut self, widget_id: &str) {
        (self.0)("on_navigate", &json!({ "widget_id": widget_id }).to_string())
    }
    fn on_restore(&mut self, state: &StateMap) {
        let payload = serde_json::to_string(state).expect("state maps serialize");
        (self.0)("on_restore", &payload)
    }
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecPayload {
    id: String,
    kind: WidgetKind,
    #[serde(default)]
    label: Option<String>,
    domain: ValueDomain,
    initial_value: WidgetValue,
}

/// Session handle table.
#[derive(Default)]
pub struct Bridge {
    sessions: HashMap<u32, Session>,
    next_handle: u32,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DuplicateWidgetId(_) => "DuplicateWidgetId",
        Error::InvalidDescriptor { .. } => "InvalidDescriptor",
        Error::InvalidInitialValue { .. } => "InvalidInitialValue",
        Error::UnknownWidgetId(_) => "UnknownWidgetId",
        Error::InvalidValue { .. } => "InvalidValue",
        Error::SeqOutOfRange { .. } => "SeqOutOfRange",
        Error::MalformedLog { .. } => "MalformedLog",
        Error::InvalidViewport { .. } => "InvalidViewport",
        Error::InvalidAreaBounds { .. } => "InvalidAreaBounds",
        Error::UnknownKey(_) => "UnknownKey",
        Error::InvalidEncoding(_) => "InvalidEncoding",
        Error::InvalidWindow(_) => "InvalidWindow",
        Error::Parse { .. } => "ParseError",
        Error::Schema { .. } => "SchemaError",
        Error::InvalidConfig(_) => "InvalidConfig",
        Error::Reentrancy => "ReentrancyError",
    }
}

fn fail(kind: &str, message: impl std::fmt::Display) -> String {
    json!({ "error": { "kind": kind, "message": message.to_string() } }).to_string()
}

fn respond<T: Serialize>(result: Result<T, Error>) -> String {
    match result {
        Ok(v) => json!({ "ok": v }).to_string(),
        Err(e) => fail(error_kind(&e), &e),
    }
}

fn payload<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Error> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        offset: e.column().saturating_sub(1),
        message: e.to_string(),
    })?;
    serde_path_to_error::deserialize(value).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

impl Bridge {
    pub fn new() -> Self {
        Bridge::default()
    }

    fn with<T: Serialize>(&self, handle: u32, f: impl FnOnce(&Session) -> Result<T, Error>) -> String {
        match self.sessions.get(&handle) {
            Some(s) => respond(f(s)),
            None => fail("UnknownSession", format!("no session with handle {handle}")),
        }
    }

    fn insert(&mut self, session: Session) -> u32 {
        let handle = self.next_handle;
        self.next_handle += 1;
        self.sessions.insert(handle, session);
        handle
    }

    /// `config_json` is a SessionConfig object (`{}` for defaults).
    pub fn create_session(&mut self, config_json: &str) -> String {
        let session = payload::<SessionConfig>(config_json).and_then(|c| Session::new(&c));
        respond(session.map(|s| self.insert(s)))
    }

    /// Rebuilds a session from a session document; returns its handle.
    pub fn import_session(&mut self, config_json: &str, document: &str) -> String {
        let session = payload::<SessionConfig>(config_json)
            .and_then(|c| Session::import(&c, document.as_bytes()));
        respond(session.map(|s| self.insert(s)))
    }

    pub fn close_session(&mut self, handle: u32) -> String {
        respond(Ok::<bool, Error>(self.sessions.remove(&handle).is_some()))
    }

    pub fn register_widget(&self, handle: u32, spec_json: &str) -> String {
        self.with(handle, |s| {
            let p: SpecPayload = payload(spec_json)?;
            let mut spec = WidgetSpec::new(p.id, p.kind, p.domain, p.initial_value);
            if let Some(label) = p.label {
                spec = spec.with_label(label);
            }
            s.register_widget(spec)
        })
    }

    pub fn record_interaction(&self, handle: u32, widget_id: &str, value_json: &str, wall_time: i64) -> String {
        self.with(handle, |s| {
            let value: WidgetValue = payload(value_json)?;
            s.record_interaction(widget_id, value, wall_time)
        })
    }

    pub fn snapshot(&self, handle: u32) -> String {
        self.with(handle, |s| Ok(s.snapshot()))
    }

    pub fn widget_stats(&self, handle: u32, widget_id: &str) -> String {
        self.with(handle, |s| s.snapshot().widget_stats(widget_id).cloned())
    }

    pub fn subscribe(&self, handle: u32, callback: Callback) -> String {
        self.with(handle, |s| Ok(s.subscribe(CallbackObserver(callback))))
    }

    pub fn unsubscribe(&self, handle: u32, subscription: u64) -> String {
        self.with(handle, |s| Ok(s.unsubscribe(SubscriptionId(subscription))))
    }

    pub fn request_navigate(&self, handle: u32, widget_id: &str) -> String {
        self.with(handle, |s| s.request_navigate(widget_id))
    }

    pub fn request_restore(&self, handle: u32, seq: Seq) -> String {
        self.with(handle, |s| s.request_restore(seq))
    }

    pub fn value_at(&self, handle: u32, widget_id: &str, seq: Seq) -> String {
        self.with(handle, |s| recovery::value_at(&s.snapshot(), widget_id, seq))
    }

    pub fn assign_color(&self, handle: u32, registration_index: usize) -> String {
        self.with(handle, |s| Ok(s.palette().color(registration_index).to_string()))
    }

    pub fn compute_aggregate_layout(&self, handle: u32, width: f64, height: f64) -> String {
        self.with(handle, |s| s.aggregate_layout(width, height))
    }

    /// `mode` is `"sequence"` or `"wall_clock"`.
    pub fn compute_temporal_layout(&self, handle: u32, mode: &str) -> String {
        self.with(handle, |s| {
            let axis: TimeAxis = payload(&json!(mode).to_string())?;
            Ok(s.temporal_layout(&TemporalParams::new(axis)))
        })
    }

    pub fn untouched_widgets(&self, handle: u32) -> String {
        self.with(handle, |s| Ok(analysis::untouched_widgets(&s.snapshot())))
    }

    pub fn usage_ranking(&self, handle: u32) -> String {
        self.with(handle, |s| Ok(analysis::usage_ranking(&s.snapshot())))
    }

    pub fn co_interaction(&self, handle: u32, window: usize) -> String {
        self.with(handle, |s| {
            let m = analysis::co_interaction(&s.snapshot(), window)?;
            Ok(m.pairs()
                .into_iter()
                .map(|(a, b, count)| json!({ "a": a, "b": b, "count": count }))
                .collect::<Vec<_>>())
        })
    }

    pub fn audit_report(&self, handle: u32) -> String {
        self.with(handle, |s| Ok(analysis::audit_report(&s.snapshot())))
    }

    /// The session document as a JSON value.
    pub fn serialize_session(&self, handle: u32, exported_at: i64) -> String {
        self.with(handle, |s| {
            let bytes = render_document(&s.snapshot(), exported_at);
            Ok(serde_json::from_slice::<Value>(&bytes).expect("documents are valid JSON"))
        })
    }
}
