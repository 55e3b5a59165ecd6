//! The session document: one UTF-8 JSON object holding the registry and
//! the full event log.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InteractionEvent, WidgetDescriptor};
use crate::provenance::{ProvenanceSnapshot, Tracker, DEFAULT_PALETTE_SIZE};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionDocument {
    pub format_version: String,
    pub exported_at: i64,
    pub widgets: Vec<WidgetDescriptor>,
    pub events: Vec<InteractionEvent>,
}

impl SessionDocument {
    pub fn from_snapshot(snapshot: &ProvenanceSnapshot, exported_at: i64) -> Self {
        SessionDocument {
            format_version: FORMAT_VERSION.to_string(),
            exported_at,
            widgets: snapshot.widgets().to_vec(),
            events: snapshot.events().to_vec(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("documents always serialize");
        out.push(b'\n');
        out
    }
}

/// Canonical document bytes for `snapshot`.
pub fn serialize_session(snapshot: &ProvenanceSnapshot, exported_at: i64) -> Vec<u8> {
    SessionDocument::from_snapshot(snapshot, exported_at).to_bytes()
}

/// Parses and fully validates a session document.
pub fn parse_document(bytes: &[u8]) -> Result<SessionDocument> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| parse_error(bytes, 0, &e))?;
    check_version(&value, "")?;
    let doc: SessionDocument = from_value(value, "")?;
    validate_log(&doc.widgets, &doc.events, "")?;
    Ok(doc)
}

/// Registry and log from a document, ready for replay.
pub fn parse_session(bytes: &[u8]) -> Result<(Vec<WidgetDescriptor>, Vec<InteractionEvent>)> {
    let doc = parse_document(bytes)?;
    Ok((doc.widgets, doc.events))
}

pub(crate) fn parse_error(bytes: &[u8], base: usize, err: &serde_json::Error) -> Error {
    Error::Parse {
        offset: base + byte_offset(bytes, err.line(), err.column()),
        message: err.to_string(),
    }
}

/// serde_json reports 1-based line and column; turn that into a byte index.
fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let line_start = if line <= 1 {
        0
    } else {
        bytes
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == b'\n')
            .nth(line - 2)
            .map_or(bytes.len(), |(i, _)| i + 1)
    };
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

pub(crate) fn check_version(value: &serde_json::Value, prefix: &str) -> Result<()> {
    match value.get("format_version") {
        Some(serde_json::Value::String(v)) if v == FORMAT_VERSION => Ok(()),
        Some(other) => Err(Error::Schema {
            path: join(prefix, "format_version"),
            message: format!("unsupported format version {other}"),
        }),
        None => Err(Error::Schema {
            path: join(prefix, "format_version"),
            message: "missing format_version".into(),
        }),
    }
}

pub(crate) fn from_value<T: serde::de::DeserializeOwned>(
    value: serde_json::Value,
    prefix: &str,
) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| Error::Schema {
        path: join(prefix, &e.path().to_string()),
        message: e.inner().to_string(),
    })
}

fn join(prefix: &str, path: &str) -> String {
    match (prefix.is_empty(), path) {
        (true, _) => path.to_string(),
        (false, "" | ".") => prefix.to_string(),
        (false, p) => format!("{prefix}.{p}"),
    }
}

/// Checks descriptors and events against every log invariant, reporting the
/// first violation with its location.
pub(crate) fn validate_log(
    widgets: &[WidgetDescriptor],
    events: &[InteractionEvent],
    prefix: &str,
) -> Result<()> {
    let mut tracker = Tracker::new(DEFAULT_PALETTE_SIZE);
    for (i, w) in widgets.iter().enumerate() {
        tracker.admit_descriptor(w).map_err(|e| Error::Schema {
            path: join(prefix, &format!("widgets[{i}]")),
            message: e.to_string(),
        })?;
    }
    for (i, ev) in events.iter().enumerate() {
        tracker.ingest(ev).map_err(|e| Error::Schema {
            path: join(prefix, &format!("events[{i}]")),
            message: e.to_string(),
        })?;
    }
    Ok(())
}
