//! Streaming log: NDJSON with one header line carrying the registry,
//! followed by one event object per line.
//!
//! A line whose seq equals the previous line's seq replaces that event.
//! This is how a coalesced interaction is written without rewriting the
//! file.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InteractionEvent, WidgetDescriptor};
use crate::persist::document::{check_version, from_value, parse_error, validate_log, FORMAT_VERSION};
use crate::provenance::ProvenanceSnapshot;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamHeader {
    pub format_version: String,
    pub widgets: Vec<WidgetDescriptor>,
}

/// Appends events to an NDJSON log as a session grows.
#[derive(Debug)]
pub struct StreamWriter<W: Write> {
    out: W,
    widget_count: usize,
    last_written: Option<InteractionEvent>,
}

impl<W: Write> StreamWriter<W> {
    /// Writes the header line. Widgets registered later are not part of the
    /// stream.
    pub fn new(mut out: W, widgets: &[WidgetDescriptor]) -> io::Result<Self> {
        let header = StreamHeader {
            format_version: FORMAT_VERSION.to_string(),
            widgets: widgets.to_vec(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(StreamWriter {
            out,
            widget_count: widgets.len(),
            last_written: None,
        })
    }

    pub fn append(&mut self, event: &InteractionEvent) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, event)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        self.last_written = Some(event.clone());
        Ok(())
    }

    /// Writes whatever `snapshot` holds beyond what was already written,
    /// including a replacement line if the last written event was coalesced.
    pub fn sync(&mut self, snapshot: &ProvenanceSnapshot) -> io::Result<()> {
        if snapshot.widgets().len() != self.widget_count {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                "widgets registered after the stream header was written",
            ));
        }
        let events = snapshot.events();
        let start = match &self.last_written {
            None => 0,
            Some(last) => {
                let idx = last.seq as usize;
                if events.get(idx) != Some(last) {
                    idx
                } else {
                    idx + 1
                }
            }
        };
        for ev in events.iter().skip(start) {
            self.append(ev)?;
        }
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

pub fn parse_stream(bytes: &[u8]) -> Result<(Vec<WidgetDescriptor>, Vec<InteractionEvent>)> {
    let mut header: Option<StreamHeader> = None;
    let mut events: Vec<InteractionEvent> = Vec::new();
    let mut offset = 0;
    for (lineno, line) in bytes.split(|&b| b == b'\n').enumerate() {
        let start = offset;
        offset += line.len() + 1;
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_slice(line).map_err(|e| parse_error(line, start, &e))?;
        let prefix = format!("line {}", lineno + 1);
        match header {
            None => {
                check_version(&value, &prefix)?;
                header = Some(from_value(value, &prefix)?);
            }
            Some(_) => {
                let ev: InteractionEvent = from_value(value, &prefix)?;
                match events.last_mut() {
                    Some(prev) if prev.seq == ev.seq => *prev = ev,
                    _ => events.push(ev),
                }
            }
        }
    }
    let header = header.ok_or_else(|| Error::Parse {
        offset: bytes.len(),
        message: "stream log has no header line".into(),
    })?;
    validate_log(&header.widgets, &events, "")?;
    Ok((header.widgets, events))
}

/// True when the first line of `bytes` is a complete stream header.
pub fn looks_like_stream(bytes: &[u8]) -> bool {
    let first = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    match serde_json::from_slice::<serde_json::Value>(first) {
        Ok(v) => v.get("widgets").is_some() && v.get("events").is_none(),
        Err(_) => false,
    }
}
