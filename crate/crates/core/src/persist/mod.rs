//! Session files, streaming logs and SVG export.

pub mod document;
pub mod stream;
pub mod svg;

use crate::error::Result;
use crate::model::{InteractionEvent, WidgetDescriptor};

pub use document::{parse_document, parse_session, serialize_session, SessionDocument, FORMAT_VERSION};
pub use stream::{parse_stream, StreamHeader, StreamWriter};
pub use svg::{render_aggregate_svg, render_svg, render_temporal_svg, Geometry};

/// Reads either a session document or a streaming log.
pub fn load_log(bytes: &[u8]) -> Result<(Vec<WidgetDescriptor>, Vec<InteractionEvent>)> {
    if stream::looks_like_stream(bytes) {
        parse_stream(bytes)
    } else {
        parse_session(bytes)
    }
}
