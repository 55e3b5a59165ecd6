//! Cross-control analytic provenance.
//!
//! The engine records every committed change a user makes across a set of
//! UI controls into one append-only log, keeps typed per-widget provenance
//! plus session-wide statistics, and derives everything else from immutable
//! snapshots of that log:
//!
//! - [`layout`]: geometry for the Aggregate View, the Temporal (Gantt) View
//!   and in-situ scent bars,
//! - [`recovery`]: widget values at any past seq and restoring the UI,
//! - [`analysis`]: untouched controls, usage ranking, co-interaction and
//!   audit reports,
//! - [`persist`]: session documents, streaming logs and SVG export,
//! - [`embed`] and [`bridge`]: the host-facing session API.
//!
//! ```
//! use spw_core::embed::{create_session, SessionConfig};
//! use spw_core::model::{ValueDomain, WidgetKind, WidgetSpec, WidgetValue};
//!
//! let session = create_session(&SessionConfig::default()).unwrap();
//! session
//!     .register_widget(WidgetSpec::new(
//!         "year",
//!         WidgetKind::SingleSlider,
//!         ValueDomain::Numeric { min: 1990.0, max: 2030.0 },
//!         WidgetValue::Numeric(2000.0),
//!     ))
//!     .unwrap();
//! let seq = session.record_interaction("year", WidgetValue::Numeric(2012.0), 1_000).unwrap();
//! assert_eq!(seq, 0);
//! assert_eq!(session.snapshot().widget_stats("year").unwrap().count, 1);
//! ```

pub mod analysis;
pub mod bridge;
pub mod embed;
pub mod error;
pub mod layout;
pub mod model;
pub mod persist;
pub mod provenance;
pub mod recovery;

pub use error::{Error, Result};
pub use model::{
    EventAction, EventKind, InteractionEvent, Seq, ValueDomain, WidgetDescriptor, WidgetKind,
    WidgetSpec, WidgetValue,
};
pub use provenance::{ProvenanceRecord, ProvenanceSnapshot, Tracker, WidgetStats};
pub use recovery::StateMap;
