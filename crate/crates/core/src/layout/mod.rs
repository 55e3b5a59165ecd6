//! Renderer-agnostic geometry for the provenance views. Everything here is
//! a pure function of a snapshot and its parameters.

pub mod aggregate;
pub mod color;
pub mod scent;
pub mod temporal;

pub use aggregate::{compute_aggregate_layout, AggregateBox, AggregateParams, Tooltip};
pub use color::{assign_color, Palette, DEFAULT_PALETTE};
pub use scent::{compute_scent_bars, scent_guidance, Guidance, Orientation, ScentBar, ScentEncoding};
pub use temporal::{
    compute_temporal_layout, BarKind, TemporalBar, TemporalLayout, TemporalParams, TemporalRow,
    TimeAxis,
};
