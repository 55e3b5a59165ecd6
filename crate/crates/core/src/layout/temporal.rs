//! Temporal View geometry: one Gantt row per widget, one bar per event.
//!
//! Each bar spans from its event to the next event in the global log, so
//! the bars of the whole chart partition the session timeline. Restore
//! meta-events get a marker bar in an extra row below the widget rows.

use serde::{Deserialize, Serialize};

use crate::layout::color::{Palette, RESTORE_MARKER_COLOR};
use crate::model::{EventAction, Seq};
use crate::provenance::ProvenanceSnapshot;

/// Width given to the final event in wall-clock mode.
pub const DEFAULT_MIN_WALL_WIDTH_MS: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeAxis {
    /// x is the global sequence index.
    Sequence,
    /// x is milliseconds since the first event.
    WallClock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BarKind {
    Interaction,
    RestoreMarker,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalBar {
    /// `None` for restore markers.
    pub widget_id: Option<String>,
    pub row: usize,
    pub start: f64,
    pub end: f64,
    pub color: String,
    pub event_seq: Seq,
    pub kind: BarKind,
}

impl TemporalBar {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalRow {
    pub widget_id: String,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalLayout {
    pub axis: TimeAxis,
    /// Widget rows in registration order.
    pub rows: Vec<TemporalRow>,
    /// Index of the restore-marker row (always `rows.len()`).
    pub restore_row: usize,
    pub bars: Vec<TemporalBar>,
    /// Right edge of the last bar, 0 for an empty log.
    pub extent: f64,
}

impl TemporalLayout {
    pub fn row_count(&self) -> usize {
        self.rows.len() + 1
    }

    pub fn bars_in_row(&self, row: usize) -> impl Iterator<Item = &TemporalBar> {
        self.bars.iter().filter(move |b| b.row == row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalParams {
    pub axis: TimeAxis,
    pub min_wall_width_ms: f64,
}

impl TemporalParams {
    pub fn new(axis: TimeAxis) -> Self {
        TemporalParams {
            axis,
            min_wall_width_ms: DEFAULT_MIN_WALL_WIDTH_MS,
        }
    }
}

pub fn compute_temporal_layout(
    snapshot: &ProvenanceSnapshot,
    params: &TemporalParams,
    palette: &Palette,
) -> TemporalLayout {
    let rows: Vec<TemporalRow> = snapshot
        .widgets()
        .iter()
        .map(|w| TemporalRow {
            widget_id: w.id.clone(),
            color: palette.color(w.registration_index).to_string(),
        })
        .collect();
    let restore_row = rows.len();
    let events = snapshot.events();
    let origin = events.first().map_or(0, |e| e.wall_time);

    let span = |i: usize| -> (f64, f64) {
        match params.axis {
            TimeAxis::Sequence => (i as f64, (i + 1) as f64),
            TimeAxis::WallClock => {
                let start = (events[i].wall_time - origin) as f64;
                let end = match events.get(i + 1) {
                    Some(next) => (next.wall_time - origin) as f64,
                    None => start + params.min_wall_width_ms.max(f64::MIN_POSITIVE),
                };
                (start, end)
            }
        }
    };

    let mut bars = Vec::with_capacity(events.len());
    for (i, ev) in events.iter().enumerate() {
        let (start, end) = span(i);
        let bar = match &ev.action {
            EventAction::Interaction { widget_id, .. } => {
                let desc = snapshot
                    .widget(widget_id)
                    .expect("snapshot events reference registered widgets");
                TemporalBar {
                    widget_id: Some(widget_id.clone()),
                    row: desc.registration_index,
                    start,
                    end,
                    color: rows[desc.registration_index].color.clone(),
                    event_seq: ev.seq,
                    kind: BarKind::Interaction,
                }
            }
            EventAction::Restore { .. } => TemporalBar {
                widget_id: None,
                row: restore_row,
                start,
                end,
                color: RESTORE_MARKER_COLOR.to_string(),
                event_seq: ev.seq,
                kind: BarKind::RestoreMarker,
            },
        };
        bars.push(bar);
    }
    let extent = bars.last().map_or(0.0, |b| b.end);
    TemporalLayout {
        axis: params.axis,
        rows,
        restore_row,
        bars,
        extent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ValueDomain, WidgetKind, WidgetSpec, WidgetValue};
    use crate::provenance::Tracker;

    fn tracker() -> Tracker {
        let mut t = Tracker::default();
        for id in ["A", "B"] {
            t.register_widget(WidgetSpec::new(
                id,
                WidgetKind::TextInput,
                ValueDomain::None,
                WidgetValue::text(""),
            ))
            .unwrap();
        }
        t
    }

    fn spans(layout: &TemporalLayout, row: usize) -> Vec<(f64, f64)> {
        layout.bars_in_row(row).map(|b| (b.start, b.end)).collect()
    }

    #[test]
    fn empty_log_has_rows_but_no_bars() {
        let layout = compute_temporal_layout(
            &tracker().snapshot(),
            &TemporalParams::new(TimeAxis::Sequence),
            &Palette::default(),
        );
        assert_eq!(layout.rows.len(), 2);
        assert_eq!(layout.restore_row, 2);
        assert!(layout.bars.is_empty());
        assert_eq!(layout.extent, 0.0);
    }

    #[test]
    fn single_event_spans_one_unit() {
        let mut t = tracker();
        t.record_interaction("A", WidgetValue::text("x"), 0).unwrap();
        let layout = compute_temporal_layout(
            &t.snapshot(),
            &TemporalParams::new(TimeAxis::Sequence),
            &Palette::default(),
        );
        assert_eq!(spans(&layout, 0), [(0.0, 1.0)]);
    }

    #[test]
    fn sequence_mode_spans() {
        let mut t = tracker();
        for id in ["A", "B", "A"] {
            t.record_interaction(id, WidgetValue::text("x"), 0).unwrap();
        }
        t.append_restore(0, 0).unwrap();
        let layout = compute_temporal_layout(
            &t.snapshot(),
            &TemporalParams::new(TimeAxis::Sequence),
            &Palette::default(),
        );
        assert_eq!(spans(&layout, 0), [(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(spans(&layout, 1), [(1.0, 2.0)]);
        assert_eq!(spans(&layout, 2), [(3.0, 4.0)]);
        assert_eq!(layout.bars[3].kind, BarKind::RestoreMarker);
        assert_eq!(layout.bars[1].color, "#ff7f0e");
        assert_eq!(layout.extent, 4.0);
    }

    #[test]
    fn wall_clock_mode_dwells_until_next_event() {
        let mut t = tracker();
        t.record_interaction("A", WidgetValue::text("x"), 1_000).unwrap();
        t.record_interaction("B", WidgetValue::text("y"), 1_500).unwrap();
        t.record_interaction("A", WidgetValue::text("z"), 4_000).unwrap();
        let mut params = TemporalParams::new(TimeAxis::WallClock);
        params.min_wall_width_ms = 250.0;
        let layout = compute_temporal_layout(&t.snapshot(), &params, &Palette::default());
        assert_eq!(spans(&layout, 0), [(0.0, 500.0), (3_000.0, 3_250.0)]);
        assert_eq!(spans(&layout, 1), [(500.0, 3_000.0)]);
    }
}
