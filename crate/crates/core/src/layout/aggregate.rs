//! Aggregate View geometry: one square per widget, area proportional to
//! interaction count, most recently used first.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::layout::color::Palette;
use crate::provenance::ProvenanceSnapshot;

pub const DEFAULT_AREA_MIN: f64 = 144.0;
pub const DEFAULT_AREA_MAX: f64 = 1600.0;
pub const DEFAULT_GUTTER: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateParams {
    pub viewport_width: f64,
    pub viewport_height: f64,
    pub area_min: f64,
    pub area_max: f64,
    /// Spacing between boxes and around the edge of the flow.
    pub gutter: f64,
}

impl AggregateParams {
    pub fn new(viewport_width: f64, viewport_height: f64) -> Self {
        AggregateParams {
            viewport_width,
            viewport_height,
            area_min: DEFAULT_AREA_MIN,
            area_max: DEFAULT_AREA_MAX,
            gutter: DEFAULT_GUTTER,
        }
    }

    pub fn with_area(mut self, area_min: f64, area_max: f64) -> Self {
        self.area_min = area_min;
        self.area_max = area_max;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tooltip {
    pub widget_id: String,
    pub count: u64,
    pub last_wall_time: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateBox {
    pub widget_id: String,
    pub order: usize,
    pub x: f64,
    pub y: f64,
    pub side: f64,
    pub area: f64,
    pub color: String,
    pub filled: bool,
    pub tooltip: Tooltip,
}

impl AggregateBox {
    pub fn overlaps(&self, other: &AggregateBox) -> bool {
        self.x < other.x + other.side
            && other.x < self.x + self.side
            && self.y < other.y + other.side
            && other.y < self.y + self.side
    }
}

/// Area for a widget with `count` interactions when the busiest widget has
/// `max_count`.
pub fn box_area(count: u64, max_count: u64, area_min: f64, area_max: f64) -> f64 {
    if max_count == 0 {
        return area_min;
    }
    area_min + (area_max - area_min) * count as f64 / max_count as f64
}

pub fn compute_aggregate_layout(
    snapshot: &ProvenanceSnapshot,
    params: &AggregateParams,
    palette: &Palette,
) -> Result<Vec<AggregateBox>> {
    let AggregateParams {
        viewport_width: width,
        viewport_height: height,
        area_min,
        area_max,
        gutter,
    } = *params;
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(Error::InvalidViewport { width, height });
    }
    if !(area_min > 0.0 && area_min < area_max && area_max.is_finite()) {
        return Err(Error::InvalidAreaBounds {
            min: area_min,
            max: area_max,
        });
    }
    let gutter = gutter.max(0.0);

    let mut used = Vec::new();
    let mut unused = Vec::new();
    for entry in snapshot.per_widget() {
        match entry.1.last_seq {
            Some(_) => used.push(entry),
            None => unused.push(entry),
        }
    }
    used.sort_by_key(|u| std::cmp::Reverse(u.1.last_seq));
    let max_count = used.iter().map(|(_, s)| s.count).max().unwrap_or(0);

    let mut boxes = Vec::with_capacity(used.len() + unused.len());
    let (mut x, mut y, mut row_height) = (gutter, gutter, 0.0f64);
    for (order, (desc, stats)) in used.into_iter().chain(unused).enumerate() {
        let area = box_area(stats.count, max_count, area_min, area_max);
        let side = area.sqrt();
        if x > gutter && x + side + gutter > width {
            x = gutter;
            y += row_height + gutter;
            row_height = 0.0;
        }
        boxes.push(AggregateBox {
            widget_id: desc.id.clone(),
            order,
            x,
            y,
            side,
            area,
            color: palette.color(desc.registration_index).to_string(),
            filled: stats.count > 0,
            tooltip: Tooltip {
                widget_id: desc.id.clone(),
                count: stats.count,
                last_wall_time: stats.last_wall_time,
            },
        });
        x += side + gutter;
        row_height = row_height.max(side);
    }
    Ok(boxes)
}
