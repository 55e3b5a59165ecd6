//! Deterministic SVG rendering of layout geometry. Every box or bar becomes
//! exactly one `<rect>`; nothing else in the output is a rect.

use std::fmt::Write;

use crate::layout::{AggregateBox, BarKind, TemporalLayout};

const LABEL_WIDTH: f64 = 96.0;
const MARGIN: f64 = 8.0;
const MIN_BAR_PX: f64 = 1.0;

pub enum Geometry<'a> {
    Aggregate(&'a [AggregateBox]),
    Temporal(&'a TemporalLayout),
}

impl Geometry<'_> {
    pub fn element_count(&self) -> usize {
        match self {
            Geometry::Aggregate(boxes) => boxes.len(),
            Geometry::Temporal(layout) => layout.bars.len(),
        }
    }
}

pub fn render_svg(geometry: &Geometry<'_>, width: f64, height: f64) -> String {
    match geometry {
        Geometry::Aggregate(boxes) => render_aggregate_svg(boxes, width, height),
        Geometry::Temporal(layout) => render_temporal_svg(layout, width, height),
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn open(out: &mut String, width: f64, height: f64) {
    let (w, h) = (num(width), num(height));
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
}

pub fn render_aggregate_svg(boxes: &[AggregateBox], width: f64, height: f64) -> String {
    let mut out = String::new();
    open(&mut out, width, height);
    for b in boxes {
        let fill = if b.filled { b.color.as_str() } else { "none" };
        let when = b
            .tooltip
            .last_wall_time
            .map_or_else(|| "never".to_string(), |t| t.to_string());
        let _ = writeln!(
            out,
            r#"  <rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="{}" stroke-width="2" data-widget="{}"><title>{}: {} interactions, last at {}</title></rect>"#,
            num(b.x),
            num(b.y),
            num(b.side),
            num(b.side),
            fill,
            b.color,
            escape(&b.widget_id),
            escape(&b.tooltip.widget_id),
            b.tooltip.count,
            when,
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_temporal_svg(layout: &TemporalLayout, width: f64, height: f64) -> String {
    let mut out = String::new();
    open(&mut out, width, height);
    let rows = layout.row_count() as f64;
    let row_h = ((height - 2.0 * MARGIN) / rows).max(1.0);
    let plot_w = (width - LABEL_WIDTH - 2.0 * MARGIN).max(1.0);
    let scale = if layout.extent > 0.0 {
        plot_w / layout.extent
    } else {
        0.0
    };
    let row_y = |row: usize| MARGIN + row as f64 * row_h;

    for (i, row) in layout.rows.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"  <text x="{}" y="{}" font-size="11" dominant-baseline="middle" fill="{}">{}</text>"#,
            num(MARGIN),
            num(row_y(i) + row_h / 2.0),
            row.color,
            escape(&row.widget_id),
        );
    }
    let _ = writeln!(
        out,
        r#"  <text x="{}" y="{}" font-size="11" dominant-baseline="middle" fill="{}">restores</text>"#,
        num(MARGIN),
        num(row_y(layout.restore_row) + row_h / 2.0),
        crate::layout::color::RESTORE_MARKER_COLOR,
    );
    for bar in &layout.bars {
        let x = LABEL_WIDTH + MARGIN + bar.start * scale;
        let w = (bar.width() * scale).max(MIN_BAR_PX);
        let label = match (&bar.kind, &bar.widget_id) {
            (BarKind::Interaction, Some(id)) => escape(id),
            _ => "restore".to_string(),
        };
        let _ = writeln!(
            out,
            r#"  <rect x="{}" y="{}" width="{}" height="{}" fill="{}" data-seq="{}"><title>#{} {}</title></rect>"#,
            num(x),
            num(row_y(bar.row) + 1.0),
            num(w),
            num((row_h - 2.0).max(1.0)),
            bar.color,
            bar.event_seq,
            bar.event_seq,
            label,
        );
    }
    out.push_str("</svg>\n");
    out
}
