//! Deterministic categorical colors for registered widgets.

use crate::error::{Error, Result};

/// Ten-hue categorical scheme used when the host supplies no palette.
pub const DEFAULT_PALETTE: [&str; 10] = [
    "#1f77b4", // blue
    "#ff7f0e", // orange
    "#2ca02c", // green
    "#d62728", // red
    "#9467bd", // purple
    "#8c564b", // brown
    "#e377c2", // pink
    "#7f7f7f", // gray
    "#bcbd22", // olive
    "#17becf", // cyan
];

/// Neutral color for restore markers in the temporal view.
pub const RESTORE_MARKER_COLOR: &str = "#333333";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    colors: Vec<String>,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            colors: DEFAULT_PALETTE.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl Palette {
    /// Accepts a non-empty list of unique `#rrggbb` colors.
    pub fn new(colors: Vec<String>) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::InvalidConfig("palette must not be empty".into()));
        }
        for (i, c) in colors.iter().enumerate() {
            if parse_hex(c).is_none() {
                return Err(Error::InvalidConfig(format!("{c:?} is not a #rrggbb color")));
            }
            if colors[..i].iter().any(|p| p.eq_ignore_ascii_case(c)) {
                return Err(Error::InvalidConfig(format!("palette repeats {c}")));
            }
        }
        Ok(Palette { colors })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn color(&self, registration_index: usize) -> &str {
        &self.colors[registration_index % self.colors.len()]
    }
}

/// Color of the widget registered at `registration_index`, using the
/// default palette.
pub fn assign_color(registration_index: usize) -> &'static str {
    DEFAULT_PALETTE[registration_index % DEFAULT_PALETTE.len()]
}

pub(crate) fn parse_hex(color: &str) -> Option<[u8; 3]> {
    let hex = color.strip_prefix('#')?;
    if hex.len() != 6 || !hex.is_ascii() {
        return None;
    }
    let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
    Some([channel(0)?, channel(2)?, channel(4)?])
}

/// Linear interpolation between two hex colors; `t` is clamped to [0, 1].
pub fn interpolate(from: &str, to: &str, t: f64) -> String {
    let a = parse_hex(from).unwrap_or([255, 255, 255]);
    let b = parse_hex(to).unwrap_or([0, 0, 0]);
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let mix = |i: usize| (a[i] as f64 + (b[i] as f64 - a[i] as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}
