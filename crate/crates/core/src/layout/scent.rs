//! In-situ scent bars: small bars along a control's value domain whose
//! length encodes how often each part of the domain was used.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::color::interpolate;
use crate::provenance::{ProvenanceRecord, ProvenanceSnapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Bars grow along x and stack along y.
    Horizontal,
    /// Bars grow along y and stack along x.
    Vertical,
}

/// Aggregate value per key; keys absent from the map count as 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Guidance {
    pub values: IndexMap<String, f64>,
}

impl Guidance {
    pub fn value(&self, key: &str) -> f64 {
        self.values.get(key).copied().unwrap_or(0.0)
    }

    pub fn keys(&self) -> Vec<String> {
        self.values.keys().cloned().collect()
    }

    pub fn max_value(&self) -> f64 {
        self.values.values().copied().fold(0.0, f64::max)
    }
}

pub type ColorMap = Arc<dyn Fn(f64) -> String + Send + Sync>;

/// Light-gray to `color` ramp.
pub fn ramp_to(color: &str) -> ColorMap {
    let color = color.to_string();
    Arc::new(move |t| interpolate("#f0f0f0", &color, t))
}

#[derive(Clone)]
pub struct ScentEncoding {
    pub guidance: Guidance,
    pub orientation: Orientation,
    pub position_domain: Vec<String>,
    pub color_domain: (f64, f64),
    /// Maps a value normalized against `color_domain` to a hex color.
    pub color_map: ColorMap,
    /// Drawing order of the bars; empty means `position_domain` order.
    pub bar_keys: Vec<String>,
    pub width: f64,
    pub height: f64,
}

impl fmt::Debug for ScentEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScentEncoding")
            .field("guidance", &self.guidance)
            .field("orientation", &self.orientation)
            .field("position_domain", &self.position_domain)
            .field("color_domain", &self.color_domain)
            .field("bar_keys", &self.bar_keys)
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl ScentEncoding {
    /// Encoding over the guidance's own keys with color domain `[0, max]`.
    pub fn new(guidance: Guidance, orientation: Orientation, width: f64, height: f64) -> Self {
        let position_domain = guidance.keys();
        let max = guidance.max_value();
        ScentEncoding {
            guidance,
            orientation,
            position_domain,
            color_domain: (0.0, max),
            color_map: ramp_to("#1f77b4"),
            bar_keys: Vec::new(),
            width,
            height,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidEncoding(m));
        if !(self.width > 0.0 && self.height > 0.0) {
            return bad(format!("dimensions must be positive ({} x {})", self.width, self.height));
        }
        for (i, key) in self.position_domain.iter().enumerate() {
            if self.position_domain[..i].contains(key) {
                return bad(format!("position domain repeats {key:?}"));
            }
        }
        let (lo, hi) = self.color_domain;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad(format!("color domain [{lo}, {hi}] is not an interval"));
        }
        if let Some((k, v)) = self
            .guidance
            .values
            .iter()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return bad(format!("value {v} for {k:?} must be finite and non-negative"));
        }
        for key in &self.bar_keys {
            if !self.position_domain.contains(key) {
                return Err(Error::UnknownKey(key.clone()));
            }
        }
        Ok(())
    }

    fn normalize_color(&self, v: f64) -> f64 {
        let (lo, hi) = self.color_domain;
        if hi > lo {
            ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
        } else if v >= lo {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScentBar {
    pub key: String,
    pub value: f64,
    /// Position along the secondary dimension.
    pub offset: f64,
    /// Extent along the secondary dimension.
    pub thickness: f64,
    /// Extent along the primary axis.
    pub length: f64,
    pub color: String,
}

pub fn compute_scent_bars(encoding: &ScentEncoding) -> Result<Vec<ScentBar>> {
    encoding.validate()?;
    let keys: &[String] = if encoding.bar_keys.is_empty() {
        &encoding.position_domain
    } else {
        &encoding.bar_keys
    };
    let (axis_extent, secondary_extent) = match encoding.orientation {
        Orientation::Horizontal => (encoding.width, encoding.height),
        Orientation::Vertical => (encoding.height, encoding.width),
    };
    let max_value = encoding
        .position_domain
        .iter()
        .map(|k| encoding.guidance.value(k))
        .fold(0.0, f64::max);
    let thickness = if keys.is_empty() {
        0.0
    } else {
        secondary_extent / keys.len() as f64
    };
    Ok(keys
        .iter()
        .enumerate()
        .map(|(i, key)| {
            let value = encoding.guidance.value(key);
            let length = if max_value > 0.0 {
                axis_extent * value / max_value
            } else {
                0.0
            };
            ScentBar {
                key: key.clone(),
                value,
                offset: i as f64 * thickness,
                thickness,
                length,
                color: (encoding.color_map)(encoding.normalize_color(value)),
            }
        })
        .collect())
}

/// Distribution of a widget's interactions over its value domain.
///
/// Selection widgets yield one key per option (times selected); sliders
/// yield `bins` equal-width bins (events landing in, or ranges touching,
/// each bin); text inputs yield one key per distinct value.
pub fn scent_guidance(
    snapshot: &ProvenanceSnapshot,
    widget_id: &str,
    bins: usize,
) -> Result<Guidance> {
    let stats = snapshot.widget_stats(widget_id)?;
    let bins = bins.max(1);
    let mut values = IndexMap::new();
    match &stats.record {
        ProvenanceRecord::Selection(rec) => {
            for item in &rec.items {
                values.insert(item.item.clone(), item.selection_count as f64);
            }
        }
        ProvenanceRecord::Numeric(rec) => {
            let (min, max) = numeric_bounds(snapshot, widget_id);
            let mut counts = vec![0.0; bins];
            for ev in &rec.events {
                counts[bin_of(ev.value, min, max, bins)] += 1.0;
            }
            values.extend(counts.into_iter().enumerate().map(|(i, c)| (i.to_string(), c)));
        }
        ProvenanceRecord::Ranged(rec) => {
            let (min, max) = (rec.domain_min, rec.domain_max);
            let mut counts = vec![0.0; bins];
            for ev in &rec.events {
                let (low, high) = ev.value;
                for c in &mut counts[bin_of(low, min, max, bins)..=bin_of(high, min, max, bins)] {
                    *c += 1.0;
                }
            }
            values.extend(counts.into_iter().enumerate().map(|(i, c)| (i.to_string(), c)));
        }
        ProvenanceRecord::Text(rec) => {
            for ev in &rec.events {
                *values.entry(ev.value.clone()).or_insert(0.0) += 1.0;
            }
        }
    }
    Ok(Guidance { values })
}

fn numeric_bounds(snapshot: &ProvenanceSnapshot, widget_id: &str) -> (f64, f64) {
    snapshot
        .widget(widget_id)
        .and_then(|w| w.domain.numeric_bounds())
        .unwrap_or((0.0, 1.0))
}

fn bin_of(v: f64, min: f64, max: f64, bins: usize) -> usize {
    if max <= min {
        return 0;
    }
    let pos = ((v - min) / (max - min) * bins as f64).floor();
    (pos.max(0.0) as usize).min(bins - 1)
}
