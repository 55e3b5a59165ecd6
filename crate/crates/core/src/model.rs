//! Value types shared by every part of the engine: widget kinds, value
//! domains, widget values, descriptors and log events.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Global position of an event in a session log.
pub type Seq = u64;

/// The seven supported UI controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WidgetKind {
    RadioGroup,
    CheckboxGroup,
    SingleSlider,
    RangeSlider,
    SingleSelect,
    MultiSelect,
    TextInput,
}

impl WidgetKind {
    pub const ALL: [WidgetKind; 7] = [
        WidgetKind::RadioGroup,
        WidgetKind::CheckboxGroup,
        WidgetKind::SingleSlider,
        WidgetKind::RangeSlider,
        WidgetKind::SingleSelect,
        WidgetKind::MultiSelect,
        WidgetKind::TextInput,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WidgetKind::RadioGroup => "radio-group",
            WidgetKind::CheckboxGroup => "checkbox-group",
            WidgetKind::SingleSlider => "single-slider",
            WidgetKind::RangeSlider => "range-slider",
            WidgetKind::SingleSelect => "single-select",
            WidgetKind::MultiSelect => "multi-select",
            WidgetKind::TextInput => "text-input",
        }
    }

    /// Selection kinds that hold exactly one option at a time.
    pub fn is_single_choice(self) -> bool {
        matches!(self, WidgetKind::RadioGroup | WidgetKind::SingleSelect)
    }

    pub fn is_selection(self) -> bool {
        matches!(
            self,
            WidgetKind::RadioGroup
                | WidgetKind::CheckboxGroup
                | WidgetKind::SingleSelect
                | WidgetKind::MultiSelect
        )
    }
}

impl fmt::Display for WidgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The set of values a widget may take.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueDomain {
    /// Closed numeric interval, used by both slider kinds.
    Numeric { min: f64, max: f64 },
    /// Ordered option ids, used by the four selection kinds.
    Options(Vec<String>),
    /// Free text.
    None,
}

impl ValueDomain {
    pub fn numeric_bounds(&self) -> Option<(f64, f64)> {
        match *self {
            ValueDomain::Numeric { min, max } => Some((min, max)),
            _ => None,
        }
    }

    pub fn options(&self) -> Option<&[String]> {
        match self {
            ValueDomain::Options(opts) => Some(opts),
            _ => None,
        }
    }
}

/// A committed widget value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidgetValue {
    Numeric(f64),
    Range { low: f64, high: f64 },
    Selection(BTreeSet<String>),
    Text(String),
}

impl WidgetValue {
    pub fn selection<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        WidgetValue::Selection(items.into_iter().map(Into::into).collect())
    }

    pub fn text(s: impl Into<String>) -> Self {
        WidgetValue::Text(s.into())
    }
}

impl fmt::Display for WidgetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WidgetValue::Numeric(v) => write!(f, "{v}"),
            WidgetValue::Range { low, high } => write!(f, "[{low}, {high}]"),
            WidgetValue::Selection(items) => {
                f.write_str("{")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(item)?;
                }
                f.write_str("}")
            }
            WidgetValue::Text(s) => write!(f, "{s:?}"),
        }
    }
}

/// What the host supplies when registering a control. The engine assigns
/// the indices.
#[derive(Debug, Clone, PartialEq)]
pub struct WidgetSpec {
    pub id: String,
    pub kind: WidgetKind,
    pub label: String,
    pub domain: ValueDomain,
    pub initial_value: WidgetValue,
}

impl WidgetSpec {
    pub fn new(
        id: impl Into<String>,
        kind: WidgetKind,
        domain: ValueDomain,
        initial_value: WidgetValue,
    ) -> Self {
        let id = id.into();
        WidgetSpec {
            label: id.clone(),
            id,
            kind,
            domain,
            initial_value,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidgetDescriptor {
    pub id: String,
    pub kind: WidgetKind,
    pub label: String,
    pub domain: ValueDomain,
    pub initial_value: WidgetValue,
    pub registration_index: usize,
    pub color_index: usize,
}

impl WidgetDescriptor {
    pub fn validate_value(&self, value: &WidgetValue) -> Result<(), String> {
        validate_value(self.kind, &self.domain, value)
    }
}

/// Checks that the domain shape fits the kind.
pub(crate) fn validate_domain(kind: WidgetKind, domain: &ValueDomain) -> Result<(), String> {
    match (kind, domain) {
        (WidgetKind::SingleSlider | WidgetKind::RangeSlider, ValueDomain::Numeric { min, max }) => {
            if !(min.is_finite() && max.is_finite()) {
                return Err("numeric bounds must be finite".into());
            }
            if min > max {
                return Err(format!("numeric domain min {min} exceeds max {max}"));
            }
            Ok(())
        }
        (k, ValueDomain::Options(opts)) if k.is_selection() => {
            if opts.is_empty() {
                return Err("option list is empty".into());
            }
            let unique: BTreeSet<&String> = opts.iter().collect();
            if unique.len() != opts.len() {
                return Err("option list contains duplicates".into());
            }
            Ok(())
        }
        (WidgetKind::TextInput, ValueDomain::None) => Ok(()),
        (k, d) => Err(format!("domain {d:?} does not fit kind {k}")),
    }
}

/// Checks a value against a (kind, domain) pair. The domain is assumed to
/// have passed [`validate_domain`].
pub(crate) fn validate_value(
    kind: WidgetKind,
    domain: &ValueDomain,
    value: &WidgetValue,
) -> Result<(), String> {
    let in_bounds = |v: f64| -> Result<(), String> {
        let (min, max) = domain.numeric_bounds().ok_or("widget has no numeric domain")?;
        if v >= min && v <= max {
            Ok(())
        } else {
            Err(format!("{v} lies outside [{min}, {max}]"))
        }
    };
    match (kind, value) {
        (WidgetKind::SingleSlider, WidgetValue::Numeric(v)) => in_bounds(*v),
        (WidgetKind::RangeSlider, WidgetValue::Range { low, high }) => {
            in_bounds(*low)?;
            in_bounds(*high)?;
            if low > high {
                return Err(format!("range low {low} exceeds high {high}"));
            }
            Ok(())
        }
        (k, WidgetValue::Selection(items)) if k.is_selection() => {
            let opts = domain.options().ok_or("widget has no option list")?;
            if let Some(bad) = items.iter().find(|i| !opts.contains(i)) {
                return Err(format!("{bad:?} is not an option"));
            }
            if k.is_single_choice() && items.len() != 1 {
                return Err(format!("{k} requires exactly one selected option"));
            }
            Ok(())
        }
        (WidgetKind::TextInput, WidgetValue::Text(_)) => Ok(()),
        (k, v) => Err(format!("value {v} does not fit kind {k}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Interaction,
    Restore,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventAction {
    Interaction { widget_id: String, value: WidgetValue },
    Restore { target: Seq },
}

/// One entry of the append-only session log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEvent", into = "RawEvent")]
pub struct InteractionEvent {
    pub seq: Seq,
    pub wall_time: i64,
    pub action: EventAction,
}

impl InteractionEvent {
    pub fn kind(&self) -> EventKind {
        match self.action {
            EventAction::Interaction { .. } => EventKind::Interaction,
            EventAction::Restore { .. } => EventKind::Restore,
        }
    }

    pub fn widget_id(&self) -> Option<&str> {
        match &self.action {
            EventAction::Interaction { widget_id, .. } => Some(widget_id),
            EventAction::Restore { .. } => None,
        }
    }

    pub fn value(&self) -> Option<&WidgetValue> {
        match &self.action {
            EventAction::Interaction { value, .. } => Some(value),
            EventAction::Restore { .. } => None,
        }
    }

    pub fn restore_target(&self) -> Option<Seq> {
        match self.action {
            EventAction::Restore { target } => Some(target),
            EventAction::Interaction { .. } => None,
        }
    }
}

/// Flat wire shape of an event; field order here is the serialized key order.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    seq: Seq,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    widget_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<WidgetValue>,
    wall_time: i64,
    kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    restore_target: Option<Seq>,
}

impl TryFrom<RawEvent> for InteractionEvent {
    type Error = String;

    fn try_from(raw: RawEvent) -> Result<Self, Self::Error> {
        let action = match (raw.kind, raw.widget_id, raw.value, raw.restore_target) {
            (EventKind::Interaction, Some(widget_id), Some(value), None) => {
                EventAction::Interaction { widget_id, value }
            }
            (EventKind::Interaction, _, _, Some(_)) => {
                return Err("interaction events carry no restore_target".into())
            }
            (EventKind::Interaction, _, _, None) => {
                return Err("interaction events need widget_id and value".into())
            }
            (EventKind::Restore, None, None, Some(target)) => {
                if target >= raw.seq {
                    return Err(format!(
                        "restore_target {target} must precede the event's seq {}",
                        raw.seq
                    ));
                }
                EventAction::Restore { target }
            }
            (EventKind::Restore, _, _, None) => {
                return Err("restore events need a restore_target".into())
            }
            (EventKind::Restore, _, _, Some(_)) => {
                return Err("restore events carry no widget_id or value".into())
            }
        };
        Ok(InteractionEvent {
            seq: raw.seq,
            wall_time: raw.wall_time,
            action,
        })
    }
}

impl From<InteractionEvent> for RawEvent {
    fn from(ev: InteractionEvent) -> Self {
        match ev.action {
            EventAction::Interaction { widget_id, value } => RawEvent {
                seq: ev.seq,
                widget_id: Some(widget_id),
                value: Some(value),
                wall_time: ev.wall_time,
                kind: EventKind::Interaction,
                restore_target: None,
            },
            EventAction::Restore { target } => RawEvent {
                seq: ev.seq,
                widget_id: None,
                value: None,
                wall_time: ev.wall_time,
                kind: EventKind::Restore,
                restore_target: Some(target),
            },
        }
    }
}
