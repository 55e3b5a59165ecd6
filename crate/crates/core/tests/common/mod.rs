//! Random session generation and brute-force oracles shared by the
//! integration tests. Nothing here calls into the statistics, recovery or
//! analysis code it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use spw_core::model::{
    EventAction, InteractionEvent, ValueDomain, WidgetDescriptor, WidgetKind, WidgetSpec,
    WidgetValue,
};
use spw_core::provenance::Tracker;
use spw_core::recovery::restore_to;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const OPTIONS: [&str; 5] = ["north", "south", "east", "west", "central"];

/// Ten widgets: every kind at least once, value domains small enough that
/// values repeat.
pub fn widget_specs() -> Vec<WidgetSpec> {
    let opts = || ValueDomain::Options(OPTIONS.iter().map(|s| s.to_string()).collect());
    let numeric = || ValueDomain::Numeric { min: 0.0, max: 10.0 };
    vec![
        WidgetSpec::new("radio", WidgetKind::RadioGroup, opts(), WidgetValue::selection(["north"])),
        WidgetSpec::new("checks", WidgetKind::CheckboxGroup, opts(), WidgetValue::selection(["east"])),
        WidgetSpec::new("slider", WidgetKind::SingleSlider, numeric(), WidgetValue::Numeric(5.0)),
        WidgetSpec::new(
            "range",
            WidgetKind::RangeSlider,
            numeric(),
            WidgetValue::Range { low: 0.0, high: 10.0 },
        ),
        WidgetSpec::new("single", WidgetKind::SingleSelect, opts(), WidgetValue::selection(["west"])),
        WidgetSpec::new("multi", WidgetKind::MultiSelect, opts(), WidgetValue::selection::<_, &str>([])),
        WidgetSpec::new("text", WidgetKind::TextInput, ValueDomain::None, WidgetValue::text("")),
        WidgetSpec::new("slider2", WidgetKind::SingleSlider, numeric(), WidgetValue::Numeric(0.0)),
        WidgetSpec::new(
            "range2",
            WidgetKind::RangeSlider,
            numeric(),
            WidgetValue::Range { low: 2.0, high: 3.0 },
        ),
        WidgetSpec::new("text2", WidgetKind::TextInput, ValueDomain::None, WidgetValue::text("init")),
    ]
}

pub fn random_value(rng: &mut impl Rng, kind: WidgetKind) -> WidgetValue {
    let grid = |rng: &mut dyn rand::RngCore| rng.gen_range(0..=20) as f64 * 0.5;
    match kind {
        WidgetKind::SingleSlider => WidgetValue::Numeric(grid(rng)),
        WidgetKind::RangeSlider => {
            let (a, b) = (grid(rng), grid(rng));
            WidgetValue::Range {
                low: a.min(b),
                high: a.max(b),
            }
        }
        WidgetKind::RadioGroup | WidgetKind::SingleSelect => {
            WidgetValue::selection([*OPTIONS.choose(rng).unwrap()])
        }
        WidgetKind::CheckboxGroup | WidgetKind::MultiSelect => {
            WidgetValue::selection(OPTIONS.iter().filter(|_| rng.gen_bool(0.4)).copied())
        }
        WidgetKind::TextInput => {
            let len = rng.gen_range(0..4);
            WidgetValue::Text((0..len).map(|_| *[ 'a', 'b', 'é', ' '].choose(rng).unwrap()).collect())
        }
    }
}

/// Builds a session of `events` log entries; each entry is a restore with
/// probability `restore_rate` (when a target exists). The clock sometimes
/// runs backwards.
pub fn random_tracker(seed: u64, events: usize, restore_rate: f64) -> Tracker {
    let mut rng = rng(seed);
    let mut tracker = Tracker::default();
    let specs = widget_specs();
    for spec in &specs {
        tracker.register_widget(spec.clone()).unwrap();
    }
    let mut clock: i64 = 1_700_000_000_000;
    for _ in 0..events {
        clock += rng.gen_range(-50..500);
        if !tracker.is_empty() && rng.gen_bool(restore_rate) {
            let target = rng.gen_range(0..tracker.len());
            restore_to(&mut tracker, target, clock).unwrap();
        } else {
            let spec = specs.choose(&mut rng).unwrap();
            let value = random_value(&mut rng, spec.kind);
            tracker.record_interaction(&spec.id, value, clock).unwrap();
        }
    }
    tracker
}

/// Widget-level statistics recomputed by a straight scan of the log.
#[derive(Debug, Default, PartialEq)]
pub struct ScanStats {
    pub count: u64,
    pub first_seq: Option<u64>,
    pub last_seq: Option<u64>,
    pub last_wall_time: Option<i64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// (low bits, high bits) -> occurrences
    pub pairs: BTreeMap<(u64, u64), u64>,
    /// item -> (selection_count, interaction_count)
    pub items: BTreeMap<String, (u64, u64)>,
    pub texts: Vec<String>,
}

pub fn scan_stats(widgets: &[WidgetDescriptor], events: &[InteractionEvent]) -> HashMap<String, ScanStats> {
    let mut out: HashMap<String, ScanStats> = HashMap::new();
    for w in widgets {
        let mut s = ScanStats::default();
        if let ValueDomain::Options(opts) = &w.domain {
            for o in opts {
                s.items.insert(o.clone(), (0, 0));
            }
        }
        let mut prev: BTreeSet<String> = match &w.initial_value {
            WidgetValue::Selection(sel) => sel.clone(),
            _ => BTreeSet::new(),
        };
        for ev in events {
            let EventAction::Interaction { widget_id, value } = &ev.action else {
                continue;
            };
            if widget_id != &w.id {
                continue;
            }
            s.count += 1;
            if s.first_seq.is_none() {
                s.first_seq = Some(ev.seq);
            }
            s.last_seq = Some(ev.seq);
            s.last_wall_time = Some(ev.wall_time);
            match value {
                WidgetValue::Numeric(v) => {
                    s.min = Some(match s.min {
                        Some(m) if m <= *v => m,
                        _ => *v,
                    });
                    s.max = Some(match s.max {
                        Some(m) if m >= *v => m,
                        _ => *v,
                    });
                }
                WidgetValue::Range { low, high } => {
                    *s.pairs.entry((low.to_bits(), high.to_bits())).or_default() += 1;
                }
                WidgetValue::Selection(next) => {
                    for (item, counts) in s.items.iter_mut() {
                        let before = prev.contains(item);
                        let after = next.contains(item);
                        if before != after {
                            counts.1 += 1;
                        }
                        if !before && after {
                            counts.0 += 1;
                        }
                    }
                    prev = next.clone();
                }
                WidgetValue::Text(t) => s.texts.push(t.clone()),
            }
        }
        out.insert(w.id.clone(), s);
    }
    out
}

/// Applies the log event by event, keeping the full UI state after every
/// event. `states[i]` is the state once event `i` has been applied.
pub struct NaiveInterpreter {
    pub ids: Vec<String>,
    pub initial: Vec<WidgetValue>,
    pub states: Vec<Vec<WidgetValue>>,
}

impl NaiveInterpreter {
    pub fn run(widgets: &[WidgetDescriptor], events: &[InteractionEvent]) -> Self {
        let ids: Vec<String> = widgets.iter().map(|w| w.id.clone()).collect();
        let initial: Vec<WidgetValue> = widgets.iter().map(|w| w.initial_value.clone()).collect();
        let mut current = initial.clone();
        let mut states: Vec<Vec<WidgetValue>> = Vec::with_capacity(events.len());
        for ev in events {
            match &ev.action {
                EventAction::Interaction { widget_id, value } => {
                    let i = ids.iter().position(|id| id == widget_id).unwrap();
                    current[i] = value.clone();
                }
                EventAction::Restore { target } => {
                    current = states[*target as usize].clone();
                }
            }
            states.push(current.clone());
        }
        NaiveInterpreter { ids, initial, states }
    }

    pub fn value_at(&self, widget_id: &str, seq: u64) -> WidgetValue {
        let i = self.ids.iter().position(|id| id == widget_id).unwrap();
        if self.states.is_empty() {
            return self.initial[i].clone();
        }
        let s = (seq as usize).min(self.states.len() - 1);
        self.states[s][i].clone()
    }
}

/// Co-interaction by walking forward through the raw log from every
/// interaction, skipping restores, until `window` interactions were seen.
pub fn brute_co_interaction(events: &[InteractionEvent], window: usize) -> BTreeMap<(String, String), u64> {
    let mut out = BTreeMap::new();
    for (i, e) in events.iter().enumerate() {
        let Some(a) = e.widget_id() else { continue };
        let mut seen = 0;
        for f in &events[i + 1..] {
            let Some(b) = f.widget_id() else { continue };
            seen += 1;
            if seen > window {
                break;
            }
            if a != b {
                let mut pair = [a.to_string(), b.to_string()];
                pair.sort();
                let [x, y] = pair;
                *out.entry((x, y)).or_insert(0) += 1;
            }
        }
    }
    out
}
