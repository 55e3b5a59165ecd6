//! `spw`: inspect exported provenance logs.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spw_core::analysis::{audit_report, co_interaction, untouched_widgets, usage_ranking};
use spw_core::layout::{
    compute_aggregate_layout, compute_temporal_layout, AggregateParams, Palette, TemporalParams,
    TimeAxis,
};
use spw_core::persist::{load_log, render_aggregate_svg, render_temporal_svg};
use spw_core::provenance::{ProvenanceRecord, ProvenanceSnapshot};
use spw_core::recovery::{replay, state_at};
use spw_core::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "spw", version, about = "Inspect cross-control provenance logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sequence,
    WallClock,
}

#[derive(Subcommand)]
enum Command {
    /// Print per-widget statistics and the event listing.
    Report {
        log: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Render the Temporal View as SVG.
    Gantt {
        log: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "sequence")]
        mode: Mode,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
        /// Defaults to 24 px per row.
        #[arg(long)]
        height: Option<f64>,
    },
    /// Render the Aggregate View as SVG.
    Aggregate {
        log: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 480.0)]
        width: f64,
        #[arg(long, default_value_t = 240.0)]
        height: f64,
    },
    /// Untouched widgets, usage ranking and co-interaction pairs.
    Bias {
        log: PathBuf,
        #[arg(long, default_value_t = 1)]
        window: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the state every widget had at a given seq.
    Restore {
        log: PathBuf,
        #[arg(long)]
        seq: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Schema { .. } | Error::MalformedLog { .. } => EXIT_PARSE,
            Error::InvalidDescriptor { .. }
            | Error::InvalidInitialValue { .. }
            | Error::DuplicateWidgetId(_) => EXIT_PARSE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn load(path: &Path) -> Result<ProvenanceSnapshot, Failure> {
    let bytes =
        std::fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let (widgets, events) = load_log(&bytes)?;
    Ok(replay(&widgets, &events)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize") + "\n"
}

fn fmt_time(t: Option<i64>) -> String {
    t.map_or_else(|| "-".to_string(), |t| t.to_string())
}

fn fmt_seq(s: Option<u64>) -> String {
    s.map_or_else(|| "-".to_string(), |s| s.to_string())
}

fn report_text(snapshot: &ProvenanceSnapshot) -> String {
    let report = audit_report(snapshot);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "events: {} ({} interactions, {} restores)",
        report.global_count, report.interaction_count, report.restore_count
    );
    let _ = writeln!(
        out,
        "session: {} .. {}",
        fmt_time(report.session_start),
        fmt_time(report.session_end)
    );
    let _ = writeln!(out);
    for w in &report.widgets {
        let _ = writeln!(
            out,
            "{} [{}] count={} first_seq={} last_seq={} last_time={} current={}",
            w.id,
            w.kind,
            w.count,
            fmt_seq(w.first_seq),
            fmt_seq(w.last_seq),
            fmt_time(w.last_wall_time),
            w.current_value,
        );
        match &w.record {
            ProvenanceRecord::Numeric(r) => {
                if let (Some(min), Some(max)) = (r.observed_min, r.observed_max) {
                    let _ = writeln!(out, "  observed min={min} max={max}");
                }
            }
            ProvenanceRecord::Ranged(r) => {
                for p in &r.pairs {
                    let _ = writeln!(out, "  pair [{}, {}] x{}", p.low, p.high, p.count);
                }
            }
            ProvenanceRecord::Selection(r) => {
                for item in &r.items {
                    let _ = writeln!(
                        out,
                        "  item {} selected={} changed={}",
                        item.item, item.selection_count, item.interaction_count
                    );
                }
            }
            ProvenanceRecord::Text(r) => {
                let _ = writeln!(out, "  {} text entries", r.events.len());
            }
        }
    }
    let _ = writeln!(out);
    for ev in &report.events {
        match (ev.widget_id(), ev.value(), ev.restore_target()) {
            (Some(id), Some(v), _) => {
                let _ = writeln!(out, "#{} t={} {} = {}", ev.seq, ev.wall_time, id, v);
            }
            (_, _, Some(target)) => {
                let _ = writeln!(out, "#{} t={} restore -> #{}", ev.seq, ev.wall_time, target);
            }
            _ => {}
        }
    }
    out
}

fn bias_text(snapshot: &ProvenanceSnapshot, window: usize) -> Result<String, Failure> {
    let matrix = co_interaction(snapshot, window)?;
    let mut out = String::new();
    let untouched = untouched_widgets(snapshot);
    let _ = writeln!(out, "untouched widgets ({}):", untouched.len());
    for id in &untouched {
        let _ = writeln!(out, "  {id}");
    }
    let _ = writeln!(out, "usage ranking:");
    for (id, count) in usage_ranking(snapshot) {
        let _ = writeln!(out, "  {id} {count}");
    }
    let _ = writeln!(out, "co-interaction pairs (window {window}):");
    for (a, b, count) in matrix.pairs() {
        let _ = writeln!(out, "  {a} {b} {count}");
    }
    Ok(out)
}

fn bias_json(snapshot: &ProvenanceSnapshot, window: usize) -> Result<String, Failure> {
    let matrix = co_interaction(snapshot, window)?;
    let pairs: Vec<_> = matrix
        .pairs()
        .into_iter()
        .map(|(a, b, count)| serde_json::json!({ "a": a, "b": b, "count": count }))
        .collect();
    let ranking: Vec<_> = usage_ranking(snapshot)
        .into_iter()
        .map(|(id, count)| serde_json::json!({ "widget_id": id, "count": count }))
        .collect();
    Ok(to_json(&serde_json::json!({
        "untouched": untouched_widgets(snapshot),
        "ranking": ranking,
        "window": window,
        "co_interaction": pairs,
    })))
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Report { log, format } => {
            let snapshot = load(&log)?;
            Ok(match format {
                Format::Text => report_text(&snapshot),
                Format::Json => to_json(&audit_report(&snapshot)),
            })
        }
        Command::Gantt {
            log,
            output,
            mode,
            width,
            height,
        } => {
            let snapshot = load(&log)?;
            let axis = match mode {
                Mode::Sequence => TimeAxis::Sequence,
                Mode::WallClock => TimeAxis::WallClock,
            };
            let layout =
                compute_temporal_layout(&snapshot, &TemporalParams::new(axis), &Palette::default());
            let height = height.unwrap_or(24.0 * layout.row_count() as f64 + 16.0);
            if !(width > 0.0 && height > 0.0) {
                return Err(usage("canvas dimensions must be positive"));
            }
            write_file(&output, &render_temporal_svg(&layout, width, height))?;
            Ok(format!("wrote {} bars to {}\n", layout.bars.len(), output.display()))
        }
        Command::Aggregate {
            log,
            output,
            width,
            height,
        } => {
            let snapshot = load(&log)?;
            let boxes = compute_aggregate_layout(
                &snapshot,
                &AggregateParams::new(width, height),
                &Palette::default(),
            )?;
            write_file(&output, &render_aggregate_svg(&boxes, width, height))?;
            Ok(format!("wrote {} boxes to {}\n", boxes.len(), output.display()))
        }
        Command::Bias {
            log,
            window,
            format,
        } => {
            let snapshot = load(&log)?;
            match format {
                Format::Text => bias_text(&snapshot, window),
                Format::Json => bias_json(&snapshot, window),
            }
        }
        Command::Restore { log, seq, format } => {
            let snapshot = load(&log)?;
            let len = snapshot.global_count();
            if seq >= len {
                return Err(Error::SeqOutOfRange { seq, len }.into());
            }
            let state = state_at(&snapshot, seq);
            Ok(match format {
                Format::Json => to_json(&state),
                Format::Text => state.iter().fold(String::new(), |mut out, (id, v)| {
                    let _ = writeln!(out, "{id} = {v}");
                    out
                }),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            let _ = io::stdout().lock().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("spw: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
