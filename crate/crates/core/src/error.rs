use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("widget id {0:?} is already registered")]
    DuplicateWidgetId(String),

    #[error("invalid descriptor for widget {id:?}: {reason}")]
    InvalidDescriptor { id: String, reason: String },

    #[error("invalid initial value for widget {id:?}: {reason}")]
    InvalidInitialValue { id: String, reason: String },

    #[error("unknown widget id {0:?}")]
    UnknownWidgetId(String),

    #[error("invalid value for widget {id:?}: {reason}")]
    InvalidValue { id: String, reason: String },

    #[error("sequence index {seq} out of range for a log of {len} events")]
    SeqOutOfRange { seq: u64, len: u64 },

    #[error("malformed log at seq {seq}: {reason}")]
    MalformedLog { seq: u64, reason: String },

    #[error("viewport dimensions must be positive (got {width} x {height})")]
    InvalidViewport { width: f64, height: f64 },

    #[error("area bounds must satisfy 0 < min < max (got {min}, {max})")]
    InvalidAreaBounds { min: f64, max: f64 },

    #[error("bar key {0:?} is not part of the position domain")]
    UnknownKey(String),

    #[error("invalid scent encoding: {0}")]
    InvalidEncoding(String),

    #[error("co-interaction window must be at least 1 (got {0})")]
    InvalidWindow(usize),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid session config: {0}")]
    InvalidConfig(String),

    #[error("session mutated from inside an observer callback")]
    Reentrancy,
}
