//! Crate-wide error type.

use std::fmt;
use std::path::PathBuf;

use crate::search::OptimizationResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// An argument violated an operation's precondition.
    InvalidArgument(String),
    /// A configuration value is out of its documented range.
    InvalidConfig(String),
    /// The mask has no paintable pixel, so no layout can be placed.
    EmptyMask,
    /// A circle could not be placed within the resample budget.
    LayoutInfeasible { circle_index: usize, attempts: u64 },
    /// A placement references a sticker id not present in the pool.
    MissingSticker(String),
    /// The pool directory contained no loadable stickers.
    EmptyPool(PathBuf),
    /// Two pool files reduce to the same sticker id.
    DuplicateStickerId(String),
    /// An image file failed to decode.
    ImageDecode { path: PathBuf, message: String },
    /// A metrics operation received an empty record set.
    EmptyRecords,
    /// The oracle returned something unusable for a view.
    EvaluationFailed { view_id: Option<i64>, message: String },
    /// The external oracle process could not be started or greeted.
    OracleStartup(String),
    /// The external oracle speaks a different protocol version.
    OracleIncompatible { expected: u32, actual: u32 },
    /// Transport-level failure talking to an oracle; carries the raw
    /// payload when one was received.
    OracleIo { message: String, payload: Option<String> },
    /// The oracle failed mid-run; the best result found so far is kept.
    OracleAborted { message: String, partial: Box<OptimizationResult> },
    /// A checkpoint file disagrees with its referenced texture.
    CorruptCheckpoint(String),
    /// Filesystem error with the path that triggered it.
    Io { path: PathBuf, source: std::io::Error },
    /// A structured text file (layout, views, config, ...) failed to parse.
    ParseFormat { context: String, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            Error::EmptyMask => write!(f, "mask has no allowed pixel"),
            Error::LayoutInfeasible { circle_index, attempts } => write!(
                f,
                "layout infeasible: circle {circle_index} found no admissible center \
                 after {attempts} attempts"
            ),
            Error::MissingSticker(id) => write!(f, "unknown sticker id `{id}`"),
            Error::EmptyPool(dir) => {
                write!(f, "sticker pool directory `{}` holds no images", dir.display())
            }
            Error::DuplicateStickerId(id) => write!(f, "duplicate sticker id `{id}`"),
            Error::ImageDecode { path, message } => {
                write!(f, "cannot decode image `{}`: {message}", path.display())
            }
            Error::EmptyRecords => write!(f, "no evaluation records"),
            Error::EvaluationFailed { view_id, message } => match view_id {
                Some(id) => write!(f, "evaluation failed for view {id}: {message}"),
                None => write!(f, "evaluation failed: {message}"),
            },
            Error::OracleStartup(msg) => write!(f, "oracle startup failed: {msg}"),
            Error::OracleIncompatible { expected, actual } => write!(
                f,
                "oracle protocol version mismatch: expected {expected}, got {actual}"
            ),
            Error::OracleIo { message, payload } => match payload {
                Some(raw) => write!(f, "oracle io error: {message} (payload: {raw})"),
                None => write!(f, "oracle io error: {message}"),
            },
            Error::OracleAborted { message, partial } => write!(
                f,
                "oracle failed after {} iterations (best fitness {}): {message}",
                partial.iterations_used, partial.best_fitness
            ),
            Error::CorruptCheckpoint(msg) => write!(f, "corrupt checkpoint: {msg}"),
            Error::Io { path, source } => {
                write!(f, "io error on `{}`: {source}", path.display())
            }
            Error::ParseFormat { context, message } => {
                write!(f, "cannot parse {context}: {message}")
            }
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ParseFormat { context: context.into(), message: message.into() }
    }

    /// Exit code the CLI maps this error to: 2 for bad input, 3 for
    /// constraint violations, 4 for oracle trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EmptyMask | Error::LayoutInfeasible { .. } => 3,
            Error::EvaluationFailed { .. }
            | Error::OracleStartup(_)
            | Error::OracleIncompatible { .. }
            | Error::OracleIo { .. }
            | Error::OracleAborted { .. } => 4,
            _ => 2,
        }
    }
}
