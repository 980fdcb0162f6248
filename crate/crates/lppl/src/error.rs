//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model evaluation, the linear solver, data ingestion
/// and the calibration pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation requested at or beyond the critical time.
    #[error("time {t} is not strictly before the critical time {t_c}")]
    BeyondCriticalTime { t: f64, t_c: f64 },

    /// A parameter fails a hard precondition (e.g. division by zero).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The design matrix is numerically rank deficient.
    #[error("linear system is rank deficient (condition diagnostic {condition:.3e} exceeds {threshold:.3e})")]
    RankDeficient { condition: f64, threshold: f64 },

    /// A basis or cost evaluation produced a non-finite value.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// CSV input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Two rows carry the same calendar date.
    #[error("duplicate date {0}")]
    DuplicateDate(String),

    /// A price at or below zero cannot be log-transformed.
    #[error("non-positive price {price} at line {line}")]
    NonPositivePrice { line: usize, price: f64 },

    /// Window bounds produced an empty observation set.
    #[error("empty window: {0}")]
    EmptyWindow(String),

    /// Window or series too short for the requested operation.
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    /// Every multistart launch failed to produce a finite cost.
    #[error("all optimizer starts failed to produce a finite cost")]
    AllStartsFailed,

    /// Optimizer or calibration configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
