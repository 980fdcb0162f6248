//! Calibration engine for the log-periodic power law model of financial
//! bubbles.
//!
//! The library fits the seven-parameter model to a window of log-prices by
//! slaving its four linear coefficients to the three nonlinear parameters
//! `(t_c, m, omega)` and then profiling the critical time `t_c` against the
//! remaining two. The smooth reduced cost surface lets seeded multistart
//! local searches replace global metaheuristics.
//!
//! Modules:
//! - [`model`]: the function itself, parameter forms, hazard diagnostics,
//!   stylized-constraint qualification;
//! - [`linear`]: basis construction and the slaved least-squares solves;
//! - [`optimize`]: Nelder-Mead and the deterministic multistart driver;
//! - [`calibrate`]: profiled costs, critical-time profile, full and legacy
//!   fits, rolling-window scan;
//! - [`data`]: CSV ingestion, window slicing, synthetic series generation;
//! - [`xsection`]: cost-surface cross-sections for plotting;
//! - [`report`]: deterministic JSON/CSV rendering of the result types.

// negated comparisons like `!(dt >= EPS_T)` are deliberate: they reject
// NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibrate;
pub mod data;
pub mod error;
pub mod linear;
pub mod model;
pub mod optimize;
pub mod report;
pub mod xsection;

pub use calibrate::{
    fit, legacy_fit, minimize_mw, profile_tc, rolling_scan, CalibConfig, FitResult, FitWindow,
    ScanReport, TcProfile,
};
pub use data::{load_csv, load_csv_str, slice_window, synth_generate, PriceSeries, SynthSpec};
pub use error::{Error, Result};
pub use model::{LpplParams, PhaseParams, QualificationReport};
pub use optimize::{LocalMinimum, OptimizerConfig, SearchBox};
