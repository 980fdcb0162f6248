//! Calibration pipeline.
//!
//! For fixed `(t_c, m, omega)` the four linear coefficients are slaved by a
//! least-squares solve, giving the profiled cost `f1`. Profiling further
//! over `(m, omega)` at fixed `t_c` gives `f2(t_c)` together with the
//! slaved estimates `m_hat(t_c)` and `omega_hat(t_c)`; scanning `t_c` over
//! a grid beyond the window end and refining the best point yields the full
//! fit. The legacy route optimizes `(t_c, m, omega, phi)` jointly with
//! three slaved coefficients and is kept as an oracle and benchmark.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::data::PriceSeries;
use crate::error::{Error, Result};
use crate::linear::{self, BasisColumns, LinearConfig, LinearSolution};
use crate::model::{self, bounds, LpplParams, PhaseParams, QualificationReport, EPS_T};
use crate::optimize::{self, LocalMinimum, OptimizerConfig, SearchBox};

/// Default cluster-merge distances per parameter: coarser than the solver
/// convergence tolerance, finer than typical basin separation.
pub const M_CLUSTER_TOL: f64 = 0.02;
pub const OMEGA_CLUSTER_TOL: f64 = 0.2;
pub const TC_CLUSTER_TOL: f64 = 0.5;
pub const PHI_CLUSTER_TOL: f64 = 0.2;

/// Inclusive index bounds `[t1, t2]` of a fitting window within a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FitWindow {
    pub start_index: usize,
    pub end_index: usize,
}

impl FitWindow {
    pub fn new(start_index: usize, end_index: usize) -> Self {
        Self { start_index, end_index }
    }

    /// Number of observations inside the window (inclusive bounds).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.end_index - self.start_index + 1
    }

    /// Window end as a trading-day time.
    pub fn end_time(&self) -> f64 {
        self.end_index as f64
    }

    /// Observation times: the absolute trading-day indices of the window.
    pub fn times(&self) -> Vec<f64> {
        (self.start_index..=self.end_index).map(|i| i as f64).collect()
    }

    /// Log-prices inside the window.
    pub fn log_prices<'a>(&self, series: &'a PriceSeries) -> &'a [f64] {
        &series.log_prices()[self.start_index..=self.end_index]
    }

    fn validate(&self, series: &PriceSeries, min_span: usize) -> Result<()> {
        if self.start_index > self.end_index {
            return Err(Error::InvalidWindow(format!(
                "start index {} beyond end index {}",
                self.start_index, self.end_index
            )));
        }
        if self.end_index >= series.len() {
            return Err(Error::InvalidWindow(format!(
                "end index {} outside series of length {}",
                self.end_index,
                series.len()
            )));
        }
        if self.end_index - self.start_index < min_span {
            return Err(Error::InvalidWindow(format!(
                "window spans {} observations, minimum is {}",
                self.len(),
                min_span + 1
            )));
        }
        Ok(())
    }
}

/// Pipeline configuration. The optimizer's cluster tolerance applies to
/// the `(m, omega)` inner search; the critical-time grid runs from one day
/// past the window end out to `tc_horizon` in steps of `tc_step` (both in
/// trading days).
#[derive(Debug, Clone)]
pub struct CalibConfig {
    pub optimizer: OptimizerConfig,
    pub tc_horizon: f64,
    pub tc_step: f64,
    pub linear: LinearConfig,
    pub min_window_span: usize,
    /// Clusters costing more than this multiple of the best cluster are
    /// discarded when counting distinct minima.
    pub minima_cost_factor: f64,
}

impl CalibConfig {
    pub fn new(rng_seed: u64) -> Self {
        Self {
            optimizer: OptimizerConfig::new(rng_seed)
                .with_cluster_tolerance(vec![M_CLUSTER_TOL, OMEGA_CLUSTER_TOL]),
            tc_horizon: 90.0,
            tc_step: 1.0,
            linear: LinearConfig::default(),
            min_window_span: 30,
            minima_cost_factor: 10.0,
        }
    }
}

/// Start box for the inner `(m, omega)` searches.
pub fn mw_start_box() -> SearchBox {
    SearchBox::new(
        vec![bounds::M_MIN, bounds::OMEGA_MIN],
        vec![bounds::M_MAX, bounds::OMEGA_MAX],
    )
    .expect("static box is valid")
}

/// Basis evaluation cache for one critical time: `ln(t_c - tau_i)` does not
/// change while the inner search varies `(m, omega)`.
struct TcContext<'a> {
    ln_dt: Vec<f64>,
    y: &'a [f64],
}

impl<'a> TcContext<'a> {
    fn new(times: &[f64], y: &'a [f64], t_c: f64) -> Result<Self> {
        let last = *times.last().expect("nonempty window");
        if !(t_c - last >= EPS_T) {
            return Err(Error::BeyondCriticalTime { t: last, t_c });
        }
        Ok(Self { ln_dt: times.iter().map(|&tau| (t_c - tau).ln()).collect(), y })
    }

    fn basis(&self, m: f64, omega: f64) -> Result<BasisColumns> {
        let n = self.ln_dt.len();
        let mut f = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        let mut h = Vec::with_capacity(n);
        for &ln_dt in &self.ln_dt {
            let pow = (m * ln_dt).exp();
            let (sin, cos) = (omega * ln_dt).sin_cos();
            f.push(pow);
            g.push(pow * cos);
            h.push(pow * sin);
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("basis columns"));
        }
        Ok(BasisColumns { y: self.y.to_vec(), ones: vec![1.0; n], f, g, h })
    }

    fn solve4(&self, m: f64, omega: f64, config: &LinearConfig) -> Result<LinearSolution> {
        linear::solve_linear4_with(&self.basis(m, omega)?, config)
    }

    fn f1(&self, m: f64, omega: f64, config: &LinearConfig) -> Result<f64> {
        Ok(self.solve4(m, omega, config)?.sum_squared_residuals)
    }

    fn s1(&self, m: f64, omega: f64, phi: f64, config: &LinearConfig) -> Result<f64> {
        let basis = self.basis(m, omega)?;
        Ok(linear::solve_linear3_with(&basis, phi, config)?.sum_squared_residuals)
    }
}

/// Profiled cost `F1(t_c, m, omega)`: the residual sum of squares after
/// slaving the four linear coefficients.
pub fn f1(series: &PriceSeries, window: FitWindow, t_c: f64, m: f64, omega: f64) -> Result<f64> {
    f1_with(series, window, t_c, m, omega, &LinearConfig::default())
}

/// As [`f1`] with an explicit linear-solver configuration.
pub fn f1_with(
    series: &PriceSeries,
    window: FitWindow,
    t_c: f64,
    m: f64,
    omega: f64,
    config: &LinearConfig,
) -> Result<f64> {
    let times = window.times();
    TcContext::new(&times, window.log_prices(series), t_c)?.f1(m, omega, config)
}

/// Legacy profiled cost `S1(t_c, m, omega, phi)`: three slaved coefficients
/// with the oscillation column built at an explicit phase.
pub fn legacy_s1(
    series: &PriceSeries,
    window: FitWindow,
    t_c: f64,
    m: f64,
    omega: f64,
    phi: f64,
) -> Result<f64> {
    legacy_s1_with(series, window, t_c, m, omega, phi, &LinearConfig::default())
}

/// As [`legacy_s1`] with an explicit linear-solver configuration.
pub fn legacy_s1_with(
    series: &PriceSeries,
    window: FitWindow,
    t_c: f64,
    m: f64,
    omega: f64,
    phi: f64,
    config: &LinearConfig,
) -> Result<f64> {
    let times = window.times();
    TcContext::new(&times, window.log_prices(series), t_c)?.s1(m, omega, phi, config)
}

/// Sum of squared residuals of fully specified parameters over a window.
pub fn cost_f(series: &PriceSeries, window: FitWindow, params: &LpplParams) -> Result<f64> {
    linear::cost_f(&window.times(), window.log_prices(series), params)
}

/// Result of the inner `(m, omega)` minimization at one critical time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MwEstimate {
    pub m_hat: f64,
    pub omega_hat: f64,
    pub f2: f64,
    /// Distinct local minima inside the stylized `(m, omega)` box with
    /// cost within the configured factor of the best.
    pub minima_count: usize,
}

/// Minimizes `F1` over `(m, omega)` at fixed `t_c` by seeded multistart
/// from the stylized box.
pub fn minimize_mw(
    series: &PriceSeries,
    window: FitWindow,
    t_c: f64,
    config: &CalibConfig,
) -> Result<MwEstimate> {
    window.validate(series, config.min_window_span)?;
    let times = window.times();
    let ctx = TcContext::new(&times, window.log_prices(series), t_c)?;
    minimize_mw_ctx(&ctx, config, &AtomicU64::new(0))
}

fn minimize_mw_ctx(
    ctx: &TcContext<'_>,
    config: &CalibConfig,
    evals: &AtomicU64,
) -> Result<MwEstimate> {
    let objective = |x: &[f64]| {
        evals.fetch_add(1, Ordering::Relaxed);
        ctx.f1(x[0], x[1], &config.linear).unwrap_or(f64::INFINITY)
    };
    let clusters = optimize::multistart(objective, &mw_start_box(), &config.optimizer)?;
    let best = clusters.first().ok_or(Error::AllStartsFailed)?;
    let minima_count = count_distinct_minima(&clusters, config, |loc| (loc[0], loc[1]));
    Ok(MwEstimate {
        m_hat: best.location[0],
        omega_hat: best.location[1],
        f2: best.value,
        minima_count,
    })
}

fn count_distinct_minima(
    clusters: &[LocalMinimum],
    config: &CalibConfig,
    mw_of: impl Fn(&[f64]) -> (f64, f64),
) -> usize {
    let best = clusters[0].value;
    clusters
        .iter()
        .filter(|c| {
            let (m, omega) = mw_of(&c.location);
            bounds::inside_mw(m, omega) && c.value <= config.minima_cost_factor * best
        })
        .count()
}

/// One evaluated grid point of the critical-time profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TcPoint {
    pub t_c: f64,
    pub f2: f64,
    pub m_hat: f64,
    pub omega_hat: f64,
    pub qualified: bool,
    pub minima_count: usize,
}

/// Critical-time profile: `f2`, the slaved `(m_hat, omega_hat)` and the
/// stylized qualification per grid point, plus the indices of grid-local
/// minima of `f2` (strict three-point test, endpoints excluded).
#[derive(Debug, Clone, Serialize)]
pub struct TcProfile {
    pub points: Vec<TcPoint>,
    pub local_minima: Vec<usize>,
}

impl TcProfile {
    /// Index of the point with the smallest `f2` (earliest on ties).
    pub fn best_index(&self) -> usize {
        self.points
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.f2.total_cmp(&b.f2))
            .map(|(i, _)| i)
            .expect("profile has at least one point")
    }
}

/// Profiles the critical time over the configured grid. Failed grid points
/// are dropped from the profile; the call fails only if every point fails.
pub fn profile_tc(
    series: &PriceSeries,
    window: FitWindow,
    config: &CalibConfig,
) -> Result<TcProfile> {
    profile_tc_counted(series, window, config, &AtomicU64::new(0))
}

fn profile_tc_counted(
    series: &PriceSeries,
    window: FitWindow,
    config: &CalibConfig,
    evals: &AtomicU64,
) -> Result<TcProfile> {
    window.validate(series, config.min_window_span)?;
    if !(config.tc_step > 0.0) || !(config.tc_horizon >= 1.0) {
        return Err(Error::InvalidConfig(
            "tc_step must be positive and tc_horizon at least 1 trading day".into(),
        ));
    }
    let times = window.times();
    let y = window.log_prices(series);
    let t2 = window.end_time();
    let grid = tc_grid(t2, config);

    let evaluated: Vec<Option<TcPoint>> = grid
        .par_iter()
        .map(|&t_c| {
            let ctx = TcContext::new(&times, y, t_c).ok()?;
            let est = minimize_mw_ctx(&ctx, config, evals).ok()?;
            let sol = ctx.solve4(est.m_hat, est.omega_hat, &config.linear).ok()?;
            let params = params_from(t_c, est.m_hat, est.omega_hat, &sol);
            Some(TcPoint {
                t_c,
                f2: est.f2,
                m_hat: est.m_hat,
                omega_hat: est.omega_hat,
                qualified: model::qualify(&params, t2).qualified,
                minima_count: est.minima_count,
            })
        })
        .collect();

    let points: Vec<TcPoint> = evaluated.into_iter().flatten().collect();
    if points.is_empty() {
        return Err(Error::AllStartsFailed);
    }
    let local_minima = grid_local_minima(&points);
    Ok(TcProfile { points, local_minima })
}

fn tc_grid(t2: f64, config: &CalibConfig) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let offset = 1.0 + k as f64 * config.tc_step;
        if offset > config.tc_horizon + 1e-9 {
            break;
        }
        grid.push(t2 + offset);
        k += 1;
    }
    grid
}

/// Strict three-point local minima over the surviving grid points;
/// plateaus are credited to their earliest index, endpoints are excluded.
fn grid_local_minima(points: &[TcPoint]) -> Vec<usize> {
    let n = points.len();
    let mut minima = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let current = points[i].f2;
        if current < points[i - 1].f2 {
            let mut j = i;
            while j + 1 < n && points[j + 1].f2 == current {
                j += 1;
            }
            if j + 1 < n && points[j + 1].f2 > current {
                minima.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    minima
}

fn params_from(t_c: f64, m: f64, omega: f64, sol: &LinearSolution) -> LpplParams {
    LpplParams {
        t_c,
        m,
        omega,
        a: sol.coefficients[0],
        b: sol.coefficients[1],
        c1: sol.coefficients[2],
        c2: sol.coefficients[3],
    }
}

/// A completed calibration: best parameters in both forms, the final cost,
/// stylized qualification, the minima count at the best critical time, the
/// profile that produced it, and per-observation residuals.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub params: LpplParams,
    pub phase_view: PhaseParams,
    pub cost: f64,
    pub qualification: QualificationReport,
    pub minima_count: usize,
    pub profile: Option<TcProfile>,
    /// Per-observation residuals `y_i - model(tau_i)`.
    pub diagnostics: Vec<f64>,
    /// Number of profiled-cost evaluations spent by the whole pipeline.
    pub n_objective_evals: u64,
}

/// Full calibration: critical-time profile, one-dimensional refinement of
/// the best grid point bracketed by its neighbors, and a final joint
/// polish of `(t_c, m, omega)` before the linear coefficients are
/// re-solved at the optimum. An unqualified outcome is a normal result.
pub fn fit(series: &PriceSeries, window: FitWindow, config: &CalibConfig) -> Result<FitResult> {
    let evals = AtomicU64::new(0);
    let profile = profile_tc_counted(series, window, config, &evals)?;
    let times = window.times();
    let y = window.log_prices(series);
    let t2 = window.end_time();

    let best = profile.points[profile.best_index()];

    // 1-D refinement of f2 over t_c, warm-starting the inner search from
    // the best grid point's slaved estimates. Small initial steps: the
    // warm start is already near the inner optimum, and the joint polish
    // below recovers full precision.
    let warm = [best.m_hat, best.omega_hat];
    let inner_steps = [0.002, 0.02];
    let eval_f2 = |t_c: f64| -> (f64, [f64; 2]) {
        match TcContext::new(&times, y, t_c) {
            Ok(ctx) => {
                let objective = |x: &[f64]| {
                    evals.fetch_add(1, Ordering::Relaxed);
                    ctx.f1(x[0], x[1], &config.linear).unwrap_or(f64::INFINITY)
                };
                let r = optimize::local_minimize_with_steps(
                    objective,
                    &warm,
                    &inner_steps,
                    &config.optimizer,
                );
                (r.value, [r.location[0], r.location[1]])
            }
            Err(_) => (f64::INFINITY, warm),
        }
    };

    let lo = (best.t_c - config.tc_step).max(t2 + 1e-6);
    let hi = best.t_c + config.tc_step;
    let mut incumbent = (best.f2, best.t_c, warm);
    golden_section(&eval_f2, lo, hi, 1e-2, &mut incumbent);

    // joint polish of all three nonlinear parameters from the refined point
    let polish_objective = |x: &[f64]| {
        evals.fetch_add(1, Ordering::Relaxed);
        match TcContext::new(&times, y, x[0]) {
            Ok(ctx) => ctx.f1(x[1], x[2], &config.linear).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };
    let mut polish_cfg = config.optimizer.clone();
    polish_cfg.x_tolerance = config.optimizer.x_tolerance.min(1e-11);
    polish_cfg.f_tolerance = 1e-14;
    polish_cfg.max_iterations = config.optimizer.max_iterations.max(4000);
    let polished = optimize::local_minimize_with_steps(
        polish_objective,
        &[incumbent.1, incumbent.2[0], incumbent.2[1]],
        &[0.1, 0.002, 0.02],
        &polish_cfg,
    );
    let (t_c, m, omega) = if polished.value <= incumbent.0 {
        (polished.location[0], polished.location[1], polished.location[2])
    } else {
        (incumbent.1, incumbent.2[0], incumbent.2[1])
    };

    let ctx = TcContext::new(&times, y, t_c)?;
    let sol = ctx.solve4(m, omega, &config.linear)?;
    let params = params_from(t_c, m, omega, &sol);
    assemble_result(
        series,
        window,
        params,
        best.minima_count,
        Some(profile),
        evals.load(Ordering::Relaxed),
    )
}

/// Golden-section search on `[lo, hi]`, improving `incumbent`
/// (value, t_c, inner location) whenever a probe beats it.
fn golden_section(
    eval: &impl Fn(f64) -> (f64, [f64; 2]),
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    incumbent: &mut (f64, f64, [f64; 2]),
) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let probe = |t_c: f64, incumbent: &mut (f64, f64, [f64; 2])| -> f64 {
        let (value, mw) = eval(t_c);
        if value < incumbent.0 {
            *incumbent = (value, t_c, mw);
        }
        value
    };

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = probe(x1, incumbent);
    let mut f2 = probe(x2, incumbent);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = probe(x1, incumbent);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = probe(x2, incumbent);
        }
    }
}

fn assemble_result(
    series: &PriceSeries,
    window: FitWindow,
    params: LpplParams,
    minima_count: usize,
    profile: Option<TcProfile>,
    n_objective_evals: u64,
) -> Result<FitResult> {
    let times = window.times();
    let diagnostics = linear::residuals(&times, window.log_prices(series), &params)?;
    let cost = diagnostics.iter().map(|r| r * r).sum();
    let qualification = model::qualify(&params, window.end_time());
    Ok(FitResult {
        params,
        phase_view: params.phase_view(),
        cost,
        qualification,
        minima_count,
        profile,
        diagnostics,
        n_objective_evals,
    })
}

/// Legacy calibration: seeded multistart over the four nonlinear
/// parameters `(t_c, m, omega, phi)` with three slaved coefficients,
/// followed by the same final polish as [`fit`]. Kept as an oracle and
/// benchmark for the reformulated pipeline.
pub fn legacy_fit(
    series: &PriceSeries,
    window: FitWindow,
    config: &CalibConfig,
) -> Result<FitResult> {
    window.validate(series, config.min_window_span)?;
    let times = window.times();
    let y = window.log_prices(series);
    let t2 = window.end_time();
    let evals = AtomicU64::new(0);

    let objective = |x: &[f64]| {
        evals.fetch_add(1, Ordering::Relaxed);
        match TcContext::new(&times, y, x[0]) {
            Ok(ctx) => ctx.s1(x[1], x[2], x[3], &config.linear).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };

    let start_box = SearchBox::new(
        vec![t2 + 1.0, bounds::M_MIN, bounds::OMEGA_MIN, 0.0],
        vec![t2 + config.tc_horizon, bounds::M_MAX, bounds::OMEGA_MAX, std::f64::consts::TAU],
    )?;
    let mut ms_cfg = config.optimizer.clone();
    ms_cfg.cluster_tolerance =
        vec![TC_CLUSTER_TOL, M_CLUSTER_TOL, OMEGA_CLUSTER_TOL, PHI_CLUSTER_TOL];
    let clusters = optimize::multistart(|x: &[f64]| objective(x), &start_box, &ms_cfg)?;
    let best = clusters.first().ok_or(Error::AllStartsFailed)?;

    let mut polish_cfg = config.optimizer.clone();
    polish_cfg.x_tolerance = config.optimizer.x_tolerance.min(1e-11);
    polish_cfg.f_tolerance = 1e-14;
    polish_cfg.max_iterations = config.optimizer.max_iterations.max(4000);
    let polished = optimize::local_minimize_with_steps(
        &objective,
        &best.location,
        &[0.1, 0.002, 0.02, 0.02],
        &polish_cfg,
    );
    let location = if polished.value <= best.value { &polished.location } else { &best.location };
    let (t_c, m, omega, phi) = (location[0], location[1], location[2], location[3]);

    let ctx = TcContext::new(&times, y, t_c)?;
    let basis = ctx.basis(m, omega)?;
    let sol = linear::solve_linear3_with(&basis, phi, &config.linear)?;
    let (c, phi) = model::normalize_amplitude_phase(sol.coefficients[2], phi);
    let phase = PhaseParams::new(t_c, m, omega, sol.coefficients[0], sol.coefficients[1], c, phi);
    let minima_count = count_distinct_minima(&clusters, config, |loc| (loc[1], loc[2]));
    assemble_result(
        series,
        window,
        phase.cartesian_view(),
        minima_count,
        None,
        evals.load(Ordering::Relaxed),
    )
}

/// Best grid point of one scanned window.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BestSummary {
    pub t_c: f64,
    pub m: f64,
    pub omega: f64,
    pub f2: f64,
}

/// Per-window record of the rolling study.
#[derive(Debug, Clone, Serialize)]
pub struct WindowRecord {
    pub start_index: usize,
    pub end_index: usize,
    pub start_date: chrono::NaiveDate,
    pub end_date: chrono::NaiveDate,
    /// Largest number of distinct in-box `(m, omega)` minima observed at
    /// any critical time of this window's grid.
    pub minima_count: usize,
    pub qualified: bool,
    pub best: Option<BestSummary>,
}

/// Outcome of [`rolling_scan`].
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub window_length: usize,
    pub step: usize,
    pub windows: Vec<WindowRecord>,
}

/// Profiles every window of `window_length` observations advancing by
/// `step`, recording minima counts and best-fit summaries. Per-window
/// failures are recorded and the scan continues.
pub fn rolling_scan(
    series: &PriceSeries,
    window_length: usize,
    step: usize,
    config: &CalibConfig,
) -> Result<ScanReport> {
    if step == 0 {
        return Err(Error::InvalidConfig("scan step must be positive".into()));
    }
    if window_length < config.min_window_span + 1 {
        return Err(Error::InvalidConfig(format!(
            "window length {window_length} below the minimum of {}",
            config.min_window_span + 1
        )));
    }
    if window_length > series.len() {
        return Err(Error::InvalidWindow(format!(
            "window length {window_length} exceeds series length {}",
            series.len()
        )));
    }

    let mut windows = Vec::new();
    let mut start = 0usize;
    while start + window_length <= series.len() {
        let window = FitWindow::new(start, start + window_length - 1);
        let record = match profile_tc(series, window, config) {
            Ok(profile) => {
                let best = profile.points[profile.best_index()];
                let minima_count =
                    profile.points.iter().map(|p| p.minima_count).max().unwrap_or(0);
                WindowRecord {
                    start_index: window.start_index,
                    end_index: window.end_index,
                    start_date: series.dates()[window.start_index],
                    end_date: series.dates()[window.end_index],
                    minima_count,
                    qualified: best.qualified,
                    best: Some(BestSummary {
                        t_c: best.t_c,
                        m: best.m_hat,
                        omega: best.omega_hat,
                        f2: best.f2,
                    }),
                }
            }
            Err(_) => WindowRecord {
                start_index: window.start_index,
                end_index: window.end_index,
                start_date: series.dates()[window.start_index],
                end_date: series.dates()[window.end_index],
                minima_count: 0,
                qualified: false,
                best: None,
            },
        };
        windows.push(record);
        start += step;
    }
    Ok(ScanReport { window_length, step, windows })
}
