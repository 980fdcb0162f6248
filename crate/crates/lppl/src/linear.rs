//! Linear subproblem of the calibration: for fixed nonlinear parameters
//! `(t_c, m, omega)` the model is linear in the remaining coefficients, so
//! they are slaved to the nonlinear ones by an ordinary least-squares solve.
//!
//! Two routes are implemented. The default factorizes the design matrix
//! with Householder reflections, which keeps the conditioning of the
//! original columns. The alternative forms the normal equations and solves
//! them by LU with partial pivoting; it squares the condition number and
//! exists as an oracle for cross-checking the default route.

// triangular back-substitutions read clearest with explicit indices
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::model::{self, LpplParams, EPS_T};

/// Minimum number of observations: one more than the largest number of
/// linear coefficients, so the residual has positive degrees of freedom.
pub const MIN_OBSERVATIONS: usize = 5;

/// Default threshold on [`LinearSolution::condition_diagnostic`] beyond
/// which a solve is reported as rank deficient.
pub const DEFAULT_CONDITION_THRESHOLD: f64 = 1e12;

/// Which factorization backs the least-squares solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearMethod {
    /// Householder QR of the design matrix (default).
    #[default]
    QrDesign,
    /// Normal equations solved by LU with partial pivoting.
    NormalEquationsLu,
}

/// Options for the linear solve.
#[derive(Debug, Clone, Copy)]
pub struct LinearConfig {
    pub method: LinearMethod,
    pub condition_threshold: f64,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self { method: LinearMethod::QrDesign, condition_threshold: DEFAULT_CONDITION_THRESHOLD }
    }
}

/// Observation vector together with the basis columns evaluated at fixed
/// `(t_c, m, omega)`:
///
/// ```text
/// f_i = (t_c - tau_i)^m
/// g_i = (t_c - tau_i)^m cos(omega ln(t_c - tau_i))
/// h_i = (t_c - tau_i)^m sin(omega ln(t_c - tau_i))
/// ```
#[derive(Debug, Clone)]
pub struct BasisColumns {
    pub y: Vec<f64>,
    pub ones: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl BasisColumns {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Least-squares solution of one linear subproblem.
///
/// `coefficients` is `(A, B, C1, C2)` for the four-parameter solve and
/// `(A, B, C)` for the legacy three-parameter solve. The condition
/// diagnostic is the ratio of the largest to the smallest column norm
/// after orthogonalization.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub coefficients: Vec<f64>,
    pub sum_squared_residuals: f64,
    pub condition_diagnostic: f64,
}

/// Builds the basis columns for `times` (strictly increasing) and the
/// paired log-prices at fixed nonlinear parameters.
pub fn build_basis(
    times: &[f64],
    log_prices: &[f64],
    t_c: f64,
    m: f64,
    omega: f64,
) -> Result<BasisColumns> {
    let n = times.len();
    if n != log_prices.len() {
        return Err(Error::InvalidParameter(format!(
            "times ({n}) and log-prices ({}) differ in length",
            log_prices.len()
        )));
    }
    if n < MIN_OBSERVATIONS {
        return Err(Error::InvalidWindow(format!(
            "need at least {MIN_OBSERVATIONS} observations, got {n}"
        )));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("times must be strictly increasing".into()));
    }
    let last = times[n - 1];
    if !(t_c - last >= EPS_T) {
        return Err(Error::BeyondCriticalTime { t: last, t_c });
    }

    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    for &tau in times {
        let dt = t_c - tau;
        let pow = dt.powf(m);
        let (sin, cos) = (omega * dt.ln()).sin_cos();
        f.push(pow);
        g.push(pow * cos);
        h.push(pow * sin);
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("basis columns"));
    }

    Ok(BasisColumns { y: log_prices.to_vec(), ones: vec![1.0; n], f, g, h })
}

/// Solves for `(A, B, C1, C2)` minimizing the sum of squared residuals of
/// the four-column design, using the default configuration.
pub fn solve_linear4(basis: &BasisColumns) -> Result<LinearSolution> {
    solve_linear4_with(basis, &LinearConfig::default())
}

/// As [`solve_linear4`] with an explicit method and conditioning threshold.
pub fn solve_linear4_with(basis: &BasisColumns, config: &LinearConfig) -> Result<LinearSolution> {
    solve_ls(&[&basis.ones, &basis.f, &basis.g, &basis.h], &basis.y, config)
}

/// Legacy route: solves for `(A, B, C)` with the oscillation column built
/// at an explicit phase, `g_i(phi) = (t_c-tau_i)^m cos(omega ln(t_c-tau_i) - phi)`.
pub fn solve_linear3(basis: &BasisColumns, phi: f64) -> Result<LinearSolution> {
    solve_linear3_with(basis, phi, &LinearConfig::default())
}

/// As [`solve_linear3`] with an explicit method and conditioning threshold.
pub fn solve_linear3_with(
    basis: &BasisColumns,
    phi: f64,
    config: &LinearConfig,
) -> Result<LinearSolution> {
    // cos(x - phi) = cos(x) cos(phi) + sin(x) sin(phi), so the phased
    // column is an exact combination of the stored g and h columns.
    let (sin_phi, cos_phi) = phi.sin_cos();
    let g_phi: Vec<f64> = basis
        .g
        .iter()
        .zip(&basis.h)
        .map(|(&g, &h)| g * cos_phi + h * sin_phi)
        .collect();
    solve_ls(&[&basis.ones, &basis.f, &g_phi], &basis.y, config)
}

/// Sum of squared residuals of the model with fully specified parameters
/// over `(times, log_prices)`.
pub fn cost_f(times: &[f64], log_prices: &[f64], params: &LpplParams) -> Result<f64> {
    let residuals = residuals(times, log_prices, params)?;
    Ok(residuals.iter().map(|r| r * r).sum())
}

/// Per-observation residuals `y_i - model(tau_i)`.
pub fn residuals(times: &[f64], log_prices: &[f64], params: &LpplParams) -> Result<Vec<f64>> {
    if times.len() != log_prices.len() {
        return Err(Error::InvalidParameter("times and log-prices differ in length".into()));
    }
    times
        .iter()
        .zip(log_prices)
        .map(|(&tau, &y)| model::eval_lppl(params, tau).map(|v| y - v))
        .collect()
}

fn solve_ls(columns: &[&[f64]], y: &[f64], config: &LinearConfig) -> Result<LinearSolution> {
    match config.method {
        LinearMethod::QrDesign => qr_least_squares(columns, y, config.condition_threshold),
        LinearMethod::NormalEquationsLu => {
            normal_equations_lu(columns, y, config.condition_threshold)
        }
    }
}

/// Householder QR least squares on the n-by-k design matrix (k <= 4).
fn qr_least_squares(columns: &[&[f64]], y: &[f64], threshold: f64) -> Result<LinearSolution> {
    let n = y.len();
    let k = columns.len();
    debug_assert!(columns.iter().all(|c| c.len() == n));
    debug_assert!(n > k);

    // column-major working copy; a[j*n + i] is row i of column j
    let mut a: Vec<f64> = Vec::with_capacity(n * k);
    for col in columns {
        a.extend_from_slice(col);
    }
    let mut qty = y.to_vec();
    let mut rdiag = vec![0.0; k];

    for j in 0..k {
        // Householder vector for column j over rows j..n
        let (head, tail) = a.split_at_mut((j + 1) * n);
        let col = &mut head[j * n..];
        let norm = col[j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            rdiag[j] = 0.0;
            continue;
        }
        let alpha = if col[j] >= 0.0 { -norm } else { norm };
        col[j] -= alpha;
        let beta = -alpha * col[j]; // = ||v||^2 / 2 for this construction
        rdiag[j] = alpha;

        // apply I - v v^T / beta to the remaining columns and to y
        for block in tail.chunks_mut(n) {
            let dot: f64 = col[j..].iter().zip(&block[j..]).map(|(v, x)| v * x).sum();
            let scale = dot / beta;
            for (v, x) in col[j..].iter().zip(block[j..].iter_mut()) {
                *x -= scale * v;
            }
        }
        let dot: f64 = col[j..].iter().zip(&qty[j..]).map(|(v, x)| v * x).sum();
        let scale = dot / beta;
        for (v, x) in col[j..].iter().zip(qty[j..].iter_mut()) {
            *x -= scale * v;
        }
    }

    let condition = condition_from_diagonal(&rdiag);
    if !(condition <= threshold) {
        return Err(Error::RankDeficient { condition, threshold });
    }

    // back substitution: R beta = (Q^T y)[..k]
    let mut coefficients = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = qty[j];
        for l in (j + 1)..k {
            s -= r_entry(&a, &rdiag, n, j, l) * coefficients[l];
        }
        coefficients[j] = s / rdiag[j];
    }

    let sum_squared_residuals = qty[k..].iter().map(|v| v * v).sum();
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("least-squares coefficients"));
    }

    Ok(LinearSolution { coefficients, sum_squared_residuals, condition_diagnostic: condition })
}

/// Entry R[j, l] (j <= l) of the factor stored in the worked matrix.
fn r_entry(a: &[f64], rdiag: &[f64], n: usize, j: usize, l: usize) -> f64 {
    if j == l {
        rdiag[j]
    } else {
        a[l * n + j]
    }
}

fn condition_from_diagonal(rdiag: &[f64]) -> f64 {
    let mut max = 0.0f64;
    let mut min = f64::INFINITY;
    for &d in rdiag {
        let d = d.abs();
        max = max.max(d);
        min = min.min(d);
    }
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Paper-literal route: form the k-by-k normal equations and solve them by
/// LU with partial pivoting. The residual sum is recomputed directly from
/// the fitted coefficients rather than by the cancellation-prone identity.
fn normal_equations_lu(columns: &[&[f64]], y: &[f64], threshold: f64) -> Result<LinearSolution> {
    let n = y.len();
    let k = columns.len();

    // gram[j][l] = <col_j, col_l>, rhs[j] = <col_j, y>
    let mut gram = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for j in 0..k {
        for l in j..k {
            let dot: f64 = columns[j].iter().zip(columns[l]).map(|(a, b)| a * b).sum();
            gram[j][l] = dot;
            gram[l][j] = dot;
        }
        rhs[j] = columns[j].iter().zip(y).map(|(a, b)| a * b).sum();
    }

    let coefficients = lu_solve(&mut gram, &mut rhs, threshold)?;

    let mut sum_squared_residuals = 0.0;
    for i in 0..n {
        let mut fitted = 0.0;
        for (j, col) in columns.iter().enumerate() {
            fitted += coefficients[j] * col[i];
        }
        let r = y[i] - fitted;
        sum_squared_residuals += r * r;
    }

    // diagnostic from the pivoted U diagonal; comparable role to the QR
    // diagnostic although it reflects the squared conditioning
    let condition = condition_from_diagonal(
        &(0..k).map(|j| gram[j][j]).collect::<Vec<_>>(),
    );

    Ok(LinearSolution { coefficients, sum_squared_residuals, condition_diagnostic: condition })
}

/// In-place LU factorization with partial pivoting; returns the solution
/// and leaves U on and above the diagonal of `a`.
fn lu_solve(a: &mut [Vec<f64>], b: &mut [f64], threshold: f64) -> Result<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty pivot range");
        if pivot_row != col {
            a.swap(col, pivot_row);
            b.swap(col, pivot_row);
        }
        let pivot = a[col][col];
        if pivot == 0.0 {
            return Err(Error::RankDeficient { condition: f64::INFINITY, threshold });
        }
        for row in (col + 1)..k {
            let factor = a[row][col] / pivot;
            a[row][col] = 0.0;
            for l in (col + 1)..k {
                a[row][l] -= factor * a[col][l];
            }
            b[row] -= factor * b[col];
        }
    }

    let diag: Vec<f64> = (0..k).map(|j| a[j][j]).collect();
    let condition = condition_from_diagonal(&diag);
    if !(condition <= threshold) {
        return Err(Error::RankDeficient { condition, threshold });
    }

    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut s = b[row];
        for col in (row + 1)..k {
            s -= a[row][col] * x[col];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}
