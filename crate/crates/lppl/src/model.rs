//! Log-periodic power law model: evaluation in the cartesian and phase
//! parametrizations, conversions between them, hazard-rate diagnostics and
//! the stylized-constraint qualification of fitted parameters.
//!
//! The model describes the expected log-price of an asset in a bubble regime
//! as a power law diverging at a critical time `t_c`, decorated by
//! oscillations that accelerate as `t` approaches `t_c`:
//!
//! ```text
//! A + B(t_c-t)^m + C1(t_c-t)^m cos(omega ln(t_c-t)) + C2(t_c-t)^m sin(omega ln(t_c-t))
//! ```
//!
//! `(C1, C2)` absorb the oscillation phase, which keeps the function linear
//! in four of its seven parameters. The equivalent phase form carries the
//! amplitude `C` and phase `phi` explicitly.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible distance between an observation time and the
/// critical time, in trading days. Evaluation closer to the singularity
/// than this is rejected to keep `ln` and `powf` well defined.
pub const EPS_T: f64 = 1e-8;

/// Stylized-constraint bounds that qualify a fit as bubble-like:
/// `0.1 <= m <= 0.9`, `6 <= omega <= 13`, `|C| < 1`, `B < 0`.
pub mod bounds {
    pub const M_MIN: f64 = 0.1;
    pub const M_MAX: f64 = 0.9;
    pub const OMEGA_MIN: f64 = 6.0;
    pub const OMEGA_MAX: f64 = 13.0;
    pub const C_AMP_MAX: f64 = 1.0;

    /// True when `(m, omega)` lies inside the stylized box.
    pub fn inside_mw(m: f64, omega: f64) -> bool {
        (M_MIN..=M_MAX).contains(&m) && (OMEGA_MIN..=OMEGA_MAX).contains(&omega)
    }
}

/// Full parameter set in cartesian form: three nonlinear parameters
/// `(t_c, m, omega)` and four linear ones `(A, B, C1, C2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpplParams {
    pub t_c: f64,
    pub m: f64,
    pub omega: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
}

impl LpplParams {
    /// Oscillation amplitude `sqrt(C1^2 + C2^2)`.
    pub fn c_amplitude(&self) -> f64 {
        self.c1.hypot(self.c2)
    }

    /// Derived phase form of the same parameters.
    pub fn phase_view(&self) -> PhaseParams {
        let (c, phi) = cartesian_to_phase(self.c1, self.c2);
        PhaseParams {
            t_c: self.t_c,
            m: self.m,
            omega: self.omega,
            a: self.a,
            b: self.b,
            c,
            phi,
        }
    }
}

/// Parameter set in phase form, with oscillation amplitude `C >= 0` and
/// phase `phi` normalized to `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub t_c: f64,
    pub m: f64,
    pub omega: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub phi: f64,
}

impl PhaseParams {
    /// Builds a phase-form parameter set, normalizing `(c, phi)` so that
    /// `c >= 0` and `phi` lies in `[0, 2*pi)`.
    pub fn new(t_c: f64, m: f64, omega: f64, a: f64, b: f64, c: f64, phi: f64) -> Self {
        let (c, phi) = normalize_amplitude_phase(c, phi);
        Self { t_c, m, omega, a, b, c, phi }
    }

    /// Cartesian form of the same parameters.
    pub fn cartesian_view(&self) -> LpplParams {
        let (c1, c2) = phase_to_cartesian(self.c, self.phi);
        LpplParams {
            t_c: self.t_c,
            m: self.m,
            omega: self.omega,
            a: self.a,
            b: self.b,
            c1,
            c2,
        }
    }
}

/// Hazard-rate parameters. The hazard phase is independent of the
/// log-price phase and is taken as a separate input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardParams {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub omega: f64,
    pub t_c: f64,
    pub phi_h: f64,
}

/// One violated stylized bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundViolation {
    pub parameter: &'static str,
    pub value: f64,
    pub bound: String,
}

/// Outcome of checking fitted parameters against the stylized constraints.
/// `qualified` is true exactly when `violations` is empty; an unqualified
/// result means "no bubble regime detected", not a failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualificationReport {
    pub qualified: bool,
    pub violations: Vec<BoundViolation>,
}

fn time_to_critical(t_c: f64, t: f64) -> Result<f64> {
    let dt = t_c - t;
    // the negated comparison also rejects NaN
    if !(dt >= EPS_T) {
        return Err(Error::BeyondCriticalTime { t, t_c });
    }
    Ok(dt)
}

/// Evaluates the model at time `t` in cartesian form.
pub fn eval_lppl(params: &LpplParams, t: f64) -> Result<f64> {
    let dt = time_to_critical(params.t_c, t)?;
    let pow = dt.powf(params.m);
    let (sin, cos) = (params.omega * dt.ln()).sin_cos();
    Ok(params.a + pow * (params.b + params.c1 * cos + params.c2 * sin))
}

/// Evaluates the model at time `t` in phase form.
pub fn eval_lppl_phase(params: &PhaseParams, t: f64) -> Result<f64> {
    let dt = time_to_critical(params.t_c, t)?;
    let pow = dt.powf(params.m);
    let osc = (params.omega * dt.ln() - params.phi).cos();
    Ok(params.a + pow * (params.b + params.c * osc))
}

/// Converts oscillation amplitude and phase to the cartesian pair
/// `(C1, C2) = (C cos(phi), C sin(phi))`.
pub fn phase_to_cartesian(c: f64, phi: f64) -> (f64, f64) {
    (c * phi.cos(), c * phi.sin())
}

/// Inverse of [`phase_to_cartesian`]: `C = sqrt(C1^2 + C2^2)` and
/// `phi = atan2(C2, C1)` normalized to `[0, 2*pi)`. `(0, 0)` maps to
/// `(0, 0)` by convention.
pub fn cartesian_to_phase(c1: f64, c2: f64) -> (f64, f64) {
    let c = c1.hypot(c2);
    if c == 0.0 {
        return (0.0, 0.0);
    }
    (c, wrap_phase(c2.atan2(c1)))
}

/// Normalizes an `(amplitude, phase)` pair to `amplitude >= 0`,
/// `phase in [0, 2*pi)`.
pub fn normalize_amplitude_phase(c: f64, phi: f64) -> (f64, f64) {
    if c < 0.0 {
        (-c, wrap_phase(phi + std::f64::consts::PI))
    } else {
        (c, wrap_phase(phi))
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi % TAU;
    if p < 0.0 {
        p += TAU;
    }
    // rounding can land exactly on 2*pi after the correction
    if p >= TAU {
        p = 0.0;
    }
    p
}

/// Crash hazard rate `alpha (t_c-t)^(m-1) (1 + beta cos(omega ln(t_c-t) - phi_h))`.
/// Nonnegative for all `t < t_c` if and only if `|beta| <= 1`.
pub fn hazard_rate(params: &HazardParams, t: f64) -> Result<f64> {
    if params.alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "hazard scale alpha must be positive, got {}",
            params.alpha
        )));
    }
    let dt = time_to_critical(params.t_c, t)?;
    let osc = (params.omega * dt.ln() - params.phi_h).cos();
    Ok(params.alpha * dt.powf(params.m - 1.0) * (1.0 + params.beta * osc))
}

/// Relative hazard oscillation amplitude implied by fitted `(B, C, m, omega)`:
/// `beta = (C/B) sqrt(m^2 + omega^2) / m`. The common crash-size factor
/// cancels between the two amplitude relations.
pub fn implied_beta(b: f64, c: f64, m: f64, omega: f64) -> Result<f64> {
    if b == 0.0 {
        return Err(Error::InvalidParameter("implied_beta requires B != 0".into()));
    }
    if m == 0.0 {
        return Err(Error::InvalidParameter("implied_beta requires m != 0".into()));
    }
    Ok((c / b) * m.hypot(omega) / m)
}

/// Checks fitted parameters against the stylized constraints plus
/// `t_c > window_end`, reporting every violated bound.
pub fn qualify(params: &LpplParams, window_end: f64) -> QualificationReport {
    let mut violations = Vec::new();
    let mut check = |ok: bool, parameter: &'static str, value: f64, bound: String| {
        if !ok {
            violations.push(BoundViolation { parameter, value, bound });
        }
    };

    check(params.m >= bounds::M_MIN, "m", params.m, format!("below {}", bounds::M_MIN));
    check(params.m <= bounds::M_MAX, "m", params.m, format!("above {}", bounds::M_MAX));
    check(
        params.omega >= bounds::OMEGA_MIN,
        "omega",
        params.omega,
        format!("below {}", bounds::OMEGA_MIN),
    );
    check(
        params.omega <= bounds::OMEGA_MAX,
        "omega",
        params.omega,
        format!("above {}", bounds::OMEGA_MAX),
    );
    let c_amp = params.c_amplitude();
    check(c_amp < bounds::C_AMP_MAX, "C", c_amp, format!("not below {}", bounds::C_AMP_MAX));
    check(params.b < 0.0, "B", params.b, "not negative".to_string());
    check(
        params.t_c > window_end,
        "t_c",
        params.t_c,
        format!("not beyond window end {}", window_end),
    );

    QualificationReport { qualified: violations.is_empty(), violations }
}
