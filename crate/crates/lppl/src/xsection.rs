//! Cross-sections of the profiled cost surfaces: a grid of `F1` (or legacy
//! `S1`) values over one or two chosen axes with the remaining parameters
//! held fixed. The output is plot-ready data.

use serde::Serialize;

use crate::calibrate::{f1, legacy_s1, FitWindow};
use crate::data::PriceSeries;
use crate::error::{Error, Result};

/// A sweepable parameter of the cost surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Tc,
    M,
    Omega,
    Phi,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Tc => "t_c",
            Axis::M => "m",
            Axis::Omega => "omega",
            Axis::Phi => "phi",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "tc" | "t_c" => Ok(Axis::Tc),
            "m" => Ok(Axis::M),
            "omega" => Ok(Axis::Omega),
            "phi" => Ok(Axis::Phi),
            other => Err(Error::InvalidConfig(format!(
                "unknown axis {other:?}; expected tc, m, omega or phi"
            ))),
        }
    }
}

/// Uniform sweep of one axis.
#[derive(Debug, Clone, Copy)]
pub struct AxisRange {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl AxisRange {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.lo + step * i as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::InvalidConfig("axis needs at least one point".into()));
        }
        if self.points > 1 && !(self.lo < self.hi) {
            return Err(Error::InvalidConfig(format!(
                "axis {} range requires lo < hi, got {}..{}",
                self.axis.name(),
                self.lo,
                self.hi
            )));
        }
        Ok(())
    }
}

/// Values of the parameters that are not swept.
#[derive(Debug, Clone, Copy)]
pub struct FixedPoint {
    pub t_c: f64,
    pub m: f64,
    pub omega: f64,
    pub phi: f64,
}

/// Cross-section request: one or two axes, fixed values for the rest, and
/// the choice of surface.
#[derive(Debug, Clone)]
pub struct XSectionSpec {
    pub axes: Vec<AxisRange>,
    pub fixed: FixedPoint,
    /// Sweep the legacy cost (three slaved coefficients, explicit phase)
    /// instead of the reformulated one.
    pub legacy: bool,
}

/// Evaluated cross-section. `cost` is row-major over the axis values:
/// index `i * n2 + j` for two axes, `i` for one. Failed evaluations are
/// recorded as NaN.
#[derive(Debug, Clone, Serialize)]
pub struct XSectionGrid {
    pub legacy: bool,
    pub axes: Vec<&'static str>,
    pub axis_values: Vec<Vec<f64>>,
    pub cost: Vec<f64>,
}

/// Evaluates the requested cost surface over the grid.
pub fn cross_section(
    series: &PriceSeries,
    window: FitWindow,
    spec: &XSectionSpec,
) -> Result<XSectionGrid> {
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        return Err(Error::InvalidConfig("cross-section takes one or two axes".into()));
    }
    if spec.axes.len() == 2 && spec.axes[0].axis == spec.axes[1].axis {
        return Err(Error::InvalidConfig("cross-section axes must differ".into()));
    }
    if !spec.legacy && spec.axes.iter().any(|r| r.axis == Axis::Phi) {
        return Err(Error::InvalidConfig(
            "the phi axis only exists on the legacy cost surface".into(),
        ));
    }
    for range in &spec.axes {
        range.validate()?;
    }

    let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(AxisRange::values).collect();
    let evaluate = |overrides: &[(Axis, f64)]| -> f64 {
        let mut point = spec.fixed;
        for &(axis, value) in overrides {
            match axis {
                Axis::Tc => point.t_c = value,
                Axis::M => point.m = value,
                Axis::Omega => point.omega = value,
                Axis::Phi => point.phi = value,
            }
        }
        let result = if spec.legacy {
            legacy_s1(series, window, point.t_c, point.m, point.omega, point.phi)
        } else {
            f1(series, window, point.t_c, point.m, point.omega)
        };
        result.unwrap_or(f64::NAN)
    };

    let mut cost = Vec::new();
    match axis_values.len() {
        1 => {
            for &v in &axis_values[0] {
                cost.push(evaluate(&[(spec.axes[0].axis, v)]));
            }
        }
        _ => {
            for &v1 in &axis_values[0] {
                for &v2 in &axis_values[1] {
                    cost.push(evaluate(&[(spec.axes[0].axis, v1), (spec.axes[1].axis, v2)]));
                }
            }
        }
    }

    Ok(XSectionGrid {
        legacy: spec.legacy,
        axes: spec.axes.iter().map(|r| r.axis.name()).collect(),
        axis_values,
        cost,
    })
}

impl XSectionGrid {
    /// Number of interior grid-local minima: cells strictly below every
    /// axis neighbor (two in 1-D, four in 2-D). Failed cells count as
    /// infinitely expensive neighbors and are never minima themselves.
    pub fn local_minima_count(&self) -> usize {
        let finite = |v: f64| if v.is_finite() { v } else { f64::INFINITY };
        match self.axis_values.len() {
            1 => {
                let n = self.cost.len();
                (1..n.saturating_sub(1))
                    .filter(|&i| {
                        self.cost[i].is_finite()
                            && self.cost[i] < finite(self.cost[i - 1])
                            && self.cost[i] < finite(self.cost[i + 1])
                    })
                    .count()
            }
            _ => {
                let n1 = self.axis_values[0].len();
                let n2 = self.axis_values[1].len();
                let at = |i: usize, j: usize| self.cost[i * n2 + j];
                let mut count = 0;
                for i in 1..n1.saturating_sub(1) {
                    for j in 1..n2.saturating_sub(1) {
                        let c = at(i, j);
                        if c.is_finite()
                            && c < finite(at(i - 1, j))
                            && c < finite(at(i + 1, j))
                            && c < finite(at(i, j - 1))
                            && c < finite(at(i, j + 1))
                        {
                            count += 1;
                        }
                    }
                }
                count
            }
        }
    }
}
