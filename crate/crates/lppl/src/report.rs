//! Deterministic rendering of result types: JSON with struct-order fields
//! and CSV tables, both with floating-point values fixed at 12 significant
//! digits so identical runs produce byte-identical artifacts.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::calibrate::{FitResult, ScanReport, TcProfile};
use crate::xsection::XSectionGrid;

/// Formats a finite float with 12 significant digits.
pub fn fmt_f64(value: f64) -> String {
    if value == 0.0 {
        return "0".into();
    }
    format!("{value:.11e}")
}

fn csv_f64(value: f64) -> String {
    if value.is_finite() {
        fmt_f64(value)
    } else {
        "nan".into()
    }
}

struct SigFigFormatter;

impl Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(fmt_f64(value).as_bytes())
    }
}

/// Serializes any result type to JSON with the fixed float formatting.
/// Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value.serialize(&mut serializer).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("serializer emits UTF-8")
}

/// Key/value CSV summary of a fit.
pub fn fit_to_csv(result: &FitResult) -> String {
    let p = &result.params;
    let phase = &result.phase_view;
    let mut rows = vec![
        ("t_c", fmt_f64(p.t_c)),
        ("m", fmt_f64(p.m)),
        ("omega", fmt_f64(p.omega)),
        ("A", fmt_f64(p.a)),
        ("B", fmt_f64(p.b)),
        ("C1", fmt_f64(p.c1)),
        ("C2", fmt_f64(p.c2)),
        ("C", fmt_f64(phase.c)),
        ("phi", fmt_f64(phase.phi)),
        ("cost", fmt_f64(result.cost)),
        ("qualified", result.qualification.qualified.to_string()),
        ("minima_count", result.minima_count.to_string()),
        ("n_objective_evals", result.n_objective_evals.to_string()),
    ];
    for violation in &result.qualification.violations {
        rows.push(("violation", format!("{} {}", violation.parameter, violation.bound)));
    }
    let mut out = String::from("key,value\n");
    for (key, value) in rows {
        out.push_str(key);
        out.push(',');
        out.push_str(&value);
        out.push('\n');
    }
    out
}

/// Critical-time profile as a CSV table, one row per grid point.
pub fn profile_to_csv(profile: &TcProfile) -> String {
    let mut out = String::from("t_c,f2,m_hat,omega_hat,qualified,minima_count,is_local_min\n");
    for (i, point) in profile.points.iter().enumerate() {
        let is_min = profile.local_minima.contains(&i);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_f64(point.t_c),
            csv_f64(point.f2),
            csv_f64(point.m_hat),
            csv_f64(point.omega_hat),
            point.qualified,
            point.minima_count,
            is_min
        ));
    }
    out
}

/// Cross-section grid as CSV rows of axis values and cost.
pub fn xsection_to_csv(grid: &XSectionGrid) -> String {
    let mut out = String::new();
    match grid.axis_values.len() {
        1 => {
            out.push_str(&format!("{},cost\n", grid.axes[0]));
            for (v, c) in grid.axis_values[0].iter().zip(&grid.cost) {
                out.push_str(&format!("{},{}\n", csv_f64(*v), csv_f64(*c)));
            }
        }
        _ => {
            out.push_str(&format!("{},{},cost\n", grid.axes[0], grid.axes[1]));
            let n2 = grid.axis_values[1].len();
            for (i, v1) in grid.axis_values[0].iter().enumerate() {
                for (j, v2) in grid.axis_values[1].iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        csv_f64(*v1),
                        csv_f64(*v2),
                        csv_f64(grid.cost[i * n2 + j])
                    ));
                }
            }
        }
    }
    out
}

/// Rolling-scan report as a CSV table, one row per window.
pub fn scan_to_csv(report: &ScanReport) -> String {
    let mut out = String::from(
        "start_index,end_index,start_date,end_date,minima_count,qualified,best_t_c,best_m,best_omega,best_f2\n",
    );
    for w in &report.windows {
        let best = match &w.best {
            Some(b) => {
                format!("{},{},{},{}", csv_f64(b.t_c), csv_f64(b.m), csv_f64(b.omega), csv_f64(b.f2))
            }
            None => ",,,".into(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            w.start_index, w.end_index, w.start_date, w.end_date, w.minima_count, w.qualified, best
        ));
    }
    out
}
