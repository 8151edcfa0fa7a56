//! Convergence reports and their CSV / markdown renderings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "alpha,case,variant,tau,h,E2,rate,wall_time_s";

/// Placeholder for an undefined rate in markdown tables.
pub const UNDEFINED_RATE: &str = "∗";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(Error::Config(format!("unknown format '{other}', expected 'csv' or 'md'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    TimeRefinement,
    SpaceRefinement,
}

impl Direction {
    pub fn rate_label(self) -> &'static str {
        match self {
            Direction::TimeRefinement => "Rate1",
            Direction::SpaceRefinement => "Rate2",
        }
    }
}

/// Outcome of a single solver run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub tau: f64,
    pub h: f64,
    pub e2: f64,
    pub wall_time_s: f64,
    /// Largest per-step residual of the discrete equations.
    pub max_residual: f64,
    pub residual_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub tau: f64,
    pub h: f64,
    pub e2: f64,
    /// log2 of the error ratio to the previous row; `None` on the first row
    /// or when either error vanishes.
    pub rate: Option<f64>,
    pub wall_time_s: f64,
    pub max_residual: f64,
    pub residual_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub alpha: f64,
    pub case: String,
    pub variant: String,
    pub direction: Direction,
    pub version: String,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    pub fn new(alpha: f64, case: impl Into<String>, variant: impl Into<String>, direction: Direction) -> Self {
        Self {
            alpha,
            case: case.into(),
            variant: variant.into(),
            direction,
            version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
            rows: Vec::new(),
        }
    }

    /// Appends a row, deriving its rate from the previous row.
    pub fn push(&mut self, m: Measurement) {
        let rate = self.rows.last().and_then(|prev| rate(prev.e2, m.e2));
        self.rows.push(ReportRow {
            tau: m.tau,
            h: m.h,
            e2: m.e2,
            rate,
            wall_time_s: m.wall_time_s,
            max_residual: m.max_residual,
            residual_tol: m.residual_tol,
        });
    }

    /// True when every run satisfied its discrete equations to tolerance.
    pub fn residuals_ok(&self) -> bool {
        self.rows.iter().all(|r| r.max_residual <= r.residual_tol)
    }

    pub fn e2_column(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.e2).collect()
    }

    pub fn rate_column(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.rate).collect()
    }
}

/// log2(coarse / fine), undefined unless both errors are positive and finite.
pub fn rate(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0 && coarse.is_finite() && fine.is_finite()).then(|| (coarse / fine).log2())
}

/// Scientific notation with a four-digit mantissa fraction and a two-digit
/// signed exponent, e.g. `2.5994e-03`.
pub fn sci(x: f64) -> String {
    if x == 0.0 {
        return "0.0000e+00".into();
    }
    let s = format!("{x:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn step_label(x: f64) -> String {
    let inv = 1.0 / x;
    if (inv - inv.round()).abs() < 1e-9 * inv {
        format!("1/{}", inv.round() as u64)
    } else {
        format!("{x}")
    }
}

pub fn render_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for rep in reports {
        for row in &rep.rows {
            let rate = row.rate.map_or_else(|| "*".to_string(), |r| r.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                rep.alpha, rep.case, rep.variant, row.tau, row.h, row.e2, rate, row.wall_time_s
            );
        }
    }
    out
}

pub fn render_markdown(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    for rep in reports {
        let (step_name, fixed) = match rep.direction {
            Direction::TimeRefinement => ("τ", rep.rows.first().map(|r| format!("h = {}", step_label(r.h)))),
            Direction::SpaceRefinement => ("h", rep.rows.first().map(|r| format!("τ = {}", step_label(r.tau)))),
        };
        let _ = writeln!(
            out,
            "### case {}, α = {}, {}{}\n",
            rep.case,
            rep.alpha,
            rep.variant,
            fixed.map(|f| format!(", {f}")).unwrap_or_default()
        );
        let _ = writeln!(out, "| {step_name} | E2(τ,h) | {} | CPU(s) |", rep.direction.rate_label());
        out.push_str("|---|---|---|---|\n");
        for row in &rep.rows {
            let step = match rep.direction {
                Direction::TimeRefinement => row.tau,
                Direction::SpaceRefinement => row.h,
            };
            let rate = row.rate.map_or_else(|| UNDEFINED_RATE.to_string(), |r| format!("{r:.4}"));
            let _ = writeln!(
                out,
                "| {} | {} | {} | {:.3} |",
                step_label(step),
                sci(row.e2),
                rate,
                row.wall_time_s
            );
        }
        let _ = writeln!(out, "\n_{}_\n", rep.version);
    }
    out
}

pub fn render(reports: &[ConvergenceReport], format: Format) -> String {
    match format {
        Format::Csv => render_csv(reports),
        Format::Markdown => render_markdown(reports),
    }
}

/// Writes the rendered reports to `path`.
pub fn emit(reports: &[ConvergenceReport], format: Format, path: &Path) -> Result<()> {
    fs::write(path, render(reports, format))?;
    Ok(())
}
