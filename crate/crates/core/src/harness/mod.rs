//! Study drivers: convergence ladders, the linearized-vs-L1 comparison and
//! coefficient dumps.
//!
//! Independent runs of a ladder study are spread over the rayon pool; each
//! run is single-threaded and rows are reported in ladder order. The
//! comparison runs serially so that its timings are not skewed by sharing
//! cores.

pub mod config;
pub mod report;

use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::coeffs::{CoefficientTable, FractionalParams};
use crate::error::{Error, Result};
use crate::problems::{self, Case, ProblemSpec};
use crate::reference::{run_l1, L1Config, NonlinearityMode};
use crate::schemes::{run, RunOutput, SchemeConfig, Variant};

pub use report::{ConvergenceReport, Direction, Format, Measurement, ReportRow};

/// Which problem a study solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Case(Case),
    /// Manufactured solution with f(u) = (u² + 5)/2.
    Quadratic,
    /// Manufactured solution with f ≡ 0.
    Linear,
    /// Trivial problem with solution zero.
    Zero,
}

impl ProblemKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(ProblemKind::Linear),
            "quadratic" => Ok(ProblemKind::Quadratic),
            "zero" => Ok(ProblemKind::Zero),
            other => {
                let id: u32 = other
                    .parse()
                    .map_err(|_| Error::Config(format!("unknown case '{other}', expected 1, 2, 3, linear or zero")))?;
                Ok(ProblemKind::Case(Case::from_id(id)?))
            }
        }
    }

    pub fn build(self, alpha: f64) -> Result<ProblemSpec> {
        match self {
            ProblemKind::Case(c) => problems::manufactured_case(c, alpha),
            ProblemKind::Quadratic => problems::manufactured_quadratic(alpha),
            ProblemKind::Linear => problems::manufactured_linear(alpha),
            ProblemKind::Zero => {
                if !(alpha > 1.0 && alpha < 2.0) {
                    return Err(Error::InvalidOrder(alpha));
                }
                Ok(ProblemSpec {
                    alpha,
                    ..problems::zero_problem()
                })
            }
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::Case(c) => write!(f, "{c}"),
            ProblemKind::Quadratic => f.write_str("quadratic"),
            ProblemKind::Linear => f.write_str("linear"),
            ProblemKind::Zero => f.write_str("zero"),
        }
    }
}

/// Time integrator used for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Linearized(Variant),
    L1(NonlinearityMode),
}

impl Engine {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "l1-central" | "l1" => Ok(Engine::L1(NonlinearityMode::CentralIterative)),
            "l1-lagged" => Ok(Engine::L1(NonlinearityMode::Lagged)),
            other => Variant::parse(other)
                .map(Engine::Linearized)
                .map_err(|_| Error::Config(format!("unknown variant '{other}', expected std, compact, l1-central or l1-lagged"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Engine::Linearized(v) => v.label(),
            Engine::L1(NonlinearityMode::CentralIterative) => "l1-central",
            Engine::L1(NonlinearityMode::Lagged) => "l1-lagged",
        }
    }
}

/// Integer count of `step`-sized pieces in `length`, rejecting steps that do
/// not divide it.
pub fn count_for(length: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    let n = (length / step).round();
    if n < 1.0 || (n * step - length).abs() > 1e-9 * length {
        return Err(Error::InvalidParameter(format!("step {step} does not divide length {length}")));
    }
    Ok(n as usize)
}

/// `start, start/2, …` with `halvings` halvings.
pub fn halving_ladder(start: f64, halvings: usize) -> Vec<f64> {
    (0..=halvings).map(|k| start / (1u64 << k) as f64).collect()
}

/// Solves `problem` on M = (b−a)/h, N = T/τ with the given engine.
pub fn solve(problem: &ProblemSpec, engine: Engine, h: f64, tau: f64) -> Result<RunOutput> {
    let m = count_for(problem.b - problem.a, h)?;
    let n = count_for(problem.t_final, tau)?;
    match engine {
        Engine::Linearized(variant) => run(&SchemeConfig::uniform(problem.clone(), m, n, variant)?),
        Engine::L1(mode) => Ok(run_l1(&L1Config::uniform(problem.clone(), m, n, mode)?)?.output),
    }
}

/// Runs one discretization and reduces it to a report row.
pub fn measure(problem: &ProblemSpec, engine: Engine, h: f64, tau: f64) -> Result<Measurement> {
    let out = solve(problem, engine, h, tau)?;
    let e2 = out
        .e2
        .ok_or_else(|| Error::InvalidParameter(format!("problem '{}' has no exact solution", problem.label)))?;
    Ok(Measurement {
        tau,
        h,
        e2,
        wall_time_s: out.wall_time.as_secs_f64(),
        max_residual: out.max_residual(),
        residual_tol: out.residual_tolerance(),
    })
}

#[derive(Debug, Clone)]
pub struct StudyPlan {
    pub problem: ProblemKind,
    pub alphas: Vec<f64>,
    pub engine: Engine,
    pub direction: Direction,
    /// h for a time study, τ for a space study.
    pub fixed_step: f64,
    /// τ values for a time study, h values for a space study.
    pub ladder: Vec<f64>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl StudyPlan {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::Config("at least one alpha is required".into()));
        }
        if self.ladder.is_empty() {
            return Err(Error::Config("refinement ladder is empty".into()));
        }
        for pair in self.ladder.windows(2) {
            if (pair[1] - 0.5 * pair[0]).abs() > 1e-12 * pair[0] {
                return Err(Error::Config(format!(
                    "ladder must halve at every entry, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        for &alpha in &self.alphas {
            let p = self.problem.build(alpha)?;
            let (space, time) = match self.direction {
                Direction::TimeRefinement => (vec![self.fixed_step], self.ladder.clone()),
                Direction::SpaceRefinement => (self.ladder.clone(), vec![self.fixed_step]),
            };
            for h in space {
                count_for(p.b - p.a, h)?;
            }
            for tau in time {
                count_for(p.t_final, tau)?;
            }
        }
        Ok(())
    }

    fn steps_of(&self, entry: f64) -> (f64, f64) {
        match self.direction {
            Direction::TimeRefinement => (self.fixed_step, entry),
            Direction::SpaceRefinement => (entry, self.fixed_step),
        }
    }
}

/// A study that stopped early: the rows completed before the first failing
/// run, and that run's error.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct StudyFailure {
    pub partial: Vec<ConvergenceReport>,
    #[source]
    pub error: Error,
}

impl From<Error> for StudyFailure {
    fn from(error: Error) -> Self {
        Self {
            partial: Vec::new(),
            error,
        }
    }
}

fn run_study(plan: &StudyPlan, direction: Direction) -> std::result::Result<Vec<ConvergenceReport>, StudyFailure> {
    if plan.direction != direction {
        return Err(Error::Config(format!("plan direction is {:?}, expected {direction:?}", plan.direction)).into());
    }
    plan.validate()?;

    let problems: Vec<ProblemSpec> = plan.alphas.iter().map(|&a| plan.problem.build(a)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, f64)> = (0..problems.len())
        .flat_map(|i| plan.ladder.iter().map(move |&s| (i, s)))
        .collect();
    let results: Vec<Result<Measurement>> = jobs
        .par_iter()
        .map(|&(i, entry)| {
            let (h, tau) = plan.steps_of(entry);
            measure(&problems[i], plan.engine, h, tau)
        })
        .collect();

    let mut reports = Vec::with_capacity(problems.len());
    let mut results = results.into_iter();
    for &alpha in &plan.alphas {
        let mut rep = ConvergenceReport::new(alpha, plan.problem.to_string(), plan.engine.label(), direction);
        for _ in &plan.ladder {
            match results.next().expect("one result per job") {
                Ok(m) => rep.push(m),
                Err(error) => {
                    reports.push(rep);
                    return Err(StudyFailure {
                        partial: reports,
                        error,
                    });
                }
            }
        }
        reports.push(rep);
    }
    Ok(reports)
}

/// One report per α with E2 and Rate1 along a τ ladder at fixed h.
pub fn run_time_study(plan: &StudyPlan) -> std::result::Result<Vec<ConvergenceReport>, StudyFailure> {
    run_study(plan, Direction::TimeRefinement)
}

/// One report per α with E2 and Rate2 along an h ladder at fixed τ.
pub fn run_space_study(plan: &StudyPlan) -> std::result::Result<Vec<ConvergenceReport>, StudyFailure> {
    run_study(plan, Direction::SpaceRefinement)
}

#[derive(Debug, Clone)]
pub struct ComparisonPlan {
    pub problem: ProblemKind,
    pub alpha: f64,
    pub h: f64,
    pub ladder: Vec<f64>,
    pub variant: Variant,
    pub mode: NonlinearityMode,
    /// Each run is repeated and the fastest wall time kept.
    pub repeats: usize,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub linearized: ConvergenceReport,
    pub reference: ConvergenceReport,
}

impl Comparison {
    /// Per-row verdict on which engine finished first.
    pub fn summary(&self) -> Vec<String> {
        self.linearized
            .rows
            .iter()
            .zip(&self.reference.rows)
            .map(|(lin, l1)| {
                let (winner, fast, slow) = if lin.wall_time_s < l1.wall_time_s {
                    (self.linearized.variant.as_str(), lin.wall_time_s, l1.wall_time_s)
                } else {
                    (self.reference.variant.as_str(), l1.wall_time_s, lin.wall_time_s)
                };
                format!(
                    "tau={}: {winner} faster ({:.3} ms vs {:.3} ms)",
                    lin.tau,
                    fast * 1e3,
                    slow * 1e3
                )
            })
            .collect()
    }

    pub fn linearized_always_faster(&self) -> bool {
        self.linearized.rows.len() == self.reference.rows.len()
            && self
                .linearized
                .rows
                .iter()
                .zip(&self.reference.rows)
                .all(|(lin, l1)| lin.wall_time_s < l1.wall_time_s)
    }

    pub fn reports(&self) -> [ConvergenceReport; 2] {
        [self.linearized.clone(), self.reference.clone()]
    }
}

fn fastest(problem: &ProblemSpec, engine: Engine, h: f64, tau: f64, repeats: usize) -> Result<Measurement> {
    let mut best = measure(problem, engine, h, tau)?;
    for _ in 1..repeats {
        let m = measure(problem, engine, h, tau)?;
        best.wall_time_s = best.wall_time_s.min(m.wall_time_s);
    }
    Ok(best)
}

/// Linearized scheme against the L1 scheme on a shared τ ladder, run
/// serially.
pub fn run_comparison(plan: &ComparisonPlan) -> std::result::Result<Comparison, StudyFailure> {
    let study = StudyPlan {
        problem: plan.problem,
        alphas: vec![plan.alpha],
        engine: Engine::Linearized(plan.variant),
        direction: Direction::TimeRefinement,
        fixed_step: plan.h,
        ladder: plan.ladder.clone(),
        output: None,
        format: Format::Csv,
    };
    study.validate()?;
    let problem = plan.problem.build(plan.alpha)?;
    let lin_engine = Engine::Linearized(plan.variant);
    let l1_engine = Engine::L1(plan.mode);
    let label = plan.problem.to_string();
    let mut linearized = ConvergenceReport::new(plan.alpha, label.clone(), lin_engine.label(), Direction::TimeRefinement);
    let mut reference = ConvergenceReport::new(plan.alpha, label, l1_engine.label(), Direction::TimeRefinement);
    let repeats = plan.repeats.max(1);
    for &tau in &plan.ladder {
        let pair = fastest(&problem, lin_engine, plan.h, tau, repeats)
            .and_then(|lin| Ok((lin, fastest(&problem, l1_engine, plan.h, tau, repeats)?)));
        match pair {
            Ok((lin, l1)) => {
                linearized.push(lin);
                reference.push(l1);
            }
            Err(error) => {
                return Err(StudyFailure {
                    partial: vec![linearized, reference],
                    error,
                })
            }
        }
    }
    Ok(Comparison { linearized, reference })
}

/// Rows (k, c_k^{(n+1)}, d_k^{(n+1)}) for k = 0..=n.
pub fn coefficient_rows(alpha: f64, tau: f64, steps: usize, level: usize) -> Result<Vec<(usize, f64, f64)>> {
    if level >= steps {
        return Err(Error::InvalidParameter(format!("level {level} must be below the step count {steps}")));
    }
    let table = CoefficientTable::new(FractionalParams::new(alpha, tau, steps)?)?;
    Ok((0..=level).map(|k| (k, table.c(k, level), table.d(k, level))).collect())
}

pub fn render_coefficients(rows: &[(usize, f64, f64)]) -> String {
    let mut out = String::from("k,c,d\n");
    for (k, c, d) in rows {
        out.push_str(&format!("{k},{c},{d}\n"));
    }
    out
}
