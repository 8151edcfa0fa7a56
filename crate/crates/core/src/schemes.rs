//! The linearized second-order scheme and its compact fourth-order variant.
//!
//! For n ≥ 1 the new level u^{n+1} solves
//!
//! ```text
//!   𝒜_c [ Σ_{k=1}^{n} d_{n−k}^{(n+1)} ( (2−2θ)(δ_t u^{k+1/2} − δ_t u^{k−1/2})
//!                                      + (2θ−1)(δ_t̂ u^k − δ_t̂ u^{k−1}) )
//!         + d_n^{(n+1)} (2−2θ)(δ_t u^{1/2} − ψ) ]
//!     = δ_x² ((w^{n+1} + w^n)/2) − 𝒜_c f(u^n) + 𝒜_c p^n
//! ```
//!
//! with 𝒜_c the identity (standard variant) or the compact operator 𝒜, and
//!
//! ```text
//!   w^k = (3/2−θ)[θu^k + (1−θ)u^{k−1}] + (θ−1/2)[θu^{k−1} + (1−θ)u^{k−2}],
//! ```
//!
//! where the missing level is u^{−1} := u^1 − 2τψ (so that δ_t̂ u^0 = ψ).
//!
//! Writing V^{k+1−θ} = (2−2θ)δ_t u^{k+1/2} + (2θ−1)δ_t̂ u^k and V^0 = ψ, the
//! bracket is Σ_{k=0}^{n} d_{n−k}^{(n+1)} (V^{k+1−θ} − V^{k−θ}). Only the k = n
//! increment involves u^{n+1}, with coefficient
//! d_0^{(n+1)} [(2−2θ)/τ + (2θ−1)/(2τ)] = d_0^{(n+1)} (3−2θ)/(2τ);
//! w^{n+1} carries u^{n+1} with weight θ(3/2−θ). Collecting terms gives the
//! tridiagonal operator
//!
//! ```text
//!   d_0^{(n+1)} (3−2θ)/(2τ) · 𝒜_c − θ(3/2−θ)/2 · δ_x².
//! ```
//!
//! Every accepted level is re-inserted into the displayed equation by
//! [`discrete_residual`], which works from raw differences of the history and
//! shares no code with the assembly path.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::coeffs::{CoefficientTable, FractionalParams};
use crate::error::{Error, Result};
use crate::mesh::{self, GridFunction, SpaceGrid};
use crate::problems::{self, Case, ProblemSpec};
use crate::trisolve::TridiagonalSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Second-order central differences in space.
    Standard,
    /// Fourth-order compact differences in space.
    Compact,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Standard => "std",
            Variant::Compact => "compact",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "std" | "standard" => Ok(Variant::Standard),
            "compact" => Ok(Variant::Compact),
            other => Err(Error::Config(format!(
                "unknown variant '{other}', expected 'std' or 'compact'"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub params: FractionalParams,
    pub grid: SpaceGrid,
    pub problem: ProblemSpec,
    pub variant: Variant,
    table: Arc<CoefficientTable>,
}

impl SchemeConfig {
    pub fn new(
        params: FractionalParams,
        grid: SpaceGrid,
        problem: ProblemSpec,
        variant: Variant,
    ) -> Result<Self> {
        validate_setup(&params, &grid, &problem)?;
        let table = Arc::new(CoefficientTable::new(params)?);
        Ok(Self {
            params,
            grid,
            problem,
            variant,
            table,
        })
    }

    /// Uniform discretization of `problem` with M = `intervals` and N = `steps`.
    pub fn uniform(problem: ProblemSpec, intervals: usize, steps: usize, variant: Variant) -> Result<Self> {
        let params = FractionalParams::uniform(problem.alpha, problem.t_final, steps)?;
        let grid = SpaceGrid::new(problem.a, problem.b, intervals)?;
        Self::new(params, grid, problem, variant)
    }

    pub fn manufactured(case: Case, alpha: f64, intervals: usize, steps: usize, variant: Variant) -> Result<Self> {
        Self::uniform(problems::manufactured_case(case, alpha)?, intervals, steps, variant)
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }
}

pub(crate) fn validate_setup(params: &FractionalParams, grid: &SpaceGrid, problem: &ProblemSpec) -> Result<()> {
    let t_final = problem.t_final;
    if ((params.final_time() - t_final) / t_final).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "τN = {} does not match the final time T = {t_final}",
            params.final_time()
        )));
    }
    if (params.alpha() - problem.alpha).abs() > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "scheme order α = {} differs from the problem's α = {}",
            params.alpha(),
            problem.alpha
        )));
    }
    if grid.left() != problem.a || grid.right() != problem.b {
        return Err(Error::InvalidParameter(format!(
            "grid [{}, {}] does not cover the problem domain [{}, {}]",
            grid.left(),
            grid.right(),
            problem.a,
            problem.b
        )));
    }
    Ok(())
}

/// Solution history u^0..u^n and the initial velocity.
#[derive(Debug, Clone)]
pub struct SchemeState {
    history: Vec<GridFunction>,
    psi: GridFunction,
    // increments[k] = V^{k+1−θ} − V^{k−θ}, V^0 = ψ
    increments: Vec<Vec<f64>>,
    last_velocity: Vec<f64>,
}

impl SchemeState {
    /// u^0 = φ and v^0 = ψ sampled at every node.
    pub fn initial(cfg: &SchemeConfig) -> Self {
        let psi = GridFunction::sample(cfg.grid, |x| (cfg.problem.psi)(x));
        Self {
            history: vec![GridFunction::sample(cfg.grid, |x| (cfg.problem.phi)(x))],
            last_velocity: psi.values().to_vec(),
            psi,
            increments: Vec::new(),
        }
    }

    /// Index n of the newest level.
    pub fn n(&self) -> usize {
        self.history.len() - 1
    }

    pub fn history(&self) -> &[GridFunction] {
        &self.history
    }

    pub fn into_history(self) -> Vec<GridFunction> {
        self.history
    }

    pub fn current(&self) -> &GridFunction {
        self.history.last().expect("history is never empty")
    }

    pub fn psi(&self) -> &GridFunction {
        &self.psi
    }

    fn push(&mut self, theta: f64, tau: f64, next: GridFunction) {
        let n = self.n();
        let un = self.history[n].values();
        let u1 = next.values();
        let velocity: Vec<f64> = if n == 0 {
            let psi = self.psi.values();
            (0..u1.len())
                .map(|i| (2.0 - 2.0 * theta) * (u1[i] - un[i]) / tau + (2.0 * theta - 1.0) * psi[i])
                .collect()
        } else {
            let um = self.history[n - 1].values();
            (0..u1.len())
                .map(|i| {
                    (2.0 - 2.0 * theta) * (u1[i] - un[i]) / tau
                        + (2.0 * theta - 1.0) * (u1[i] - um[i]) / (2.0 * tau)
                })
                .collect()
        };
        let inc = velocity
            .iter()
            .zip(&self.last_velocity)
            .map(|(v, w)| v - w)
            .collect();
        self.increments.push(inc);
        self.last_velocity = velocity;
        self.history.push(next);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Index of the level that was computed.
    pub n: usize,
    /// Max-norm residual of the displayed discrete equation at the accepted level.
    pub residual_inf: f64,
    pub assembly_time: Duration,
    pub solve_time: Duration,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub history: Vec<GridFunction>,
    /// max_n ‖u^n − u(·, t_n)‖, when an exact solution is known.
    pub e2: Option<f64>,
    pub reports: Vec<StepReport>,
    /// Time spent advancing the solution (assembly and solves, no verification).
    pub wall_time: Duration,
    /// max |p| over all nodes and time levels visited.
    pub source_sup: f64,
}

impl RunOutput {
    pub fn max_residual(&self) -> f64 {
        self.reports.iter().fold(0.0, |m, r| m.max(r.residual_inf))
    }

    /// Residual tolerance 1e−10·max(1, ‖p‖_∞) for this run.
    pub fn residual_tolerance(&self) -> f64 {
        1e-10 * self.source_sup.max(1.0)
    }

    pub fn final_level(&self) -> &GridFunction {
        self.history.last().expect("history is never empty")
    }
}

fn sample_source(problem: &ProblemSpec, grid: &SpaceGrid, t: f64) -> Vec<f64> {
    grid.nodes().map(|x| (problem.source)(x, t)).collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Explicit first level:
/// u¹ = φ + τψ + τ/(2d_0^{(1)}) [φ_xx + θτψ_xx − f(φ + θτψ) + p(·, θτ)] on interior nodes.
pub fn first_step(cfg: &SchemeConfig, state: &SchemeState) -> Result<GridFunction> {
    if state.n() != 0 {
        return Err(Error::InvalidParameter(format!(
            "first_step needs a state at n = 0, got n = {}",
            state.n()
        )));
    }
    let theta = cfg.params.theta();
    let tau = cfg.params.tau();
    let d0 = cfg.table.d(0, 0);
    let pr = &cfg.problem;
    let t_theta = theta * tau;
    let phi = state.history[0].values();
    let psi = state.psi.values();
    let m = cfg.grid.intervals();
    let mut u1 = GridFunction::zeros(cfg.grid);
    let out = u1.values_mut();
    for i in 1..m {
        let x = cfg.grid.node(i);
        let forcing = (pr.phi_xx)(x) + t_theta * (pr.psi_xx)(x) - (pr.f)(phi[i] + t_theta * psi[i])
            + (pr.source)(x, t_theta);
        out[i] = phi[i] + tau * psi[i] + tau / (2.0 * d0) * forcing;
    }
    Ok(u1)
}

fn level_with_ghost<'a>(state_hist: &'a [GridFunction], ghost: &'a [f64], k: isize) -> &'a [f64] {
    if k < 0 {
        ghost
    } else {
        state_hist[k as usize].values()
    }
}

/// Tridiagonal system for u^{n+1}, n ≥ 1, on interior nodes 1..M−1.
pub fn assemble_step(cfg: &SchemeConfig, state: &SchemeState) -> Result<TridiagonalSystem> {
    let n = state.n();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "assemble_step needs n >= 1; the first level is explicit".into(),
        ));
    }
    let theta = cfg.params.theta();
    let tau = cfg.params.tau();
    let h = cfg.grid.h();
    let len = cfg.grid.len();
    let m = cfg.grid.intervals();
    let table = &cfg.table;

    let un = state.history[n].values();
    let um = state.history[n - 1].values();

    // Time term with u^{n+1} = 0.
    let mut time_known = vec![0.0; len];
    for (k, inc) in state.increments.iter().enumerate() {
        let dk = table.d(n - k, n);
        for (t, v) in time_known.iter_mut().zip(inc) {
            *t += dk * v;
        }
    }
    let d0 = table.d(0, n);
    for i in 0..len {
        let v_known = -(2.0 - 2.0 * theta) * un[i] / tau - (2.0 * theta - 1.0) * um[i] / (2.0 * tau);
        time_known[i] += d0 * (v_known - state.last_velocity[i]);
    }

    // (w^{n+1} + w^n)/2 with u^{n+1} = 0.
    let ghost: Vec<f64>;
    let umm: &[f64] = if n >= 2 {
        state.history[n - 2].values()
    } else {
        let u1 = state.history[1].values();
        ghost = u1
            .iter()
            .zip(state.psi.values())
            .map(|(u, p)| u - 2.0 * tau * p)
            .collect();
        &ghost
    };
    let c1 = 1.5 - theta;
    let c2 = theta - 0.5;
    let w_avg: Vec<f64> = (0..len)
        .map(|i| {
            let w_next = c1 * (1.0 - theta) * un[i] + c2 * (theta * un[i] + (1.0 - theta) * um[i]);
            let w_curr = c1 * (theta * un[i] + (1.0 - theta) * um[i]) + c2 * (theta * um[i] + (1.0 - theta) * umm[i]);
            0.5 * (w_next + w_curr)
        })
        .collect();
    let mut lap = vec![0.0; len];
    mesh::delta_x2_into(h, &w_avg, &mut lap);

    // time-term + f − p, averaged by 𝒜 in the compact variant
    let t_now = n as f64 * tau;
    let mut data: Vec<f64> = (0..len)
        .map(|i| {
            let x = cfg.grid.node(i);
            time_known[i] + (cfg.problem.f)(un[i]) - (cfg.problem.source)(x, t_now)
        })
        .collect();
    if cfg.variant == Variant::Compact {
        let mut averaged = vec![0.0; len];
        mesh::compact_into(&data, &mut averaged);
        data = averaged;
    }

    let rhs: Vec<f64> = (1..m).map(|i| lap[i] - data[i]).collect();

    let time_coef = d0 * (3.0 - 2.0 * theta) / (2.0 * tau);
    let space_coef = theta * (1.5 - theta) / 2.0 / (h * h);
    let (off, diag) = match cfg.variant {
        Variant::Standard => (-space_coef, time_coef + 2.0 * space_coef),
        Variant::Compact => (
            time_coef / 12.0 - space_coef,
            time_coef * 10.0 / 12.0 + 2.0 * space_coef,
        ),
    };
    Ok(TridiagonalSystem::toeplitz(off, diag, off, rhs))
}

/// Advances the state by one level and verifies it against the displayed
/// discrete equation. Level 1 uses the explicit starting formula.
pub fn step(cfg: &SchemeConfig, state: &mut SchemeState) -> Result<(GridFunction, StepReport)> {
    let n = state.n();
    if n >= cfg.params.steps() {
        return Err(Error::InvalidParameter(format!(
            "already at the final level N = {}",
            cfg.params.steps()
        )));
    }
    let (next, assembly_time, solve_time) = if n == 0 {
        let start = Instant::now();
        let u1 = first_step(cfg, state)?;
        (u1, start.elapsed(), Duration::ZERO)
    } else {
        let start = Instant::now();
        let sys = assemble_step(cfg, state)?;
        let assembly_time = start.elapsed();
        let start = Instant::now();
        let interior = sys.solve()?;
        let mut next = GridFunction::zeros(cfg.grid);
        next.values_mut()[1..cfg.grid.intervals()].copy_from_slice(&interior);
        (next, assembly_time, start.elapsed())
    };
    state.push(cfg.params.theta(), cfg.params.tau(), next.clone());
    let residual_inf = discrete_residual(cfg, state.history(), state.psi(), n)?;
    Ok((
        next,
        StepReport {
            n: n + 1,
            residual_inf,
            assembly_time,
            solve_time,
        },
    ))
}

/// Interior max-norm residual of the equation that defines level n + 1,
/// evaluated term by term as displayed: raw first differences of the
/// history, the δ_t̂ convention u^{−1} = u^1 − 2τψ, and the w averages.
#[allow(clippy::needless_range_loop)]
pub fn discrete_residual(cfg: &SchemeConfig, history: &[GridFunction], psi: &GridFunction, n: usize) -> Result<f64> {
    if history.len() < n + 2 {
        return Err(Error::InvalidParameter(format!(
            "residual for level {} needs {} levels, have {}",
            n + 1,
            n + 2,
            history.len()
        )));
    }
    let theta = cfg.params.theta();
    let tau = cfg.params.tau();
    let table = &cfg.table;
    let grid = cfg.grid;
    let len = grid.len();
    let m = grid.intervals();
    let pr = &cfg.problem;
    let psi = psi.values();
    let u = |k: usize| history[k].values();

    if n == 0 {
        let d0 = table.d(0, 0);
        let t_theta = theta * tau;
        let mut worst: f64 = 0.0;
        for i in 1..m {
            let x = grid.node(i);
            let lhs = 2.0 * d0 * ((u(1)[i] - u(0)[i]) / tau - psi[i]);
            let rhs = (pr.phi_xx)(x) + t_theta * (pr.psi_xx)(x) - (pr.f)(u(0)[i] + t_theta * psi[i])
                + (pr.source)(x, t_theta);
            worst = worst.max((lhs - rhs).abs());
        }
        return Ok(worst);
    }

    let ghost: Vec<f64> = (0..len).map(|i| u(1)[i] - 2.0 * tau * psi[i]).collect();
    let lvl = |k: isize| level_with_ghost(history, &ghost, k);
    let dt = |k: usize, i: usize| (u(k + 1)[i] - u(k)[i]) / tau; // δ_t u^{k+1/2}
    let dhat = |k: usize, i: usize| (lvl(k as isize + 1)[i] - lvl(k as isize - 1)[i]) / (2.0 * tau); // δ_t̂ u^k

    let mut lhs = vec![0.0; len];
    for (i, out) in lhs.iter_mut().enumerate() {
        let mut s = 0.0;
        for k in 1..=n {
            let d = table.d(n - k, n);
            s += d
                * ((2.0 - 2.0 * theta) * (dt(k, i) - dt(k - 1, i))
                    + (2.0 * theta - 1.0) * (dhat(k, i) - dhat(k - 1, i)));
        }
        s += table.d(n, n) * (2.0 - 2.0 * theta) * (dt(0, i) - psi[i]);
        *out = s;
    }

    let w = |k: usize| -> Vec<f64> {
        let (a, b, c) = (lvl(k as isize), lvl(k as isize - 1), lvl(k as isize - 2));
        (0..len)
            .map(|i| {
                (1.5 - theta) * (theta * a[i] + (1.0 - theta) * b[i])
                    + (theta - 0.5) * (theta * b[i] + (1.0 - theta) * c[i])
            })
            .collect()
    };
    let (w_next, w_curr) = (w(n + 1), w(n));
    let w_avg = GridFunction::from_values(
        grid,
        w_next.iter().zip(&w_curr).map(|(a, b)| 0.5 * (a + b)).collect(),
    )?;
    let lap = mesh::delta_x2(&w_avg);

    let t_now = n as f64 * tau;
    let f_vals = GridFunction::from_values(grid, u(n).iter().map(|&v| (pr.f)(v)).collect())?;
    let p_vals = GridFunction::sample(grid, |x| (pr.source)(x, t_now));
    let lhs = GridFunction::from_values(grid, lhs)?;
    let (lhs, f_vals, p_vals) = match cfg.variant {
        Variant::Standard => (lhs, f_vals, p_vals),
        Variant::Compact => (
            mesh::apply_compact(&lhs),
            mesh::apply_compact(&f_vals),
            mesh::apply_compact(&p_vals),
        ),
    };
    let worst = (1..m)
        .map(|i| (lhs.values()[i] - (lap.values()[i] - f_vals.values()[i] + p_vals.values()[i])).abs())
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Full time integration: first level, then N − 1 implicit steps.
pub fn run(cfg: &SchemeConfig) -> Result<RunOutput> {
    let mut state = SchemeState::initial(cfg);
    let steps = cfg.params.steps();
    let tau = cfg.params.tau();
    let mut reports = Vec::with_capacity(steps);
    let mut wall_time = Duration::ZERO;
    let mut source_sup: f64 = sup(&sample_source(&cfg.problem, &cfg.grid, cfg.params.theta() * tau));
    for _ in 0..steps {
        let n = state.n();
        if n >= 1 {
            source_sup = source_sup.max(sup(&sample_source(&cfg.problem, &cfg.grid, n as f64 * tau)));
        }
        let (_, report) = step(cfg, &mut state)?;
        wall_time += report.assembly_time + report.solve_time;
        reports.push(report);
    }
    let history = state.into_history();
    let e2 = max_error(&cfg.problem, &cfg.grid, tau, &history);
    Ok(RunOutput {
        history,
        e2,
        reports,
        wall_time,
        source_sup,
    })
}

/// E2 = max_n ‖u^n − u(·, t_n)‖, `None` without an exact solution.
pub fn max_error(problem: &ProblemSpec, grid: &SpaceGrid, tau: f64, history: &[GridFunction]) -> Option<f64> {
    let exact = problem.exact.as_ref()?;
    let worst = history
        .iter()
        .enumerate()
        .map(|(n, u)| {
            let t = n as f64 * tau;
            let err = GridFunction::from_values(
                *grid,
                u.values()
                    .iter()
                    .zip(grid.nodes())
                    .map(|(v, x)| v - exact(x, t))
                    .collect(),
            )
            .expect("history lives on the run grid");
            mesh::norm_l2(&err)
        })
        .fold(0.0, f64::max);
    Some(worst)
}
