//! Classical L1 scheme used as the comparison baseline.
//!
//! Level u^{n+1} (n ≥ 0) solves
//!
//! ```text
//!   (1/μ)[a_0 δ_t u^{n+1/2} − Σ_{k=1}^{n} (a_{n−k} − a_{n−k+1}) δ_t u^{k−1/2} − a_n ψ]
//!     = δ_x² u^{n+1/2} − F + p(·, t_{n+1/2}),
//! ```
//!
//! with a_k = (k+1)^{2−α} − k^{2−α}, μ = τ^{α−1}Γ(3−α), u^{n+1/2} the average
//! of the two levels, and F either the central average [f(u^{n+1}) + f(u^n)]/2
//! (resolved by fixed-point sweeps) or the lagged value f(u^n).

use std::time::{Duration, Instant};

use crate::coeffs::{gamma, FractionalParams};
use crate::error::{Error, Result};
use crate::mesh::{self, GridFunction, SpaceGrid};
use crate::problems::ProblemSpec;
use crate::schemes::{max_error, validate_setup, RunOutput, StepReport};
use crate::trisolve::TridiagonalSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearityMode {
    /// f(u^{n+1/2}) ≈ [f(u^{n+1}) + f(u^n)]/2, fixed-point iteration per step.
    CentralIterative,
    /// f(u^{n+1/2}) ≈ f(u^n), one linear solve per step.
    Lagged,
}

pub const DEFAULT_FP_TOL: f64 = 1e-12;
pub const DEFAULT_FP_MAX_ITER: usize = 200;

#[derive(Debug, Clone)]
pub struct L1Config {
    pub params: FractionalParams,
    pub grid: SpaceGrid,
    pub problem: ProblemSpec,
    pub mode: NonlinearityMode,
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    weights: Vec<f64>,
    mu: f64,
}

impl L1Config {
    pub fn new(
        params: FractionalParams,
        grid: SpaceGrid,
        problem: ProblemSpec,
        mode: NonlinearityMode,
        fp_tol: f64,
        fp_max_iter: usize,
    ) -> Result<Self> {
        validate_setup(&params, &grid, &problem)?;
        if fp_tol.is_nan() || fp_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "fixed-point tolerance must be positive, got {fp_tol}"
            )));
        }
        if fp_max_iter == 0 {
            return Err(Error::InvalidParameter(
                "fixed-point iteration cap must be at least 1".into(),
            ));
        }
        let alpha = params.alpha();
        Ok(Self {
            weights: l1_weights(alpha, params.steps())?,
            mu: params.tau().powf(alpha - 1.0) * gamma(3.0 - alpha)?,
            params,
            grid,
            problem,
            mode,
            fp_tol,
            fp_max_iter,
        })
    }

    /// Uniform discretization with the default fixed-point settings.
    pub fn uniform(problem: ProblemSpec, intervals: usize, steps: usize, mode: NonlinearityMode) -> Result<Self> {
        let params = FractionalParams::uniform(problem.alpha, problem.t_final, steps)?;
        let grid = SpaceGrid::new(problem.a, problem.b, intervals)?;
        Self::new(params, grid, problem, mode, DEFAULT_FP_TOL, DEFAULT_FP_MAX_ITER)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// a_k = (k+1)^{2−α} − k^{2−α} for k = 0..count−1.
pub fn l1_weights(alpha: f64, count: usize) -> Result<Vec<f64>> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidOrder(alpha));
    }
    let p = 2.0 - alpha;
    Ok((0..count)
        .map(|k| {
            let k = k as f64;
            (k + 1.0).powf(p) - k.powf(p)
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct L1State {
    history: Vec<GridFunction>,
    psi: GridFunction,
    // slopes[k] = δ_t u^{k+1/2}
    slopes: Vec<Vec<f64>>,
}

impl L1State {
    pub fn initial(cfg: &L1Config) -> Self {
        Self {
            history: vec![GridFunction::sample(cfg.grid, |x| (cfg.problem.phi)(x))],
            psi: GridFunction::sample(cfg.grid, |x| (cfg.problem.psi)(x)),
            slopes: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.history.len() - 1
    }

    pub fn history(&self) -> &[GridFunction] {
        &self.history
    }

    pub fn psi(&self) -> &GridFunction {
        &self.psi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct L1StepReport {
    pub step: StepReport,
    /// Linear solves performed (1 in lagged mode).
    pub sweeps: usize,
}

/// Advances the L1 scheme by one level.
pub fn l1_step(cfg: &L1Config, state: &mut L1State) -> Result<(GridFunction, L1StepReport)> {
    let n = state.n();
    if n >= cfg.params.steps() {
        return Err(Error::InvalidParameter(format!(
            "already at the final level N = {}",
            cfg.params.steps()
        )));
    }
    let tau = cfg.params.tau();
    let h = cfg.grid.h();
    let m = cfg.grid.intervals();
    let len = cfg.grid.len();
    let a = &cfg.weights;
    let mu = cfg.mu;
    let pr = &cfg.problem;

    let start = Instant::now();
    let un = state.history[n].values();
    // history part of the bracket, sign folded to the right-hand side
    let mut memory: Vec<f64> = state.psi.values().iter().map(|p| a[n] * p).collect();
    for (idx, slope) in state.slopes.iter().enumerate() {
        let k = idx + 1;
        let w = a[n - k] - a[n - k + 1];
        for (acc, s) in memory.iter_mut().zip(slope) {
            *acc += w * s;
        }
    }
    let mut lap = vec![0.0; len];
    mesh::delta_x2_into(h, un, &mut lap);
    let t_half = (n as f64 + 0.5) * tau;
    let inertia = a[0] / (mu * tau);
    let f_n: Vec<f64> = un.iter().map(|&v| (pr.f)(v)).collect();
    let base: Vec<f64> = (1..m)
        .map(|i| {
            let x = cfg.grid.node(i);
            inertia * un[i] + memory[i] / mu + 0.5 * lap[i] + (pr.source)(x, t_half)
        })
        .collect();
    let inv_h2 = 1.0 / (h * h);
    let off = -0.5 * inv_h2;
    let diag = inertia + inv_h2;
    let mut assembly_time = start.elapsed();
    let mut solve_time = Duration::ZERO;

    let assemble = |f_next: &[f64]| -> TridiagonalSystem {
        let rhs = match cfg.mode {
            NonlinearityMode::Lagged => (1..m).map(|i| base[i - 1] - f_n[i]).collect(),
            NonlinearityMode::CentralIterative => (1..m)
                .map(|i| base[i - 1] - 0.5 * (f_next[i] + f_n[i]))
                .collect(),
        };
        TridiagonalSystem::toeplitz(off, diag, off, rhs)
    };

    let mut iterate = un.to_vec();
    let mut sweeps = 0;
    loop {
        let t0 = Instant::now();
        let f_next: Vec<f64> = match cfg.mode {
            NonlinearityMode::Lagged => Vec::new(),
            NonlinearityMode::CentralIterative => iterate.iter().map(|&v| (pr.f)(v)).collect(),
        };
        let sys = assemble(&f_next);
        assembly_time += t0.elapsed();
        let t0 = Instant::now();
        let interior = sys.solve()?;
        solve_time += t0.elapsed();
        sweeps += 1;
        let gap = interior
            .iter()
            .zip(&iterate[1..m])
            .fold(0.0f64, |g, (x, y)| g.max((x - y).abs()));
        iterate[0] = 0.0;
        iterate[m] = 0.0;
        iterate[1..m].copy_from_slice(&interior);
        if cfg.mode == NonlinearityMode::Lagged || gap <= cfg.fp_tol {
            break;
        }
        if sweeps >= cfg.fp_max_iter {
            return Err(Error::FixedPointDiverged {
                step: n + 1,
                iterations: sweeps,
                gap,
            });
        }
    }

    let next = GridFunction::from_values(cfg.grid, iterate)?;
    let slope = next
        .values()
        .iter()
        .zip(un)
        .map(|(u1, u0)| (u1 - u0) / tau)
        .collect();
    state.slopes.push(slope);
    state.history.push(next.clone());
    let residual_inf = l1_residual(cfg, state.history(), state.psi(), n)?;
    Ok((
        next,
        L1StepReport {
            step: StepReport {
                n: n + 1,
                residual_inf,
                assembly_time,
                solve_time,
            },
            sweeps,
        },
    ))
}

/// Interior max-norm residual of the L1 equation defining level n + 1,
/// with the mode's approximation of f(u^{n+1/2}) evaluated at the accepted level.
pub fn l1_residual(cfg: &L1Config, history: &[GridFunction], psi: &GridFunction, n: usize) -> Result<f64> {
    if history.len() < n + 2 {
        return Err(Error::InvalidParameter(format!(
            "residual for level {} needs {} levels, have {}",
            n + 1,
            n + 2,
            history.len()
        )));
    }
    let tau = cfg.params.tau();
    let a = &cfg.weights;
    let pr = &cfg.problem;
    let m = cfg.grid.intervals();
    let u = |k: usize| history[k].values();
    let dt = |k: usize, i: usize| (u(k + 1)[i] - u(k)[i]) / tau; // δ_t u^{k+1/2}
    let half = GridFunction::from_values(
        cfg.grid,
        u(n + 1).iter().zip(u(n)).map(|(x, y)| 0.5 * (x + y)).collect(),
    )?;
    let lap = mesh::delta_x2(&half);
    let t_half = (n as f64 + 0.5) * tau;
    let mut worst: f64 = 0.0;
    for i in 1..m {
        let mut bracket = a[0] * dt(n, i) - a[n] * psi.values()[i];
        for k in 1..=n {
            bracket -= (a[n - k] - a[n - k + 1]) * dt(k - 1, i);
        }
        let f_mid = match cfg.mode {
            NonlinearityMode::CentralIterative => 0.5 * ((pr.f)(u(n + 1)[i]) + (pr.f)(u(n)[i])),
            NonlinearityMode::Lagged => (pr.f)(u(n)[i]),
        };
        let rhs = lap.values()[i] - f_mid + (pr.source)(cfg.grid.node(i), t_half);
        worst = worst.max((bracket / cfg.mu - rhs).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct L1Run {
    pub output: RunOutput,
    pub sweeps: Vec<usize>,
}

pub fn run_l1(cfg: &L1Config) -> Result<L1Run> {
    let mut state = L1State::initial(cfg);
    let steps = cfg.params.steps();
    let tau = cfg.params.tau();
    let mut reports = Vec::with_capacity(steps);
    let mut sweeps = Vec::with_capacity(steps);
    let mut wall_time = Duration::ZERO;
    let mut source_sup: f64 = 0.0;
    for n in 0..steps {
        let t_half = (n as f64 + 0.5) * tau;
        source_sup = cfg
            .grid
            .nodes()
            .fold(source_sup, |s, x| s.max((cfg.problem.source)(x, t_half).abs()));
        let (_, report) = l1_step(cfg, &mut state)?;
        wall_time += report.step.assembly_time + report.step.solve_time;
        sweeps.push(report.sweeps);
        reports.push(report.step);
    }
    let history = state.history;
    let e2 = max_error(&cfg.problem, &cfg.grid, tau, &history);
    Ok(L1Run {
        output: RunOutput {
            history,
            e2,
            reports,
            wall_time,
            source_sup,
        },
        sweeps,
    })
}
