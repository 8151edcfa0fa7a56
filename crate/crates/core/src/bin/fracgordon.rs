use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fracgordon::harness::config::Options;
use fracgordon::harness::report::{self, ConvergenceReport};
use fracgordon::harness::{self, StudyFailure};
use fracgordon::mesh;

#[derive(Parser)]
#[command(name = "fracgordon", version, about = "Time-fractional Klein-Gordon solvers and convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one discretization and print E2, residual and timing.
    Solve(Flags),
    /// E2 and Rate1 along a halving τ ladder at fixed h.
    TimeStudy(Flags),
    /// E2 and Rate2 along a halving h ladder at fixed τ.
    SpaceStudy(Flags),
    /// Linearized scheme against the L1 fixed-point scheme.
    CompareL1(Flags),
    /// CSV of k, c_k^(n+1), d_k^(n+1).
    CoeffDump(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// 1, 2, 3, quadratic, linear or zero.
    #[arg(long)]
    case: Option<String>,
    /// Fractional order, or a comma-separated list for studies.
    #[arg(long)]
    alpha: Option<String>,
    /// std, compact, l1-central or l1-lagged.
    #[arg(long)]
    variant: Option<String>,
    /// Space step, e.g. 1/1000 or 0.001.
    #[arg(long)]
    h: Option<String>,
    /// Time step, e.g. 1/20.
    #[arg(long)]
    tau: Option<String>,
    /// Number of halvings in the refinement ladder.
    #[arg(long)]
    ladder: Option<String>,
    /// csv or md.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Number of time steps N (coeff-dump).
    #[arg(long)]
    steps: Option<String>,
    /// Time level n (coeff-dump).
    #[arg(long)]
    level: Option<String>,
    /// Timing repeats per run (compare-l1).
    #[arg(long)]
    repeats: Option<String>,
}

impl Flags {
    fn options(self) -> fracgordon::Result<Options> {
        let file = match &self.config {
            Some(path) => Options::from_file(path)?,
            None => Options::default(),
        };
        Ok(file.overridden_by(Options {
            case: self.case,
            alpha: self.alpha,
            variant: self.variant,
            h: self.h,
            tau: self.tau,
            ladder: self.ladder,
            format: self.format,
            out: self.out,
            steps: self.steps,
            level: self.level,
            repeats: self.repeats,
        }))
    }
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn write_output(text: &str, out: Option<PathBuf>) -> AnyResult<()> {
    match out {
        Some(path) => fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish_study(result: Result<Vec<ConvergenceReport>, StudyFailure>, opts: &Options) -> AnyResult<()> {
    let format = opts.format()?;
    match result {
        Ok(reports) => write_output(&report::render(&reports, format), opts.output()),
        Err(failure) => {
            if failure.partial.iter().any(|r| !r.rows.is_empty()) {
                eprintln!("partial results:");
                eprint!("{}", report::render(&failure.partial, format));
            }
            Err(failure.error.into())
        }
    }
}

fn solve(opts: &Options) -> AnyResult<()> {
    let (kind, alpha, engine, h, tau) = opts.single_run()?;
    let problem = kind.build(alpha)?;
    let out = harness::solve(&problem, engine, h, tau)?;
    let last = out.final_level();
    let mut text = String::from("x,u");
    if problem.exact.is_some() {
        text.push_str(",exact");
    }
    text.push('\n');
    let t_final = problem.t_final;
    for (x, u) in last.grid().nodes().zip(last.values()) {
        match problem.exact_at(x, t_final) {
            Some(e) => text.push_str(&format!("{x},{u},{e}\n")),
            None => text.push_str(&format!("{x},{u}\n")),
        }
    }
    if let Some(path) = opts.output() {
        fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    println!("case {kind}, alpha {alpha}, {}, h {h}, tau {tau}", engine.label());
    if let Some(e2) = out.e2 {
        println!("E2            {e2:e}");
    }
    println!("max |u^N|     {:e}", mesh::norm_inf(last));
    println!("max residual  {:e} (tolerance {:e})", out.max_residual(), out.residual_tolerance());
    println!("wall time     {:.6} s", out.wall_time.as_secs_f64());
    if out.max_residual() > out.residual_tolerance() {
        return Err("discrete equations not satisfied to tolerance".into());
    }
    Ok(())
}

fn compare(opts: &Options) -> AnyResult<()> {
    let plan = opts.comparison()?;
    let format = opts.format()?;
    match harness::run_comparison(&plan) {
        Ok(cmp) => {
            write_output(&report::render(&cmp.reports(), format), opts.output())?;
            for line in cmp.summary() {
                eprintln!("{line}");
            }
            Ok(())
        }
        Err(failure) => finish_study(Err(failure), opts),
    }
}

fn coeff_dump(opts: &Options) -> AnyResult<()> {
    let (alpha, tau, steps, level) = opts.coefficient_request()?;
    let rows = harness::coefficient_rows(alpha, tau, steps, level)?;
    write_output(&harness::render_coefficients(&rows), opts.output())
}

fn dispatch(command: Command) -> AnyResult<()> {
    match command {
        Command::Solve(f) => solve(&f.options()?),
        Command::TimeStudy(f) => {
            let opts = f.options()?;
            finish_study(harness::run_time_study(&opts.time_study()?), &opts)
        }
        Command::SpaceStudy(f) => {
            let opts = f.options()?;
            finish_study(harness::run_space_study(&opts.space_study()?), &opts)
        }
        Command::CompareL1(f) => compare(&f.options()?),
        Command::CoeffDump(f) => coeff_dump(&f.options()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
