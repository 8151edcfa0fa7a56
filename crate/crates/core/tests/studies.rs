use fracgordon::harness::report::{self, rate, CSV_HEADER, UNDEFINED_RATE};
use fracgordon::harness::{
    self, halving_ladder, ConvergenceReport, Direction, Engine, Format, Measurement, ProblemKind, StudyPlan,
};
use fracgordon::reference::{run_l1, L1Config, NonlinearityMode};
use fracgordon::{Case, Variant};

fn plan(problem: ProblemKind, engine: Engine, direction: Direction, fixed: f64, start: f64, halvings: usize) -> StudyPlan {
    StudyPlan {
        problem,
        alphas: vec![1.3, 1.7],
        engine,
        direction,
        fixed_step: fixed,
        ladder: halving_ladder(start, halvings),
        output: None,
        format: Format::Csv,
    }
}

#[test]
fn rates_are_log2_of_consecutive_errors() {
    let p = plan(
        ProblemKind::Case(Case::Cubic),
        Engine::Linearized(Variant::Standard),
        Direction::TimeRefinement,
        1.0 / 200.0,
        1.0 / 10.0,
        3,
    );
    let reports = harness::run_time_study(&p).unwrap();
    assert_eq!(reports.len(), 2);
    for rep in &reports {
        assert!(rep.residuals_ok());
        assert_eq!(rep.rows[0].rate, None);
        for w in rep.rows.windows(2) {
            let expected = (w[0].e2 / w[1].e2).log2();
            assert!((w[1].rate.unwrap() - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn studies_are_deterministic_and_ordered() {
    let p = plan(
        ProblemKind::Case(Case::SineGordon),
        Engine::Linearized(Variant::Compact),
        Direction::SpaceRefinement,
        1.0 / 100.0,
        1.0 / 4.0,
        2,
    );
    let a = harness::run_space_study(&p).unwrap();
    let b = harness::run_space_study(&p).unwrap();
    assert_eq!(a.iter().map(|r| r.alpha).collect::<Vec<_>>(), vec![1.3, 1.7]);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.e2_column(), y.e2_column());
        let hs: Vec<f64> = x.rows.iter().map(|r| r.h).collect();
        assert_eq!(hs, vec![0.25, 0.125, 0.0625]);
    }
}

#[test]
fn zero_problem_reports_undefined_rates() {
    let p = plan(
        ProblemKind::Zero,
        Engine::Linearized(Variant::Standard),
        Direction::TimeRefinement,
        1.0 / 20.0,
        1.0 / 10.0,
        2,
    );
    let reports = harness::run_time_study(&p).unwrap();
    for rep in &reports {
        assert!(rep.e2_column().iter().all(|&e| e == 0.0));
        assert!(rep.rate_column().iter().all(Option::is_none));
    }
    let md = report::render(&reports, Format::Markdown);
    assert!(md.contains(UNDEFINED_RATE));
    let csv = report::render(&reports, Format::Csv);
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(6) == Some("*")));
}

#[test]
fn csv_shapes() {
    let empty = ConvergenceReport::new(1.5, "1", "std", Direction::TimeRefinement);
    assert_eq!(report::render_csv(std::slice::from_ref(&empty)), format!("{CSV_HEADER}\n"));
    let mut one = empty;
    one.push(Measurement {
        tau: 0.05,
        h: 0.001,
        e2: 2.5994e-3,
        wall_time_s: 0.25,
        max_residual: 0.0,
        residual_tol: 1e-10,
    });
    let csv = report::render_csv(&[one]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1.5,1,std,"));
    assert_eq!(lines[1].split(',').nth(6), Some("*"));
    assert_eq!(rate(0.0, 1.0), None);
    assert_eq!(rate(4.0, 1.0), Some(2.0));
}

#[test]
fn emit_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.md");
    let rep = ConvergenceReport::new(1.2, "2", "compact", Direction::SpaceRefinement);
    report::emit(&[rep], Format::Markdown, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("Rate2"));
}

#[test]
fn rejects_ladders_that_do_not_divide() {
    let mut p = plan(
        ProblemKind::Case(Case::Cubic),
        Engine::Linearized(Variant::Standard),
        Direction::TimeRefinement,
        1.0 / 20.0,
        0.3,
        1,
    );
    let err = harness::run_time_study(&p).unwrap_err();
    assert!(err.partial.iter().all(|r| r.rows.is_empty()));
    p.ladder = vec![0.1, 0.04];
    assert!(p.validate().is_err());
}

fn l1_rates(mode: NonlinearityMode, alpha: f64) -> Vec<f64> {
    let problem = fracgordon::problems::manufactured_case(Case::SineGordon, alpha).unwrap();
    let errors: Vec<f64> = [40, 80, 160, 320, 640]
        .iter()
        .map(|&n| {
            let cfg = L1Config::uniform(problem.clone(), 1000, n, mode).unwrap();
            run_l1(&cfg).unwrap().output.e2.unwrap()
        })
        .collect();
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn l1_temporal_order_is_three_minus_alpha() {
    for alpha in [1.5, 1.8] {
        let central = l1_rates(NonlinearityMode::CentralIterative, alpha);
        let lagged = l1_rates(NonlinearityMode::Lagged, alpha);
        let (c, l) = (*central.last().unwrap(), *lagged.last().unwrap());
        assert!((c - (3.0 - alpha)).abs() <= 0.15, "α={alpha}: central rate {c}");
        assert!(l <= c + 1e-9 && c <= 2.0 * (3.0 - alpha), "α={alpha}: lagged {l}, central {c}");
    }
}

#[test]
fn linear_problem_comparison_is_consistent() {
    let problem = fracgordon::problems::manufactured_linear(1.6).unwrap();
    let mut lin = Vec::new();
    let mut l1 = Vec::new();
    for n in [10, 20, 40] {
        lin.push(harness::measure(&problem, Engine::Linearized(Variant::Standard), 0.01, 1.0 / n as f64).unwrap().e2);
        l1.push(
            harness::measure(&problem, Engine::L1(NonlinearityMode::CentralIterative), 0.01, 1.0 / n as f64)
                .unwrap()
                .e2,
        );
    }
    for (a, b) in lin.iter().zip(&l1) {
        assert!(a / b < 10.0 && b / a < 10.0, "{a} vs {b}");
    }
    assert!(rate(lin[1], lin[2]).unwrap() > 1.0);
    assert!(rate(l1[1], l1[2]).unwrap() > 1.0);
}
