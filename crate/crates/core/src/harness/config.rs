//! Run options shared by the command line and TOML config files.
//!
//! Both sources produce the same [`Options`]; values are kept as text and
//! parsed once when a plan is built, so `tau = "1/1000"` in a file and
//! `--tau 1/1000` on the command line mean the same thing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::report::{Direction, Format};
use super::{halving_ladder, ComparisonPlan, Engine, ProblemKind, StudyPlan};
use crate::error::{Error, Result};
use crate::reference::NonlinearityMode;
use crate::schemes::Variant;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    pub case: Option<String>,
    pub alpha: Option<String>,
    pub variant: Option<String>,
    pub h: Option<String>,
    pub tau: Option<String>,
    pub ladder: Option<String>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub steps: Option<String>,
    pub level: Option<String>,
    pub repeats: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawValue {
    Number(f64),
    Text(String),
    List(Vec<f64>),
}

impl RawValue {
    fn into_text(self) -> String {
        match self {
            RawValue::Number(x) => x.to_string(),
            RawValue::Text(s) => s,
            RawValue::List(xs) => xs.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    case: Option<RawValue>,
    alpha: Option<RawValue>,
    variant: Option<RawValue>,
    h: Option<RawValue>,
    tau: Option<RawValue>,
    ladder: Option<RawValue>,
    format: Option<RawValue>,
    out: Option<RawValue>,
    steps: Option<RawValue>,
    level: Option<RawValue>,
    repeats: Option<RawValue>,
}

impl Options {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        let t = |v: Option<RawValue>| v.map(RawValue::into_text);
        Ok(Self {
            case: t(raw.case),
            alpha: t(raw.alpha),
            variant: t(raw.variant),
            h: t(raw.h),
            tau: t(raw.tau),
            ladder: t(raw.ladder),
            format: t(raw.format),
            out: t(raw.out),
            steps: t(raw.steps),
            level: t(raw.level),
            repeats: t(raw.repeats),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Field-wise merge where `flags` wins.
    pub fn overridden_by(self, flags: Options) -> Options {
        Options {
            case: flags.case.or(self.case),
            alpha: flags.alpha.or(self.alpha),
            variant: flags.variant.or(self.variant),
            h: flags.h.or(self.h),
            tau: flags.tau.or(self.tau),
            ladder: flags.ladder.or(self.ladder),
            format: flags.format.or(self.format),
            out: flags.out.or(self.out),
            steps: flags.steps.or(self.steps),
            level: flags.level.or(self.level),
            repeats: flags.repeats.or(self.repeats),
        }
    }

    fn problem_or(&self, default: &str) -> Result<ProblemKind> {
        ProblemKind::parse(self.case.as_deref().unwrap_or(default))
    }

    fn alphas_or(&self, default: &str) -> Result<Vec<f64>> {
        parse_alpha_list(self.alpha.as_deref().unwrap_or(default))
    }

    fn step_or(value: &Option<String>, default: &str) -> Result<f64> {
        parse_step(value.as_deref().unwrap_or(default))
    }

    fn count_or(value: &Option<String>, name: &str, default: usize) -> Result<usize> {
        value.as_deref().map_or(Ok(default), |s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Config(format!("{name} must be a non-negative integer, got '{s}'")))
        })
    }

    pub fn format(&self) -> Result<Format> {
        Format::parse(self.format.as_deref().unwrap_or("csv"))
    }

    pub fn output(&self) -> Option<PathBuf> {
        self.out.as_ref().map(PathBuf::from)
    }

    pub fn time_study(&self) -> Result<StudyPlan> {
        self.study(Direction::TimeRefinement, "1/1000", "1/20")
    }

    pub fn space_study(&self) -> Result<StudyPlan> {
        self.study(Direction::SpaceRefinement, "1/1000", "1/20")
    }

    fn study(&self, direction: Direction, fixed_default: &str, start_default: &str) -> Result<StudyPlan> {
        let (fixed, start) = match direction {
            Direction::TimeRefinement => (&self.h, &self.tau),
            Direction::SpaceRefinement => (&self.tau, &self.h),
        };
        let plan = StudyPlan {
            problem: self.problem_or("1")?,
            alphas: self.alphas_or("1.2,1.5,1.8")?,
            engine: Engine::parse(self.variant.as_deref().unwrap_or("std"))?,
            direction,
            fixed_step: Self::step_or(fixed, fixed_default)?,
            ladder: halving_ladder(Self::step_or(start, start_default)?, Self::count_or(&self.ladder, "ladder", 3)?),
            output: self.output(),
            format: self.format()?,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn comparison(&self) -> Result<ComparisonPlan> {
        let alphas = self.alphas_or("1.8")?;
        let [alpha] = alphas[..] else {
            return Err(Error::Config("compare-l1 takes a single alpha".into()));
        };
        let variant = Variant::parse(self.variant.as_deref().unwrap_or("std"))?;
        Ok(ComparisonPlan {
            problem: self.problem_or("2")?,
            alpha,
            h: Self::step_or(&self.h, "1/1000")?,
            ladder: halving_ladder(Self::step_or(&self.tau, "1/20")?, Self::count_or(&self.ladder, "ladder", 4)?),
            variant,
            mode: NonlinearityMode::CentralIterative,
            repeats: Self::count_or(&self.repeats, "repeats", 3)?.max(1),
        })
    }

    /// (problem, α, engine, h, τ) for a single run.
    pub fn single_run(&self) -> Result<(ProblemKind, f64, Engine, f64, f64)> {
        let alphas = self.alphas_or("1.5")?;
        let [alpha] = alphas[..] else {
            return Err(Error::Config("solve takes a single alpha".into()));
        };
        Ok((
            self.problem_or("1")?,
            alpha,
            Engine::parse(self.variant.as_deref().unwrap_or("std"))?,
            Self::step_or(&self.h, "1/100")?,
            Self::step_or(&self.tau, "1/100")?,
        ))
    }

    /// (α, τ, N, n) for a coefficient dump; τ defaults to 1/N and n to N − 1.
    pub fn coefficient_request(&self) -> Result<(f64, f64, usize, usize)> {
        let alphas = self.alphas_or("1.5")?;
        let [alpha] = alphas[..] else {
            return Err(Error::Config("coeff-dump takes a single alpha".into()));
        };
        let steps = Self::count_or(&self.steps, "steps", 10)?;
        if steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        let tau = match &self.tau {
            Some(s) => parse_step(s)?,
            None => 1.0 / steps as f64,
        };
        let level = Self::count_or(&self.level, "level", steps - 1)?;
        Ok((alpha, tau, steps, level))
    }
}

/// Accepts a decimal (`0.001`) or a fraction (`1/1000`).
pub fn parse_step(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse step '{s}'"));
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            num / den
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Config(format!("step must be positive and finite, got '{s}'")))
    }
}

/// Comma-separated orders, each in (1, 2).
pub fn parse_alpha_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|part| {
            let a: f64 = part
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse alpha '{part}'")))?;
            if a > 1.0 && a < 2.0 {
                Ok(a)
            } else {
                Err(Error::InvalidOrder(a))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_and_alphas() {
        assert_eq!(parse_step("1/1000").unwrap(), 0.001);
        assert_eq!(parse_step(" 0.05 ").unwrap(), 0.05);
        assert!(parse_step("1/0").is_err());
        assert!(parse_step("-0.1").is_err());
        assert!(parse_step("abc").is_err());
        assert_eq!(parse_alpha_list("1.2, 1.5,1.8").unwrap(), vec![1.2, 1.5, 1.8]);
        assert!(parse_alpha_list("1.5,2.0").is_err());
        assert!(parse_alpha_list("").is_err());
    }

    #[test]
    fn toml_values_become_text() {
        let o = Options::from_toml_str(
            r#"
            case = 3
            alpha = [1.2, 1.8]
            variant = "compact"
            h = 0.01
            tau = "1/160"
            ladder = 2
            "#,
        )
        .unwrap();
        assert_eq!(o.case.as_deref(), Some("3"));
        assert_eq!(o.alpha.as_deref(), Some("1.2,1.8"));
        assert_eq!(o.h.as_deref(), Some("0.01"));
        assert_eq!(o.tau.as_deref(), Some("1/160"));
        assert_eq!(o.ladder.as_deref(), Some("2"));
        assert!(Options::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = Options::from_toml_str("case = 3\nalpha = 1.2\nh = \"1/100\"").unwrap();
        let flags = Options {
            alpha: Some("1.8".into()),
            ..Options::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.case.as_deref(), Some("3"));
        assert_eq!(merged.alpha.as_deref(), Some("1.8"));
        assert_eq!(merged.h.as_deref(), Some("1/100"));
    }

    #[test]
    fn study_defaults() {
        let plan = Options::default().time_study().unwrap();
        assert_eq!(plan.fixed_step, 0.001);
        assert_eq!(plan.ladder, vec![0.05, 0.025, 0.0125, 0.00625]);
        assert_eq!(plan.alphas.len(), 3);
        let plan = Options::default().space_study().unwrap();
        assert_eq!(plan.fixed_step, 0.001);
        assert_eq!(plan.ladder.len(), 4);
        let cmp = Options::default().comparison().unwrap();
        assert_eq!(cmp.problem, ProblemKind::Case(crate::Case::SineGordon));
        assert_eq!(cmp.ladder.len(), 5);
        assert_eq!(cmp.alpha, 1.8);
    }

    #[test]
    fn rejects_non_dividing_step() {
        let o = Options {
            h: Some("0.3".into()),
            ..Options::default()
        };
        assert!(o.time_study().is_err());
    }

    #[test]
    fn coefficient_request_defaults() {
        let o = Options {
            steps: Some("8".into()),
            ..Options::default()
        };
        assert_eq!(o.coefficient_request().unwrap(), (1.5, 0.125, 8, 7));
    }
}
