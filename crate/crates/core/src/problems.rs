//! Problem data: nonlinearity, source, initial data and (optionally) the
//! exact solution used for error measurement.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::coeffs::gamma;
use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FieldFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The three manufactured nonlinearities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// f(u) = 2u³
    Cubic,
    /// f(u) = sin(u)
    SineGordon,
    /// f(u) = (u² + 5)^{1/2}
    SquareRoot,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Cubic, Case::SineGordon, Case::SquareRoot];

    pub fn from_id(id: u32) -> Result<Self> {
        match id {
            1 => Ok(Case::Cubic),
            2 => Ok(Case::SineGordon),
            3 => Ok(Case::SquareRoot),
            other => Err(Error::UnknownCase(other)),
        }
    }

    pub fn id(self) -> u32 {
        match self {
            Case::Cubic => 1,
            Case::SineGordon => 2,
            Case::SquareRoot => 3,
        }
    }

    pub fn nonlinearity(self) -> ScalarFn {
        match self {
            Case::Cubic => Arc::new(|u: f64| 2.0 * u * u * u),
            Case::SineGordon => Arc::new(f64::sin),
            Case::SquareRoot => Arc::new(|u: f64| (u * u + 5.0).sqrt()),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Data of `D_t^α u = u_xx − f(u) + p` on (a, b) × (0, T] with homogeneous
/// Dirichlet boundary values.
///
/// `phi_xx` and `psi_xx` are analytic second derivatives of the initial data;
/// the first time level consumes them directly.
#[derive(Clone)]
pub struct ProblemSpec {
    pub label: String,
    pub a: f64,
    pub b: f64,
    pub t_final: f64,
    pub alpha: f64,
    pub f: ScalarFn,
    pub source: FieldFn,
    pub phi: ScalarFn,
    pub psi: ScalarFn,
    pub phi_xx: ScalarFn,
    pub psi_xx: ScalarFn,
    pub exact: Option<FieldFn>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("label", &self.label)
            .field("domain", &(self.a, self.b))
            .field("t_final", &self.t_final)
            .field("alpha", &self.alpha)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    pub fn exact_at(&self, x: f64, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|u| u(x, t))
    }

    /// Same problem with φ replaced by φ + ε·g (and φ_xx by φ_xx + ε·g_xx).
    /// The exact solution is dropped since it no longer applies.
    pub fn with_initial_perturbation(&self, eps: f64, g: ScalarFn, g_xx: ScalarFn) -> Self {
        let phi = self.phi.clone();
        let phi_xx = self.phi_xx.clone();
        let g2 = g.clone();
        Self {
            label: format!("{} (φ perturbed by {eps:e})", self.label),
            phi: Arc::new(move |x| phi(x) + eps * g2(x)),
            phi_xx: Arc::new(move |x| phi_xx(x) + eps * g_xx(x)),
            exact: None,
            ..self.clone()
        }
    }
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(alpha))
    }
}

/// Manufactured problem on [0, 1] × (0, 1] with exact solution
/// u(x, t) = sin(πx)(t⁴ + 1) and the given nonlinearity (`None` means f ≡ 0).
fn manufactured(label: String, nonlinearity: Option<ScalarFn>, alpha: f64) -> Result<ProblemSpec> {
    validate_alpha(alpha)?;
    // Caputo derivative of order α of t⁴ is 24 t^{4−α} / Γ(5−α)
    let caputo_scale = 24.0 / gamma(5.0 - alpha)?;
    let f: ScalarFn = nonlinearity.unwrap_or_else(|| Arc::new(|_| 0.0));
    let f_src = f.clone();
    let source: FieldFn = Arc::new(move |x, t| {
        let s = (PI * x).sin();
        let u = s * (t.powi(4) + 1.0);
        (caputo_scale * t.powf(4.0 - alpha) + PI * PI * (t.powi(4) + 1.0)) * s + f_src(u)
    });
    Ok(ProblemSpec {
        label,
        a: 0.0,
        b: 1.0,
        t_final: 1.0,
        alpha,
        f,
        source,
        phi: Arc::new(|x| (PI * x).sin()),
        psi: Arc::new(|_| 0.0),
        phi_xx: Arc::new(|x| -PI * PI * (PI * x).sin()),
        psi_xx: Arc::new(|_| 0.0),
        exact: Some(Arc::new(|x, t| (PI * x).sin() * (t.powi(4) + 1.0))),
    })
}

pub fn manufactured_case(case: Case, alpha: f64) -> Result<ProblemSpec> {
    manufactured(format!("case {}", case.id()), Some(case.nonlinearity()), alpha)
}

/// Case 3 data with the square root dropped: f(u) = (u² + 5)/2.
pub fn manufactured_quadratic(alpha: f64) -> Result<ProblemSpec> {
    manufactured("quadratic".into(), Some(Arc::new(|u: f64| 0.5 * (u * u + 5.0))), alpha)
}

/// The manufactured solution with f ≡ 0 (a linear problem).
pub fn manufactured_linear(alpha: f64) -> Result<ProblemSpec> {
    manufactured("linear".into(), None, alpha)
}

/// Homogeneous problem whose solution vanishes identically.
pub fn zero_problem() -> ProblemSpec {
    let zero: ScalarFn = Arc::new(|_| 0.0);
    ProblemSpec {
        label: "zero".into(),
        a: 0.0,
        b: 1.0,
        t_final: 1.0,
        alpha: 1.5,
        f: Arc::new(|_| 0.0),
        source: Arc::new(|_, _| 0.0),
        phi: zero.clone(),
        psi: zero.clone(),
        phi_xx: zero.clone(),
        psi_xx: zero,
        exact: Some(Arc::new(|_, _| 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Adaptive Simpson on [lo, hi].
    fn simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                left + right + delta / 15.0
            } else {
                step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let fa = f(lo);
        let fb = f(hi);
        let fm = f(0.5 * (lo + hi));
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        step(f, lo, hi, fa, fm, fb, whole, tol, 50)
    }

    /// Caputo derivative of order α ∈ (1,2) of g with g'' given, by quadrature.
    /// The kernel (t−s)^{1−α} is removed by the substitution w = (t−s)^{2−α}.
    fn caputo_quadrature(g2: &dyn Fn(f64) -> f64, alpha: f64, t: f64) -> f64 {
        let q = 1.0 / (2.0 - alpha);
        let integrand = |w: f64| g2(t - w.powf(q));
        let upper = t.powf(2.0 - alpha);
        simpson(&integrand, 0.0, upper, 1e-13) / ((2.0 - alpha) * gamma(2.0 - alpha).unwrap())
    }

    #[test]
    fn case_ids() {
        for c in Case::ALL {
            assert_eq!(Case::from_id(c.id()).unwrap(), c);
        }
        assert!(matches!(Case::from_id(4), Err(Error::UnknownCase(4))));
        assert!(matches!(Case::from_id(0), Err(Error::UnknownCase(0))));
    }

    #[test]
    fn nonlinearity_values() {
        assert_eq!((Case::SineGordon.nonlinearity())(0.0), 0.0);
        assert_eq!((Case::SquareRoot.nonlinearity())(2.0), 3.0);
        assert_eq!((Case::Cubic.nonlinearity())(-1.5), -6.75);
        assert_eq!((manufactured_quadratic(1.5).unwrap().f)(2.0), 4.5);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(manufactured_case(Case::Cubic, 2.0).is_err());
        assert!(manufactured_case(Case::Cubic, 0.5).is_err());
    }

    #[test]
    fn zero_problem_is_zero() {
        let p = zero_problem();
        for (x, t) in [(0.0, 0.0), (0.3, 0.7), (1.0, 1.0)] {
            assert_eq!(p.exact_at(x, t), Some(0.0));
            assert_eq!((p.source)(x, t), 0.0);
        }
        assert_eq!((p.f)(0.0), 0.0);
    }

    #[test]
    fn caputo_quadrature_matches_closed_form() {
        for alpha in [1.2, 1.5, 1.8] {
            for t in [0.1, 0.5, 1.0] {
                let quad = caputo_quadrature(&|s| 12.0 * s * s, alpha, t);
                let closed = 24.0 * t.powf(4.0 - alpha) / gamma(5.0 - alpha).unwrap();
                assert!((quad - closed).abs() <= 1e-8 * closed.max(1.0), "α={alpha} t={t}: {quad} vs {closed}");
            }
        }
    }

    #[test]
    fn manufactured_data_are_consistent() {
        for case in Case::ALL {
            for alpha in [1.2, 1.5, 1.8] {
                let p = manufactured_case(case, alpha).unwrap();
                for x in [0.1, 0.37, 0.5, 0.9] {
                    // initial data match the exact solution
                    assert_relative_eq!((p.phi)(x), p.exact_at(x, 0.0).unwrap(), max_relative = 1e-12);
                    let dt = 1e-5;
                    let ut = (p.exact_at(x, dt).unwrap() - p.exact_at(x, 0.0).unwrap()) / dt;
                    assert!(((p.psi)(x) - ut).abs() < 1e-12 + 1e-10);
                    for t in [0.05, 0.4, 1.0] {
                        let u = p.exact_at(x, t).unwrap();
                        let s = (PI * x).sin();
                        let caputo = s * caputo_quadrature(&|r| 12.0 * r * r, alpha, t);
                        let u_xx = -PI * PI * u;
                        let residual = caputo - u_xx + (p.f)(u) - (p.source)(x, t);
                        assert!(residual.abs() <= 1e-6, "case {case} α={alpha} x={x} t={t}: {residual}");
                    }
                }
            }
        }
    }

    #[test]
    fn perturbation_shifts_phi_and_drops_exact() {
        let p = manufactured_case(Case::SineGordon, 1.5).unwrap();
        let q = p.with_initial_perturbation(1e-3, Arc::new(|x| (PI * x).sin()), Arc::new(|x| -PI * PI * (PI * x).sin()));
        assert!(q.exact.is_none());
        assert_relative_eq!((q.phi)(0.5), 1.001, max_relative = 1e-14);
        assert_relative_eq!((q.phi_xx)(0.5), -PI * PI * 1.001, max_relative = 1e-14);
    }
}
