//! Weights of the shifted second-order approximation of the Caputo
//! derivative for 1 < α < 2.
//!
//! With θ = (3 − α)/2 the discrete operator at t_{n+θ} reads
//!
//! ```text
//!   Δ_t^α v(t_{n+θ}) = τ^{1−α}/Γ(3−α) · Σ_{s=0}^{n} c_{n−s}^{(n+1)} [v(t_{s+1}) − v(t_s)]
//! ```
//!
//! and the weighted combination (1−θ)Δ_t^α v^{n+θ} + θΔ_t^α v^{n−1+θ} used by
//! the linearized scheme collapses to a single sum with weights d_k^{(n+1)}.
//! Only the O(N) sequences `a` and `b` are stored; `c` and `d` are formed on
//! demand from their three-branch definitions.

use crate::error::{Error, Result};

/// Γ(x) for x > 0.
///
/// Backed by the Lanczos approximation in `statrs`, which is accurate to
/// a few ulps on the range (0, 5] where every weight of this crate lives.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 || !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma is only defined here for finite x > 0, got {x}"
        )));
    }
    Ok(statrs::function::gamma::gamma(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalParams {
    alpha: f64,
    theta: f64,
    tau: f64,
    steps: usize,
}

impl FractionalParams {
    pub fn new(alpha: f64, tau: f64, steps: usize) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidOrder(alpha));
        }
        if tau <= 0.0 || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive, got {tau}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter(
                "number of time steps must be at least 1".into(),
            ));
        }
        Ok(Self {
            alpha,
            theta: (3.0 - alpha) / 2.0,
            tau,
            steps,
        })
    }

    /// Uniform mesh of `steps` intervals on [0, t_final].
    pub fn uniform(alpha: f64, t_final: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter(
                "number of time steps must be at least 1".into(),
            ));
        }
        Self::new(alpha, t_final / steps as f64, steps)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The shift θ = (3 − α)/2 ∈ (1/2, 1).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn final_time(&self) -> f64 {
        self.tau * self.steps as f64
    }
}

/// (l + θ)^p evaluated as exp(p·ln(l + θ)), with θ^p taken directly at l = 0.
fn shifted_pow(l: usize, theta: f64, p: f64) -> f64 {
    if l == 0 {
        theta.powf(p)
    } else {
        (p * (l as f64 + theta).ln()).exp()
    }
}

/// ∫ s^p ds − (trapezoid rule) over [x − 1/2, x + 1/2], from the Taylor
/// expansion about x, without the cancellation of the closed form.
fn trapezoid_defect(x: f64, p: f64) -> f64 {
    // term_m = C(p, m) x^{p−m} 2^{−m} for even m
    let mut coef = x.powf(p);
    let mut sum = 0.0;
    let mut m = 0;
    loop {
        coef *= (p - m as f64) * (p - m as f64 - 1.0) / ((m + 1) as f64 * (m + 2) as f64) / (4.0 * x * x);
        m += 2;
        let term = coef * m as f64 / (m + 1) as f64;
        sum -= term;
        if term.abs() <= 1e-17 * sum.abs() || m > 400 {
            return sum;
        }
    }
}

/// Immutable table of fractional weights for one (α, τ, N).
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    params: FractionalParams,
    a: Vec<f64>,
    // b[0] is a placeholder; b_l is defined for l >= 1.
    b: Vec<f64>,
    mu: f64,
    d0_first: f64,
}

impl CoefficientTable {
    pub fn new(params: FractionalParams) -> Result<Self> {
        let alpha = params.alpha;
        let theta = params.theta;
        let n = params.steps;
        let p2 = 2.0 - alpha;

        // (l + θ)^{2−α} for l = 0..n
        let pow2: Vec<f64> = (0..=n).map(|l| shifted_pow(l, theta, p2)).collect();

        let mut a = Vec::with_capacity(n);
        a.push(pow2[0]);
        for l in 1..n {
            let lower = l as f64 - 1.0 + theta;
            a.push(pow2[l - 1] * (p2 * (1.0 / lower).ln_1p()).exp_m1());
        }

        let b: Vec<f64> = (0..n.max(1))
            .map(|l| if l == 0 { 0.0 } else { trapezoid_defect(l as f64 - 0.5 + theta, p2) })
            .collect();

        let g = gamma(3.0 - alpha)?;
        let mu = params.tau.powf(alpha - 1.0) * g;
        let d0_first = theta.powf(p2) * params.tau.powf(1.0 - alpha) / g;

        Ok(Self {
            params,
            a,
            b,
            mu,
            d0_first,
        })
    }

    pub fn params(&self) -> &FractionalParams {
        &self.params
    }

    /// μ = τ^{α−1} Γ(3−α).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn a(&self, l: usize) -> f64 {
        self.a[l]
    }

    /// b_l for 1 <= l <= N − 1.
    pub fn b(&self, l: usize) -> f64 {
        assert!(l >= 1, "b_l is defined for l >= 1");
        self.b[l]
    }

    /// c_k^{(n+1)} for 0 <= k <= n <= N − 1.
    pub fn c(&self, k: usize, n: usize) -> f64 {
        assert!(k <= n && n < self.params.steps, "c index out of range: k={k}, n={n}");
        if n == 0 {
            self.a[0]
        } else if k == 0 {
            self.a[0] + self.b[1]
        } else if k < n {
            self.a[k] + self.b[k + 1] - self.b[k]
        } else {
            self.a[n] - self.b[n]
        }
    }

    /// d_k^{(n+1)} for 0 <= k <= n <= N − 1.
    pub fn d(&self, k: usize, n: usize) -> f64 {
        assert!(k <= n && n < self.params.steps, "d index out of range: k={k}, n={n}");
        if n == 0 {
            self.d0_first
        } else if k < n {
            self.c(k, n) / self.mu
        } else {
            let theta = self.params.theta;
            (self.c(n, n) - theta / (1.0 - theta) * self.b[n]) / self.mu
        }
    }

    /// Row d_0^{(n+1)}, ..., d_n^{(n+1)}.
    pub fn d_row(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|k| self.d(k, n)).collect()
    }
}
