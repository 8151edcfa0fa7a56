//! Linearized finite difference schemes for nonlinear time-fractional
//! Klein-Gordon type equations
//!
//! ```text
//!   D_t^α u = u_xx − f(u) + p(x, t),   x ∈ (a, b), t ∈ (0, T],  1 < α < 2,
//!   u(a, t) = u(b, t) = 0,   u(x, 0) = φ(x),   u_t(x, 0) = ψ(x),
//! ```
//!
//! where `D_t^α` is the Caputo derivative. The nonlinear term is evaluated at
//! the previous time level, so every step costs a single tridiagonal solve
//! while retaining second order in time. A fourth-order compact variant in
//! space and the classical L1 scheme (for comparison) are provided, together
//! with manufactured test problems and convergence-study drivers.

pub mod coeffs;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod problems;
pub mod reference;
pub mod schemes;
pub mod trisolve;

pub use coeffs::{gamma, CoefficientTable, FractionalParams};
pub use error::{Error, Result};
pub use mesh::{GridFunction, SpaceGrid};
pub use problems::{Case, ProblemSpec};
pub use schemes::{RunOutput, SchemeConfig, SchemeState, StepReport, Variant};
pub use trisolve::TridiagonalSystem;
