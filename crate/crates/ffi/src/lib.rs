//! C interface to the fracgordon solvers.
//!
//! Solvers are opaque handles created by [`fg_solver_new`] and released by
//! [`fg_solver_free`]. Every fallible call returns an [`FgStatus`]; on failure
//! a description is available from [`fg_last_error_message`] on the same
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fracgordon::reference::{run_l1, L1Config, NonlinearityMode};
use fracgordon::schemes::{run, RunOutput, SchemeConfig};
use fracgordon::{gamma, Case, CoefficientTable, FractionalParams, Variant};

/// Second-order central differences in space.
pub const FG_ENGINE_STD: u32 = 0;
/// Fourth-order compact differences in space.
pub const FG_ENGINE_COMPACT: u32 = 1;
/// L1 scheme with fixed-point iteration on the nonlinear term.
pub const FG_ENGINE_L1_CENTRAL: u32 = 2;
/// L1 scheme with the nonlinear term taken from the previous level.
pub const FG_ENGINE_L1_LAGGED: u32 = 3;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Solver = 3,
    Panic = 4,
}

enum Engine {
    Linearized(SchemeConfig),
    L1(L1Config),
}

/// Opaque solver handle.
pub struct FgSolver {
    engine: Engine,
    output: Option<RunOutput>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

type Outcome = Result<(), (FgStatus, String)>;

fn invalid(msg: impl Into<String>) -> (FgStatus, String) {
    (FgStatus::InvalidArgument, msg.into())
}

fn solver_err(e: fracgordon::Error) -> (FgStatus, String) {
    match e {
        fracgordon::Error::InvalidOrder(_)
        | fracgordon::Error::InvalidParameter(_)
        | fracgordon::Error::UnknownCase(_)
        | fracgordon::Error::Config(_) => (FgStatus::InvalidArgument, e.to_string()),
        other => (FgStatus::Solver, other.to_string()),
    }
}

fn null() -> (FgStatus, String) {
    (FgStatus::NullPointer, "null pointer argument".into())
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Outcome) -> FgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            FgStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(null());
    }
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn solver_ref<'a>(solver: *const FgSolver) -> Result<&'a FgSolver, (FgStatus, String)> {
    unsafe { solver.as_ref() }.ok_or_else(null)
}

fn finished(solver: &FgSolver) -> Result<&RunOutput, (FgStatus, String)> {
    solver
        .output
        .as_ref()
        .ok_or_else(|| invalid("solver has not been run"))
}

/// Creates a solver for manufactured case 1, 2 or 3 on [0,1] × (0,1] with
/// `intervals` space intervals and `steps` time steps.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn fg_solver_new(
    case_id: u32,
    alpha: f64,
    engine: u32,
    intervals: usize,
    steps: usize,
    out: *mut *mut FgSolver,
) -> FgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let case = Case::from_id(case_id).map_err(solver_err)?;
        let problem = fracgordon::problems::manufactured_case(case, alpha).map_err(solver_err)?;
        let engine = match engine {
            FG_ENGINE_STD | FG_ENGINE_COMPACT => {
                let variant = if engine == FG_ENGINE_STD { Variant::Standard } else { Variant::Compact };
                Engine::Linearized(SchemeConfig::uniform(problem, intervals, steps, variant).map_err(solver_err)?)
            }
            FG_ENGINE_L1_CENTRAL | FG_ENGINE_L1_LAGGED => {
                let mode = if engine == FG_ENGINE_L1_CENTRAL {
                    NonlinearityMode::CentralIterative
                } else {
                    NonlinearityMode::Lagged
                };
                Engine::L1(L1Config::uniform(problem, intervals, steps, mode).map_err(solver_err)?)
            }
            other => return Err(invalid(format!("unknown engine code {other}"))),
        };
        let handle = Box::into_raw(Box::new(FgSolver { engine, output: None }));
        unsafe { out.write(handle) };
        Ok(())
    })
}

/// Integrates to the final time. Running again recomputes from scratch.
///
/// # Safety
/// `solver` must be null or a live handle from [`fg_solver_new`].
#[no_mangle]
pub unsafe extern "C" fn fg_solver_run(solver: *mut FgSolver) -> FgStatus {
    guard(|| {
        let solver = unsafe { solver.as_mut() }.ok_or_else(null)?;
        solver.output = None;
        let output = match &solver.engine {
            Engine::Linearized(cfg) => run(cfg),
            Engine::L1(cfg) => run_l1(cfg).map(|r| r.output),
        }
        .map_err(solver_err)?;
        solver.output = Some(output);
        Ok(())
    })
}

/// Maximum discrete L2 error over all time levels.
///
/// # Safety
/// `solver` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fg_solver_e2(solver: *const FgSolver, out: *mut f64) -> FgStatus {
    guard(|| {
        let e2 = finished(unsafe { solver_ref(solver) }?)?
            .e2
            .ok_or_else(|| invalid("problem has no exact solution"))?;
        unsafe { write(out, e2) }
    })
}

/// Largest residual of the discrete equations over all steps.
///
/// # Safety
/// `solver` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fg_solver_max_residual(solver: *const FgSolver, out: *mut f64) -> FgStatus {
    guard(|| {
        let r = finished(unsafe { solver_ref(solver) }?)?.max_residual();
        unsafe { write(out, r) }
    })
}

/// Number of grid nodes, M + 1.
///
/// # Safety
/// `solver` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fg_solver_grid_len(solver: *const FgSolver, out: *mut usize) -> FgStatus {
    guard(|| {
        let len = match &unsafe { solver_ref(solver) }?.engine {
            Engine::Linearized(cfg) => cfg.grid.len(),
            Engine::L1(cfg) => cfg.grid.len(),
        };
        unsafe { write(out, len) }
    })
}

/// Number of time steps N; levels 0..=N are available after a run.
///
/// # Safety
/// `solver` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fg_solver_steps(solver: *const FgSolver, out: *mut usize) -> FgStatus {
    guard(|| {
        let n = match &unsafe { solver_ref(solver) }?.engine {
            Engine::Linearized(cfg) => cfg.params.steps(),
            Engine::L1(cfg) => cfg.params.steps(),
        };
        unsafe { write(out, n) }
    })
}

/// Copies time level `level` into `buf`, which must hold exactly the grid
/// length.
///
/// # Safety
/// `solver` must be null or a live handle; `buf` null or valid for `len`
/// writes.
#[no_mangle]
pub unsafe extern "C" fn fg_solver_copy_level(
    solver: *const FgSolver,
    level: usize,
    buf: *mut f64,
    len: usize,
) -> FgStatus {
    guard(|| {
        let output = finished(unsafe { solver_ref(solver) }?)?;
        if buf.is_null() {
            return Err(null());
        }
        let u = output
            .history
            .get(level)
            .ok_or_else(|| invalid(format!("level {level} out of range 0..={}", output.history.len() - 1)))?;
        let values = u.values();
        if len != values.len() {
            return Err(invalid(format!("buffer length {len}, grid length {}", values.len())));
        }
        unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, len) };
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `solver` must be null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fg_solver_free(solver: *mut FgSolver) {
    if !solver.is_null() {
        drop(unsafe { Box::from_raw(solver) });
    }
}

/// Γ(x) for x > 0.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn fg_gamma(x: f64, out: *mut f64) -> FgStatus {
    guard(|| {
        let g = gamma(x).map_err(solver_err)?;
        unsafe { write(out, g) }
    })
}

/// Weight d_k^{(n+1)} of the discrete Caputo operator for order `alpha`,
/// step `tau` and `steps` levels, with k ≤ n < steps.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn fg_coefficient_d(
    alpha: f64,
    tau: f64,
    steps: usize,
    k: usize,
    n: usize,
    out: *mut f64,
) -> FgStatus {
    guard(|| {
        if !(k <= n && n < steps) {
            return Err(invalid(format!("need k <= n < steps, got k={k}, n={n}, steps={steps}")));
        }
        let params = FractionalParams::new(alpha, tau, steps).map_err(solver_err)?;
        let table = CoefficientTable::new(params).map_err(solver_err)?;
        unsafe { write(out, table.d(k, n)) }
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn fg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
