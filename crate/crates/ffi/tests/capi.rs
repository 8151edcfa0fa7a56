use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use fracgordon_ffi::*;

fn last_error() -> String {
    let p = fg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn new_solver(case: u32, alpha: f64, engine: u32, m: usize, n: usize) -> Result<*mut FgSolver, FgStatus> {
    let mut s = ptr::null_mut();
    match unsafe { fg_solver_new(case, alpha, engine, m, n, &mut s) } {
        FgStatus::Ok => Ok(s),
        other => Err(other),
    }
}

#[test]
fn lifecycle_matches_rust_api() {
    let s = new_solver(2, 1.8, FG_ENGINE_STD, 40, 20).unwrap();
    let mut e2 = f64::NAN;
    assert_eq!(unsafe { fg_solver_e2(s, &mut e2) }, FgStatus::InvalidArgument);
    assert!(last_error().contains("not been run"));

    assert_eq!(unsafe { fg_solver_run(s) }, FgStatus::Ok);
    assert!(fg_last_error_message().is_null());
    assert_eq!(unsafe { fg_solver_e2(s, &mut e2) }, FgStatus::Ok);

    let cfg = fracgordon::SchemeConfig::manufactured(fracgordon::Case::SineGordon, 1.8, 40, 20, fracgordon::Variant::Standard).unwrap();
    let out = fracgordon::schemes::run(&cfg).unwrap();
    assert_eq!(e2, out.e2.unwrap());

    let mut len = 0usize;
    let mut steps = 0usize;
    assert_eq!(unsafe { fg_solver_grid_len(s, &mut len) }, FgStatus::Ok);
    assert_eq!(unsafe { fg_solver_steps(s, &mut steps) }, FgStatus::Ok);
    assert_eq!((len, steps), (41, 20));

    let mut buf = vec![0.0; len];
    assert_eq!(unsafe { fg_solver_copy_level(s, steps, buf.as_mut_ptr(), len) }, FgStatus::Ok);
    assert_eq!(buf, out.final_level().values());
    assert_eq!(unsafe { fg_solver_copy_level(s, steps + 1, buf.as_mut_ptr(), len) }, FgStatus::InvalidArgument);
    assert_eq!(unsafe { fg_solver_copy_level(s, 0, buf.as_mut_ptr(), len - 1) }, FgStatus::InvalidArgument);

    let mut res = f64::NAN;
    assert_eq!(unsafe { fg_solver_max_residual(s, &mut res) }, FgStatus::Ok);
    assert!(res < 1e-9);
    unsafe { fg_solver_free(s) };
}

#[test]
fn every_engine_runs() {
    for engine in [FG_ENGINE_STD, FG_ENGINE_COMPACT, FG_ENGINE_L1_CENTRAL, FG_ENGINE_L1_LAGGED] {
        let s = new_solver(3, 1.5, engine, 16, 16).unwrap();
        assert_eq!(unsafe { fg_solver_run(s) }, FgStatus::Ok);
        let mut e2 = 0.0;
        assert_eq!(unsafe { fg_solver_e2(s, &mut e2) }, FgStatus::Ok);
        assert!(e2 > 0.0 && e2 < 0.05, "engine {engine}: {e2}");
        unsafe { fg_solver_free(s) };
    }
}

#[test]
fn bad_arguments() {
    assert_eq!(new_solver(4, 1.5, FG_ENGINE_STD, 10, 10).unwrap_err(), FgStatus::InvalidArgument);
    assert!(last_error().contains("case"));
    assert_eq!(new_solver(1, 2.5, FG_ENGINE_STD, 10, 10).unwrap_err(), FgStatus::InvalidArgument);
    assert_eq!(new_solver(1, 1.5, 9, 10, 10).unwrap_err(), FgStatus::InvalidArgument);
    assert_eq!(new_solver(1, 1.5, FG_ENGINE_STD, 1, 10).unwrap_err(), FgStatus::InvalidArgument);
    assert_eq!(
        unsafe { fg_solver_new(1, 1.5, FG_ENGINE_STD, 10, 10, ptr::null_mut()) },
        FgStatus::NullPointer
    );
    assert_eq!(unsafe { fg_solver_run(ptr::null_mut()) }, FgStatus::NullPointer);
    let mut x = 0.0;
    assert_eq!(unsafe { fg_solver_e2(ptr::null(), &mut x) }, FgStatus::NullPointer);
    unsafe { fg_solver_free(ptr::null_mut()) };
}

#[test]
fn scalar_helpers() {
    let mut g = 0.0;
    assert_eq!(unsafe { fg_gamma(0.5, &mut g) }, FgStatus::Ok);
    assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    assert_eq!(unsafe { fg_gamma(-1.0, &mut g) }, FgStatus::InvalidArgument);
    assert_eq!(unsafe { fg_gamma(1.0, ptr::null_mut()) }, FgStatus::NullPointer);

    let mut d = 0.0;
    assert_eq!(unsafe { fg_coefficient_d(1.5, 0.1, 10, 0, 3, &mut d) }, FgStatus::Ok);
    let table = fracgordon::CoefficientTable::new(fracgordon::FractionalParams::new(1.5, 0.1, 10).unwrap()).unwrap();
    assert_eq!(d, table.d(0, 3));
    assert_eq!(unsafe { fg_coefficient_d(1.5, 0.1, 10, 4, 3, &mut d) }, FgStatus::InvalidArgument);
    assert_eq!(unsafe { fg_coefficient_d(1.5, 0.1, 10, 0, 10, &mut d) }, FgStatus::InvalidArgument);

    let v = unsafe { CStr::from_ptr(fg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn header_is_current_and_compiles() {
    let header = std::fs::read_to_string(header_dir().join("fracgordon.h")).unwrap();
    for name in ["fg_solver_new", "fg_solver_copy_level", "fg_last_error_message", "FG_STATUS_PANIC", "typedef struct FgSolver FgSolver"] {
        assert!(header.contains(name), "{name} missing from header");
    }
    if !have_cc() {
        eprintln!("cc not found; skipping header compilation");
        return;
    }
    for std in ["-std=c99", "-std=c11"] {
        let status = Command::new("cc")
            .args([std, "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
            .arg(header_dir().join("fracgordon.h"))
            .status()
            .unwrap();
        assert!(status.success(), "header fails to compile with {std}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    // target/<profile>/deps/capi-<hash> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libfracgordon_ffi.a");
    if !have_cc() || !lib.exists() {
        eprintln!("cc or {} unavailable; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let out = Command::new("cc")
        .arg("-std=c99")
        .arg("-I")
        .arg(header_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "link failed: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "smoke exited {:?}: {stdout} {}", run.status, String::from_utf8_lossy(&run.stderr));
    assert!(stdout.starts_with("len=21 e2="), "{stdout}");
}
