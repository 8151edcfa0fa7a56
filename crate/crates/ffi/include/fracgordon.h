#ifndef FRACGORDON_H
#define FRACGORDON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Second-order central differences in space.
 */
#define FG_ENGINE_STD 0

/*
 Fourth-order compact differences in space.
 */
#define FG_ENGINE_COMPACT 1

/*
 L1 scheme with fixed-point iteration on the nonlinear term.
 */
#define FG_ENGINE_L1_CENTRAL 2

/*
 L1 scheme with the nonlinear term taken from the previous level.
 */
#define FG_ENGINE_L1_LAGGED 3

typedef enum FgStatus {
  FG_STATUS_OK = 0,
  FG_STATUS_NULL_POINTER = 1,
  FG_STATUS_INVALID_ARGUMENT = 2,
  FG_STATUS_SOLVER = 3,
  FG_STATUS_PANIC = 4,
} FgStatus;

/*
 Opaque solver handle.
 */
typedef struct FgSolver FgSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates a solver for manufactured case 1, 2 or 3 on [0,1] × (0,1] with
 `intervals` space intervals and `steps` time steps.

 # Safety
 `out` must be null or valid for writing one pointer.
 */
enum FgStatus fg_solver_new(uint32_t case_id,
                            double alpha,
                            uint32_t engine,
                            size_t intervals,
                            size_t steps,
                            struct FgSolver **out);

/*
 Integrates to the final time. Running again recomputes from scratch.

 # Safety
 `solver` must be null or a live handle from [`fg_solver_new`].
 */
enum FgStatus fg_solver_run(struct FgSolver *solver);

/*
 Maximum discrete L2 error over all time levels.

 # Safety
 `solver` must be null or a live handle; `out` null or writable.
 */
enum FgStatus fg_solver_e2(const struct FgSolver *solver, double *out);

/*
 Largest residual of the discrete equations over all steps.

 # Safety
 `solver` must be null or a live handle; `out` null or writable.
 */
enum FgStatus fg_solver_max_residual(const struct FgSolver *solver, double *out);

/*
 Number of grid nodes, M + 1.

 # Safety
 `solver` must be null or a live handle; `out` null or writable.
 */
enum FgStatus fg_solver_grid_len(const struct FgSolver *solver, size_t *out);

/*
 Number of time steps N; levels 0..=N are available after a run.

 # Safety
 `solver` must be null or a live handle; `out` null or writable.
 */
enum FgStatus fg_solver_steps(const struct FgSolver *solver, size_t *out);

/*
 Copies time level `level` into `buf`, which must hold exactly the grid
 length.

 # Safety
 `solver` must be null or a live handle; `buf` null or valid for `len`
 writes.
 */
enum FgStatus fg_solver_copy_level(const struct FgSolver *solver,
                                   size_t level,
                                   double *buf,
                                   size_t len);

/*
 Releases a handle; null is ignored.

 # Safety
 `solver` must be null or a live handle not used afterwards.
 */
void fg_solver_free(struct FgSolver *solver);

/*
 Γ(x) for x > 0.

 # Safety
 `out` must be null or writable.
 */
enum FgStatus fg_gamma(double x, double *out);

/*
 Weight d_k^{(n+1)} of the discrete Caputo operator for order `alpha`,
 step `tau` and `steps` levels, with k ≤ n < steps.

 # Safety
 `out` must be null or writable.
 */
enum FgStatus fg_coefficient_d(double alpha,
                               double tau,
                               size_t steps,
                               size_t k,
                               size_t n,
                               double *out);

/*
 Message for the last failed call on this thread, or null. The pointer is
 valid until the next call into this library from the same thread.
 */
const char *fg_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *fg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACGORDON_H */
