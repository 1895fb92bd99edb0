/* C interface to the qipm interior point solver.
* Generated by cbindgen; do not edit by hand. */

#ifndef QIPM_H
#define QIPM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QipmAlgo {
  /**
   * Single-scale dual method.
   */
  QipmAlgo_Ae = 0,
  /**
   * Dual method inside the refinement loop.
   */
  QipmAlgo_Ir = 1,
  /**
   * Feasible primal-dual method.
   */
  QipmAlgo_Oss = 2,
} QipmAlgo;

typedef enum QipmBackend {
  QipmBackend_Exact = 0,
  QipmBackend_Perturbed = 1,
  QipmBackend_Cg = 2,
} QipmBackend;

typedef enum QipmStatus {
  QipmStatus_Ok = 0,
  QipmStatus_NullPointer = 1,
  QipmStatus_InvalidArgument = 2,
  QipmStatus_SolverFailure = 3,
  QipmStatus_Panic = 4,
} QipmStatus;

/**
 * Opaque problem handle: constraint matrix, right-hand side, costs, and
 * (for generated instances) a centered start iterate.
 */
typedef struct QipmProblem QipmProblem;

/**
 * Opaque solution handle; read through the `qipm_solution_*` accessors.
 */
typedef struct QipmSolution QipmSolution;

/**
 * Plain-data solve configuration; get defaults from
 * [`qipm_solve_options_default`] and override fields as needed.
 */
typedef struct QipmSolveOptions {
  enum QipmAlgo algo;
  enum QipmBackend backend;
  /**
   * Certified duality-gap target for ae/oss; final precision for ir.
   */
  double eps;
  /**
   * Per-round precision of the refined run (ir only).
   */
  double zeta_tilde;
  /**
   * Barrier reduction rate; zero or negative picks 1/(4 sqrt(n)).
   */
  double theta;
  /**
   * Direction error of the noisy oracle backends.
   */
  double eps_dir;
  /**
   * Oracle seed.
   */
  uint64_t seed;
} QipmSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or null when
 * the last call succeeded. The pointer stays valid until the next failing
 * call on the same thread.
 */
const char *qipm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qipm_version(void);

struct QipmSolveOptions qipm_solve_options_default(void);

/**
 * Builds a random strictly feasible instance with a centered start.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum QipmStatus qipm_problem_generate(uintptr_t n,
                                      uintptr_t m,
                                      uint64_t seed,
                                      struct QipmProblem **out);

/**
 * Reads an MPS file and canonicalizes it to equality standard form.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum QipmStatus qipm_problem_from_mps(const char *path, struct QipmProblem **out);

/**
 * Builds a problem from dense arrays: `a` is row-major `m x n`.
 *
 * # Safety
 * `a`, `b`, `c` must point to `m*n`, `m`, and `n` readable doubles; `name`
 * may be null or NUL-terminated; `out` must be writable.
 */
enum QipmStatus qipm_problem_from_parts(uintptr_t m,
                                        uintptr_t n,
                                        const double *a,
                                        const double *b,
                                        const double *c,
                                        const char *name,
                                        struct QipmProblem **out);

/**
 * Releases a problem handle; null is a no-op.
 *
 * # Safety
 * `p` must come from a `qipm_problem_*` constructor and not be used after.
 */
void qipm_problem_free(struct QipmProblem *p);

/**
 * Number of equality constraints, or 0 for null.
 *
 * # Safety
 * `p` must be a live problem handle or null.
 */
uintptr_t qipm_problem_num_constraints(const struct QipmProblem *p);

/**
 * Number of variables, or 0 for null.
 *
 * # Safety
 * `p` must be a live problem handle or null.
 */
uintptr_t qipm_problem_num_variables(const struct QipmProblem *p);

/**
 * Solves the instance; on `Ok` the caller owns `*out` and must release it
 * with [`qipm_solution_free`]. Null `options` means defaults.
 *
 * # Safety
 * `p` must be a live problem handle; `options` null or valid; `out`
 * writable.
 */
enum QipmStatus qipm_solve(const struct QipmProblem *p,
                           const struct QipmSolveOptions *options,
                           struct QipmSolution **out);

/**
 * Releases a solution handle; null is a no-op.
 *
 * # Safety
 * `s` must come from [`qipm_solve`] and not be used after.
 */
void qipm_solution_free(struct QipmSolution *s);

/**
 * Length of the dual vector `y` (also the constraint count).
 *
 * # Safety
 * `s` must be a live solution handle or null.
 */
uintptr_t qipm_solution_dual_len(const struct QipmSolution *s);

/**
 * Length of the slack vector `s` (also the variable count).
 *
 * # Safety
 * `s` must be a live solution handle or null.
 */
uintptr_t qipm_solution_slack_len(const struct QipmSolution *s);

/**
 * Copies the dual vector into `buf`, which must hold exactly
 * `qipm_solution_dual_len` doubles.
 *
 * # Safety
 * `s` live or null; `buf` writable for `len` doubles.
 */
enum QipmStatus qipm_solution_copy_dual(const struct QipmSolution *s, double *buf, uintptr_t len);

/**
 * Copies the slack vector into `buf`, which must hold exactly
 * `qipm_solution_slack_len` doubles.
 *
 * # Safety
 * `s` live or null; `buf` writable for `len` doubles.
 */
enum QipmStatus qipm_solution_copy_slack(const struct QipmSolution *s, double *buf, uintptr_t len);

/**
 * Copies the primal vector into `buf`; only the oss pipeline produces one,
 * other solutions report `InvalidArgument`.
 *
 * # Safety
 * `s` live or null; `buf` writable for `len` doubles.
 */
enum QipmStatus qipm_solution_copy_primal(const struct QipmSolution *s, double *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QIPM_H */
