#ifndef GRAPHWAVE_H
#define GRAPHWAVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Modal formula selector for [`gw_spectral_new`].
 */
#define GW_VARIANT_DUHAMEL 0

/**
 * Initial velocity replaced by h - f(0); kept for comparison only.
 */
#define GW_VARIANT_SHIFTED 1

/**
 * Result code of every entry point.
 */
typedef enum GwStatus {
  GW_STATUS_OK = 0,
  GW_STATUS_NULL_POINTER = 1,
  GW_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or inconsistent input data.
   */
  GW_STATUS_INVALID_INPUT = 3,
  /**
   * A solver or eigensolver failed, or a numerical precondition was not met.
   */
  GW_STATUS_NUMERICAL = 4,
  GW_STATUS_OUT_OF_RANGE = 5,
  GW_STATUS_BUFFER_TOO_SMALL = 6,
  GW_STATUS_PANIC = 7,
} GwStatus;

/**
 * Parsed wave problem: graph, domain, initial data and forcing.
 */
typedef struct GwProblem GwProblem;

/**
 * All time levels of a Rothe run.
 */
typedef struct GwRotheRun GwRotheRun;

/**
 * Eigendecomposition of a problem plus its modal data.
 */
typedef struct GwSpectralSolution GwSpectralSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a
 * successful call. The pointer stays valid until the next call on this
 * thread.
 */
const char *gw_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gw_version(void);

/**
 * Parses a problem from JSON text. Relative graph paths inside the document
 * resolve against `base_dir`, or the working directory when it is NULL.
 *
 * # Safety
 * `json` must be a NUL-terminated string, `base_dir` NULL or NUL-terminated,
 * and `out` a valid pointer to write the handle to.
 */
enum GwStatus gw_problem_from_json(const char *json, const char *base_dir, struct GwProblem **out);

/**
 * # Safety
 * `problem` must be NULL or a handle from [`gw_problem_from_json`] not yet freed.
 */
void gw_problem_free(struct GwProblem *problem);

/**
 * Number of interior vertices, the length of every state vector.
 *
 * # Safety
 * `problem` must be a live handle and `out` a valid pointer.
 */
enum GwStatus gw_problem_interior_len(const struct GwProblem *problem, size_t *out);

/**
 * Copies the id of interior vertex `index` into `buf` as a NUL-terminated
 * string. `needed` (if not NULL) receives the buffer size required,
 * including the terminator, also when `buf` is too small.
 *
 * # Safety
 * `problem` must be a live handle; `buf` must hold `cap` bytes or be NULL
 * with `cap` zero.
 */
enum GwStatus gw_problem_interior_id(const struct GwProblem *problem,
                                     size_t index,
                                     char *buf,
                                     size_t cap,
                                     size_t *needed);

/**
 * Builds the modal solution. `variant` is [`GW_VARIANT_DUHAMEL`] or
 * [`GW_VARIANT_SHIFTED`].
 *
 * # Safety
 * `problem` must be a live handle and `out` a valid pointer.
 */
enum GwStatus gw_spectral_new(const struct GwProblem *problem,
                              int variant,
                              struct GwSpectralSolution **out);

/**
 * # Safety
 * `solution` must be NULL or a handle from [`gw_spectral_new`] not yet freed.
 */
void gw_spectral_free(struct GwSpectralSolution *solution);

/**
 * Writes the eigenvalues in ascending order.
 *
 * # Safety
 * `solution` must be a live handle; `out` must hold `len` doubles.
 */
enum GwStatus gw_spectral_eigenvalues(const struct GwSpectralSolution *solution,
                                      double *out,
                                      size_t len);

/**
 * Evaluates u(t) and u_t(t) on the interior. Either output may be NULL to
 * skip it.
 *
 * # Safety
 * `solution` must be a live handle; non-NULL outputs must hold `len` doubles.
 */
enum GwStatus gw_spectral_state(const struct GwSpectralSolution *solution,
                                double t,
                                double *u,
                                double *du,
                                size_t len);

/**
 * Runs the Rothe scheme with `steps` uniform steps on [0, horizon].
 *
 * # Safety
 * `problem` must be a live handle and `out` a valid pointer.
 */
enum GwStatus gw_rothe_solve(const struct GwProblem *problem,
                             double horizon,
                             size_t steps,
                             struct GwRotheRun **out);

/**
 * # Safety
 * `run` must be NULL or a handle from [`gw_rothe_solve`] not yet freed.
 */
void gw_rothe_free(struct GwRotheRun *run);

/**
 * Number of steps n; levels are indexed 0..=n.
 *
 * # Safety
 * `run` must be a live handle and `out` a valid pointer.
 */
enum GwStatus gw_rothe_steps(const struct GwRotheRun *run, size_t *out);

/**
 * Writes level `index` (the approximation at t = index * T / n).
 *
 * # Safety
 * `run` must be a live handle; `out` must hold `len` doubles.
 */
enum GwStatus gw_rothe_level(const struct GwRotheRun *run, size_t index, double *out, size_t len);

/**
 * Largest scheme residual relative to its scale; at most 1e-10 for a
 * correctly solved run.
 *
 * # Safety
 * `run` must be a live handle and `out` a valid pointer.
 */
enum GwStatus gw_rothe_scheme_residual(const struct GwRotheRun *run, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHWAVE_H */
