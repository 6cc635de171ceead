#ifndef DCG_FFI_H
#define DCG_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum DcgStatus {
  DCG_STATUS_OK = 0,
  DCG_STATUS_NULL_POINTER = 1,
  DCG_STATUS_INVALID_ARGUMENT = 2,
  DCG_STATUS_PARSE = 3,
  DCG_STATUS_DIMENSION = 4,
  DCG_STATUS_NUMERICAL = 5,
  DCG_STATUS_GROUP = 6,
  DCG_STATUS_IO = 7,
  DCG_STATUS_PANIC = 8,
} DcgStatus;

/**
 * Decoupling group selector.
 */
typedef enum DcgModel {
  /**
   * ℤ₂⊗ℤ₂ with collective X and Y.
   */
  DCG_MODEL_LINEAR = 0,
  /**
   * ℤ₂ with collective X.
   */
  DCG_MODEL_DEPHASING = 1,
} DcgModel;

/**
 * Opaque sampled spin-bath model.
 */
typedef struct DcgBathModel DcgBathModel;

/**
 * Opaque control schedule.
 */
typedef struct DcgSchedule DcgSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dcg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dcg_version(void);

/**
 * DCG for `gate_spec` over the group `model` (a [`DcgModel`] value) on `n`
 * qubits.
 *
 * # Safety
 * `gate_spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DcgStatus dcg_schedule_dcg(uint32_t model,
                                const char *gate_spec,
                                size_t n,
                                double tau,
                                struct DcgSchedule **out);

/**
 * Plain EDD implementing the identity; `model` is a [`DcgModel`] value.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DcgStatus dcg_schedule_edd(uint32_t model, size_t n, double tau, struct DcgSchedule **out);

/**
 * 64τ entangling block for the 1-based pair `(pair, pair+1)` on a Heisenberg
 * chain of `n` qubits with coupling `lambda`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DcgStatus dcg_schedule_drift_pair(size_t n,
                                       double lambda,
                                       size_t pair,
                                       double tau,
                                       struct DcgSchedule **out);

/**
 * Parses the line-oriented schedule text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DcgStatus dcg_schedule_from_text(const char *text, struct DcgSchedule **out);

/**
 * Serializes to the schedule text format; release with [`dcg_string_free`].
 *
 * # Safety
 * `schedule` must come from this library and `out` be a valid pointer.
 */
enum DcgStatus dcg_schedule_to_text(const struct DcgSchedule *schedule, char **out);

/**
 * Number of segments over all layers.
 *
 * # Safety
 * `schedule` must come from this library and `out` be a valid pointer.
 */
enum DcgStatus dcg_schedule_segment_count(const struct DcgSchedule *schedule, size_t *out);

/**
 * Total duration in units of τ.
 *
 * # Safety
 * `schedule` must come from this library and `out` be a valid pointer.
 */
enum DcgStatus dcg_schedule_duration_multiplier(const struct DcgSchedule *schedule, double *out);

/**
 * Worst normalized first-order residual `‖mod_b Φ^{[1]}‖/(‖H_e‖T)` over
 * `samples` random members of `subspace` (`linear`, `dephasing` or
 * `nearest_neighbor`) with `bath_qubits` bath qubits.
 *
 * # Safety
 * `schedule` must come from this library, `subspace` be a NUL-terminated
 * string and `worst_residual` a valid pointer.
 */
enum DcgStatus dcg_schedule_verify(const struct DcgSchedule *schedule,
                                   const char *subspace,
                                   size_t samples,
                                   uint64_t seed,
                                   size_t bath_qubits,
                                   double *worst_residual);

/**
 * Releases a schedule; null is ignored.
 *
 * # Safety
 * `schedule` must come from this library and not be used afterwards.
 */
void dcg_schedule_free(struct DcgSchedule *schedule);

/**
 * Samples a random dipolar bath of `n_b` spins for `n` qubits.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DcgStatus dcg_bath_model_new(size_t n,
                                  size_t n_b,
                                  double gamma,
                                  double a,
                                  uint64_t seed,
                                  struct DcgBathModel **out);

/**
 * Fidelity of `schedule` evolved through `model` against `gate_spec`, or
 * against the ideal schedule product when `gate_spec` is null.
 *
 * # Safety
 * Handles must come from this library; `gate_spec` may be null or a
 * NUL-terminated string; `out` must be a valid pointer.
 */
enum DcgStatus dcg_bath_model_fidelity(const struct DcgBathModel *model,
                                       const struct DcgSchedule *schedule,
                                       const char *gate_spec,
                                       double *out);

/**
 * Primitive and DCG fidelities for `gate_spec` at `tau`, and their
 * improvement ratio `r = (1 − f_prim)/(1 − f_dcg)`.
 *
 * # Safety
 * `model` must come from this library, `gate_spec` be a NUL-terminated
 * string and the three outputs valid pointers.
 */
enum DcgStatus dcg_improvement_ratio(const struct DcgBathModel *model,
                                     const char *gate_spec,
                                     double tau,
                                     double *f_prim,
                                     double *f_dcg,
                                     double *r);

/**
 * Releases a bath model; null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void dcg_bath_model_free(struct DcgBathModel *model);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void dcg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DCG_FFI_H */
