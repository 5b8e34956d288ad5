#ifndef VARBOUND_H
#define VARBOUND_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VbStatus {
  VB_STATUS_OK = 0,
  VB_STATUS_NULL_POINTER = 1,
  VB_STATUS_INVALID_INPUT = 2,
  VB_STATUS_WIDTH_EXCEEDED = 3,
  VB_STATUS_TOO_LARGE = 4,
  VB_STATUS_DOMAIN = 5,
  VB_STATUS_PARSE = 6,
  VB_STATUS_BUFFER_TOO_SMALL = 7,
  VB_STATUS_PANIC = 8,
} VbStatus;

/**
 * Opaque instance handle.
 */
typedef struct VbInstance VbInstance;

typedef struct VbSolveResult {
  double max_variance;
  /**
   * Largest free set; on `VB_STATUS_WIDTH_EXCEEDED` the clique number.
   */
  size_t omega_observed;
  size_t m;
  uint64_t vertices_examined;
  size_t schedule_points;
  uint64_t wall_time_ns;
} VbSolveResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. Valid until
 * the next `vb_*` call on the same thread.
 */
const char *vb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *vb_version(void);

/**
 * Builds an instance from `n` lower and `n` upper bounds.
 *
 * # Safety
 * `lower` and `upper` must point to `n` readable doubles; `out` must be
 * writable. The handle must be released with [`vb_instance_free`].
 */
enum VbStatus vb_instance_new(const double *lower,
                              const double *upper,
                              size_t n,
                              struct VbInstance **out);

/**
 * Builds an instance from centers and nonnegative radii.
 *
 * # Safety
 * As for [`vb_instance_new`].
 */
enum VbStatus vb_instance_from_center_radius(const double *center,
                                             const double *radius,
                                             size_t n,
                                             struct VbInstance **out);

/**
 * Samples `n` intervals from a generator spec string such as
 * `"center=uniform:0,1 radius=exp:1"`; `seed` overrides any seed in it.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum VbStatus vb_instance_generate(const char *spec,
                                   size_t n,
                                   uint64_t seed,
                                   struct VbInstance **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `inst` must be null or a handle from this library not yet freed.
 */
void vb_instance_free(struct VbInstance *inst);

/**
 * Number of intervals, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t vb_instance_len(const struct VbInstance *inst);

/**
 * Copies the bounds into caller buffers of capacity `len`.
 *
 * # Safety
 * `lower` and `upper` must each hold `len` writable doubles.
 */
enum VbStatus vb_instance_bounds(const struct VbInstance *inst,
                                 double *lower,
                                 double *upper,
                                 size_t len);

/**
 * Solves exactly. `argmax` may be null; otherwise it receives the
 * maximising signs (`-1` lower, `+1` upper) and must hold `argmax_len >= n`.
 *
 * # Safety
 * `inst` must be a live handle, `result` writable, and `argmax` null or
 * valid for `argmax_len` writes.
 */
enum VbStatus vb_solve(const struct VbInstance *inst,
                       struct VbSolveResult *result,
                       int8_t *argmax,
                       size_t argmax_len);

/**
 * Clique number of the narrowed-interval graph.
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum VbStatus vb_omega(const struct VbInstance *inst, size_t *out);

/**
 * Exhaustive maximum over all `2^n` vertices (n <= 25).
 *
 * # Safety
 * As for [`vb_solve`].
 */
enum VbStatus vb_brute_force_max(const struct VbInstance *inst,
                                 double *out,
                                 int8_t *argmax,
                                 size_t argmax_len);

/**
 * Variance of the vertex selected by `signs` (`n` entries of `-1`/`+1`).
 *
 * # Safety
 * `signs` must hold `n` readable bytes and `out` be writable.
 */
enum VbStatus vb_variance_at(const struct VbInstance *inst,
                             const int8_t *signs,
                             size_t n,
                             double *out);

/**
 * `max(1, 8 L (1 + gamma) / eps)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum VbStatus vb_alpha(double lipschitz, double gamma, double eps, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum VbStatus vb_k_n(uint64_t n, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum VbStatus vb_expected_omega_bound(uint64_t n, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum VbStatus vb_expected_two_omega_bound(uint64_t n, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum VbStatus vb_tail_omega_bound(uint64_t n, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum VbStatus vb_binomial_tail_bound(uint64_t n, double p, double kappa, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum VbStatus vb_u_ell(uint64_t n, double alpha, uint64_t ell, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum VbStatus vb_zeta_n(uint64_t n, double alpha, double c, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VARBOUND_H */
