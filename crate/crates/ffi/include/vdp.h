#ifndef VDP_H
#define VDP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VdpStatus {
  VDP_STATUS_OK = 0,
  VDP_STATUS_NULL_POINTER = 1,
  VDP_STATUS_INVALID_ARGUMENT = 2,
  // `kappa2 < 0.1` with `dim == 0`.
  VDP_STATUS_CUTOFF_REQUIRED = 3,
  VDP_STATUS_COMPUTATION_FAILED = 4,
  VDP_STATUS_INDEX_OUT_OF_RANGE = 5,
  VDP_STATUS_BUFFER_TOO_SMALL = 6,
  VDP_STATUS_PANIC = 7,
} VdpStatus;

typedef enum VdpRegime {
  VDP_REGIME_ANTIBUNCHED = 0,
  VDP_REGIME_SINGLE_QUANTUM = 1,
  VDP_REGIME_COLLECTIVE_BURSTS = 2,
  VDP_REGIME_UNDEFINED = 3,
} VdpRegime;

// Opaque density matrix.
typedef struct VdpState VdpState;

// Model parameters in units of `kappa1`. `dim == 0` picks the cutoff automatically.
typedef struct VdpParams {
  double detuning;
  double drive;
  double kappa1;
  double kappa2;
  size_t dim;
} VdpParams;

typedef struct VdpMetrics {
  // NaN when the mode is empty (`regime == Undefined`).
  double g2;
  double mean_n;
  double coherence;
  double delta;
  double delta_error;
  double purity;
  enum VdpRegime regime;
} VdpMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next failing call on the same thread; do not free.
const char *vdp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *vdp_version(void);

// Solve for the steady state and store a new handle in `*out`.
//
// # Safety
// `params` must point to a valid [`VdpParams`]; `out` must be writable.
enum VdpStatus vdp_steady_state_new(const struct VdpParams *params, struct VdpState **out);

// The undriven deep-quantum state `diag(2/3, 1/3, 0, ...)` in `dim` levels.
//
// # Safety
// `out` must be writable.
enum VdpStatus vdp_limit_cycle_new(size_t dim, struct VdpState **out);

// Release a handle. Null is ignored.
//
// # Safety
// `state` must come from a `*_new` call and not be used afterwards.
void vdp_state_free(struct VdpState *state);

// # Safety
// `state` must be a live handle; `out` must be writable.
enum VdpStatus vdp_state_dim(const struct VdpState *state, size_t *out);

// Residual `|L rho|` reported by the solver (0 for analytic states).
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum VdpStatus vdp_state_residual(const struct VdpState *state, double *out);

// Matrix element `rho_mn` as real and imaginary parts.
//
// # Safety
// `state` must be a live handle; `re` and `im` must be writable.
enum VdpStatus vdp_state_get_entry(const struct VdpState *state,
                                   size_t m,
                                   size_t n,
                                   double *re,
                                   double *im);

// Synchronization metrics; `n_theta == 0` uses the library default.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum VdpStatus vdp_state_metrics(const struct VdpState *state,
                                 size_t n_theta,
                                 struct VdpMetrics *out);

// Tomogram on `n_theta` angles in `[0, 2pi)` and `n_x` points in
// `[x_min, x_max]`, written row-major (theta rows) into `buf`, which must
// hold `n_theta * n_x` values.
//
// # Safety
// `state` must be a live handle; `buf` must be valid for `buf_len` writes.
enum VdpStatus vdp_state_tomogram(const struct VdpState *state,
                                  double x_min,
                                  double x_max,
                                  size_t n_x,
                                  size_t n_theta,
                                  double *buf,
                                  size_t buf_len);

// Wigner function on the square `[-half_extent, half_extent]^2` with `n`
// points per axis, row-major in x into `buf` (`n * n` values).
//
// # Safety
// `state` must be a live handle; `buf` must be valid for `buf_len` writes.
enum VdpStatus vdp_state_wigner(const struct VdpState *state,
                                double half_extent,
                                size_t n,
                                double *buf,
                                size_t buf_len);

// Closed-form `|rho_01|` in the strong-damping limit.
//
// # Safety
// `out` must be writable.
enum VdpStatus vdp_analytic_coherence(double drive, double detuning, double kappa1, double *out);

// Drive at which [`vdp_analytic_coherence`] peaks.
//
// # Safety
// `out` must be writable.
enum VdpStatus vdp_critical_drive(double detuning, double kappa1, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VDP_H */
