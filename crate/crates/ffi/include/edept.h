#ifndef EDEPT_H
#define EDEPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EdeptStatus {
  EDEPT_STATUS_OK = 0,
  EDEPT_STATUS_NULL_POINTER = 1,
  EDEPT_STATUS_INVALID_ARGUMENT = 2,
  EDEPT_STATUS_OUT_OF_RANGE = 3,
  EDEPT_STATUS_NUMERICAL = 4,
  EDEPT_STATUS_PANIC = 5,
} EdeptStatus;

typedef enum EdeptBranch {
  // Real part for odd α, imaginary part for even α.
  EDEPT_BRANCH_PARITY_DEFAULT = 0,
  EDEPT_BRANCH_REAL_PART = 1,
  EDEPT_BRANCH_IMAG_PART = 2,
  EDEPT_BRANCH_ANALYTIC = 3,
} EdeptBranch;

typedef enum EdeptQuantity {
  EDEPT_QUANTITY_ABS_A = 0,
  EDEPT_QUANTITY_ABS_E = 1,
  EDEPT_QUANTITY_ABS_B = 2,
  EDEPT_QUANTITY_U_TOTAL = 3,
  EDEPT_QUANTITY_U_ELECTRIC = 4,
  EDEPT_QUANTITY_DETECTION_RATE = 5,
} EdeptQuantity;

// Opaque parameter set.
typedef struct EdeptParamsHandle EdeptParamsHandle;

// Opaque photon state computed on the default grids.
typedef struct EdeptSpectrumHandle EdeptSpectrumHandle;

typedef struct EdeptEnergy {
  double u_total;
  double u_electric;
  double u_magnetic;
  double detection_rate;
} EdeptEnergy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next call into the library on the same thread.
const char *edept_last_error_message(void);

// Creates a parameter set.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle pointer.
enum EdeptStatus edept_params_new(uint32_t alpha,
                                  double g0,
                                  double g1,
                                  double g2,
                                  enum EdeptBranch branch,
                                  struct EdeptParamsHandle **out);

// Releases a parameter set. Null is ignored.
//
// # Safety
// `handle` must come from `edept_params_new` and not be used afterwards.
void edept_params_free(struct EdeptParamsHandle *handle);

// Complex azimuthal potential `A_θ` at `(t, ρ, z)`.
//
// # Safety
// `handle` must be live; `re` and `im` must be writable.
enum EdeptStatus edept_vector_potential(const struct EdeptParamsHandle *handle,
                                        double t,
                                        double rho,
                                        double z,
                                        double *re,
                                        double *im);

// Energy densities and detection rate at a Cartesian point.
//
// # Safety
// `handle` must be live; `out` must be writable.
enum EdeptStatus edept_energy_density(const struct EdeptParamsHandle *handle,
                                      double t,
                                      double x,
                                      double y,
                                      double z,
                                      struct EdeptEnergy *out);

// Largest relative Maxwell residual at a Cartesian point, exact derivatives.
//
// # Safety
// `handle` must be live; `out` must be writable.
enum EdeptStatus edept_maxwell_residual(const struct EdeptParamsHandle *handle,
                                        double t,
                                        double x,
                                        double y,
                                        double z,
                                        double *out);

// Fitted fall-off exponent of `quantity` along the ray at polar angle
// `theta` (radians), from `n` log-spaced samples on `[r_min, r_max]`.
//
// # Safety
// `handle` must be live; `exponent` and `r_squared` must be writable.
enum EdeptStatus edept_fit_exponent(const struct EdeptParamsHandle *handle,
                                    enum EdeptQuantity quantity,
                                    double theta,
                                    double t,
                                    double r_min,
                                    double r_max,
                                    uint32_t n,
                                    double *exponent,
                                    double *r_squared);

// Builds the photon state at `t0` on the default grids (a few seconds).
//
// # Safety
// `handle` must be live; `out` must be writable.
enum EdeptStatus edept_spectrum_new(const struct EdeptParamsHandle *handle,
                                    double t0,
                                    struct EdeptSpectrumHandle **out);

// Norm, spectral energy and position-space energy of a photon state. Any
// output pointer may be null to skip it.
//
// # Safety
// `handle` must be live; non-null outputs must be writable.
enum EdeptStatus edept_spectrum_scalars(const struct EdeptSpectrumHandle *handle,
                                        double *norm,
                                        double *spectral_energy,
                                        double *position_energy);

// Releases a photon state. Null is ignored.
//
// # Safety
// `handle` must come from `edept_spectrum_new` and not be used afterwards.
void edept_spectrum_free(struct EdeptSpectrumHandle *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDEPT_H */
