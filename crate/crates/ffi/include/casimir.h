#ifndef CASIMIR_H
#define CASIMIR_H

/* Generated by cbindgen from casimir-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Call outcome. Anything other than `Ok` leaves the out parameters
// untouched and stores a message retrievable via `casimir_last_error`.
typedef enum CasimirStatus {
  CASIMIR_STATUS_OK = 0,
  // Quadrature or series failed to converge.
  CASIMIR_STATUS_NUMERICAL_ERROR = 1,
  // Domain, format or model-validity violation.
  CASIMIR_STATUS_INVALID_INPUT = 2,
  // A required pointer argument was null.
  CASIMIR_STATUS_NULL_POINTER = 3,
} CasimirStatus;

// Opaque roughness-histogram handle.
typedef struct CasimirHistogram CasimirHistogram;

// Opaque dielectric-model handle.
typedef struct CasimirModel CasimirModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Most recent error message of the calling thread. The pointer stays
// valid until the next failing call on the same thread. Never null.
const char *casimir_last_error(void);

// Library version as a static string.
const char *casimir_version(void);

// New Drude-model handle: eps(i xi) = 1 + wp^2/(xi(xi+gamma)), rad/s.
struct CasimirModel *casimir_model_drude(double omega_p, double gamma);

// New plasma-model handle: eps(i xi) = 1 + wp^2/xi^2.
struct CasimirModel *casimir_model_plasma(double omega_p);

// New infrared-optics model handle with relaxation nu = wp(c1 + c2 w^2/wp^2).
struct CasimirModel *casimir_model_infrared(double omega_p, double c1, double c2);

// New tabulated-model handle from an optical data file (`omega_or_energy,
// n, k` rows). The Drude parameters close the table below its lowest
// frequency unless the file carries its own `# extension:` directive.
// Returns null on failure.
//
// # Safety
// `path` must be a valid NUL-terminated string.
struct CasimirModel *casimir_model_tabulated_from_file(const char *path,
                                                       double ext_omega_p,
                                                       double ext_gamma);

// Destroy a model handle (accepts null).
//
// # Safety
// `model` must be a pointer returned by one of the model constructors and
// not freed before.
void casimir_model_free(struct CasimirModel *model);

// Destroy a histogram handle (accepts null).
//
// # Safety
// `histogram` must come from `casimir_histogram_from_file` and not be
// freed before.
void casimir_histogram_free(struct CasimirHistogram *histogram);

// eps(i xi) of a model at imaginary frequency xi (rad/s).
//
// # Safety
// `model` and `out_eps` must be valid pointers.
enum CasimirStatus casimir_eps_imaginary(const struct CasimirModel *model,
                                         double xi,
                                         double *out_eps);

// Sphere-plate Casimir force in N (negative = attractive) at separation
// `z` (m) for sphere radius `radius` (m). `temperature` is in K; values
// <= 0 select the zero-temperature Lifshitz integral. `out_quad_error`
// may be null.
//
// # Safety
// `model` and `out_force` must be valid pointers.
enum CasimirStatus casimir_force(const struct CasimirModel *model,
                                 double z,
                                 double radius,
                                 double temperature,
                                 double *out_force,
                                 double *out_quad_error);

// Finite-conductivity correction factor eta_c = F/F0 at separation z.
//
// # Safety
// `model` and `out_eta` must be valid pointers.
enum CasimirStatus casimir_eta(const struct CasimirModel *model,
                               double z,
                               double radius,
                               double *out_eta);

// Ideal-metal force F0(z) = -pi^3 hbar c R/(360 z^3), N.
//
// # Safety
// `out_force` must be a valid pointer.
enum CasimirStatus casimir_ideal_force(double z, double radius, double *out_force);

// Load a roughness histogram file (`height_nm, fraction` rows). Returns
// null on failure.
//
// # Safety
// `path` must be a valid NUL-terminated string.
struct CasimirHistogram *casimir_histogram_from_file(const char *path);

// Roughness statistics of a histogram, all in m: zero level H0, amplitude
// A = h_max - H0, standard deviation delta_st, stochastic amplitude
// A_st = sqrt(2) delta_st. Out pointers may individually be null.
//
// # Safety
// `histogram` must be a valid handle.
enum CasimirStatus casimir_roughness_stats(const struct CasimirHistogram *histogram,
                                           double *out_h0,
                                           double *out_amplitude,
                                           double *out_delta_st,
                                           double *out_a_st);

// Casimir force geometrically averaged over the roughness histogram
// (used for both bodies), N.
//
// # Safety
// `model`, `histogram` and `out_force` must be valid pointers.
enum CasimirStatus casimir_rough_averaged_force(const struct CasimirModel *model,
                                                const struct CasimirHistogram *histogram,
                                                double z,
                                                double radius,
                                                double temperature,
                                                double *out_force);

// Student-t quantile t_p(f) with p = (1+beta)/2 and f = n-1.
//
// # Safety
// `out_t` must be a valid pointer.
enum CasimirStatus casimir_student_threshold(double beta, uint32_t n, double *out_t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CASIMIR_H */
