/* C interface to the axmots toolkit. */

#ifndef AXMOTS_H
#define AXMOTS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AXMOTS_OK 0

#define AXMOTS_ERR_DOMAIN 1

#define AXMOTS_ERR_NUMERICAL 2

#define AXMOTS_ERR_USAGE 3

#define AXMOTS_ERR_NULL 4

#define AXMOTS_ERR_PANIC 5

#define AXMOTS_ERR_NOT_SOLVED 6

/**
 * Opaque stability problem handle.
 */
typedef struct AxmotsProblem AxmotsProblem;

/**
 * Single point of the extremal rotating horizon family.
 */
typedef struct AxmotsNariaiPoint {
  double a;
  double ell;
  double eps;
  double rc2;
  double area;
  double omega;
  double bound;
  double gap;
} AxmotsNariaiPoint;

/**
 * Rotation average, area, Komar integral and the bound 4 pi / (c + omega)
 * on the t = 0 slice of the model described by a TOML config string.
 */
typedef struct AxmotsOmegaReport {
  double omega;
  double area;
  double komar;
  double bound;
  double c;
} AxmotsOmegaReport;

/**
 * Spectral summary of a solved problem.
 */
typedef struct AxmotsEigSummary {
  double lambda1;
  double lambda1_adjoint;
  double lambda1_symmetrized;
  /**
   * min over m >= 1 of (min Re spec(mode m) - lambda1).
   */
  double mode_ordering_margin;
  size_t n;
  size_t m_max;
} AxmotsEigSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Pointer to the NUL-terminated message of the most recent error on this
 * thread. Valid until the next failing call on the same thread.
 */
const char *axmots_last_error_message(void);

/**
 * Static version string of the underlying crate.
 */
const char *axmots_version(void);

/**
 * Largest admissible rotation parameter for the given scale factor.
 */
double axmots_nariai_a_max(double ell);

/**
 * Computes the horizon report at rotation a and scale ell using quad_n
 * Gauss-Legendre nodes (pass 0 for the default).
 */
int32_t axmots_nariai_point(double a, double ell, size_t quad_n, struct AxmotsNariaiPoint *out);

int32_t axmots_omega_slice(const char *config_toml,
                           double c,
                           size_t n,
                           struct AxmotsOmegaReport *out);

/**
 * Round sphere of curvature c with the saturated potential Q = kappa - c.
 */
int32_t axmots_problem_round(double c, size_t n, size_t m_max, struct AxmotsProblem **out);

/**
 * Slice operator of the product data described by a TOML config string.
 */
int32_t axmots_problem_from_config(const char *config_toml,
                                   size_t n,
                                   size_t m_max,
                                   struct AxmotsProblem **out);

/**
 * Solves all mode blocks and caches the result on the handle.
 */
int32_t axmots_problem_solve(struct AxmotsProblem *handle, struct AxmotsEigSummary *out);

/**
 * Number of grid nodes of the problem behind the handle, or -1 on error.
 */
ptrdiff_t axmots_problem_n(const struct AxmotsProblem *handle);

/**
 * Copies the grid nodes and the positive principal eigenfunction into the
 * caller's buffers (each of length len >= n). Requires a prior solve.
 */
int32_t axmots_problem_eigenfunction(const struct AxmotsProblem *handle,
                                     double *theta_out,
                                     double *u_out,
                                     size_t len);

/**
 * Releases a problem handle. Passing null is a no-op.
 */
void axmots_problem_free(struct AxmotsProblem *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AXMOTS_H */
