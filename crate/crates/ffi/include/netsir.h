#ifndef NETSIR_H
#define NETSIR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>

typedef enum NetsirShape {
  NETSIR_SHAPE_CONSTANT = 0,
  NETSIR_SHAPE_MONOTONE_DECREASING = 1,
  NETSIR_SHAPE_UNIMODAL = 2,
  NETSIR_SHAPE_BIMODAL = 3,
  /**
   * Either monotone decreasing or bimodal.
   */
  NETSIR_SHAPE_UNDETERMINED = 4,
  NETSIR_SHAPE_MULTIMODAL = 5,
} NetsirShape;

typedef enum NetsirStability {
  NETSIR_STABILITY_STABLE = 0,
  NETSIR_STABILITY_UNSTABLE = 1,
  NETSIR_STABILITY_MARGINAL = 2,
} NetsirStability;

typedef enum NetsirStatus {
  NETSIR_STATUS_OK = 0,
  NETSIR_STATUS_NULL_POINTER = 1,
  NETSIR_STATUS_INVALID_ARGUMENT = 2,
  NETSIR_STATUS_DIMENSION_MISMATCH = 3,
  NETSIR_STATUS_INVALID_STATE = 4,
  NETSIR_STATUS_NOT_RANK_ONE = 5,
  NETSIR_STATUS_NO_CONVERGENCE = 6,
  NETSIR_STATUS_NUMERICAL_FAILURE = 7,
  NETSIR_STATUS_PANIC = 8,
} NetsirStatus;

/**
 * Model parameters: interaction structure and recovery rate.
 */
typedef struct NetsirParams NetsirParams;

/**
 * Sampled trajectory with its parameters.
 */
typedef struct NetsirTrajectory NetsirTrajectory;

/**
 * Integrator settings; obtain defaults from [`netsir_integrator_defaults`].
 * A non-positive `t_max` selects `500 / gamma`.
 */
typedef struct NetsirIntegratorConfig {
  double abs_tol;
  double rel_tol;
  double max_step;
  double sample_dt;
  double t_max;
  double y_extinction_tol;
} NetsirIntegratorConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *netsir_last_error_message(void);

/**
 * # Safety
 * `a` and `b` point to `n` doubles; `out` is writable.
 */
enum NetsirStatus netsir_params_new_rank_one(size_t n,
                                             const double *a,
                                             const double *b,
                                             double gamma,
                                             struct NetsirParams **out);

/**
 * # Safety
 * `matrix` points to `n * n` doubles in row-major order; `out` is writable.
 */
enum NetsirStatus netsir_params_new_dense(size_t n,
                                          const double *matrix,
                                          double gamma,
                                          struct NetsirParams **out);

/**
 * # Safety
 * `p` is null or a handle from a `netsir_params_new_*` call, freed once.
 */
void netsir_params_free(struct NetsirParams *p);

/**
 * Number of nodes; 0 for a null handle.
 *
 * # Safety
 * `p` is null or a live handle.
 */
size_t netsir_params_n(const struct NetsirParams *p);

/**
 * Whether the interaction matrix is rank one (declared or detected).
 *
 * # Safety
 * `p` is null or a live handle.
 */
bool netsir_params_is_rank_one(const struct NetsirParams *p);

/**
 * # Safety
 * `x`, `y`, `dx`, `dy` point to `n` doubles.
 */
enum NetsirStatus netsir_vector_field(const struct NetsirParams *p,
                                      const double *x,
                                      const double *y,
                                      double *dx,
                                      double *dy);

/**
 * Conserved quantities `h_i` of a rank-1 network.
 *
 * # Safety
 * `x`, `y`, `h` point to `n` doubles.
 */
enum NetsirStatus netsir_invariants(const struct NetsirParams *p,
                                    const double *x,
                                    const double *y,
                                    double *h);

/**
 * Limit value of `xbar = sum_j b_j x_j` for a rank-1 network.
 *
 * # Safety
 * `x`, `y` point to `n` doubles; `phi` is writable.
 */
enum NetsirStatus netsir_solve_phi(const struct NetsirParams *p,
                                   const double *x,
                                   const double *y,
                                   double *phi);

/**
 * Limit susceptible fractions, `xtilde` at the limit and its stability.
 *
 * # Safety
 * `x`, `y`, `x_star` point to `n` doubles; the scalar outputs are writable.
 */
enum NetsirStatus netsir_limit_state(const struct NetsirParams *p,
                                     const double *x,
                                     const double *y,
                                     double *x_star,
                                     double *xtilde_star,
                                     enum NetsirStability *stability);

/**
 * Predicted shape of node `i`'s infection curve from the initial state.
 *
 * # Safety
 * `x`, `y` point to `n` doubles; `shape` is writable.
 */
enum NetsirStatus netsir_classify_node(const struct NetsirParams *p,
                                       const double *x,
                                       const double *y,
                                       size_t i,
                                       enum NetsirShape *shape);

struct NetsirIntegratorConfig netsir_integrator_defaults(void);

/**
 * Integrates to `horizon`. `config` may be null for defaults.
 *
 * # Safety
 * `x`, `y` point to `n` doubles; `config` is null or readable; `out` is
 * writable. Free the result with [`netsir_trajectory_free`].
 */
enum NetsirStatus netsir_integrate(const struct NetsirParams *p,
                                   const double *x,
                                   const double *y,
                                   double horizon,
                                   const struct NetsirIntegratorConfig *config,
                                   struct NetsirTrajectory **out);

/**
 * # Safety
 * `t` is null or a handle from [`netsir_integrate`], freed once.
 */
void netsir_trajectory_free(struct NetsirTrajectory *t);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `t` is null or a live handle.
 */
size_t netsir_trajectory_len(const struct NetsirTrajectory *t);

/**
 * Copies the sample times into `times`, which holds `len` doubles.
 *
 * # Safety
 * `times` points to `len` writable doubles.
 */
enum NetsirStatus netsir_trajectory_times(const struct NetsirTrajectory *t,
                                          double *times,
                                          size_t len);

/**
 * State at sample `k`.
 *
 * # Safety
 * `x`, `y` point to `n` writable doubles.
 */
enum NetsirStatus netsir_trajectory_state(const struct NetsirTrajectory *t,
                                          size_t k,
                                          double *x,
                                          double *y);

/**
 * Observed shape of node `i`'s infection curve along the trajectory.
 *
 * # Safety
 * `t` is a live handle; `shape` is writable.
 */
enum NetsirStatus netsir_observed_shape(const struct NetsirTrajectory *t,
                                        size_t i,
                                        enum NetsirShape *shape);

/**
 * Dominant eigenvalue and left eigenvector (unit sum) of a nonnegative
 * row-major `n * n` matrix.
 *
 * # Safety
 * `matrix` points to `n * n` doubles, `v` to `n` writable doubles.
 */
enum NetsirStatus netsir_dominant_eig(size_t n, const double *matrix, double *lambda, double *v);

/**
 * # Safety
 * `out` is writable.
 */
enum NetsirStatus netsir_scalar_final_size(double beta,
                                           double gamma,
                                           double x0,
                                           double y0,
                                           double *out);

/**
 * Threshold on `y_i(0)` below which bimodality is guaranteed.
 *
 * # Safety
 * `out` is writable.
 */
enum NetsirStatus netsir_epsilon_bar(double beta, double gamma, double b_i, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETSIR_H */
