#ifndef GPBPE_H
#define GPBPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum GpbpeStatus {
  GpbpeStatus_Ok = 0,
  GpbpeStatus_InvalidInput = 1,
  GpbpeStatus_ConfigError = 2,
  GpbpeStatus_NumericalError = 3,
  GpbpeStatus_StateError = 4,
  GpbpeStatus_ResourceError = 5,
  GpbpeStatus_IoError = 6,
  GpbpeStatus_NullPointer = 7,
  GpbpeStatus_Panic = 8,
} GpbpeStatus;

/**
 * Policy selector for [`gpbpe_run_fixed_beta`].
 */
typedef enum GpbpePolicyVariant {
  GpbpePolicyVariant_BpeBatchLocal = 0,
  GpbpePolicyVariant_BpeFullPosterior = 1,
  GpbpePolicyVariant_GpUcb = 2,
  GpbpePolicyVariant_BpeFixedBatches = 3,
} GpbpePolicyVariant;

/**
 * Opaque environment handle.
 */
typedef struct GpbpeEnvironment GpbpeEnvironment;

/**
 * Opaque kernel handle.
 */
typedef struct GpbpeKernel GpbpeKernel;

/**
 * Opaque posterior-model handle.
 */
typedef struct GpbpeModel GpbpeModel;

/**
 * Opaque run-trace handle.
 */
typedef struct GpbpeRunRecord GpbpeRunRecord;

/**
 * Opaque batch-schedule handle.
 */
typedef struct GpbpeSchedule GpbpeSchedule;

/**
 * One step of a run trace.
 */
typedef struct GpbpeStep {
  uint64_t t;
  uint64_t batch;
  uint64_t point_index;
  double y;
  double regret;
  double cum_regret;
} GpbpeStep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message (NUL-terminated) into `buf` and returns
 * the full length including the terminator; returns 0 when no error has
 * been recorded. The message is truncated if `len` is too small.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (then only the
 * required length is returned).
 */
size_t gpbpe_last_error_message(char *buf, size_t len);

/**
 * Creates a squared-exponential kernel.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_kernel_new_se(double lengthscale, size_t dim, struct GpbpeKernel **out);

/**
 * Creates a Matérn kernel (evaluation supports nu in {0.5, 1.5, 2.5}).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_kernel_new_matern(double lengthscale,
                                         double nu,
                                         size_t dim,
                                         struct GpbpeKernel **out);

/**
 * Evaluates `k(x, x2)` for two points of length `dim`.
 *
 * # Safety
 * `x` and `x2` must point to `dim` doubles; `out` must be valid.
 */
enum GpbpeStatus gpbpe_kernel_eval(const struct GpbpeKernel *kernel,
                                   const double *x,
                                   const double *x2,
                                   size_t dim,
                                   double *out);

/**
 * # Safety
 * `kernel` must be a handle from a `gpbpe_kernel_new_*` call, or null.
 */
void gpbpe_kernel_free(struct GpbpeKernel *kernel);

/**
 * Fits a posterior over `n` design points given row-major coordinates.
 *
 * # Safety
 * `design` must point to `n * dim` doubles (may be null when `n` is 0);
 * `out` must be valid.
 */
enum GpbpeStatus gpbpe_model_fit(const struct GpbpeKernel *kernel,
                                 double lambda,
                                 const double *design,
                                 size_t n,
                                 size_t dim,
                                 struct GpbpeModel **out);

/**
 * Returns a new model extended by one design point.
 *
 * # Safety
 * `x` must point to `dim` doubles; `out` must be valid.
 */
enum GpbpeStatus gpbpe_model_extend(const struct GpbpeModel *model,
                                    const double *x,
                                    size_t dim,
                                    struct GpbpeModel **out);

/**
 * Returns a new model with observations attached (length must equal the
 * design size).
 *
 * # Safety
 * `y` must point to `n` doubles; `out` must be valid.
 */
enum GpbpeStatus gpbpe_model_attach_observations(const struct GpbpeModel *model,
                                                 const double *y,
                                                 size_t n,
                                                 struct GpbpeModel **out);

/**
 * Posterior mean at `x`; requires attached observations.
 *
 * # Safety
 * `x` must point to `dim` doubles; `out` must be valid.
 */
enum GpbpeStatus gpbpe_model_mean(const struct GpbpeModel *model,
                                  const double *x,
                                  size_t dim,
                                  double *out);

/**
 * Posterior variance at `x`.
 *
 * # Safety
 * `x` must point to `dim` doubles; `out` must be valid.
 */
enum GpbpeStatus gpbpe_model_variance(const struct GpbpeModel *model,
                                      const double *x,
                                      size_t dim,
                                      double *out);

/**
 * # Safety
 * `model` must be a handle from a model constructor, or null.
 */
void gpbpe_model_free(struct GpbpeModel *model);

/**
 * The union-bounded offline confidence coefficient
 * `(psi + (r/sqrt(lambda)) * sqrt(2 ln(domain_size * num_batches / delta)))^2`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_beta_theoretical(double psi,
                                        double noise_r,
                                        double lambda,
                                        double delta,
                                        size_t domain_size,
                                        size_t num_batches,
                                        double *out);

/**
 * Doubling-exponent schedule for horizon `t`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_schedule_orig(size_t t, struct GpbpeSchedule **out);

/**
 * Kernel-specific constant-batch-count schedule.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_schedule_constant_b(size_t t,
                                           size_t b,
                                           const struct GpbpeKernel *kernel,
                                           bool normalize,
                                           struct GpbpeSchedule **out);

/**
 * Equal-length schedule.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_schedule_fixed_equal(size_t t, size_t b, struct GpbpeSchedule **out);

/**
 * Number of batches; 0 for a null handle.
 *
 * # Safety
 * `sched` must be a schedule handle or null.
 */
size_t gpbpe_schedule_num_batches(const struct GpbpeSchedule *sched);

/**
 * Length of batch `i` (0-based).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_schedule_batch_length(const struct GpbpeSchedule *sched,
                                             size_t i,
                                             size_t *out);

/**
 * # Safety
 * `sched` must be a handle from a schedule constructor, or null.
 */
void gpbpe_schedule_free(struct GpbpeSchedule *sched);

/**
 * Synthetic 2D surface on a `per_axis x per_axis` grid over [0,1]^2;
 * `multi_peak` false gives one dominant bump, true gives 3-5 near-equal
 * bumps.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_env_peaked(size_t per_axis,
                                  bool multi_peak,
                                  double noise_sigma,
                                  uint64_t seed,
                                  struct GpbpeEnvironment **out);

/**
 * Function with exactly known RKHS norm `psi` on a `d`-dimensional grid.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_env_rkhs(const struct GpbpeKernel *kernel,
                                size_t d,
                                size_t per_axis,
                                double psi,
                                size_t num_centers,
                                double noise_sigma,
                                uint64_t seed,
                                struct GpbpeEnvironment **out);

/**
 * # Safety
 * `env_` must be an environment handle or null.
 */
size_t gpbpe_env_num_points(const struct GpbpeEnvironment *env_);

/**
 * # Safety
 * `env_` must be an environment handle or null.
 */
size_t gpbpe_env_optimum_index(const struct GpbpeEnvironment *env_);

/**
 * Ground-truth value of point `index`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_env_f_value(const struct GpbpeEnvironment *env_, size_t index, double *out);

/**
 * Noisy observation keyed by `(seed, t)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_env_observe(const struct GpbpeEnvironment *env_,
                                   size_t index,
                                   size_t t,
                                   uint64_t seed,
                                   double *out);

/**
 * Instantaneous regret of point `index`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_env_regret(const struct GpbpeEnvironment *env_, size_t index, double *out);

/**
 * # Safety
 * `env_` must be a handle from an environment constructor, or null.
 */
void gpbpe_env_free(struct GpbpeEnvironment *env_);

/**
 * Runs a policy with a constant exploration coefficient and returns the
 * per-step trace. `sched` is required for the batched variants and
 * ignored by GP-UCB (it may be null there).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_run_fixed_beta(enum GpbpePolicyVariant variant,
                                      const struct GpbpeEnvironment *env_,
                                      const struct GpbpeKernel *kernel,
                                      const struct GpbpeSchedule *sched,
                                      double lambda,
                                      double beta,
                                      size_t horizon,
                                      uint64_t seed,
                                      struct GpbpeRunRecord **out);

/**
 * Number of steps in the trace; 0 for a null handle.
 *
 * # Safety
 * `record` must be a run-record handle or null.
 */
size_t gpbpe_run_record_len(const struct GpbpeRunRecord *record);

/**
 * Copies step `i` (0-based) into `out`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_run_record_step(const struct GpbpeRunRecord *record,
                                       size_t i,
                                       struct GpbpeStep *out);

/**
 * Final cumulative regret of the trace.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GpbpeStatus gpbpe_run_record_total_regret(const struct GpbpeRunRecord *record, double *out);

/**
 * # Safety
 * `record` must be a handle from `gpbpe_run_fixed_beta`, or null.
 */
void gpbpe_run_record_free(struct GpbpeRunRecord *record);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GPBPE_H */
