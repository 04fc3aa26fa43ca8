#ifndef WORMSIM_H
#define WORMSIM_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WormsimStatus {
  WORMSIM_STATUS_OK = 0,
  WORMSIM_STATUS_NULL_POINTER = 1,
  WORMSIM_STATUS_INVALID_PARAMETER = 2,
  WORMSIM_STATUS_NUMERICAL = 3,
  WORMSIM_STATUS_IO = 4,
  WORMSIM_STATUS_PARSE = 5,
  WORMSIM_STATUS_OUT_OF_RANGE = 6,
  /**
   * The requested round or metric exists but failed or was censored.
   */
  WORMSIM_STATUS_UNAVAILABLE = 7,
  WORMSIM_STATUS_PANIC = 8,
  WORMSIM_STATUS_OTHER = 9,
} WormsimStatus;

typedef enum WormsimModel {
  /**
   * Basic model when c = 1, i = 0, p = 1, characteristic otherwise.
   */
  WORMSIM_MODEL_AUTO = 0,
  WORMSIM_MODEL_BASIC = 1,
  WORMSIM_MODEL_CHARACTERISTIC = 2,
} WormsimModel;

typedef enum WormsimTraceFormat {
  WORMSIM_TRACE_FORMAT_ASSOCIATIONS = 0,
  WORMSIM_TRACE_FORMAT_ENCOUNTERS = 1,
} WormsimTraceFormat;

typedef enum WormsimScenario {
  WORMSIM_SCENARIO_FAST_PREDATOR = 0,
  WORMSIM_SCENARIO_SLOW_PREDATOR = 1,
} WormsimScenario;

/**
 * Per-round metrics of a simulation or replay batch.
 */
typedef struct WormsimBatch WormsimBatch;

/**
 * Loaded encounter trace with fast/slow predator seed plans.
 */
typedef struct WormsimTrace WormsimTrace;

/**
 * Integrated model trajectory.
 */
typedef struct WormsimTrajectory WormsimTrajectory;

/**
 * Model and simulation parameters.
 */
typedef struct WormsimParams {
  /**
   * Pairwise contact rate per second.
   */
  double beta;
  uint64_t n_total;
  double coop_frac;
  double immune_frac;
  double on_prob;
  uint64_t i_a0;
  uint64_t i_b0;
} WormsimParams;

typedef struct WormsimState {
  double t;
  double s_star;
  double s_prime;
  double i_a;
  double i_b;
} WormsimState;

typedef struct WormsimMetrics {
  double ti;
  double mi;
  double tl;
  double al;
  /**
   * NaN when `ta_censored`.
   */
  double ta;
  /**
   * NaN when `tr_censored`.
   */
  double tr;
  double ti_rel;
  double mi_rel;
  bool ta_censored;
  bool tr_censored;
  bool tl_censored;
  bool al_undefined;
} WormsimMetrics;

typedef struct WormsimSummary {
  double mean;
  double median;
  double std_dev;
  uint64_t count;
} WormsimSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error on the calling thread, or NULL. Valid until the next failing
 * call on the same thread.
 */
const char *wormsim_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wormsim_version(void);

/**
 * Fully cooperative, non-immune, always-on parameters.
 */
struct WormsimParams wormsim_params_basic(uint64_t n_total,
                                          double beta,
                                          uint64_t i_a0,
                                          uint64_t i_b0);

/**
 * Closed-form time-to-infect-all of a single worm, (2 ln N + 0.5772) / (p N beta).
 *
 * # Safety
 * `params` and `out` must be valid pointers or NULL.
 */
enum WormsimStatus wormsim_ta_closed_form(const struct WormsimParams *params, double *out_value);

/**
 * Integrates the continuum model with RK4. `step <= 0` and
 * `horizon <= 0` select the defaults.
 *
 * # Safety
 * `params` must be valid or NULL; `out_trajectory` must be a valid
 * pointer to a handle slot or NULL.
 */
enum WormsimStatus wormsim_ode_integrate(const struct WormsimParams *params,
                                         enum WormsimModel model,
                                         double step,
                                         double horizon,
                                         struct WormsimTrajectory **out_trajectory);

/**
 * Number of stored states (0 for NULL).
 *
 * # Safety
 * `trajectory` must be a handle from this library or NULL.
 */
size_t wormsim_trajectory_len(const struct WormsimTrajectory *trajectory);

/**
 * # Safety
 * `trajectory` must be a handle from this library or NULL; `out_state`
 * valid or NULL.
 */
enum WormsimStatus wormsim_trajectory_state(const struct WormsimTrajectory *trajectory,
                                            size_t index,
                                            struct WormsimState *out_state);

/**
 * The six metrics of a trajectory.
 *
 * # Safety
 * `trajectory` must be a handle from this library or NULL; `out_metrics`
 * valid or NULL.
 */
enum WormsimStatus wormsim_trajectory_metrics(const struct WormsimTrajectory *trajectory,
                                              struct WormsimMetrics *out_metrics);

/**
 * # Safety
 * `trajectory` must be a handle from this library (not yet freed) or NULL.
 */
void wormsim_trajectory_free(struct WormsimTrajectory *trajectory);

/**
 * Runs `rounds` uniform-encounter rounds in parallel. `horizon <= 0`
 * selects 20 closed-form infect-all times. Negative `prey_delay` injects
 * the predator first.
 *
 * # Safety
 * `params` valid or NULL; `out_batch` a valid handle slot or NULL.
 */
enum WormsimStatus wormsim_simulate(const struct WormsimParams *params,
                                    uint64_t rounds,
                                    uint64_t master_seed,
                                    double horizon,
                                    double prey_delay,
                                    struct WormsimBatch **out_batch);

/**
 * # Safety
 * `batch` must be a handle from this library or NULL.
 */
size_t wormsim_batch_len(const struct WormsimBatch *batch);

/**
 * Metrics of one round; `WORMSIM_STATUS_UNAVAILABLE` if it failed.
 *
 * # Safety
 * `batch` a handle from this library or NULL; `out_metrics` valid or NULL.
 */
enum WormsimStatus wormsim_batch_round(const struct WormsimBatch *batch,
                                       size_t index,
                                       struct WormsimMetrics *out_metrics);

/**
 * Statistics of one metric (`ti`, `mi`, `tl`, `al`, `ta`, `tr`, `ti_rel`,
 * `mi_rel`) over the successful rounds; TA/TR over uncensored rounds.
 *
 * # Safety
 * `batch` a handle from this library or NULL; `metric` a NUL-terminated
 * string or NULL; `out_summary` valid or NULL.
 */
enum WormsimStatus wormsim_batch_summary(const struct WormsimBatch *batch,
                                         const char *metric,
                                         struct WormsimSummary *out_summary);

/**
 * # Safety
 * `batch` must be a handle from this library (not yet freed) or NULL.
 */
void wormsim_batch_free(struct WormsimBatch *batch);

/**
 * Loads a trace CSV and selects fast/slow predator seed groups
 * (3% of nodes each, default strata and arrival delay).
 *
 * # Safety
 * `path` a NUL-terminated string or NULL; `out_trace` a valid handle slot
 * or NULL.
 */
enum WormsimStatus wormsim_trace_load(const char *path,
                                      enum WormsimTraceFormat format,
                                      struct WormsimTrace **out_trace);

/**
 * Generates a synthetic heavy-tailed trace (see `SyntheticTraceConfig`).
 *
 * # Safety
 * `out_trace` a valid handle slot or NULL.
 */
enum WormsimStatus wormsim_trace_synthetic(uint64_t n_nodes,
                                           double duration,
                                           double skew,
                                           double mean_rate,
                                           uint64_t seed,
                                           struct WormsimTrace **out_trace);

/**
 * # Safety
 * `trace` a handle from this library or NULL.
 */
size_t wormsim_trace_node_count(const struct WormsimTrace *trace);

/**
 * # Safety
 * `trace` a handle from this library or NULL.
 */
size_t wormsim_trace_encounter_count(const struct WormsimTrace *trace);

/**
 * Replays the trace `rounds` times under one seed scenario.
 *
 * # Safety
 * `trace` a handle from this library or NULL; `out_batch` a valid handle
 * slot or NULL.
 */
enum WormsimStatus wormsim_trace_replay(const struct WormsimTrace *trace,
                                        enum WormsimScenario scenario,
                                        double coop_frac,
                                        double immune_frac,
                                        double on_prob,
                                        uint64_t rounds,
                                        uint64_t master_seed,
                                        struct WormsimBatch **out_batch);

/**
 * # Safety
 * `trace` must be a handle from this library (not yet freed) or NULL.
 */
void wormsim_trace_free(struct WormsimTrace *trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WORMSIM_H */
