#ifndef HEXCOVER_H
#define HEXCOVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HexcovStatus {
  HEXCOV_STATUS_OK = 0,
  HEXCOV_STATUS_NULL_POINTER = 1,
  HEXCOV_STATUS_INVALID_ARGUMENT = 2,
  HEXCOV_STATUS_INFEASIBLE_TOLERANCE = 3,
  HEXCOV_STATUS_SINGULAR_SYSTEM = 4,
  HEXCOV_STATUS_OUT_OF_RANGE = 5,
  HEXCOV_STATUS_NO_TOUR = 6,
  HEXCOV_STATUS_INTERNAL = 7,
} HexcovStatus;

typedef enum HexcovOrigin {
  HEXCOV_ORIGIN_TILING = 0,
  HEXCOV_ORIGIN_PROJECTED = 1,
  HEXCOV_ORIGIN_REPAIR = 2,
} HexcovOrigin;

/*
 A convex planning region.
 */
typedef struct HexcovEnvironment HexcovEnvironment;

/*
 Field hyperparameters.
 */
typedef struct HexcovParams HexcovParams;

/*
 A measurement plan with its verification result and optional tour.
 */
typedef struct HexcovPlan HexcovPlan;

typedef struct HexcovCounterexample {
  double rhs_bound;
  double r_used;
  double delta;
  double error_value;
  bool contradiction;
} HexcovCounterexample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *hexcov_last_error(void);

/*
 # Safety
 `out` must be valid for writes.
 */
enum HexcovStatus hexcov_params_new(double sigma0_sq,
                                    double length_scale,
                                    double noise_var,
                                    struct HexcovParams **out);

/*
 Parameters of the soil-survey field: sigma0 = 12.87, L = 8.33 m,
 noise variance 0.0361.

 # Safety
 `out` must be valid for writes.
 */
enum HexcovStatus hexcov_params_soil_survey(struct HexcovParams **out);

/*
 # Safety
 `params` must come from this library and not be used afterwards. Null is ignored.
 */
void hexcov_params_free(struct HexcovParams *params);

/*
 # Safety
 `params` must be a live handle and `out` valid for writes.
 */
enum HexcovStatus hexcov_r_max(const struct HexcovParams *params, double *out);

/*
 # Safety
 `params` must be a live handle and `out` valid for writes.
 */
enum HexcovStatus hexcov_r_min(const struct HexcovParams *params, double delta, double *out);

/*
 # Safety
 `params` must be a live handle and `out` valid for writes.
 */
enum HexcovStatus hexcov_noise_floor(const struct HexcovParams *params, double *out);

/*
 Kriging estimation error at `(x, y)` from `n` samples, exact kernel.

 # Safety
 `xy` must hold `2 * n` doubles (may be null when `n == 0`); `out` valid for writes.
 */
enum HexcovStatus hexcov_estimation_error(const struct HexcovParams *params,
                                          double x,
                                          double y,
                                          const double *xy,
                                          size_t n,
                                          double *out);

/*
 Axis-aligned `width x height` rectangle with its lower-left corner at the origin.

 # Safety
 `out` must be valid for writes.
 */
enum HexcovStatus hexcov_environment_rect(double width,
                                          double height,
                                          struct HexcovEnvironment **out);

/*
 Convex polygon from `n` vertices in either orientation.

 # Safety
 `xy` must hold `2 * n` doubles; `out` valid for writes.
 */
enum HexcovStatus hexcov_environment_polygon(const double *xy,
                                             size_t n,
                                             struct HexcovEnvironment **out);

/*
 # Safety
 `env` must come from this library and not be used afterwards. Null is ignored.
 */
void hexcov_environment_free(struct HexcovEnvironment *env);

/*
 # Safety
 `env` must be a live handle and `out` valid for writes.
 */
enum HexcovStatus hexcov_environment_area(const struct HexcovEnvironment *env, double *out);

/*
 Hexagonal measurement placement for tolerance `delta`.

 # Safety
 Handles must be live; `out` valid for writes.
 */
enum HexcovStatus hexcov_hex_cover(const struct HexcovEnvironment *env,
                                   const struct HexcovParams *params,
                                   double delta,
                                   struct HexcovPlan **out);

/*
 Hexagonal placement plus a Christofides tour improved by 2-opt.

 # Safety
 Handles must be live; `out` valid for writes.
 */
enum HexcovStatus hexcov_hex_cover_tour(const struct HexcovEnvironment *env,
                                        const struct HexcovParams *params,
                                        double delta,
                                        struct HexcovPlan **out);

/*
 Two-level disk baseline placement.

 # Safety
 Handles must be live; `out` valid for writes.
 */
enum HexcovStatus hexcov_disk_cover(const struct HexcovEnvironment *env,
                                    const struct HexcovParams *params,
                                    double delta,
                                    struct HexcovPlan **out);

/*
 Disk baseline placement plus a tour.

 # Safety
 Handles must be live; `out` valid for writes.
 */
enum HexcovStatus hexcov_disk_cover_tour(const struct HexcovEnvironment *env,
                                         const struct HexcovParams *params,
                                         double delta,
                                         struct HexcovPlan **out);

/*
 # Safety
 `plan` must come from this library and not be used afterwards. Null is ignored.
 */
void hexcov_plan_free(struct HexcovPlan *plan);

/*
 Number of samples, or 0 for a null handle.

 # Safety
 `plan` must be a live handle or null.
 */
size_t hexcov_plan_sample_count(const struct HexcovPlan *plan);

/*
 Coordinates and origin of sample `i`. `origin` may be null.

 # Safety
 `plan` must be a live handle; `x` and `y` valid for writes.
 */
enum HexcovStatus hexcov_plan_sample(const struct HexcovPlan *plan,
                                     size_t i,
                                     double *x,
                                     double *y,
                                     enum HexcovOrigin *origin);

/*
 Whether the plan passed the grid check, and its worst error bound.
 `worst_error` may be null.

 # Safety
 `plan` must be a live handle; `feasible` valid for writes.
 */
enum HexcovStatus hexcov_plan_feasibility(const struct HexcovPlan *plan,
                                          bool *feasible,
                                          double *worst_error);

/*
 Final tour length and the raw Christofides length (`raw` may be null).

 # Safety
 `plan` must be a live handle; `length` valid for writes.
 */
enum HexcovStatus hexcov_plan_tour_length(const struct HexcovPlan *plan,
                                          double *length,
                                          double *raw);

/*
 Copies the visiting order (sample indices) into `order`, which must
 hold at least `capacity` entries. `capacity` smaller than the sample
 count yields `OutOfRange`.

 # Safety
 `plan` must be a live handle; `order` valid for `capacity` writes.
 */
enum HexcovStatus hexcov_plan_tour_order(const struct HexcovPlan *plan,
                                         size_t *order,
                                         size_t capacity);

/*
 The four-sample counterexample on the unit field.

 # Safety
 `out` must be valid for writes.
 */
enum HexcovStatus hexcov_counterexample(struct HexcovCounterexample *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEXCOVER_H */
