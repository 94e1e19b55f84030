#ifndef ROBUST_DSN_H
#define ROBUST_DSN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of an API call.
 */
typedef enum RdsnStatus {
  RDSN_STATUS_OK = 0,
  RDSN_STATUS_NULL_POINTER = 1,
  RDSN_STATUS_INVALID_INPUT = 2,
  RDSN_STATUS_DOMAIN = 3,
  RDSN_STATUS_INVALID_STATE = 4,
  RDSN_STATUS_CONFIGURATION = 5,
  RDSN_STATUS_IO = 6,
  RDSN_STATUS_INTERNAL = 7,
  RDSN_STATUS_PANIC = 8,
} RdsnStatus;

/**
 * Result handle of one scenario run.
 */
typedef struct RdsnRunResult RdsnRunResult;

/**
 * Scenario configuration handle.
 */
typedef struct RdsnScenario RdsnScenario;

/**
 * Pose of one sensor after a run.
 */
typedef struct RdsnPose {
  double nominal_x;
  double nominal_y;
  double evaluated_x;
  double evaluated_y;
  double orientation;
  double rho;
  double area;
  /**
   * 1 when the sensor aims at a cell vertex, 0 otherwise.
   */
  uint8_t has_vertex;
  double vertex_x;
  double vertex_y;
} RdsnPose;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rdsn_version(void);

/**
 * Message of the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *rdsn_last_error_message(void);

/**
 * Parses a scenario from JSON (field names as in the CLI config file,
 * view angle in degrees).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_handle` must be writable.
 */
enum RdsnStatus rdsn_scenario_from_json(const char *json, struct RdsnScenario **out_handle);

/**
 * # Safety
 * `handle` must come from [`rdsn_scenario_from_json`] or be NULL.
 */
void rdsn_scenario_free(struct RdsnScenario *handle);

/**
 * Runs run `run_index` of a scenario.
 *
 * # Safety
 * `scenario` must be a live handle; `out_handle` must be writable.
 */
enum RdsnStatus rdsn_scenario_run(const struct RdsnScenario *scenario,
                                  uint64_t run_index,
                                  struct RdsnRunResult **out_handle);

/**
 * # Safety
 * `handle` must come from [`rdsn_scenario_run`] or be NULL.
 */
void rdsn_run_result_free(struct RdsnRunResult *handle);

/**
 * Total coverage of a run.
 *
 * # Safety
 * `result` must be a live handle; `value` must be writable.
 */
enum RdsnStatus rdsn_run_result_total_coverage(const struct RdsnRunResult *result, double *value);

/**
 * Number of sensors in a run.
 *
 * # Safety
 * `result` must be a live handle; `count` must be writable.
 */
enum RdsnStatus rdsn_run_result_sensor_count(const struct RdsnRunResult *result, size_t *count);

/**
 * Pose of sensor `index`.
 *
 * # Safety
 * `result` must be a live handle; `pose` must be writable.
 */
enum RdsnStatus rdsn_run_result_sensor_pose(const struct RdsnRunResult *result,
                                            size_t index,
                                            struct RdsnPose *pose);

/**
 * Metrics of a run as a JSON string; release it with [`rdsn_string_free`].
 *
 * # Safety
 * `result` must be a live handle; `json` must be writable.
 */
enum RdsnStatus rdsn_run_result_to_json(const struct RdsnRunResult *result, char **json);

/**
 * Runs a sweep described by JSON (`base` scenario plus axis lists) and
 * returns the CSV text; release it with [`rdsn_string_free`].
 *
 * # Safety
 * `spec_json` must be a NUL-terminated string; `csv` must be writable.
 */
enum RdsnStatus rdsn_sweep_csv(const char *spec_json, char **csv);

/**
 * # Safety
 * `s` must come from this library or be NULL.
 */
void rdsn_string_free(char *s);

/**
 * RRF of every sensor of an explicit deployment in `[0, width] × [0, height]`.
 * `rho_raw` and `rho` receive `n` values each.
 *
 * # Safety
 * `xs`, `ys` must hold `n` values; `rho_raw`, `rho` must have room for `n`.
 */
enum RdsnStatus rdsn_compute_rrf(const double *xs,
                                 const double *ys,
                                 size_t n,
                                 double width,
                                 double height,
                                 double r_min,
                                 double r_max,
                                 double tol,
                                 double *rho_raw,
                                 double *rho);

/**
 * Exact area of a sector intersected with the convex polygon given by `n`
 * vertices.
 *
 * # Safety
 * `xs`, `ys` must hold `n` values; `area` must be writable.
 */
enum RdsnStatus rdsn_sector_polygon_area(double apex_x,
                                         double apex_y,
                                         double orientation,
                                         double view_angle,
                                         double radius,
                                         const double *xs,
                                         const double *ys,
                                         size_t n,
                                         double *area);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBUST_DSN_H */
