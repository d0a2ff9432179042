#ifndef MOTPAVE_H
#define MOTPAVE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum MotpaveStatus {
  MOTPAVE_STATUS_OK = 0,
  MOTPAVE_STATUS_NULL_POINTER = 1,
  MOTPAVE_STATUS_INVALID_UTF8 = 2,
  MOTPAVE_STATUS_PARSE = 3,
  MOTPAVE_STATUS_INVALID_INSTANCE = 4,
  MOTPAVE_STATUS_NOT_IN_CONVEX_ORDER = 5,
  MOTPAVE_STATUS_MISSING_SEED = 6,
  MOTPAVE_STATUS_OUT_OF_RANGE = 7,
  MOTPAVE_STATUS_INTERNAL = 8,
  MOTPAVE_STATUS_PANIC = 9,
} MotpaveStatus;

typedef enum MotpaveDualMode {
  MOTPAVE_DUAL_MODE_POINTWISE = 0,
  MOTPAVE_DUAL_MODE_QUASISURE = 1,
  MOTPAVE_DUAL_MODE_BOTH = 2,
} MotpaveDualMode;

/**
 * Opaque instance handle.
 */
typedef struct MotpaveInstance MotpaveInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an instance JSON document into a new handle.
 *
 * # Safety
 * `json` must be a valid C string and `out` a valid pointer.
 */
enum MotpaveStatus motpave_instance_from_json(const char *json, struct MotpaveInstance **out);

/**
 * # Safety
 * `h` must come from `motpave_instance_from_json` and not be freed twice.
 */
void motpave_instance_free(struct MotpaveInstance *h);

/**
 * Atom counts of the two marginals and the dimension.
 *
 * # Safety
 * All pointers must be valid.
 */
enum MotpaveStatus motpave_instance_shape(const struct MotpaveInstance *h,
                                          size_t *n,
                                          size_t *m,
                                          size_t *dim);

/**
 * # Safety
 * `h` and `holds` must be valid.
 */
enum MotpaveStatus motpave_check_order(const struct MotpaveInstance *h, bool *holds);

/**
 * Whether no martingale coupling charges `(x_i, y_j)`.
 *
 * # Safety
 * `h` and `polar` must be valid.
 */
enum MotpaveStatus motpave_pair_is_polar(const struct MotpaveInstance *h,
                                         size_t i,
                                         size_t j,
                                         bool *polar);

/**
 * Paving report as JSON.
 *
 * # Safety
 * `h` and `out` must be valid; free `*out` with `motpave_string_free`.
 */
enum MotpaveStatus motpave_paving_json(const struct MotpaveInstance *h, char **out);

/**
 * Coupling report as JSON: the maximal-support coupling when `vertices`
 * is zero, otherwise that many sampled vertices. A negative `seed` falls
 * back to the instance's seed.
 *
 * # Safety
 * `h` and `out` must be valid; free `*out` with `motpave_string_free`.
 */
enum MotpaveStatus motpave_coupling_json(const struct MotpaveInstance *h,
                                         size_t vertices,
                                         int64_t seed,
                                         char **out);

/**
 * Primal and dual values as JSON. `cost_json` may be null to use the
 * instance's cost table.
 *
 * # Safety
 * `h` and `out` must be valid, `cost_json` null or a valid C string.
 */
enum MotpaveStatus motpave_dual_json(const struct MotpaveInstance *h,
                                     const char *cost_json,
                                     enum MotpaveDualMode mode,
                                     char **out);

/**
 * Golden report of the built-in two-dimensional instance. Returns
 * `MOTPAVE_STATUS_INTERNAL` (with the report still written) on mismatch.
 *
 * # Safety
 * `out` must be valid; free `*out` with `motpave_string_free`.
 */
enum MotpaveStatus motpave_example_json(char **out);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library.
 */
const char *motpave_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void motpave_string_free(char *s);

const char *motpave_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOTPAVE_H */
