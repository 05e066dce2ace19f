#ifndef HHORDER_H
#define HHORDER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

/**
 * Relation between `∫ f dA` and `∫ f dB` over convex `f`.
 */
typedef enum HhoRelation {
  HHO_RELATION_LESS_OR_EQUAL = 0,
  HHO_RELATION_GREATER_OR_EQUAL = 1,
  HHO_RELATION_EQUAL = 2,
  HHO_RELATION_INCOMPARABLE = 3,
  HHO_RELATION_NOT_NORMALIZED = 4,
} HhoRelation;

/**
 * Result code of every fallible call.
 */
typedef enum HhoStatus {
  HHO_STATUS_OK = 0,
  HHO_STATUS_NULL_POINTER = 1,
  HHO_STATUS_INVALID_UTF8 = 2,
  HHO_STATUS_PARSE = 3,
  HHO_STATUS_INVALID_PARAMETER = 4,
  HHO_STATUS_NOT_NORMALIZED = 5,
  HHO_STATUS_NO_BRACKET = 6,
  HHO_STATUS_NUMERIC = 7,
  HHO_STATUS_IO = 8,
  HHO_STATUS_INTERNAL = 9,
} HhoStatus;

/**
 * Opaque handle to a cumulative weight function.
 */
typedef struct HhoWeight HhoWeight;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the weight of a functional spec such as `"T:a=6"` or
 * `"mix:3/4*davg+1/4*trap"`.
 *
 * # Safety
 * `spec_text` must be a valid NUL-terminated string; `out` must be writable.
 */
enum HhoStatus hho_weight_from_spec(const char *spec_text, struct HhoWeight **out);

/**
 * Builds a weight from its canonical JSON form.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be writable.
 */
enum HhoStatus hho_weight_from_json(const char *json, struct HhoWeight **out);

/**
 * Releases a weight. Null is ignored.
 *
 * # Safety
 * `w` must come from this library and not be used afterwards.
 */
void hho_weight_free(struct HhoWeight *w);

/**
 * Canonical JSON of a weight; free the result with `hho_string_free`.
 *
 * # Safety
 * `w` must be a live handle; `out` must be writable.
 */
enum HhoStatus hho_weight_to_json(const struct HhoWeight *w, char **out);

/**
 * `∫ t^k dF` as a fraction string `"p/q"`.
 *
 * # Safety
 * `w` must be a live handle; `out` must be writable.
 */
enum HhoStatus hho_weight_moment(const struct HhoWeight *w, uint32_t k, char **out);

/**
 * Exact relation between `∫ f dA` and `∫ f dB` over convex `f`.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum HhoStatus hho_compare(const struct HhoWeight *a,
                           const struct HhoWeight *b,
                           enum HhoRelation *out);

/**
 * Full comparison of two specs as JSON, including hinge witnesses for
 * incomparable pairs.
 *
 * # Safety
 * Both strings must be valid NUL-terminated strings; `out` must be writable.
 */
enum HhoStatus hho_compare_json(const char *a, const char *b, char **out);

/**
 * `∫ max(t-c, 0) dB - ∫ max(t-c, 0) dA` for a knot `c` in `(0, 1)` given as
 * a fraction string; the result is a fraction string.
 *
 * # Safety
 * `a`, `b` must be live handles, `knot` a valid string, `out` writable.
 */
enum HhoStatus hho_hinge_gap(const struct HhoWeight *a,
                             const struct HhoWeight *b,
                             const char *knot,
                             char **out);

/**
 * Numeric value of a functional on `[x, y]` for a test function given as
 * JSON, e.g. `{"Exponential":{"lambda":1.0}}` or `{"Hinge":{"c":0.5}}`.
 *
 * # Safety
 * Strings must be valid NUL-terminated strings; `out` must be writable.
 */
enum HhoStatus hho_functional_numeric(const char *spec_text,
                                      const char *function_json,
                                      double x,
                                      double y,
                                      double tol,
                                      double *out);

/**
 * Threshold search as in the `threshold` CLI command; `direction` is `"LE"`
 * or `"GE"`, bounds and `tol` are fraction strings. Writes the result JSON.
 *
 * # Safety
 * All strings must be valid NUL-terminated strings; `out` must be writable.
 */
enum HhoStatus hho_find_threshold(const char *family,
                                  const char *target,
                                  const char *direction,
                                  const char *lo,
                                  const char *hi,
                                  const char *tol,
                                  char **out);

/**
 * Runs the built-in claim suite. Writes its JSON and whether every claim
 * passed.
 *
 * # Safety
 * `out` and `all_pass` must be writable.
 */
enum HhoStatus hho_run_suite(char **out, bool *all_pass);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void hho_string_free(char *s);

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call on the same thread.
 */
const char *hho_last_error_message(void);

/**
 * Library version string.
 */
const char *hho_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HHORDER_H */
