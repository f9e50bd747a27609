#ifndef PARALAB_H
#define PARALAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ParalabStatus {
  PARALAB_STATUS_OK = 0,
  PARALAB_STATUS_NULL_POINTER = 1,
  PARALAB_STATUS_INVALID_UTF8 = 2,
  PARALAB_STATUS_UNKNOWN_CHART = 3,
  PARALAB_STATUS_INVALID_MANIFEST = 4,
  PARALAB_STATUS_INVALID_ARGUMENT = 5,
  PARALAB_STATUS_DEGENERATE = 6,
  PARALAB_STATUS_PANIC = 7,
} ParalabStatus;

/**
 * Opaque chart handle.
 */
typedef struct ParalabChart ParalabChart;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Looks up a built-in chart by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum ParalabStatus paralab_chart_from_gallery(const char *name, struct ParalabChart **out);

/**
 * Builds a chart from manifest text (TOML).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum ParalabStatus paralab_chart_from_manifest(const char *text, struct ParalabChart **out);

/**
 * Releases a chart. Null is ignored.
 *
 * # Safety
 * `chart` must come from this library and not have been freed.
 */
void paralab_chart_free(struct ParalabChart *chart);

/**
 * # Safety
 * `chart` must be a live handle; `out` must be writable.
 */
enum ParalabStatus paralab_chart_dim(const struct ParalabChart *chart, size_t *out);

/**
 * Writes +1 or -1.
 *
 * # Safety
 * `chart` must be a live handle; `out` must be writable.
 */
enum ParalabStatus paralab_chart_epsilon(const struct ParalabChart *chart, int32_t *out);

/**
 * Full classification report as JSON (same document as `classify --json`).
 *
 * # Safety
 * `chart` must be a live handle; `out_json` must be writable.
 */
enum ParalabStatus paralab_classify_json(const struct ParalabChart *chart,
                                         size_t count,
                                         uint64_t seed,
                                         double tol,
                                         char **out_json);

/**
 * Christoffel symbols, curvature, Ricci and sectional curvatures at a point
 * as JSON (same document as `curvature --json`).
 *
 * # Safety
 * `point` must hold `len` doubles; `out_json` must be writable.
 */
enum ParalabStatus paralab_curvature_json(const struct ParalabChart *chart,
                                          const double *point,
                                          size_t len,
                                          char **out_json);

/**
 * Sectional curvature of the plane spanned by `x` and `y` at `point`.
 * Returns `PARALAB_STATUS_DEGENERATE` for a degenerate plane.
 *
 * # Safety
 * `point`, `x`, `y` must each hold `len` doubles; `out` must be writable.
 */
enum ParalabStatus paralab_sectional(const struct ParalabChart *chart,
                                     const double *point,
                                     const double *x,
                                     const double *y,
                                     size_t len,
                                     double *out);

/**
 * Largest normalized residual of the almost paracontact metric axioms at
 * `point`; 1 or more when rank, index or ker η nondegeneracy fails.
 *
 * # Safety
 * `point` must hold `len` doubles; `out` must be writable.
 */
enum ParalabStatus paralab_axiom_residual(const struct ParalabChart *chart,
                                          const double *point,
                                          size_t len,
                                          double *out);

/**
 * Newline-separated gallery chart names.
 *
 * # Safety
 * `out` must be writable.
 */
enum ParalabStatus paralab_gallery_names(char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void paralab_string_free(char *s);

/**
 * Message for the last failing call on this thread, or "" after a success.
 * Valid until the next paralab call on the same thread.
 */
const char *paralab_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARALAB_H */
