#ifndef WLAB_H
#define WLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WlabRenderTarget {
  WLAB_RENDER_TARGET_TABLEAU = 0,
  WLAB_RENDER_TARGET_MATRIX = 1,
} WlabRenderTarget;

/**
 * Result code of every fallible call.
 */
typedef enum WlabStatus {
  WLAB_STATUS_OK = 0,
  WLAB_STATUS_NULL_POINTER = 1,
  WLAB_STATUS_INVALID_UTF8 = 2,
  WLAB_STATUS_INVALID_COMPOSITION = 3,
  WLAB_STATUS_INVALID_CONFIG = 4,
  WLAB_STATUS_OUT_OF_RANGE = 5,
  /**
   * A lemma-level assertion failed inside the library.
   */
  WLAB_STATUS_ASSERTION = 6,
  /**
   * Some property check in a report failed.
   */
  WLAB_STATUS_PROPERTY_FAILURE = 7,
  WLAB_STATUS_PANIC = 8,
} WlabStatus;

/**
 * Which support a coordinate query reads.
 */
typedef enum WlabSupport {
  /**
   * Lines labelled 1.
   */
  WLAB_SUPPORT_E = 0,
  /**
   * Lines labelled `*`.
   */
  WLAB_SUPPORT_V = 1,
  /**
   * Coordinates excluded by some pair.
   */
  WLAB_SUPPORT_EXCLUDED = 2,
} WlabSupport;

typedef enum WlabVerdict {
  WLAB_VERDICT_REGULAR = 0,
  WLAB_VERDICT_WEAKLY_REGULAR_NO_DENSE_ORBIT = 1,
  WLAB_VERDICT_INCONCLUSIVE = 2,
} WlabVerdict;

/**
 * Opaque handle: a composition with its section.
 */
typedef struct WlabSection WlabSection;

/**
 * A matrix position, 1-based.
 */
typedef struct WlabCoord {
  size_t row;
  size_t col;
} WlabCoord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Short description of a status code. The string is static.
 */
const char *wlab_status_message(enum WlabStatus status);

/**
 * Parses `comp` (e.g. `"3,2,1,1,2,3"`) and builds its section.
 *
 * # Safety
 * `comp` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WlabStatus wlab_section_new(const char *comp, struct WlabSection **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must come from [`wlab_section_new`] and not have been freed.
 */
void wlab_section_free(struct WlabSection *h);

/**
 * Matrix size `n`; 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t wlab_section_size(const struct WlabSection *h);

/**
 * Number of neighbouring pairs, equal to the number of STAR lines.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t wlab_section_pair_count(const struct WlabSection *h);

/**
 * Dimension of the nilradical.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t wlab_section_nilradical_dim(const struct WlabSection *h);

/**
 * Number of coordinates in a support; 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t wlab_section_support_len(const struct WlabSection *h, enum WlabSupport which);

/**
 * The `index`-th coordinate of a support, in row-major order.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum WlabStatus wlab_section_support_get(const struct WlabSection *h,
                                         enum WlabSupport which,
                                         size_t index,
                                         struct WlabCoord *out);

/**
 * Generic dimension of `B·u` over `samples` random points, and the value
 * it should equal (`dim m - g`).
 *
 * # Safety
 * `h` must be a live handle; `out_dim` and `out_expected` valid pointers.
 */
enum WlabStatus wlab_section_saturation_dim(const struct WlabSection *h,
                                            size_t samples,
                                            uint64_t seed,
                                            size_t *out_dim,
                                            size_t *out_expected);

/**
 * Whether the closure of `B·u` is an orbital variety closure.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum WlabStatus wlab_section_is_orbital_closure(const struct WlabSection *h,
                                                size_t samples,
                                                uint64_t seed,
                                                bool *out);

/**
 * Dense-orbit verdict for the augmented element.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum WlabStatus wlab_section_verdict(const struct WlabSection *h,
                                     size_t samples,
                                     uint64_t seed,
                                     enum WlabVerdict *out);

/**
 * Full analysis report as JSON, written to `*out` even when some property
 * check fails (status `PROPERTY_FAILURE`).
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer. Free the string
 * with [`wlab_string_free`].
 */
enum WlabStatus wlab_section_report_json(const struct WlabSection *h, uint64_t seed, char **out);

/**
 * ASCII rendering of a composition's tableau or circled matrix.
 *
 * # Safety
 * `comp` must be a NUL-terminated string and `out` a valid pointer. Free
 * the string with [`wlab_string_free`].
 */
enum WlabStatus wlab_render(const char *comp, enum WlabRenderTarget target, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void wlab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WLAB_H */
