#ifndef BIGACTION_H
#define BIGACTION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The first four agree with the CLI exit codes.
 */
typedef enum BaStatus {
  BA_STATUS_OK = 0,
  BA_STATUS_INTEGRITY = 1,
  BA_STATUS_USAGE = 2,
  BA_STATUS_AUDIT_MISMATCH = 3,
  BA_STATUS_NULL_POINTER = 4,
  BA_STATUS_IO = 5,
  BA_STATUS_INTERNAL = 6,
} BaStatus;

/**
 * Opaque handle owning one parameter set and its cached computations.
 */
typedef struct BaSession BaSession;

/**
 * Uniformizer exponents and the residual valuation.
 */
typedef struct BaUniformizer {
  int64_t a1;
  int64_t a2;
  int64_t b1;
  int64_t b2;
  int64_t residual_valuation;
  int64_t expected_valuation;
} BaUniformizer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ba_last_error(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *ba_version(void);

/**
 * Creates a session. `samples` is the number of random lines checked per
 * class; `seed` 0 selects the default seed. `cache_dir` may be NULL.
 *
 * # Safety
 * `out` must be valid for writes; `cache_dir` must be NULL or a valid C string.
 */
enum BaStatus ba_session_new(uint32_t p,
                             uint32_t s,
                             uint64_t samples,
                             uint64_t seed,
                             const char *cache_dir,
                             struct BaSession **out);

/**
 * Releases a session. NULL is ignored.
 *
 * # Safety
 * `session` must come from [`ba_session_new`] and not be used afterwards.
 */
void ba_session_free(struct BaSession *session);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ba_string_free(char *s);

/**
 * Builds (or reuses) the uniformizer and reports its exponents.
 *
 * # Safety
 * `session` and `out` must be valid.
 */
enum BaStatus ba_uniformizer(struct BaSession *session, struct BaUniformizer *out);

/**
 * Conductor of a class (`y2`, `v1'`, `v2'`, `w`, `y1-over-K`, `ree-line`).
 *
 * # Safety
 * `session`, `class_label` and `out` must be valid.
 */
enum BaStatus ba_class_conductor(struct BaSession *session, const char *class_label, uint64_t *out);

/**
 * Genus of the top field as a decimal string; free with [`ba_string_free`].
 *
 * # Safety
 * `session` and `out` must be valid.
 */
enum BaStatus ba_genus(struct BaSession *session, char **out);

/**
 * Writes 1 to `out` if `(p-1) q^6 > 2p g`, else 0.
 *
 * # Safety
 * `session` and `out` must be valid.
 */
enum BaStatus ba_big_action(struct BaSession *session, int32_t *out);

/**
 * Runs a CLI command (`verify`, `genus`, `commutators`, `audit`) and returns
 * the JSON report. The status is the report's exit code, so audit
 * mismatches give `BA_STATUS_AUDIT_MISMATCH` with a valid report.
 *
 * # Safety
 * `session`, `command` and `out` must be valid.
 */
enum BaStatus ba_report_json(struct BaSession *session, const char *command, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BIGACTION_H */
