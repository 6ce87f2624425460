#ifndef QGROUPOID_H
#define QGROUPOID_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QgStatus {
  QG_STATUS_OK = 0,
  QG_STATUS_NULL_POINTER = 1,
  QG_STATUS_INVALID_UTF8 = 2,
  QG_STATUS_PARSE = 3,
  QG_STATUS_BAD_PARAMS = 4,
  QG_STATUS_INTERNAL = 5,
} QgStatus;

/**
 * Result of verifying one instance.
 */
typedef struct QgReport QgReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qg_version(void);

/**
 * Message for the last failed call on this thread, or an empty string.
 *
 * The pointer stays valid until the next library call on the same thread.
 */
const char *qg_last_error(void);

/**
 * Parses an instance document and verifies it at tolerance `tol`.
 *
 * A failing check is not an error: the call returns `QG_STATUS_OK` and the
 * report says whether the instance passed.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer to
 * writable storage for one handle.
 */
enum QgStatus qg_verify_json(const char *json, double tol, struct QgReport **out);

/**
 * 1 if every check passed, 0 if some check failed, -1 for a null handle.
 *
 * # Safety
 * `report` must be null or a handle from [`qg_verify_json`] not yet freed.
 */
int qg_report_pass(const struct QgReport *report);

/**
 * Number of checks in the report, or 0 for a null handle.
 *
 * # Safety
 * As for [`qg_report_pass`].
 */
size_t qg_report_check_count(const struct QgReport *report);

/**
 * Number of failed checks, or 0 for a null handle.
 *
 * # Safety
 * As for [`qg_report_pass`].
 */
size_t qg_report_failed_count(const struct QgReport *report);

/**
 * Largest relative residual over all checks, or NaN for a null handle.
 *
 * # Safety
 * As for [`qg_report_pass`].
 */
double qg_report_max_residual(const struct QgReport *report);

/**
 * Writes the report as JSON into a new string owned by the caller.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer. Release the
 * string with [`qg_string_free`].
 */
enum QgStatus qg_report_to_json(const struct QgReport *report, char **out);

/**
 * Runs the seeded self-test suite and returns its JSON report.
 *
 * `inject_fault` may be null; otherwise it names a case to corrupt.
 * `*passed` receives 1 if the suite met every expectation.
 *
 * # Safety
 * `inject_fault` must be null or NUL-terminated; `out` and `passed` must be
 * valid pointers. Release the string with [`qg_string_free`].
 */
enum QgStatus qg_selftest_json(uint64_t seed,
                               double tol,
                               const char *inject_fault,
                               int *passed,
                               char **out);

/**
 * Releases a report handle. Null is ignored.
 *
 * # Safety
 * `report` must be null or a live handle; it must not be used afterwards.
 */
void qg_report_free(struct QgReport *report);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void qg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QGROUPOID_H */
