#ifndef PEISERT_H
#define PEISERT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PeisertGraph {
  PEISERT_GRAPH_PEISERT = 0,
  PEISERT_GRAPH_PALEY = 1,
} PeisertGraph;

typedef enum PeisertMethod {
  PEISERT_METHOD_FORMULA = 0,
  PEISERT_METHOD_SNF = 1,
  PEISERT_METHOD_BOTH = 2,
} PeisertMethod;

typedef enum PeisertStatus {
  PEISERT_STATUS_OK = 0,
  PEISERT_STATUS_INVALID_PARAMETER = 1,
  PEISERT_STATUS_VERIFICATION_FAILED = 2,
  PEISERT_STATUS_NULL_POINTER = 3,
  PEISERT_STATUS_INTERNAL = 4,
} PeisertStatus;

/**
 * Opaque handle to a finite field table.
 */
typedef struct PeisertField PeisertField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Valid until the next
 * call into the library on the same thread.
 */
const char *peisert_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void peisert_string_free(char *s);

/**
 * Build `GF(p^n)`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum PeisertStatus peisert_field_new(uint64_t p, uint32_t n, struct PeisertField **out);

/**
 * # Safety
 * `f` must be null or a handle from `peisert_field_new`, not yet freed.
 */
void peisert_field_free(struct PeisertField *f);

/**
 * Field order, or 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
uint64_t peisert_field_order(const struct PeisertField *f);

/**
 * Encoding of the primitive element, or 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
uint32_t peisert_field_primitive(const struct PeisertField *f);

/**
 * Critical group report as JSON. `with_blocks` includes the
 * per-class reports. Returns `VerificationFailed` (and still writes the
 * report) when an internal consistency check fails.
 *
 * # Safety
 * `f` must be a live handle; `out` must be valid for writing one pointer.
 */
enum PeisertStatus peisert_critical_group_json(const struct PeisertField *f,
                                               enum PeisertGraph graph,
                                               enum PeisertMethod method,
                                               bool force,
                                               bool with_blocks,
                                               char **out);

/**
 * Spanning-tree count of the conference graph on `q` vertices, as a decimal
 * string.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum PeisertStatus peisert_spanning_trees(uint64_t q, char **out);

/**
 * Closed-form p-rank of the Peisert Laplacian at `q = p^{2t}`.
 *
 * # Safety
 * `out` must be valid for writing one `u64`.
 */
enum PeisertStatus peisert_p_rank(uint64_t p, uint32_t t, uint64_t *out);

/**
 * Invariant factors of the Smith group at `q = p^{2t}`, space separated.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum PeisertStatus peisert_smith_group(uint64_t p, uint32_t t, char **out);

/**
 * Run a named property suite at `q = p^{2t}` and write its JSON report.
 * `precision` 0 selects the default.
 *
 * # Safety
 * `suite` must be a nul-terminated string; `out` must be valid for writing
 * one pointer.
 */
enum PeisertStatus peisert_verify_json(const char *suite,
                                       uint64_t p,
                                       uint32_t t,
                                       uint32_t precision,
                                       char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PEISERT_H */
