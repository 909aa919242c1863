#ifndef BESSELSUM_H
#define BESSELSUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define BS_KIND_J 0

#define BS_KIND_K 1

/**
 * Region-based selection with fallback to direct summation.
 */
#define BS_METHOD_AUTO 0

#define BS_METHOD_DIRECT 1

#define BS_METHOD_POLYLOG_SERIES 2

#define BS_METHOD_THEOREM1 3

#define BS_METHOD_THEOREM2 4

#define BS_METHOD_A0_CLOSED_FORM 5

#define BS_METHOD_THEOREM3 6

#define BS_METHOD_THEOREM3_ASYMPTOTIC 7

#define BS_METHOD_NU0_LIMIT 8

#define BS_METHOD_HALF_INTEGER 9

#define BS_METHOD_EPSILON_AVERAGE 10

#define BS_FLAG_NEAR_BOUNDARY 1

#define BS_FLAG_CONDITIONAL_CONVERGENCE 2

#define BS_FLAG_FALLBACK_USED 4

#define BS_FLAG_NOT_CONVERGED 8

/**
 * Outcome of a call.
 */
typedef enum BsStatus {
  BS_STATUS_OK = 0,
  /**
   * Argument outside the mathematical domain (e.g. a < 0).
   */
  BS_STATUS_DOMAIN = 1,
  /**
   * Outside the convergence region of the requested method.
   */
  BS_STATUS_REGION = 2,
  /**
   * Formally valid but numerically ill-conditioned.
   */
  BS_STATUS_CONDITIONING = 3,
  /**
   * A table or truncation cap was exceeded.
   */
  BS_STATUS_CAPACITY = 4,
  /**
   * The method does not apply to these parameters.
   */
  BS_STATUS_ROUTING = 5,
  BS_STATUS_NULL_POINTER = 6,
  BS_STATUS_INVALID_ARGUMENT = 7,
  /**
   * An internal panic was caught at the boundary.
   */
  BS_STATUS_PANIC = 8,
} BsStatus;

/**
 * Opaque evaluator handle owning its coefficient caches; safe to share across threads.
 */
typedef struct BsEvaluator BsEvaluator;

/**
 * A computed sum; `method` is a `BS_METHOD_*` code, `flags` a mask of `BS_FLAG_*`.
 */
typedef struct BsResult {
  double value;
  double est_error;
  uint64_t terms_used;
  uint32_t method;
  uint32_t flags;
} BsResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an evaluator; `tol` > 0 is the target accuracy of truncation-controlled
 * paths (1e-10 is the usual choice), `max_terms` = 0 selects the default cap.
 * Returns NULL on invalid arguments.
 */
struct BsEvaluator *bs_evaluator_new(double tol, uint64_t max_terms);

/**
 * Releases an evaluator; NULL is ignored.
 *
 * # Safety
 * `handle` must be NULL or a pointer returned by [`bs_evaluator_new`] not yet freed.
 */
void bs_evaluator_free(struct BsEvaluator *handle);

/**
 * Evaluates Σ s_n e^{-an}(½bn)^{-ν} C_ν(bn), C = J or K by `kind`, with
 * s_n = (−1)^{n−1} when `alternating`. `method` is `BS_METHOD_AUTO` or an exact method.
 *
 * # Safety
 * `handle` must come from [`bs_evaluator_new`]; `out` must point to writable `BsResult`.
 */
enum BsStatus bs_evaluate(const struct BsEvaluator *handle,
                          uint32_t kind,
                          bool alternating,
                          double a,
                          double b,
                          double nu,
                          uint32_t method,
                          struct BsResult *out);

/**
 * Message for the last failed call on this thread ("" after a success).
 * The pointer stays valid until the next call from the same thread.
 */
const char *bs_last_error(void);

/**
 * Canonical name of a `BS_METHOD_*` code, or NULL for unknown codes. Static storage.
 */
const char *bs_method_name(uint32_t method);

/**
 * Short description of a status code. Static storage.
 */
const char *bs_status_name(enum BsStatus status);

/**
 * Library version, static storage.
 */
const char *bs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BESSELSUM_H */
