#ifndef RINGOPT_H
#define RINGOPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Values from 10 upward match the library's
 * error codes.
 */
typedef enum RingoptStatus {
  RINGOPT_STATUS_OK = 0,
  RINGOPT_STATUS_NULL_ARGUMENT = 1,
  RINGOPT_STATUS_INVALID_UTF8 = 2,
  RINGOPT_STATUS_PANIC = 3,
  RINGOPT_STATUS_MALFORMED_RING_PROP = 10,
  RINGOPT_STATUS_UNSUPPORTED_CARRIER = 11,
  RINGOPT_STATUS_INVALID_RING = 12,
  RINGOPT_STATUS_SYNTAX = 20,
  RINGOPT_STATUS_NON_POLYNOMIAL = 21,
  RINGOPT_STATUS_VARIABLE_IN_EXPONENT = 22,
  RINGOPT_STATUS_EMPTY_EXPRESSION = 23,
  RINGOPT_STATUS_MULTIVARIATE = 24,
  RINGOPT_STATUS_DEGREE_TOO_LARGE = 25,
  RINGOPT_STATUS_ORPHAN_PRAGMA = 30,
  RINGOPT_STATUS_DUPLICATE_PRAGMA = 31,
  RINGOPT_STATUS_UNBALANCED_BRACES = 32,
  RINGOPT_STATUS_VARIABLE_SELECTION = 33,
  RINGOPT_STATUS_INVALID_DAG = 40,
  RINGOPT_STATUS_UNBOUND_NAME = 50,
  RINGOPT_STATUS_DOMAIN_TOO_LARGE = 51,
  RINGOPT_STATUS_UNSUPPORTED_WIDTH = 52,
  RINGOPT_STATUS_SIGNATURE_MISMATCH = 60,
  RINGOPT_STATUS_NO_ANNOTATED_FUNCTIONS = 61,
  RINGOPT_STATUS_UNSUPPORTED_DEGREE = 62,
  RINGOPT_STATUS_EMPTY_SCHEME_LIST = 63,
  RINGOPT_STATUS_INVALID_ITERATIONS = 64,
  RINGOPT_STATUS_UNKNOWN_SCHEME = 65,
} RingoptStatus;

/**
 * An evaluation plan built from a polynomial.
 */
typedef struct RingoptPlan RingoptPlan;

/**
 * A normalized univariate polynomial.
 */
typedef struct RingoptPolynomial RingoptPolynomial;

typedef struct RingoptCost {
  size_t degree;
  size_t adds;
  size_t muls;
  size_t total_ops;
  size_t critical_path;
} RingoptCost;

typedef struct RingoptVerification {
  bool passed;
  uint64_t points_checked;
  /**
   * The remaining fields are meaningful only when `passed` is false.
   */
  uint64_t counterexample_x;
  uint64_t expected;
  uint64_t actual;
} RingoptVerification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ringopt_version(void);

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call into the library on this thread.
 */
const char *ringopt_last_error_message(void);

/**
 * Release a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ringopt_string_free(char *s);

/**
 * Parse and normalize `expression` over `variable` in the `int` ring.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum RingoptStatus ringopt_polynomial_parse(const char *expression,
                                            const char *variable,
                                            struct RingoptPolynomial **out);

/**
 * # Safety
 * `p` must come from [`ringopt_polynomial_parse`] and not have been freed.
 */
void ringopt_polynomial_free(struct RingoptPolynomial *p);

/**
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum RingoptStatus ringopt_polynomial_degree(const struct RingoptPolynomial *p, size_t *out);

/**
 * Coefficient of `x^exponent` as printed text; free with
 * [`ringopt_string_free`].
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum RingoptStatus ringopt_polynomial_coefficient(const struct RingoptPolynomial *p,
                                                  size_t exponent,
                                                  char **out);

/**
 * Build the plan named `scheme`: `naive`, `incremental`, `horner`,
 * `balanced`, or `llvm-f0` for degree-4 polynomials.
 *
 * # Safety
 * `p` must be a live handle; `scheme` NUL-terminated; `out` writable.
 */
enum RingoptStatus ringopt_plan_build(const struct RingoptPolynomial *p,
                                      const char *scheme,
                                      bool sparse,
                                      struct RingoptPlan **out);

/**
 * # Safety
 * `plan` must come from [`ringopt_plan_build`] and not have been freed.
 */
void ringopt_plan_free(struct RingoptPlan *plan);

/**
 * # Safety
 * `plan` must be a live handle; `out` must be writable.
 */
enum RingoptStatus ringopt_plan_cost(const struct RingoptPlan *plan, struct RingoptCost *out);

/**
 * Evaluate the plan at `x` modulo `2^width_bits`, with `count` coefficient
 * atoms bound by name.
 *
 * # Safety
 * `names` and `values` must each point to `count` valid elements (or be
 * NULL when `count` is 0); `out` must be writable.
 */
enum RingoptStatus ringopt_plan_eval(const struct RingoptPlan *plan,
                                     uint32_t width_bits,
                                     uint64_t x,
                                     const char *const *names,
                                     const uint64_t *values,
                                     size_t count,
                                     uint64_t *out);

/**
 * Check the plan against its polynomial. `samples == 0` sweeps every value
 * of the variable for `draws` coefficient assignments; otherwise `samples`
 * random points are checked. A failed check still returns `Ok`; inspect
 * `out->passed`.
 *
 * # Safety
 * `plan` must be a live handle; `out` must be writable.
 */
enum RingoptStatus ringopt_plan_verify(const struct RingoptPlan *plan,
                                       uint32_t width_bits,
                                       size_t samples,
                                       size_t draws,
                                       uint64_t seed,
                                       struct RingoptVerification *out);

/**
 * C definition `return_type function_name(param_type <variable>)` for the
 * plan.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum RingoptStatus ringopt_plan_emit_c(const struct RingoptPlan *plan,
                                       const char *return_type,
                                       const char *function_name,
                                       const char *param_type,
                                       char **out);

/**
 * Rewrite every annotated function in `source` with `scheme`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum RingoptStatus ringopt_transform_source(const char *source,
                                            const char *scheme,
                                            bool sparse,
                                            char **out);

/**
 * JSON analysis report for the annotated functions in `source`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum RingoptStatus ringopt_analyze_json(const char *source,
                                        const char *input_name,
                                        bool sparse,
                                        char **out);

/**
 * Benchmark program for `schemes`, a comma-separated list of scheme names.
 *
 * # Safety
 * `schemes` must be NUL-terminated; `out` must be writable.
 */
enum RingoptStatus ringopt_emit_benchmark(size_t degree,
                                          const char *schemes,
                                          size_t iterations,
                                          uint32_t width_bits,
                                          uint64_t seed,
                                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RINGOPT_H */
