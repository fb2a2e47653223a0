/* C interface for the rcprod ray class group toolkit. Generated; do not edit. */

#ifndef RCPROD_H
#define RCPROD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum RcprodStatus {
  /**
   * Success.
   */
  Ok = 0,
  /**
   * A theorem-backed assertion failed (report verdict "violated").
   */
  Violated = 1,
  /**
   * Malformed input: bad field/modulus/ideal spec or null pointer.
   */
  InvalidArgument = 2,
  /**
   * A cap was hit: factoring cap, undecided principality, or an
   * unsaturated group.
   */
  Undecided = 3,
  /**
   * Internal invariant violation or panic; always a bug.
   */
  InternalError = 4,
} RcprodStatus;

/**
 * Opaque handle to a narrow ray class group H_q(K).
 */
typedef struct RcprodRayClass RcprodRayClass;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Release a string previously returned through a `char **` out-parameter.
 * Passing null is a no-op.
 */
void rcprod_string_free(char *s);

/**
 * Build the narrow ray class group of Q(√d) modulo the ideal spec
 * (e.g. "(3)", "hnf:1,5,2", "above:5:0"). On success `*out` owns the
 * handle; release with [`rcprod_rayclass_free`].
 */
enum RcprodStatus rcprod_rayclass_new(int64_t d, const char *modulus, struct RcprodRayClass **out);

/**
 * Release a ray class group handle. Passing null is a no-op.
 */
void rcprod_rayclass_free(struct RcprodRayClass *h);

/**
 * Group order |H_q(K)|; 0 when the handle is null. String-free.
 */
uint64_t rcprod_rayclass_order(const struct RcprodRayClass *h);

/**
 * Copy the invariant factors d₁ | d₂ | … into `buf` (capacity `cap`)
 * and store the count in `*out_len`. Fails with `InvalidArgument` when
 * the buffer is too small. String-free.
 */
enum RcprodStatus rcprod_rayclass_invariant_factors(const struct RcprodRayClass *h,
                                                    uint64_t *buf,
                                                    uintptr_t cap,
                                                    uintptr_t *out_len);

/**
 * The class of an ideal (spec string as for the modulus) as exponent
 * coordinates against the invariant factors, written into `buf`.
 */
enum RcprodStatus rcprod_rayclass_class_of(const struct RcprodRayClass *h,
                                           const char *ideal,
                                           uint64_t *buf,
                                           uintptr_t cap,
                                           uintptr_t *out_len);

/**
 * Classical invariants of Q(√d) as a JSON document in `*out_json`.
 */
enum RcprodStatus rcprod_field_info_json(int64_t d, char **out_json);

/**
 * Run one verification experiment and return its JSON report.
 * `experiment` is one of "three-primes", "degree-one-ideal",
 * "kernel-prime", "brun-titchmarsh", "ideal-count", "cover"; `xmax` is
 * the search radius (ignored by kernel-prime). Returns `Violated` when
 * the report verdict is "violated" (the JSON is still written).
 */
enum RcprodStatus rcprod_verify_json(const char *experiment,
                                     int64_t d,
                                     const char *modulus,
                                     int64_t xmax,
                                     char **out_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RCPROD_H */
