#ifndef OWPINV_H
#define OWPINV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OwpStatus {
  OWP_STATUS_OK = 0,
  OWP_STATUS_NULL_POINTER = 1,
  OWP_STATUS_INVALID_ARGUMENT = 2,
  OWP_STATUS_IO = 3,
  OWP_STATUS_PARSE = 4,
  OWP_STATUS_INVARIANT = 5,
  OWP_STATUS_PANIC = 6,
} OwpStatus;

typedef enum OwpFamily {
  OWP_FAMILY_IDENTITY = 0,
  OWP_FAMILY_BIT_REVERSAL = 1,
  /**
   * `param` is the mask.
   */
  OWP_FAMILY_XOR_MASK = 2,
  /**
   * Seeded random invertible matrix; `param` is the offset.
   */
  OWP_FAMILY_AFFINE_GF2 = 3,
  OWP_FAMILY_RANDOM = 4,
} OwpFamily;

typedef enum OwpAngleMode {
  OWP_ANGLE_MODE_WORST_CASE = 0,
  OWP_ANGLE_MODE_RANDOM = 1,
} OwpAngleMode;

typedef enum OwpBadMode {
  OWP_BAD_MODE_FULL_ROTATION = 0,
  OWP_BAD_MODE_RANDOM_ANGLE = 1,
} OwpBadMode;

/**
 * Opaque permutation handle.
 */
typedef struct OwpPermutation OwpPermutation;

/**
 * Opaque pseudo-identity handle.
 */
typedef struct OwpPseudoIdentity OwpPseudoIdentity;

/**
 * Outcome of one inversion run.
 */
typedef struct OwpRunReport {
  uint64_t x;
  uint64_t target;
  double success_prob;
  double v2_norm;
  /**
   * First stage whose fidelity fell below threshold, or -1.
   */
  int32_t first_failing_stage;
} OwpRunReport;

typedef struct OwpParams {
  double p;
  double q;
  double claim31_count;
} OwpParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *owp_last_error(void);

/**
 * Builds a permutation of `n`-bit strings.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum OwpStatus owp_permutation_new(enum OwpFamily family,
                                   uint32_t n,
                                   uint64_t seed,
                                   uint64_t param,
                                   struct OwpPermutation **out);

/**
 * Loads a permutation table file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum OwpStatus owp_permutation_from_file(const char *path, struct OwpPermutation **out);

/**
 * Bit length of `perm`, or 0 for NULL.
 *
 * # Safety
 * `perm` must be NULL or a live handle.
 */
uint32_t owp_permutation_n(const struct OwpPermutation *perm);

/**
 * `f(v)`, or `f^{-1}(v)` when `inverse` is set.
 *
 * # Safety
 * `perm` must be a live handle and `out` writable.
 */
enum OwpStatus owp_permutation_apply(const struct OwpPermutation *perm,
                                     uint64_t v,
                                     bool inverse,
                                     uint64_t *out);

/**
 * # Safety
 * `perm` must be NULL or a handle not yet freed.
 */
void owp_permutation_free(struct OwpPermutation *perm);

/**
 * Builds a pseudo-identity on `n + k` qubits with `floor(b 2^n)` sampled
 * bad values.
 *
 * # Safety
 * `out` must be writable.
 */
enum OwpStatus owp_pseudo_identity_new(uint32_t n,
                                       uint32_t k,
                                       double a,
                                       double b,
                                       enum OwpAngleMode angle_mode,
                                       enum OwpBadMode bad_mode,
                                       uint64_t seed,
                                       struct OwpPseudoIdentity **out);

/**
 * Loads a serialized pseudo-identity.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum OwpStatus owp_pseudo_identity_from_file(const char *path, struct OwpPseudoIdentity **out);

/**
 * # Safety
 * `op` must be NULL or a handle not yet freed.
 */
void owp_pseudo_identity_free(struct OwpPseudoIdentity *op);

/**
 * Exact inversion of `x` with `k` ancilla qubits.
 *
 * # Safety
 * `perm` must be a live handle and `out` writable.
 */
enum OwpStatus owp_run_inv(const struct OwpPermutation *perm,
                           uint64_t x,
                           uint32_t k,
                           struct OwpRunReport *out);

/**
 * Inversion of `x` with every reflection conjugated by `op`.
 *
 * # Safety
 * `perm` and `op` must be live handles and `out` writable.
 */
enum OwpStatus owp_run_av_inv(const struct OwpPermutation *perm,
                              const struct OwpPseudoIdentity *op,
                              uint64_t x,
                              struct OwpRunReport *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum OwpStatus owp_params(double r, uint32_t n, struct OwpParams *out);

/**
 * Whether `(1/r - 1/q^2) / (1 - 1/q^2) > 1/q` at `q = r + 1`.
 */
bool owp_contradiction_check(double r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OWPINV_H */
