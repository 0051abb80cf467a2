#ifndef RATBS_H
#define RATBS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RatbsMethod {
  RATBS_METHOD_LINEAR = 0,
  RATBS_METHOD_ELIMINATION = 1,
} RatbsMethod;

typedef enum RatbsStatus {
  RATBS_STATUS_OK = 0,
  RATBS_STATUS_ERROR = 1,
  RATBS_STATUS_INVALID_INPUT = 2,
  RATBS_STATUS_RESOURCE_LIMIT = 3,
  RATBS_STATUS_INCONCLUSIVE = 4,
  RATBS_STATUS_VERIFICATION_FAILED = 5,
  RATBS_STATUS_NULL_POINTER = 6,
  RATBS_STATUS_PANIC = 7,
} RatbsStatus;

/**
 * A rational function `f/g` with its pair annihilator.
 */
typedef struct RatbsRational RatbsRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *ratbs_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void ratbs_string_free(char *s);

/**
 * Computes the annihilator of `f^s1 g^s2`. `vars` is a comma-separated list
 * of variable names.
 *
 * # Safety
 * The strings must be NUL-terminated; `out` must be writable.
 */
enum RatbsStatus ratbs_rational_new(const char *vars,
                                    const char *f,
                                    const char *g,
                                    struct RatbsRational **out);

/**
 * # Safety
 * `h` must be null or a handle from [`ratbs_rational_new`], not yet freed.
 */
void ratbs_rational_free(struct RatbsRational *h);

/**
 * Computes the Bernstein-Sato ideal of the pair, or, when `fixture` is not
 * null, validates and uses the generators it lists (one per line, in `s1`,
 * `s2`).
 *
 * # Safety
 * `h` must be a live handle; `fixture` null or NUL-terminated.
 */
enum RatbsStatus ratbs_rational_prepare(struct RatbsRational *h, const char *fixture);

/**
 * Generators of `I_m(s)`, one per line.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RatbsStatus ratbs_ann_rational(const struct RatbsRational *h, uint32_t m, char **out);

/**
 * `b^{(N)}_{f/g,m}(s)` as a polynomial in `s`, or `0` for the zero ideal.
 * The linear method returns [`RatbsStatus::Inconclusive`] past `max_degree`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RatbsStatus ratbs_bs_rational(const struct RatbsRational *h,
                                   uint32_t m,
                                   uint32_t n,
                                   enum RatbsMethod method,
                                   uint32_t max_degree,
                                   char **out);

/**
 * A certificate for `b` at `(m, N)` in the certificate file format.
 *
 * # Safety
 * `h` must be a live handle; `b` NUL-terminated; `out` writable.
 */
enum RatbsStatus ratbs_certificate(const struct RatbsRational *h,
                                   uint32_t m,
                                   uint32_t n,
                                   const char *b,
                                   char **out);

/**
 * Checks a certificate file against its own `f`, `g`, `m`, `N` and `b`.
 * Returns [`RatbsStatus::VerificationFailed`] when either check fails.
 * `bs_fixture` may be null.
 *
 * # Safety
 * `certificate` must be NUL-terminated; `bs_fixture` null or NUL-terminated.
 */
enum RatbsStatus ratbs_verify(const char *certificate, const char *bs_fixture);

/**
 * The Bernstein-Sato polynomial of `f`.
 *
 * # Safety
 * The strings must be NUL-terminated; `out` must be writable.
 */
enum RatbsStatus ratbs_global_b(const char *vars, const char *f, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RATBS_H */
