#ifndef PRETENTIOUS_H
#define PRETENTIOUS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define PL_OK 0

#define PL_ERR_NULL 1

#define PL_ERR_ARGUMENT 2

#define PL_ERR_CAPACITY 3

#define PL_ERR_OUT_OF_RANGE 4

#define PL_ERR_DIVERGENCE 5

#define PL_ERR_ZERO_DENOMINATOR 6

#define PL_ERR_UNKNOWN_FUNCTION 7

#define PL_ERR_PARSE 8

#define PL_ERR_BUFFER_TOO_SMALL 9

#define PL_ERR_OTHER 10

#define PL_ERR_PANIC 11

/**
 * Opaque completely multiplicative function.
 */
typedef struct PlFunction PlFunction;

/**
 * Opaque smallest-prime-factor table.
 */
typedef struct PlSpfTable PlSpfTable;

/**
 * A complex number as two doubles.
 */
typedef struct PlComplex {
  double re;
  double im;
} PlComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last error on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *pl_last_error_message(void);

/**
 * Builds the table on `[lo, hi]`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
int32_t pl_spf_build(uint64_t lo, uint64_t hi, struct PlSpfTable **out);

/**
 * Smallest prime factor of `n`; writes 0 for `n = 1`.
 *
 * # Safety
 * `table` must come from `pl_spf_build`; `out` must be writable.
 */
int32_t pl_spf_get(const struct PlSpfTable *table, uint64_t n, uint64_t *out);

/**
 * # Safety
 * `table` must come from `pl_spf_build` and not be used afterwards.
 */
void pl_spf_free(struct PlSpfTable *table);

/**
 * Factorizes `n` into `cap`-sized `primes` and `exponents` arrays;
 * `out_len` receives the number of distinct primes. When `cap` is too
 * small, `out_len` still receives the required length.
 *
 * # Safety
 * `table` must come from `pl_spf_build`; the arrays must hold `cap` entries.
 */
int32_t pl_factorize(const struct PlSpfTable *table,
                     uint64_t n,
                     uint64_t *primes,
                     uint32_t *exponents,
                     uintptr_t cap,
                     uintptr_t *out_len);

/**
 * Parses a catalog function from its JSON description, e.g.
 * `{"name":"kronecker","params":{"d":5}}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
int32_t pl_function_from_json(const char *json, struct PlFunction **out);

/**
 * # Safety
 * `f` must come from `pl_function_from_json` and not be used afterwards.
 */
void pl_function_free(struct PlFunction *f);

/**
 * `f(n)` through the factorization of `n`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
int32_t pl_eval_cm(const struct PlFunction *f,
                   const struct PlSpfTable *table,
                   uint64_t n,
                   struct PlComplex *out);

/**
 * `sum_{n <= x} f(n) (log n)^k`.
 *
 * # Safety
 * `f` must be live; `out` must be writable.
 */
int32_t pl_partial_sum(const struct PlFunction *f, uint64_t x, uint32_t k, struct PlComplex *out);

/**
 * `sum_{y < p <= x} (1 - Re f(p) conj(g(p))) / p`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
int32_t pl_distance_sq(const struct PlFunction *f,
                       const struct PlFunction *g,
                       uint64_t y,
                       uint64_t x,
                       double *out);

/**
 * Halász functional `min_{|t| <= t_max} D^2(f, n^{it}; 1, x)` on a grid of
 * spacing `grid_step`; `out_t_star` may be null.
 *
 * # Safety
 * `f` must be live; `out_value` must be writable.
 */
int32_t pl_halasz_m(const struct PlFunction *f,
                    uint64_t x,
                    double t_max,
                    double grid_step,
                    double *out_value,
                    double *out_t_star);

/**
 * `Q_t` for parameters `Q`, `A` and height `t`.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t pl_q_sub_t(double q, double a, double t, double *out);

/**
 * Exponent `B(A)` for `A > 2`.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t pl_bound_exponent_b(double a, double *out);

/**
 * `Lambda_k(n)` for `n <= 10^6`.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t pl_lambda_k(uint32_t k, uint64_t n, double *out);

/**
 * `(-F'/F)^{(k-1)}(s)` from `derivs[0..len] = F(s), ..., F^{(k)}(s)`.
 *
 * # Safety
 * `derivs` must hold `len` entries; `out` must be writable.
 */
int32_t pl_comb_log_derivative(const struct PlComplex *derivs,
                               uintptr_t len,
                               struct PlComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRETENTIOUS_H */
