#ifndef PERMLAB_H
#define PERMLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum PlStatus {
  PlStatus_Ok = 0,
  PlStatus_NullPointer = 1,
  PlStatus_InvalidArgument = 2,
  PlStatus_Domain = 3,
  PlStatus_Parse = 4,
  PlStatus_NonConvergence = 5,
  PlStatus_HypothesisFailed = 6,
  PlStatus_Utf8 = 7,
  PlStatus_Panic = 8,
} PlStatus;

typedef enum PlPermMethod {
  PlPermMethod_Naive = 0,
  PlPermMethod_Ryser = 1,
  /**
   * Laplace expansion along the first row.
   */
  PlPermMethod_Laplace = 2,
} PlPermMethod;

/**
 * Opaque matrix handle.
 */
typedef struct PlMatrix PlMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *pl_last_error_message(void);

/**
 * Builds an `n x n` matrix from `n*n` row-major doubles.
 *
 * # Safety
 * `entries` must point to `n*n` readable doubles and `out` must be writable.
 */
enum PlStatus pl_matrix_from_entries(size_t n, const double *entries, struct PlMatrix **out);

/**
 * Parses the text matrix format (order line, then rows of integers,
 * decimals or `p/q` fractions). The result keeps exact rational entries.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` must be writable.
 */
enum PlStatus pl_matrix_parse(const char *text, struct PlMatrix **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `m` must come from this library and must not be used afterwards.
 */
void pl_matrix_free(struct PlMatrix *m);

/**
 * Order of the matrix, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t pl_matrix_order(const struct PlMatrix *m);

/**
 * Permanent in double precision.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum PlStatus pl_permanent(const struct PlMatrix *m, enum PlPermMethod method, double *out);

/**
 * Exact permanent rendered as `p/q` (or an integer). Float handles are
 * lifted exactly, so the result is the permanent of the stored doubles.
 * Free the string with `pl_string_free`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum PlStatus pl_permanent_exact(const struct PlMatrix *m, char **out);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void pl_string_free(char *s);

/**
 * Sum of permanents of all `k x k` submatrices.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum PlStatus pl_sigma_k(const struct PlMatrix *m, size_t k, double *out);

/**
 * Whether the matrix is doubly stochastic. Exact handles ignore `tol`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum PlStatus pl_is_doubly_stochastic(const struct PlMatrix *m, double tol, bool *out);

/**
 * Full indecomposability by exhaustive zero-block search (order at most 8).
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum PlStatus pl_is_fully_indecomposable(const struct PlMatrix *m, bool *out);

/**
 * Dittert's function. The matrix must be nonnegative with entry sum `n`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum PlStatus pl_phi(const struct PlMatrix *m, double *out);

/**
 * `t per(J_n) + (1-t) per(A) - per(tJ_n + (1-t)A)` for doubly stochastic `A`
 * and `t` in [0, 1].
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum PlStatus pl_gap_direct(const struct PlMatrix *m, double t, double *out);

/**
 * Looks for a real root in (0, 1) of the polynomial with ascending
 * coefficients `coeffs[0..len]`. On success `*found` says whether one
 * exists; if so `[*lo, *hi]` brackets it with width `2*tol`.
 *
 * # Safety
 * `coeffs` must point to `len` doubles; the out pointers must be writable.
 */
enum PlStatus pl_roots_in_open_unit(const double *coeffs,
                                    size_t len,
                                    double tol,
                                    bool *found,
                                    double *lo,
                                    double *hi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERMLAB_H */
