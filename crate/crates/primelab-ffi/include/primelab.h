#ifndef PRIMELAB_H
#define PRIMELAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Series selector for `pl_matrix_reduce`.
 */
typedef enum PlSeries {
  PlSeriesPrime = 0,
  PlSeriesTwin = 1,
  PlSeriesTriplet = 2,
  PlSeriesMoebius = 3,
} PlSeries;

/**
 * Status code returned by every fallible entry point.
 */
typedef enum PlStatus {
  PlStatusOk = 0,
  /**
   * A required pointer argument was null.
   */
  PlStatusNullArgument = 1,
  /**
   * An argument was outside the supported range.
   */
  PlStatusRange = 2,
  /**
   * Arguments were individually valid but jointly inconsistent.
   */
  PlStatusDomain = 3,
  /**
   * Filesystem failure while reading or writing a sieve cache.
   */
  PlStatusIo = 4,
  /**
   * The eigensolver failed to converge.
   */
  PlStatusEigen = 5,
  /**
   * Unexpected internal failure.
   */
  PlStatusInternal = 6,
} PlStatus;

/**
 * Opaque density-matrix handle, carrying its spectrum lazily.
 */
typedef struct PlMatrix PlMatrix;

/**
 * Opaque sieve handle.
 */
typedef struct PlTable PlTable;

/**
 * Build a sieve covering [0, 2^n). On success `*out` owns the handle.
 */
enum PlStatus pl_table_build(uint32_t n, struct PlTable **out);

/**
 * Build a sieve with an on-disk cache under `cache_dir` (UTF-8 path).
 */
enum PlStatus pl_table_load_or_build(uint32_t n, const char *cache_dir, struct PlTable **out);

void pl_table_free(struct PlTable *table);

/**
 * Number of primes at or below x.
 */
enum PlStatus pl_pi(const struct PlTable *table, uint64_t x, uint64_t *out);

/**
 * 1 if x is prime, 0 otherwise (x must be inside the sieved range).
 */
enum PlStatus pl_is_prime(const struct PlTable *table, uint64_t x, int *out);

/**
 * Exact natural-partition reduced density matrix of the prime state.
 */
enum PlStatus pl_rho_exact(const struct PlTable *table,
                           uint32_t n,
                           uint32_t m,
                           struct PlMatrix **out);

/**
 * Reduced density matrix of an arbitrary series state under the partition
 * keeping the `n_keep` qubit indices in `keep_bits`.
 */
enum PlStatus pl_matrix_reduce(const struct PlTable *table,
                               uint32_t n,
                               enum PlSeries series,
                               const uint32_t *keep_bits,
                               size_t n_keep,
                               struct PlMatrix **out);

void pl_matrix_free(struct PlMatrix *matrix);

/**
 * Matrix dimension.
 */
enum PlStatus pl_matrix_dim(const struct PlMatrix *matrix, size_t *out);

/**
 * One matrix entry by (row, col).
 */
enum PlStatus pl_matrix_entry(const struct PlMatrix *matrix, size_t row, size_t col, double *out);

/**
 * Tr rho^2.
 */
enum PlStatus pl_purity(const struct PlMatrix *matrix, double *out);

/**
 * Von Neumann entropy in bits; diagonalizes on first use and caches the
 * spectrum in the handle.
 */
enum PlStatus pl_vn_entropy(struct PlMatrix *matrix, double *out);

/**
 * Renyi entropy in bits for order > 0, order != 1.
 */
enum PlStatus pl_renyi_entropy(struct PlMatrix *matrix, double order, double *out);

/**
 * Copy the descending eigenvalues into a caller buffer of length
 * `capacity`; `*written` reports how many were stored.
 */
enum PlStatus pl_eigenvalues(struct PlMatrix *matrix,
                             double *buffer,
                             size_t capacity,
                             size_t *written);

#endif  /* PRIMELAB_H */
