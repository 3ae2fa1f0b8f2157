#ifndef GLAMG_H
#define GLAMG_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Coarsener selector.
typedef enum GlamgMethod {
  GLAMG_METHOD_GL = 0,
  GLAMG_METHOD_VANEK = 1,
  GLAMG_METHOD_BECK = 2,
} GlamgMethod;

// Status code of every FFI call.
typedef enum GlamgStatus {
  GLAMG_STATUS_OK = 0,
  GLAMG_STATUS_NULL_POINTER = 1,
  GLAMG_STATUS_INVALID_ARGUMENT = 2,
  GLAMG_STATUS_DIMENSION_MISMATCH = 3,
  GLAMG_STATUS_NUMERICAL_ERROR = 4,
  GLAMG_STATUS_NOT_CONVERGED = 5,
  GLAMG_STATUS_IO_ERROR = 6,
  GLAMG_STATUS_INTERNAL_ERROR = 7,
} GlamgStatus;

// Right-hand side of generated Poisson problems.
typedef enum GlamgRhs {
  GLAMG_RHS_ZERO = 0,
  GLAMG_RHS_ONES = 1,
  GLAMG_RHS_MANUFACTURED_SIN = 2,
} GlamgRhs;

// Opaque sparse matrix handle.
typedef struct GlamgMatrix GlamgMatrix;

// Opaque solve report handle.
typedef struct GlamgReport GlamgReport;

// Solver options, passed by value. Obtain defaults from
// [`glamg_options_default`] and override fields as needed.
typedef struct GlamgOptions {
  enum GlamgMethod method;
  double tolerance;
  size_t max_vcycles;
  size_t pre_sweeps;
  size_t post_sweeps;
  size_t coarsest_size;
  // Seed of the stochastic (graph-learning) pipeline.
  uint64_t seed;
  // Node-embedding dimension of the graph-learning coarsener.
  size_t embedding_dimension;
  // Fine nodes per aggregate for the graph-learning coarsener.
  double cluster_ratio;
  // Strong-coupling threshold of the Vanek coarsener.
  double vanek_epsilon;
} GlamgOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread. Never null.
const char *glamg_last_error_message(void);

// Library version as a static C string.
const char *glamg_version(void);

// Default solver options: graph-learning coarsener, tolerance 1e-4,
// 2 pre / 7 post Jacobi sweeps, direct solves at 20 unknowns or less.
struct GlamgOptions glamg_options_default(void);

// Build an `n_rows x n_cols` sparse matrix from `nnz` triplets; duplicate
// entries are summed.
//
// # Safety
// `rows`, `cols` and `values` must point to `nnz` readable elements;
// `out` must be a valid destination for one pointer.
enum GlamgStatus glamg_matrix_from_triplets(size_t n_rows,
                                            size_t n_cols,
                                            size_t nnz,
                                            const size_t *rows,
                                            const size_t *cols,
                                            const double *values,
                                            struct GlamgMatrix **out);

// Read a matrix from a Matrix Market coordinate file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be a valid
// destination for one pointer.
enum GlamgStatus glamg_matrix_read_matrix_market(const char *path, struct GlamgMatrix **out);

// Write a matrix in Matrix Market coordinate format.
//
// # Safety
// `matrix` must be a live handle from this library; `path` must be a
// NUL-terminated string.
enum GlamgStatus glamg_matrix_write_matrix_market(const struct GlamgMatrix *matrix,
                                                  const char *path);

// Generate the 5-point Poisson system on an `nx x ny` interior grid.
// `rhs_out` may be null; otherwise it must hold `nx * ny` elements.
//
// # Safety
// `out` must be a valid destination for one pointer; `rhs_out`, when not
// null, must point to `nx * ny` writable elements.
enum GlamgStatus glamg_poisson_2d(size_t nx,
                                  size_t ny,
                                  enum GlamgRhs rhs,
                                  struct GlamgMatrix **out,
                                  double *rhs_out);

// Number of rows of a matrix handle (0 for null).
//
// # Safety
// `matrix` must be null or a live handle from this library.
size_t glamg_matrix_n_rows(const struct GlamgMatrix *matrix);

// Number of columns of a matrix handle (0 for null).
//
// # Safety
// `matrix` must be null or a live handle from this library.
size_t glamg_matrix_n_cols(const struct GlamgMatrix *matrix);

// Number of stored entries of a matrix handle (0 for null).
//
// # Safety
// `matrix` must be null or a live handle from this library.
size_t glamg_matrix_nnz(const struct GlamgMatrix *matrix);

// Release a matrix handle. Null is a no-op.
//
// # Safety
// `matrix` must be null or a handle not yet freed.
void glamg_matrix_free(struct GlamgMatrix *matrix);

// Solve `A v = f` with the AMG V-cycle from a zero initial guess.
//
// `solution_out` receives the iterate (length `rhs_len`) whether or not
// the run converged. When `report_out` is not null it receives a report
// handle to free with [`glamg_report_free`]. Returns `NotConverged` when
// the iteration hit its budget or the divergence guard.
//
// # Safety
// `matrix` must be a live handle; `rhs` must hold `rhs_len` readable
// elements; `solution_out` must hold `rhs_len` writable elements;
// `report_out` must be null or a valid destination for one pointer.
enum GlamgStatus glamg_solve(const struct GlamgMatrix *matrix,
                             const double *rhs,
                             size_t rhs_len,
                             struct GlamgOptions options,
                             double *solution_out,
                             struct GlamgReport **report_out);

// Build a prolongation operator for `matrix` with the configured
// coarsener.
//
// # Safety
// `matrix` must be a live handle; `out` must be a valid destination for
// one pointer.
enum GlamgStatus glamg_coarsen(const struct GlamgMatrix *matrix,
                               struct GlamgOptions options,
                               struct GlamgMatrix **out);

// V-cycles executed by the reported solve.
//
// # Safety
// `report` must be null or a live handle from this library.
size_t glamg_report_iterations(const struct GlamgReport *report);

// Whether the reported solve reached the tolerance.
//
// # Safety
// `report` must be null or a live handle from this library.
bool glamg_report_converged(const struct GlamgReport *report);

// Final residual infinity norm (NaN when no cycles ran).
//
// # Safety
// `report` must be null or a live handle from this library.
double glamg_report_final_residual(const struct GlamgReport *report);

// Hierarchy setup time in seconds.
//
// # Safety
// `report` must be null or a live handle from this library.
double glamg_report_setup_seconds(const struct GlamgReport *report);

// Cycling time in seconds.
//
// # Safety
// `report` must be null or a live handle from this library.
double glamg_report_solve_seconds(const struct GlamgReport *report);

// Release a report handle. Null is a no-op.
//
// # Safety
// `report` must be null or a handle not yet freed.
void glamg_report_free(struct GlamgReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLAMG_H */
