/* Generated by cbindgen; do not edit. */

#ifndef FACDIRAC_H
#define FACDIRAC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FdStatus {
  FD_STATUS_OK = 0,
  FD_STATUS_NULL_POINTER = 1,
  FD_STATUS_INVALID_ARGUMENT = 2,
  FD_STATUS_OUT_OF_RANGE = 3,
  FD_STATUS_BUFFER_TOO_SMALL = 4,
  FD_STATUS_NUMERIC = 5,
  FD_STATUS_CONFIG = 6,
  FD_STATUS_IO = 7,
  FD_STATUS_PANIC = 8,
} FdStatus;

/**
 * Uniform grid; create with [`fd_grid_new`] or [`fd_grid_default`].
 */
typedef struct FdGrid FdGrid;

/**
 * Hierarchy model; create with [`fd_model_new`].
 */
typedef struct FdModel FdModel;

typedef struct FdSpectrumEntry {
  uint32_t n;
  uint32_t k;
  /**
   * +1 or -1
   */
  int32_t sign;
  double epsilon;
} FdSpectrumEntry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a
 * success. Valid until the next call into this library on the same thread.
 */
const char *fd_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fd_version(void);

/**
 * Creates a model from its id ("trig_pt" or "hyp_pt").
 *
 * # Safety
 * `id` must be a NUL-terminated string and `out` a writable pointer.
 */
enum FdStatus fd_model_new(const char *id, struct FdModel **out);

/**
 * Creates the massless shifted copy of `model` anchored at `n0`.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum FdStatus fd_model_shift(const struct FdModel *model, uint32_t n0, struct FdModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from this library not yet freed.
 */
void fd_model_free(struct FdModel *model);

/**
 * Number of bound levels above k = 0 for index n; -1 when unbounded.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum FdStatus fd_model_k_max(const struct FdModel *model, uint32_t n, int64_t *out);

/**
 * Scalar energy E_n^k.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum FdStatus fd_scalar_energy(const struct FdModel *model, uint32_t n, uint32_t k, double *out);

/**
 * Mass term of the Dirac operator h_n.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum FdStatus fd_dirac_mass(const struct FdModel *model, uint32_t n, double *out);

/**
 * `boundary`: 0 Dirichlet, 1 decaying truncation of the line.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum FdStatus fd_grid_new(double x_min,
                          double x_max,
                          size_t n_points,
                          int32_t boundary,
                          struct FdGrid **out);

/**
 * The model's default domain and resolution.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum FdStatus fd_grid_default(const struct FdModel *model, struct FdGrid **out);

/**
 * # Safety
 * `grid` must be NULL or a handle from this library not yet freed.
 */
void fd_grid_free(struct FdGrid *grid);

/**
 * Number of nodes; 0 for a NULL handle.
 *
 * # Safety
 * `grid` must be NULL or a live handle.
 */
size_t fd_grid_len(const struct FdGrid *grid);

/**
 * Writes the node coordinates into `buf` (at least `fd_grid_len` values).
 *
 * # Safety
 * `grid` must be a live handle; `buf` must hold `len` doubles.
 */
enum FdStatus fd_grid_nodes(const struct FdGrid *grid, double *buf, size_t len);

/**
 * Analytic spectrum of h_n up to level k_max, ascending in energy.
 *
 * `written` receives the number of entries, or the required capacity when
 * the call fails with `FD_STATUS_BUFFER_TOO_SMALL`.
 *
 * # Safety
 * `model` must be a live handle, `buf` must hold `cap` entries and
 * `written` must be writable.
 */
enum FdStatus fd_dirac_spectrum(const struct FdModel *model,
                                uint32_t n,
                                uint32_t k_max,
                                struct FdSpectrumEntry *buf,
                                size_t cap,
                                size_t *written);

/**
 * Normalized closed-form eigenfunction psi_n^k sampled on `grid`.
 *
 * # Safety
 * `model` and `grid` must be live handles; `buf` must hold `len` doubles.
 */
enum FdStatus fd_eigenfunction(const struct FdModel *model,
                               const struct FdGrid *grid,
                               uint32_t n,
                               uint32_t k,
                               double *buf,
                               size_t len);

/**
 * Normalized eigenspinor of h_n at level k and sign (+1 or -1).
 *
 * `buf` receives four blocks of `fd_grid_len` values: upper real, upper
 * imaginary, lower real, lower imaginary.
 *
 * # Safety
 * `model` and `grid` must be live handles; `buf` must hold `len` doubles.
 */
enum FdStatus fd_eigenspinor(const struct FdModel *model,
                             const struct FdGrid *grid,
                             uint32_t n,
                             uint32_t k,
                             int32_t sign,
                             double *buf,
                             size_t len);

/**
 * Runs the verification suite for a scenario given as JSON text.
 *
 * On success `*out_json` is a report to release with [`fd_string_free`]
 * and `*failed` the number of failing checks.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out_json` and `failed`
 * must be writable.
 */
enum FdStatus fd_verify_json(const char *config_json,
                             uint64_t seed,
                             char **out_json,
                             size_t *failed);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library not yet freed.
 */
void fd_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FACDIRAC_H */
