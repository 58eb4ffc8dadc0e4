#ifndef FRIT_H
#define FRIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FritStatus {
  FRIT_STATUS_OK = 0,
  FRIT_STATUS_NULL_POINTER = 1,
  FRIT_STATUS_INVALID_ARGUMENT = 2,
  FRIT_STATUS_SINGULARITY = 3,
  FRIT_STATUS_UNSUPPORTED = 4,
  FRIT_STATUS_GEOMETRY = 5,
  FRIT_STATUS_NUMERICAL = 6,
  FRIT_STATUS_IO = 7,
  FRIT_STATUS_PANIC = 8,
} FritStatus;

/**
 * Which part of the kernel a direct application uses.
 */
typedef enum FritPart {
  FRIT_PART_FULL = 0,
  FRIT_PART_NEAR = 1,
  FRIT_PART_FAR = 2,
} FritPart;

/**
 * A Calderon-Zygmund decomposition of a field.
 */
typedef struct FritCz FritCz;

/**
 * A sampled scalar field on a centred box.
 */
typedef struct FritField FritField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *frit_last_error(void);

/**
 * Field of `samples^dim` row-major values copied from `values`.
 *
 * # Safety
 * `values` must point to `samples^dim` doubles; `out` must be writable.
 */
enum FritStatus frit_field_new(size_t dim,
                               double side,
                               size_t samples,
                               const double *values,
                               struct FritField **out);

/**
 * Synthetic field of the given kind (`gaussian_bump`, `multi_bump`,
 * `indicator_cube`, `band_limited_random`, `single_mode`). `params_json` is
 * a JSON object of parameters, or null for the defaults.
 *
 * # Safety
 * `kind` and `params_json` (when non-null) must be NUL-terminated strings.
 */
enum FritStatus frit_field_make(size_t dim,
                                double side,
                                size_t samples,
                                const char *kind,
                                const char *params_json,
                                struct FritField **out);

/**
 * # Safety
 * `field` must be null or a handle from this library, not yet freed.
 */
void frit_field_free(struct FritField *field);

/**
 * Number of samples in the field.
 *
 * # Safety
 * `field` must be a live handle.
 */
size_t frit_field_len(const struct FritField *field);

/**
 * Borrowed pointer to the row-major samples, valid while the handle lives.
 *
 * # Safety
 * `field` must be a live handle.
 */
const double *frit_field_values(const struct FritField *field);

/**
 * Spectral route with zero padding by `padding` (1 treats the field as
 * periodic).
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum FritStatus frit_apply_spectral(const struct FritField *field,
                                    size_t component,
                                    double beta,
                                    size_t padding,
                                    struct FritField **out);

/**
 * Direct (spatial convolution) route for the whole kernel or one part.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum FritStatus frit_apply_direct(const struct FritField *field,
                                  size_t component,
                                  double beta,
                                  enum FritPart part,
                                  struct FritField **out);

/**
 * `L^q` norm; pass `INFINITY` for the sup norm.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum FritStatus frit_lq_norm(const struct FritField *field, double q, double *out);

/**
 * Measure of `{|f| > t}`.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum FritStatus frit_distribution_measure(const struct FritField *field, double t, double *out);

/**
 * Imaginary part of the multiplier constant (its real part is zero).
 *
 * # Safety
 * `out` must be writable.
 */
enum FritStatus frit_gamma_beta(size_t dim, double beta, double *out);

/**
 * Multiplier of component `component` at frequency `y[0..dim]`, written as
 * `(re, im)` into `out[0..2]`.
 *
 * # Safety
 * `y` must hold `dim` doubles and `out` two.
 */
enum FritStatus frit_multiplier_symbol(size_t dim,
                                       size_t component,
                                       double beta,
                                       const double *y,
                                       double *out);

/**
 * Decomposition `f = g + b` at level `t`.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum FritStatus frit_czd_decompose(const struct FritField *field, double t, struct FritCz **out);

/**
 * # Safety
 * `cz` must be null or a handle from this library, not yet freed.
 */
void frit_czd_free(struct FritCz *cz);

/**
 * Number of selected cubes.
 *
 * # Safety
 * `cz` must be a live handle.
 */
size_t frit_czd_num_cubes(const struct FritCz *cz);

/**
 * Copy of the good part.
 *
 * # Safety
 * `cz` must be a live handle; `out` must be writable.
 */
enum FritStatus frit_czd_good(const struct FritCz *cz, struct FritField **out);

/**
 * Copy of the bad part.
 *
 * # Safety
 * `cz` must be a live handle; `out` must be writable.
 */
enum FritStatus frit_czd_bad(const struct FritCz *cz, struct FritField **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRIT_H */
