#ifndef POLYACC_H
#define POLYACC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define PA_OK 0

#define PA_ERR_NULL 1

#define PA_ERR_UTF8 2

#define PA_ERR_PARSE 3

#define PA_ERR_DIMENSION 4

#define PA_ERR_HYPOTHESIS 5

#define PA_ERR_INTERNAL 6

#define PA_STATUS_EVALUABLE 0

#define PA_STATUS_NOT_EVALUABLE 1

#define PA_STATUS_UNKNOWN 2

/**
 * Opaque DAG handle.
 */
typedef struct PaDag PaDag;

/**
 * Opaque polynomial handle.
 */
typedef struct PaPoly PaPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread ("" after a success). The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *pa_last_error(void);

/**
 * Parses `text` as a polynomial in x1..x{nvars}.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
int32_t pa_poly_parse(const char *text, uintptr_t nvars, struct PaPoly **out);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards; null is ignored.
 */
void pa_poly_free(struct PaPoly *p);

/**
 * Canonical text of the polynomial; release with `pa_string_free`.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
int32_t pa_poly_to_string(const struct PaPoly *p, char **out);

/**
 * Number of variables of the polynomial (0 for null).
 *
 * # Safety
 * `p` must be null or a live handle.
 */
uintptr_t pa_poly_nvars(const struct PaPoly *p);

/**
 * Binary64 evaluation at `x[0..n]`.
 *
 * # Safety
 * `x` must point to `n` doubles and `out` be writable.
 */
int32_t pa_poly_eval_f64(const struct PaPoly *p, const double *x, uintptr_t n, double *out);

/**
 * # Safety
 * `s` must come from this library; null is ignored.
 */
void pa_string_free(char *s);

/**
 * Complex-case decision. `status` receives a PA_STATUS_* value; `certificate`
 * (optional) receives the certificate text, released with `pa_string_free`.
 *
 * # Safety
 * `p` must be a live handle; `status` writable; `certificate` null or writable.
 */
int32_t pa_decide_complex(const struct PaPoly *p, int32_t *status, char **certificate);

/**
 * Parses a DAG in the text format and validates it.
 *
 * # Safety
 * `text` must be NUL-terminated and `out` writable.
 */
int32_t pa_dag_parse(const char *text, struct PaDag **out);

/**
 * # Safety
 * `d` must come from this library and not be used afterwards; null is ignored.
 */
void pa_dag_free(struct PaDag *d);

/**
 * Rounded evaluation in binary64 with δ given per node id; unlisted nodes get δ = 0.
 *
 * # Safety
 * `x` must hold `nx` doubles; `ids`/`deltas` must each hold `nd` entries.
 */
int32_t pa_dag_eval_rounded_f64(const struct PaDag *d,
                                const double *x,
                                uintptr_t nx,
                                const uint32_t *ids,
                                const double *deltas,
                                uintptr_t nd,
                                double *out);

/**
 * The polynomial the DAG computes with every δ = 0.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
int32_t pa_dag_extract(const struct PaDag *d, struct PaPoly **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYACC_H */
