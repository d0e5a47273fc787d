#ifndef CVSIM_H
#define CVSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CvStatus {
  CV_STATUS_OK = 0,
  CV_STATUS_NULL_POINTER = 1,
  CV_STATUS_INVALID_ARGUMENT = 2,
  CV_STATUS_NON_PHYSICAL = 3,
  CV_STATUS_NO_CONVERGENCE = 4,
  CV_STATUS_PARSE = 5,
  CV_STATUS_IO = 6,
  CV_STATUS_BUFFER_TOO_SMALL = 7,
  CV_STATUS_PANIC = 8,
} CvStatus;

typedef enum CvQuadrature {
  CV_QUADRATURE_X = 0,
  CV_QUADRATURE_P = 1,
} CvQuadrature;

typedef enum CvDisposal {
  CV_DISPOSAL_DISCARD = 0,
  CV_DISPOSAL_MEASURE_X = 1,
  CV_DISPOSAL_MEASURE_P = 2,
  CV_DISPOSAL_KEEP = 3,
} CvDisposal;

/**
 * Opaque Gaussian state.
 */
typedef struct CvState CvState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *cv_last_error(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum CvStatus cv_state_vacuum(size_t n_modes, struct CvState **out);

/**
 * # Safety
 * `occupations` must point to `n_modes` doubles and `out` must be valid for writes.
 */
enum CvStatus cv_state_thermal(const double *occupations, size_t n_modes, struct CvState **out);

/**
 * Builds a state from a row-major `2n × 2n` covariance matrix and a
 * length-`2n` displacement (null for zero).
 *
 * # Safety
 * `cm` must point to `4 n²` doubles, `disp` to `2n` doubles or be null.
 */
enum CvStatus cv_state_new(size_t n_modes,
                           const double *cm,
                           const double *disp,
                           struct CvState **out);

/**
 * # Safety
 * `state` must come from this library and not be used afterwards.
 */
void cv_state_free(struct CvState *state);

/**
 * # Safety
 * `state` must be a valid handle or null.
 */
enum CvStatus cv_state_clone(const struct CvState *state, struct CvState **out);

/**
 * Number of modes, 0 for a null handle.
 *
 * # Safety
 * `state` must be a valid handle or null.
 */
size_t cv_state_n_modes(const struct CvState *state);

/**
 * Copies the covariance matrix row-major into `buf` (`4 n²` entries).
 *
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum CvStatus cv_state_cm(const struct CvState *state, double *buf, size_t len);

/**
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum CvStatus cv_state_disp(const struct CvState *state, double *buf, size_t len);

/**
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum CvStatus cv_state_from_json(const char *json, struct CvState **out);

/**
 * Writes a newly allocated string to `*out`; release it with
 * `cv_string_free`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CvStatus cv_state_to_json(const struct CvState *state, char **out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void cv_string_free(char *s);

/**
 * Keeps the listed zero-based modes, in the given order.
 *
 * # Safety
 * `keep` must point to `n_keep` indices.
 */
enum CvStatus cv_state_partial_trace(const struct CvState *state,
                                     const size_t *keep,
                                     size_t n_keep,
                                     struct CvState **out);

/**
 * Conditions on a homodyne outcome and removes the measured mode.
 *
 * # Safety
 * `state` must be a valid handle, `out` valid for writes.
 */
enum CvStatus cv_state_homodyne(const struct CvState *state,
                                size_t mode,
                                enum CvQuadrature quadrature,
                                double outcome,
                                struct CvState **out);

/**
 * Sends one beam through the listed ensembles (zero-based, with angles) at
 * coupling `kappa`. With `CvDisposal::Keep` the beam is appended as the last
 * mode; `outcome` is used only by the measuring disposals.
 *
 * # Safety
 * `ensembles` and `angles` must each point to `n_passes` values.
 */
enum CvStatus cv_state_run_beam(const struct CvState *state,
                                const size_t *ensembles,
                                const double *angles,
                                size_t n_passes,
                                double kappa,
                                double beam_var_x,
                                double beam_var_p,
                                enum CvDisposal disposal,
                                double outcome,
                                struct CvState **out);

/**
 * Symplectic eigenvalues in descending order (`n` entries).
 *
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum CvStatus cv_state_symplectic_eigenvalues(const struct CvState *state, double *buf, size_t len);

/**
 * PPT test across a cut written like `12|34`. `margin` receives the
 * smallest partially reversed symplectic eigenvalue minus one.
 *
 * # Safety
 * `cut` must be NUL-terminated, `is_ppt` and `margin` valid for writes or null.
 */
enum CvStatus cv_ppt(const struct CvState *state, const char *cut, bool *is_ppt, double *margin);

/**
 * # Safety
 * `cut` must be NUL-terminated and `out` valid for writes.
 */
enum CvStatus cv_log_negativity(const struct CvState *state, const char *cut, double *out);

/**
 * Tripartite class of a three-mode state: 1 all cuts NPT, 2 one PPT cut,
 * 3 two PPT cuts, 4 PPT but entangled, 5 fully separable, 0 undecided.
 *
 * # Safety
 * `class_code` must be valid for writes.
 */
enum CvStatus cv_classify_tripartite(const struct CvState *state, uint8_t *class_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CVSIM_H */
