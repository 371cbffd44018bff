/* C interface to the regkit library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every call returns a regkit_status; on failure regkit_last_error() gives
 * a message for the calling thread. Strings returned through char** are
 * owned by the caller and released with regkit_string_free.
 */
#ifndef REGKIT_REGKIT_H
#define REGKIT_REGKIT_H

#include <stddef.h>

#if defined(REGKIT_BUILDING_LIBRARY)
#define REGKIT_API __attribute__((visibility("default")))
#else
#define REGKIT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum regkit_status {
  REGKIT_OK = 0,
  REGKIT_ERR_INVALID_ARGUMENT,
  REGKIT_ERR_PARSE,
  REGKIT_ERR_DISCONTINUOUS_AT_KNOT,
  REGKIT_ERR_INDEX_OUT_OF_RANGE,
  REGKIT_ERR_PATTERN_VIOLATION,
  REGKIT_ERR_KEY_RANGE,
  REGKIT_ERR_SINGULAR_BASIS,
  REGKIT_ERR_STEP_UNDERFLOW,
  REGKIT_ERR_NEAR_EIGENVALUE,
  REGKIT_ERR_WINDING_MISMATCH,
  REGKIT_ERR_NON_SIMPLE_POLE,
  REGKIT_ERR_SINGULAR_M0,
  REGKIT_ERR_SIGNATURE_MISMATCH,
  REGKIT_ERR_SPECTRUM_MISMATCH,
  REGKIT_ERR_INTERNAL
} regkit_status;

typedef struct regkit_coeffs regkit_coeffs;   /* coefficient set */
typedef struct regkit_fmatrix regkit_fmatrix; /* associated matrix */

/* Rectangle re0 <= Re <= re1, im0 <= Im <= im1. */
typedef struct regkit_region {
  double re0, re1, im0, im1;
} regkit_region;

REGKIT_API const char* regkit_last_error(void);
/* Stable identifier such as "NearEigenvalue". */
REGKIT_API const char* regkit_status_name(regkit_status status);
REGKIT_API void regkit_string_free(char* s);
/* Re-emits JSON text in the library's deterministic layout (17 significant digits). */
REGKIT_API regkit_status regkit_json_format(const char* json, char** out);
/* Caps worker threads; n <= 0 restores REGKIT_THREADS / hardware default. */
REGKIT_API void regkit_set_threads(int n);

/* Coefficient sets: {"n", "sigma": [...], "tauTopZero"}. */
REGKIT_API regkit_status regkit_coeffs_from_json(const char* json, regkit_coeffs** out);
REGKIT_API void regkit_coeffs_free(regkit_coeffs* t);
REGKIT_API regkit_status regkit_coeffs_to_json(const regkit_coeffs* t, char** out);
/* Moment-normalized representative of the same coefficients. */
REGKIT_API regkit_status regkit_coeffs_canonical(const regkit_coeffs* t, regkit_coeffs** out);
REGKIT_API regkit_status regkit_coeffs_distance(const regkit_coeffs* a, const regkit_coeffs* b, double* out);

/* Associated matrices: {"n", "F": [[...]]}. */
REGKIT_API regkit_status regkit_fmatrix_from_json(const char* json, regkit_fmatrix** out);
REGKIT_API void regkit_fmatrix_free(regkit_fmatrix* f);
REGKIT_API regkit_status regkit_fmatrix_to_json(const regkit_fmatrix* f, char** out);
REGKIT_API int regkit_fmatrix_order(const regkit_fmatrix* f);
/* Matrix with all free parameters zero. */
REGKIT_API regkit_status regkit_fmatrix_ms(const regkit_coeffs* t, regkit_fmatrix** out);
/* Family member; params_json {"tau": {"nu,i": poly}, "c": {"nu,i": num}}, NULL for none. */
REGKIT_API regkit_status regkit_fmatrix_family(const regkit_coeffs* t, const char* params_json, regkit_fmatrix** out);
/* Second-order matrix from sigma and r (piecewise-polynomial JSON; r may be NULL). */
REGKIT_API regkit_status regkit_fmatrix_sl2(const char* sigma_json, const char* r_json, regkit_fmatrix** out);
/* Coefficients regularized by f, in canonical form. */
REGKIT_API regkit_status regkit_fmatrix_signature(const regkit_fmatrix* f, regkit_coeffs** out);
/* *out = 1 if f has the required zero pattern (and zero trace when trace_zero). */
REGKIT_API regkit_status regkit_fmatrix_check_class(const regkit_fmatrix* f, int trace_zero, int* out);

/* Delta_k(lambda) = mantissa * exp(log_scale). */
REGKIT_API regkit_status regkit_char_function(const regkit_fmatrix* f, int k, double re, double im, double tol,
                                              double* mantissa_re, double* mantissa_im, double* log_scale);
/* Weyl-Yurko matrix, written row-major as n*n (re, im) pairs into out[2*n*n]. */
REGKIT_API regkit_status regkit_weyl_matrix(const regkit_fmatrix* f, double re, double im, double tol, double* out);

/* JSON list of {"k", "lambda0", "simple", "N", "errorEstimate"}; weights filled when with_weights. */
REGKIT_API regkit_status regkit_eigenvalues(const regkit_fmatrix* f, int k, regkit_region region, double tol,
                                            int with_weights, char** out_json);
/* Weight matrix at a pole; radius <= 0 selects the default radius. */
REGKIT_API regkit_status regkit_weight_matrix(const regkit_fmatrix* f, double re, double im, double radius, int nodes,
                                              double tol, char** out_json);

/* Invariance report for two matrices of the same coefficients. lambdas holds
 * count (re, im) pairs. When region is non-NULL the weight matrices of problem
 * k = 1 inside it are compared as well. */
REGKIT_API regkit_status regkit_invariance(const regkit_fmatrix* f, const regkit_fmatrix* g, const double* lambdas,
                                           size_t count, const regkit_region* region, double tol, char** out_json);
/* Residual of the transformation relation for P = Phi Phitilde^{-1}. */
REGKIT_API regkit_status regkit_spectral_map(const regkit_fmatrix* f, const regkit_fmatrix* g, const double* lambdas,
                                             size_t count, const double* xgrid, size_t xcount, double h, double tol,
                                             char** out_json);
/* Spectral-data comparison of two unrelated matrices (evidence only). */
REGKIT_API regkit_status regkit_discrimination(const regkit_fmatrix* f, const regkit_fmatrix* g, int count, double tol,
                                               char** out_json);

/* Second-order data for y'' - (sigma' + r) y = lambda y: two spectra, weight
 * numbers, Weyl function at the given lambdas and the residue identity for the
 * first eigenvalues. r_json may be NULL. */
REGKIT_API regkit_status regkit_sl2(const char* sigma_json, const char* r_json, int count, const double* lambdas,
                                    size_t lambda_count, double tol, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* REGKIT_REGKIT_H */
