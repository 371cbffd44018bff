/* Exercises the shared library through its C header only. */
#include <complex.h>
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "regkit/regkit.h"

static int failures = 0;

#define EXPECT(cond)                                                 \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static const double kPi = 3.14159265358979323846;

static const char* kZeroPoly = "{\"knots\": [0.0, 1.0], \"cells\": [[0.0]]}";

static void test_status_and_errors(void) {
  regkit_coeffs* t = NULL;
  EXPECT(strcmp(regkit_status_name(REGKIT_OK), "OK") == 0);
  EXPECT(strcmp(regkit_status_name((regkit_status)999), "Unknown") == 0);
  EXPECT(strcmp(regkit_status_name(REGKIT_ERR_NEAR_EIGENVALUE), "NearEigenvalue") == 0);
  EXPECT(regkit_coeffs_from_json("{not json", &t) == REGKIT_ERR_PARSE);
  EXPECT(t == NULL);
  EXPECT(strlen(regkit_last_error()) > 0);
  EXPECT(regkit_coeffs_from_json(NULL, &t) == REGKIT_ERR_INVALID_ARGUMENT);
  EXPECT(regkit_coeffs_from_json("{\"n\": 1, \"sigma\": [0.0]}", &t) == REGKIT_ERR_INVALID_ARGUMENT);
}

static void test_zero_potential(void) {
  regkit_fmatrix* f = NULL;
  double m[8];
  double complex lambda = -30.0 + 4.0 * I;
  double complex rho = csqrt(-lambda);
  double complex want = -rho * ccos(rho) / csin(rho);
  double mre, mim, ls;
  char* json = NULL;
  regkit_region region = {-100.0, 1.0, -1.0, 1.0};

  EXPECT(regkit_fmatrix_sl2(kZeroPoly, NULL, &f) == REGKIT_OK);
  EXPECT(regkit_fmatrix_order(f) == 2);
  EXPECT(regkit_weyl_matrix(f, creal(lambda), cimag(lambda), 1e-12, m) == REGKIT_OK);
  EXPECT(cabs((m[4] + m[5] * I) - want) < 1e-9 * cabs(want));
  EXPECT(m[0] == 1.0 && m[1] == 0.0 && m[2] == 0.0 && m[3] == 0.0);

  EXPECT(regkit_weyl_matrix(f, -kPi * kPi, 0.0, 1e-10, m) == REGKIT_ERR_NEAR_EIGENVALUE);
  EXPECT(regkit_char_function(f, 2, 1.0, 0.0, 1e-10, &mre, &mim, &ls) == REGKIT_ERR_INDEX_OUT_OF_RANGE);
  EXPECT(regkit_char_function(f, 1, -kPi * kPi, 0.0, 1e-12, &mre, &mim, &ls) == REGKIT_OK);
  EXPECT(fabs(mre) * exp(ls) < 1e-10);

  EXPECT(regkit_eigenvalues(f, 1, region, 1e-12, 1, &json) == REGKIT_OK);
  EXPECT(json != NULL && strstr(json, "lambda0") != NULL && strstr(json, "\"N\"") != NULL);
  regkit_string_free(json);
  json = NULL;

  EXPECT(regkit_weight_matrix(f, -kPi * kPi, 0.0, 0.0, 64, 1e-12, &json) == REGKIT_OK);
  EXPECT(json != NULL && strstr(json, "19.739208802178") != NULL); /* 2 pi^2 */
  regkit_string_free(json);
  json = NULL;
  EXPECT(regkit_weight_matrix(f, -kPi * kPi, 0.0, 0.0, 8, 1e-12, &json) == REGKIT_ERR_INVALID_ARGUMENT);
  regkit_fmatrix_free(f);
}

static void test_family_and_invariance(void) {
  const char* coeffs =
      "{\"n\": 2, \"sigma\": [{\"knots\": [0.0, 0.5, 1.0], \"cells\": [[0.0, 1.0], [0.5, -2.0]]}, 0.0],"
      " \"tauTopZero\": true}";
  const char* params = "{\"tau\": {\"0,0\": 0.25}, \"c\": {\"0,0\": 1.0}}";
  const double lambdas[6] = {3.0, 2.0, -25.0, 6.0, 40.0, -3.0};
  regkit_coeffs *t = NULL, *sig = NULL, *canon = NULL;
  regkit_fmatrix *f = NULL, *g = NULL, *h = NULL;
  char* json = NULL;
  double dist = -1.0;
  int ok = 0;

  EXPECT(regkit_coeffs_from_json(coeffs, &t) == REGKIT_OK);
  EXPECT(regkit_fmatrix_ms(t, &f) == REGKIT_OK);
  EXPECT(regkit_fmatrix_family(t, params, &g) == REGKIT_OK);
  EXPECT(regkit_fmatrix_family(t, "{\"c\": {\"3,0\": 1.0}}", &h) == REGKIT_ERR_KEY_RANGE);
  EXPECT(regkit_fmatrix_check_class(g, 1, &ok) == REGKIT_OK && ok == 1);

  EXPECT(regkit_fmatrix_signature(g, &sig) == REGKIT_OK);
  EXPECT(regkit_coeffs_canonical(t, &canon) == REGKIT_OK);
  EXPECT(regkit_coeffs_distance(sig, canon, &dist) == REGKIT_OK && dist < 1e-12);

  EXPECT(regkit_invariance(f, g, lambdas, 3, NULL, 1e-10, &json) == REGKIT_OK);
  EXPECT(json != NULL && strstr(json, "constancyResidual") != NULL);
  regkit_string_free(json);
  json = NULL;

  /* Round trip of the matrix through JSON. */
  EXPECT(regkit_fmatrix_to_json(g, &json) == REGKIT_OK);
  EXPECT(regkit_fmatrix_from_json(json, &h) == REGKIT_OK);
  regkit_string_free(json);
  json = NULL;
  EXPECT(regkit_fmatrix_check_class(h, 0, &ok) == REGKIT_OK && ok == 1);

  regkit_fmatrix_free(h);
  regkit_fmatrix_free(g);
  regkit_fmatrix_free(f);
  regkit_coeffs_free(canon);
  regkit_coeffs_free(sig);
  regkit_coeffs_free(t);
}

static void test_mismatch(void) {
  regkit_fmatrix *f = NULL, *g = NULL;
  const double lambdas[6] = {3.0, 2.0, -25.0, 6.0, 40.0, -3.0};
  char* json = NULL;
  EXPECT(regkit_fmatrix_sl2(kZeroPoly, NULL, &f) == REGKIT_OK);
  EXPECT(regkit_fmatrix_sl2("{\"knots\": [0.0, 1.0], \"cells\": [[0.0, 1.0]]}", NULL, &g) == REGKIT_OK);
  EXPECT(regkit_invariance(f, g, lambdas, 3, NULL, 1e-10, &json) == REGKIT_ERR_SIGNATURE_MISMATCH);
  EXPECT(json == NULL);
  regkit_fmatrix_free(g);
  regkit_fmatrix_free(f);
}

static void test_format(void) {
  char *a = NULL, *b = NULL;
  EXPECT(regkit_json_format("{\"b\": [1, 2.5], \"a\": 0.1}", &a) == REGKIT_OK);
  EXPECT(regkit_json_format(a, &b) == REGKIT_OK);
  EXPECT(a && b && strcmp(a, b) == 0);
  regkit_string_free(a);
  regkit_string_free(b);
  EXPECT(regkit_json_format("[1,", &a) == REGKIT_ERR_PARSE);
}

static void test_sl2(void) {
  const double lambdas[2] = {-30.0, 4.0};
  char* json = NULL;
  EXPECT(regkit_sl2(kZeroPoly, NULL, 3, lambdas, 1, 1e-12, &json) == REGKIT_OK);
  EXPECT(json != NULL && strstr(json, "dirichlet") != NULL && strstr(json, "quasiNeumann") != NULL);
  regkit_string_free(json);
}

int main(void) {
  regkit_set_threads(1);
  test_status_and_errors();
  test_zero_potential();
  test_family_and_invariance();
  test_mismatch();
  test_format();
  test_sl2();
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
