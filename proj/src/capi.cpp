#include "regkit/regkit.h"

#include <cstring>
#include <exception>
#include <string>

#include "regkit/error.hpp"
#include "regkit/io.hpp"
#include "regkit/parallel.hpp"

struct regkit_coeffs {
  regkit::CoefficientSet value;
};

struct regkit_fmatrix {
  regkit::FMatrix value;
};

namespace {

using regkit::Complex;
using regkit::io::Json;

thread_local std::string g_last_error;

static_assert(static_cast<int>(regkit::ErrorCode::SpectrumMismatch) + 1 == REGKIT_ERR_SPECTRUM_MISMATCH,
              "status codes must mirror regkit::ErrorCode");

regkit_status status_of(regkit::ErrorCode code) { return static_cast<regkit_status>(static_cast<int>(code) + 1); }

template <typename Body>
regkit_status guarded(Body&& body) {
  try {
    body();
    g_last_error.clear();
    return REGKIT_OK;
  } catch (const regkit::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return REGKIT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return REGKIT_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) regkit::fail(regkit::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(const Json& j, char** out) { *out = copy_string(regkit::io::dump(j)); }

std::vector<Complex> complex_list(const double* pairs, size_t count) {
  if (count > 0) require(pairs, "lambdas");
  std::vector<Complex> out(count);
  for (size_t i = 0; i < count; ++i) out[i] = {pairs[2 * i], pairs[2 * i + 1]};
  return out;
}

regkit::Rect rect_of(const regkit_region& r) { return {r.re0, r.re1, r.im0, r.im1}; }

regkit::PiecewisePoly poly_or_zero(const char* json) {
  return json ? regkit::io::poly_from_json(regkit::io::parse(json)) : regkit::PiecewisePoly::zero();
}

Json complex_pair(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

extern "C" {

const char* regkit_last_error(void) { return g_last_error.c_str(); }

const char* regkit_status_name(regkit_status status) {
  if (status == REGKIT_OK) return "OK";
  if (status == REGKIT_ERR_INTERNAL) return "Internal";
  if (status > REGKIT_OK && status < REGKIT_ERR_INTERNAL)
    return regkit::error_code_name(static_cast<regkit::ErrorCode>(static_cast<int>(status) - 1));
  return "Unknown";
}

void regkit_string_free(char* s) { std::free(s); }

regkit_status regkit_json_format(const char* json, char** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    emit(regkit::io::parse(json), out);
  });
}

void regkit_set_threads(int n) { regkit::set_thread_count(n); }

regkit_status regkit_coeffs_from_json(const char* json, regkit_coeffs** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new regkit_coeffs{regkit::io::coeffs_from_json(regkit::io::parse(json))};
  });
}

void regkit_coeffs_free(regkit_coeffs* t) { delete t; }

regkit_status regkit_coeffs_to_json(const regkit_coeffs* t, char** out) {
  return guarded([&] {
    require(t, "coefficients");
    require(out, "out");
    emit(regkit::io::to_json(t->value), out);
  });
}

regkit_status regkit_coeffs_canonical(const regkit_coeffs* t, regkit_coeffs** out) {
  return guarded([&] {
    require(t, "coefficients");
    require(out, "out");
    *out = new regkit_coeffs{regkit::canonical_signature(t->value)};
  });
}

regkit_status regkit_coeffs_distance(const regkit_coeffs* a, const regkit_coeffs* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = regkit::signature_distance(a->value, b->value);
  });
}

regkit_status regkit_fmatrix_from_json(const char* json, regkit_fmatrix** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new regkit_fmatrix{regkit::io::fmatrix_from_json(regkit::io::parse(json))};
  });
}

void regkit_fmatrix_free(regkit_fmatrix* f) { delete f; }

regkit_status regkit_fmatrix_to_json(const regkit_fmatrix* f, char** out) {
  return guarded([&] {
    require(f, "matrix");
    require(out, "out");
    emit(regkit::io::to_json(f->value), out);
  });
}

int regkit_fmatrix_order(const regkit_fmatrix* f) { return f ? f->value.order.n() : 0; }

regkit_status regkit_fmatrix_ms(const regkit_coeffs* t, regkit_fmatrix** out) {
  return guarded([&] {
    require(t, "coefficients");
    require(out, "out");
    *out = new regkit_fmatrix{regkit::ms_matrix(t->value)};
  });
}

regkit_status regkit_fmatrix_family(const regkit_coeffs* t, const char* params_json, regkit_fmatrix** out) {
  return guarded([&] {
    require(t, "coefficients");
    require(out, "out");
    const regkit::FamilyParams params =
        params_json ? regkit::io::params_from_json(regkit::io::parse(params_json)) : regkit::FamilyParams{};
    *out = new regkit_fmatrix{regkit::family_matrix(t->value, params)};
  });
}

regkit_status regkit_fmatrix_sl2(const char* sigma_json, const char* r_json, regkit_fmatrix** out) {
  return guarded([&] {
    require(sigma_json, "sigma");
    require(out, "out");
    *out = new regkit_fmatrix{regkit::sl2_matrix(poly_or_zero(sigma_json), poly_or_zero(r_json))};
  });
}

regkit_status regkit_fmatrix_signature(const regkit_fmatrix* f, regkit_coeffs** out) {
  return guarded([&] {
    require(f, "matrix");
    require(out, "out");
    *out = new regkit_coeffs{regkit::signature_of(f->value)};
  });
}

regkit_status regkit_fmatrix_check_class(const regkit_fmatrix* f, int trace_zero, int* out) {
  return guarded([&] {
    require(f, "matrix");
    require(out, "out");
    *out = regkit::check_class(f->value, trace_zero ? regkit::FClass::Fn0 : regkit::FClass::Fn) ? 1 : 0;
  });
}

regkit_status regkit_char_function(const regkit_fmatrix* f, int k, double re, double im, double tol,
                                   double* mantissa_re, double* mantissa_im, double* log_scale) {
  return guarded([&] {
    require(f, "matrix");
    require(mantissa_re, "mantissa_re");
    require(mantissa_im, "mantissa_im");
    require(log_scale, "log_scale");
    const auto v = regkit::char_function(f->value, k, {re, im}, tol);
    *mantissa_re = v.mantissa.real();
    *mantissa_im = v.mantissa.imag();
    *log_scale = v.log_scale;
  });
}

regkit_status regkit_weyl_matrix(const regkit_fmatrix* f, double re, double im, double tol, double* out) {
  return guarded([&] {
    require(f, "matrix");
    require(out, "out");
    const auto w = regkit::weyl_matrix(f->value, {re, im}, tol);
    const auto n = w.m.rows();
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) {
        out[2 * (r * n + c)] = w.m(r, c).real();
        out[2 * (r * n + c) + 1] = w.m(r, c).imag();
      }
  });
}

regkit_status regkit_eigenvalues(const regkit_fmatrix* f, int k, regkit_region region, double tol, int with_weights,
                                 char** out_json) {
  return guarded([&] {
    require(f, "matrix");
    require(out_json, "out_json");
    const regkit::SystemOperator op(f->value);
    auto records = regkit::find_eigenvalues(op, k, rect_of(region), tol);
    if (with_weights) {
      regkit::parallel_for(records.size(), [&](std::size_t i) {
        regkit::WeightOptions wopts;
        wopts.tol = tol;
        records[i].weight = regkit::weight_matrix(op, records[i].lambda0, wopts).n_matrix;
      });
    }
    Json list = Json::array();
    for (const auto& r : records) list.push_back(regkit::io::to_json(r));
    emit(list, out_json);
  });
}

regkit_status regkit_weight_matrix(const regkit_fmatrix* f, double re, double im, double radius, int nodes, double tol,
                                   char** out_json) {
  return guarded([&] {
    require(f, "matrix");
    require(out_json, "out_json");
    regkit::WeightOptions wopts;
    wopts.radius = radius > 0.0 ? radius : 0.0;
    wopts.nodes = nodes;
    wopts.tol = tol;
    const auto w = regkit::weight_matrix(f->value, {re, im}, wopts);
    Json j;
    j["lambda0"] = Json::array({re, im});
    j["simple"] = w.simple;
    j["N"] = regkit::io::to_json(w.n_matrix);
    j["Mminus1"] = regkit::io::to_json(w.m_minus1);
    j["M0"] = regkit::io::to_json(w.m0);
    emit(j, out_json);
  });
}

regkit_status regkit_invariance(const regkit_fmatrix* f, const regkit_fmatrix* g, const double* lambdas, size_t count,
                                const regkit_region* region, double tol, char** out_json) {
  return guarded([&] {
    require(f, "f");
    require(g, "g");
    require(out_json, "out_json");
    regkit::InvarianceOptions opts;
    opts.tol = tol;
    auto report = regkit::l_factor(f->value, g->value, complex_list(lambdas, count), opts);
    Json j = regkit::io::to_json(report);
    if (region) {
      const auto w = regkit::weight_invariance(f->value, g->value, rect_of(*region), 1, 0, tol);
      j["weightResidual"] = w.weight_residual;
      j["poleResidual"] = w.pole_residual;
      j["weights"] = regkit::io::to_json(w)["pairs"];
    }
    emit(j, out_json);
  });
}

regkit_status regkit_spectral_map(const regkit_fmatrix* f, const regkit_fmatrix* g, const double* lambdas, size_t count,
                                  const double* xgrid, size_t xcount, double h, double tol, char** out_json) {
  return guarded([&] {
    require(f, "f");
    require(g, "g");
    require(out_json, "out_json");
    if (xcount > 0) require(xgrid, "xgrid");
    const std::vector<double> grid(xgrid, xgrid + xcount);
    const auto r = regkit::spectral_map_residual(f->value, g->value, complex_list(lambdas, count), grid, h, tol);
    Json j = regkit::io::to_json(r);
    j["h"] = h;
    emit(j, out_json);
  });
}

regkit_status regkit_discrimination(const regkit_fmatrix* f, const regkit_fmatrix* g, int count, double tol,
                                    char** out_json) {
  return guarded([&] {
    require(f, "f");
    require(g, "g");
    require(out_json, "out_json");
    emit(regkit::io::to_json(regkit::discrimination_probe(f->value, g->value, count, tol)), out_json);
  });
}

regkit_status regkit_sl2(const char* sigma_json, const char* r_json, int count, const double* lambdas,
                         size_t lambda_count, double tol, char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    const auto sigma = poly_or_zero(sigma_json);
    const auto r = poly_or_zero(r_json);
    const auto data = regkit::sl2_spectra(sigma, r, count, tol);
    Json j = regkit::io::to_json(data);

    Json weyl = Json::array();
    for (const auto& z : complex_list(lambdas, lambda_count)) {
      Json e;
      e["lambda"] = complex_pair(z);
      e["m"] = complex_pair(regkit::weyl_function(sigma, r, z, tol));
      weyl.push_back(std::move(e));
    }
    j["weyl"] = std::move(weyl);

    Json residues = Json::array();
    for (int i = 1; i <= std::min(count, 3); ++i) {
      const auto rc = regkit::residue_identity_check(sigma, r, i, tol);
      Json e;
      e["index"] = i;
      e["lambda"] = complex_pair(rc.lambda);
      e["alphaInverse"] = complex_pair(1.0 / rc.alpha);
      e["residue"] = complex_pair(rc.residue);
      e["discrepancy"] = rc.discrepancy;
      residues.push_back(std::move(e));
    }
    j["residues"] = std::move(residues);
    emit(j, out_json);
  });
}

}  // extern "C"
