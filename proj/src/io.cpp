#include "regkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string_view>

#include "regkit/error.hpp"

namespace regkit::io {

namespace {

ChiKey parse_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) fail(ErrorCode::Parse, "family parameter key '" + key + "' is not \"nu,i\"");
  auto to_int = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      fail(ErrorCode::Parse, "family parameter key '" + key + "' is not \"nu,i\"");
    return v;
  };
  const std::string_view sv(key);
  return {to_int(sv.substr(0, comma)), to_int(sv.substr(comma + 1))};
}

std::string key_string(const ChiKey& k) { return std::to_string(k.first) + "," + std::to_string(k.second); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) fail(ErrorCode::Parse, std::string("missing field '") + name + "'");
  return j.at(name);
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return std::signbit(v) ? "-0.0" : "0.0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void write(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write(it.value(), indent, depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
        return is_scalar(e) || (e.is_array() && std::all_of(e.begin(), e.end(), is_scalar));
      });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(j[i], indent, depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(j[i], indent, depth + 1, out);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("invalid JSON: ") + e.what());
  }
}

std::string dump(const Json& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  out += "\n";
  return out;
}

Json to_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorCode::Parse, "expected a number or [re, im], got " + j.dump());
}

Json to_json(const PiecewisePoly& p) {
  Json cells = Json::array();
  for (const auto& cell : p.cells()) {
    Json c = Json::array();
    for (const auto& v : cell) c.push_back(to_json(v));
    cells.push_back(std::move(c));
  }
  Json out;
  out["knots"] = p.knots();
  out["cells"] = std::move(cells);
  return out;
}

PiecewisePoly poly_from_json(const Json& j) {
  if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number()))
    return PiecewisePoly::constant(complex_from_json(j));
  const Json& knots = field(j, "knots");
  const Json& cells = field(j, "cells");
  if (!knots.is_array() || !cells.is_array()) fail(ErrorCode::Parse, "knots and cells must be arrays");
  std::vector<double> k;
  for (const auto& v : knots) {
    if (!v.is_number()) fail(ErrorCode::Parse, "knots must be numbers");
    k.push_back(v.get<double>());
  }
  std::vector<PiecewisePoly::Coeffs> c;
  for (const auto& cell : cells) {
    if (!cell.is_array()) fail(ErrorCode::Parse, "each cell must be an array of coefficients");
    PiecewisePoly::Coeffs coeffs;
    for (const auto& v : cell) coeffs.push_back(complex_from_json(v));
    c.push_back(std::move(coeffs));
  }
  try {
    return PiecewisePoly(std::move(k), std::move(c));
  } catch (const Error& e) {
    fail(ErrorCode::Parse, std::string("invalid piecewise polynomial: ") + e.what());
  }
}

Json to_json(const CoefficientSet& t) {
  Json out;
  out["n"] = t.order.n();
  Json sigma = Json::array();
  for (const auto& s : t.sigma) sigma.push_back(to_json(s));
  out["sigma"] = std::move(sigma);
  out["tauTopZero"] = t.tau_top_zero;
  return out;
}

CoefficientSet coeffs_from_json(const Json& j) {
  const Json& n = field(j, "n");
  if (!n.is_number_integer()) fail(ErrorCode::Parse, "n must be an integer");
  const OrderSpec order(n.get<int>());
  const Json& sigma = field(j, "sigma");
  if (!sigma.is_array()) fail(ErrorCode::Parse, "sigma must be an array");
  std::vector<PiecewisePoly> s;
  for (const auto& e : sigma) s.push_back(poly_from_json(e));
  // A shorter list omits sigma_{n-1} = 0.
  if (static_cast<int>(s.size()) == order.n() - 1) s.push_back(PiecewisePoly::zero());
  const bool top_zero = j.contains("tauTopZero") && j.at("tauTopZero").get<bool>();
  return CoefficientSet(order, std::move(s), top_zero);
}

Json to_json(const FMatrix& f) {
  Json out;
  out["n"] = f.order.n();
  Json rows = Json::array();
  for (int k = 1; k <= f.order.n(); ++k) {
    Json row = Json::array();
    for (int j = 1; j <= f.order.n(); ++j) row.push_back(to_json(f.at(k, j)));
    rows.push_back(std::move(row));
  }
  out["F"] = std::move(rows);
  return out;
}

FMatrix fmatrix_from_json(const Json& j) {
  const Json& n = field(j, "n");
  if (!n.is_number_integer()) fail(ErrorCode::Parse, "n must be an integer");
  FMatrix f{OrderSpec(n.get<int>())};
  const Json& rows = field(j, "F");
  if (!rows.is_array() || static_cast<int>(rows.size()) != f.order.n())
    fail(ErrorCode::Parse, "F must have n rows");
  for (int k = 1; k <= f.order.n(); ++k) {
    const Json& row = rows[static_cast<std::size_t>(k - 1)];
    if (!row.is_array() || static_cast<int>(row.size()) != f.order.n()) fail(ErrorCode::Parse, "F must have n columns");
    for (int c = 1; c <= f.order.n(); ++c) f.at(k, c) = poly_from_json(row[static_cast<std::size_t>(c - 1)]);
  }
  return f;
}

FamilyParams params_from_json(const Json& j) {
  FamilyParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) fail(ErrorCode::Parse, "family parameters must be an object");
  if (j.contains("tau")) {
    const Json& tau = j.at("tau");
    if (!tau.is_object()) fail(ErrorCode::Parse, "tau must be an object keyed by \"nu,i\"");
    for (auto it = tau.begin(); it != tau.end(); ++it) p.tau[parse_key(it.key())] = poly_from_json(it.value());
  }
  if (j.contains("c")) {
    const Json& c = j.at("c");
    if (!c.is_object()) fail(ErrorCode::Parse, "c must be an object keyed by \"nu,i\"");
    for (auto it = c.begin(); it != c.end(); ++it) p.c[parse_key(it.key())] = complex_from_json(it.value());
  }
  return p;
}

Json to_json(const FamilyParams& p) {
  Json tau = Json::object(), c = Json::object();
  for (const auto& [k, v] : p.tau) tau[key_string(k)] = to_json(v);
  for (const auto& [k, v] : p.c) c[key_string(k)] = to_json(v);
  Json out;
  out["tau"] = std::move(tau);
  out["c"] = std::move(c);
  return out;
}

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const EigenRecord& e) {
  Json out;
  out["k"] = e.k;
  out["lambda0"] = Json::array({e.lambda0.real(), e.lambda0.imag()});
  out["simple"] = e.simple;
  out["N"] = e.weight.size() == 0 ? Json::array() : to_json(e.weight);
  out["errorEstimate"] = e.error_estimate;
  return out;
}

Json to_json(const InvarianceReport& r) {
  Json out;
  out["L"] = to_json(r.l);
  out["constancyResidual"] = r.constancy_residual;
  out["patternResidual"] = r.pattern_residual;
  out["phiResidual"] = r.phi_residual;
  out["weightResidual"] = r.weight_residual;
  return out;
}

Json to_json(const SpectralMapResult& r) {
  Json out;
  out["residual"] = r.residual;
  out["lambdaSpread"] = r.lambda_spread;
  out["triangularity"] = r.triangularity;
  out["xgrid"] = r.xgrid;
  return out;
}

Json to_json(const WeightInvariance& w) {
  Json pairs = Json::array();
  for (const auto& p : w.pairs) {
    Json e;
    e["lambda0"] = Json::array({p.lambda.real(), p.lambda.imag()});
    e["lambda0Tilde"] = Json::array({p.lambda_tilde.real(), p.lambda_tilde.imag()});
    e["N"] = to_json(p.weight);
    e["NTilde"] = to_json(p.weight_tilde);
    pairs.push_back(std::move(e));
  }
  Json out;
  out["poleResidual"] = w.pole_residual;
  out["weightResidual"] = w.weight_residual;
  out["pairs"] = std::move(pairs);
  return out;
}

Json to_json(const DiscriminationResult& d) {
  Json out;
  out["signatureDistance"] = d.signature_distance;
  out["eigenvalueDifference"] = d.eigenvalue_difference;
  out["weightDifference"] = d.weight_difference;
  out["countMismatch"] = d.count_mismatch;
  out["note"] = "distinct spectral data is evidence of distinct coefficients, not a proof";
  return out;
}

Json to_json(const SL2Data& d) {
  auto list = [](const std::vector<Complex>& v) {
    Json a = Json::array();
    for (const auto& z : v) a.push_back(Json::array({z.real(), z.imag()}));
    return a;
  };
  Json out;
  out["dirichlet"] = list(d.dirichlet);
  out["quasiNeumann"] = list(d.quasi_neumann);
  out["weights"] = list(d.weights);
  return out;
}

}  // namespace regkit::io
