// Command-line front end over the regkit C interface.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "regkit/regkit.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Raised by any failed library call; carries the status for the exit code.
struct Failure {
  regkit_status status;
  std::string message;
};

void check(regkit_status s) {
  if (s != REGKIT_OK) throw Failure{s, regkit_last_error()};
}

struct CoeffsDeleter {
  void operator()(regkit_coeffs* p) const { regkit_coeffs_free(p); }
};
struct MatrixDeleter {
  void operator()(regkit_fmatrix* p) const { regkit_fmatrix_free(p); }
};
using CoeffsPtr = std::unique_ptr<regkit_coeffs, CoeffsDeleter>;
using MatrixPtr = std::unique_ptr<regkit_fmatrix, MatrixDeleter>;

std::string take(char* s) {
  std::string out(s);
  regkit_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Failure{REGKIT_ERR_PARSE, what + ": " + e.what()};
  }
}

struct Config {
  std::string input;
  std::string params;
  std::string compare;
  std::string out;
  std::string csv;
  std::vector<double> region;
  std::vector<double> lambdas;
  std::vector<double> grid;
  double tol = 1e-10;
  double h = 1e-3;
  double threshold = 1e-6;
  double map_threshold = 1e-4;
  int k = 1;
  int count = 5;
  int nodes = 64;
  double radius = 0.0;
  std::uint64_t seed = 1;
};

// Every report goes through the library writer so reruns are byte-identical.
std::string formatted(const Json& j) {
  char* s = nullptr;
  check(regkit_json_format(j.dump().c_str(), &s));
  return take(s);
}

void write_output(const Config& cfg, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out);
  if (!out) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "cannot write " + cfg.out};
  out << text;
}

void write_csv(const Config& cfg, const std::string& text) {
  if (cfg.csv.empty()) return;
  std::ofstream out(cfg.csv);
  if (!out) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "cannot write " + cfg.csv};
  out << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

regkit_region region_of(const Config& cfg) {
  if (cfg.region.size() != 4) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "--region needs re0 re1 im0 im1"};
  const regkit_region r{cfg.region[0], cfg.region[1], cfg.region[2], cfg.region[3]};
  if (!(r.re1 > r.re0) || !(r.im1 > r.im0)) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "--region must be nonempty"};
  return r;
}

CoeffsPtr load_coeffs(const Json& j) {
  regkit_coeffs* t = nullptr;
  check(regkit_coeffs_from_json(j.dump().c_str(), &t));
  return CoeffsPtr(t);
}

// Accepts an associated matrix {"n","F"}, a coefficient set {"n","sigma"}
// (optionally with family parameters), or second-order data {"sigma","r"}.
MatrixPtr load_matrix(const std::string& path, const std::string& params_path) {
  const Json j = parse_json(read_file(path), path);
  regkit_fmatrix* f = nullptr;
  if (j.contains("F")) {
    check(regkit_fmatrix_from_json(j.dump().c_str(), &f));
  } else if (j.contains("n")) {
    const auto t = load_coeffs(j);
    if (params_path.empty()) {
      check(regkit_fmatrix_ms(t.get(), &f));
    } else {
      const Json p = parse_json(read_file(params_path), params_path);
      check(regkit_fmatrix_family(t.get(), p.dump().c_str(), &f));
    }
  } else if (j.contains("sigma")) {
    const std::string r = j.contains("r") ? j.at("r").dump() : std::string();
    check(regkit_fmatrix_sl2(j.at("sigma").dump().c_str(), r.empty() ? nullptr : r.c_str(), &f));
  } else {
    throw Failure{REGKIT_ERR_PARSE, path + ": expected an associated matrix, coefficient set, or sigma/r pair"};
  }
  return MatrixPtr(f);
}

std::vector<double> lambda_pairs(const Config& cfg, int fallback) {
  if (!cfg.lambdas.empty()) {
    if (cfg.lambdas.size() % 2 != 0) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "--lambda takes RE IM pairs"};
    return cfg.lambdas;
  }
  // Seeded samples off the real axis, away from the real eigenvalues of
  // self-adjoint problems.
  std::mt19937_64 gen(cfg.seed);
  auto unit = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  std::vector<double> out;
  for (int i = 0; i < fallback; ++i) {
    out.push_back(-30.0 + 60.0 * unit());
    out.push_back(2.0 + 18.0 * unit());
  }
  return out;
}

int cmd_build(const Config& cfg) {
  const auto f = load_matrix(cfg.input, "");
  char* s = nullptr;
  check(regkit_fmatrix_to_json(f.get(), &s));
  write_output(cfg, take(s));
  return kExitOk;
}

int cmd_family(const Config& cfg) {
  if (cfg.params.empty()) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "family needs --params"};
  const auto f = load_matrix(cfg.input, cfg.params);
  char* s = nullptr;
  check(regkit_fmatrix_to_json(f.get(), &s));
  write_output(cfg, take(s));
  return kExitOk;
}

std::string eigen_csv(const Json& list) {
  std::string csv = "k,re,im,simple\n";
  for (const auto& e : list)
    csv += std::to_string(e["k"].get<int>()) + "," + fmt(e["lambda0"][0].get<double>()) + "," +
           fmt(e["lambda0"][1].get<double>()) + "," + (e["simple"].get<bool>() ? "1" : "0") + "\n";
  return csv;
}

int cmd_spectrum(const Config& cfg, bool weights) {
  const auto f = load_matrix(cfg.input, cfg.params);
  char* s = nullptr;
  if (weights && !cfg.lambdas.empty()) {
    if (cfg.lambdas.size() != 2) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "weights takes one --lambda RE IM"};
    check(regkit_weight_matrix(f.get(), cfg.lambdas[0], cfg.lambdas[1], cfg.radius, cfg.nodes, cfg.tol, &s));
    write_output(cfg, take(s));
    return kExitOk;
  }
  check(regkit_eigenvalues(f.get(), cfg.k, region_of(cfg), cfg.tol, weights ? 1 : 0, &s));
  const std::string text = take(s);
  write_output(cfg, text);
  write_csv(cfg, eigen_csv(parse_json(text, "eigenvalues")));
  return kExitOk;
}

int cmd_weyl(const Config& cfg) {
  const auto f = load_matrix(cfg.input, cfg.params);
  const int n = regkit_fmatrix_order(f.get());
  Json samples = Json::array();
  const auto lams = cfg.lambdas.empty() && !cfg.grid.empty() ? std::vector<double>{} : lambda_pairs(cfg, 1);
  std::vector<double> m(static_cast<std::size_t>(2 * n * n));
  for (std::size_t i = 0; i + 1 < lams.size(); i += 2) {
    check(regkit_weyl_matrix(f.get(), lams[i], lams[i + 1], cfg.tol, m.data()));
    Json rows = Json::array();
    for (int r = 0; r < n; ++r) {
      Json row = Json::array();
      for (int c = 0; c < n; ++c)
        row.push_back(Json::array({m[static_cast<std::size_t>(2 * (r * n + c))],
                                   m[static_cast<std::size_t>(2 * (r * n + c) + 1)]}));
      rows.push_back(std::move(row));
    }
    Json e;
    e["lambda"] = Json::array({lams[i], lams[i + 1]});
    e["M"] = std::move(rows);
    samples.push_back(std::move(e));
  }

  Json delta = Json::array();
  if (!cfg.grid.empty()) {
    // --grid RE0 RE1 IM0 IM1 NRE NIM tabulates Delta_k.
    if (cfg.grid.size() != 6) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "--grid needs RE0 RE1 IM0 IM1 NRE NIM"};
    const int nre = static_cast<int>(cfg.grid[4]), nim = static_cast<int>(cfg.grid[5]);
    if (nre < 1 || nim < 1) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "--grid counts must be positive"};
    std::string csv = "re,im,delta_re,delta_im,log_scale\n";
    for (int a = 0; a < nre; ++a)
      for (int b = 0; b < nim; ++b) {
        const double re = nre == 1 ? cfg.grid[0] : cfg.grid[0] + (cfg.grid[1] - cfg.grid[0]) * a / (nre - 1);
        const double im = nim == 1 ? cfg.grid[2] : cfg.grid[2] + (cfg.grid[3] - cfg.grid[2]) * b / (nim - 1);
        double mr = 0, mi = 0, ls = 0;
        check(regkit_char_function(f.get(), cfg.k, re, im, cfg.tol, &mr, &mi, &ls));
        csv += fmt(re) + "," + fmt(im) + "," + fmt(mr) + "," + fmt(mi) + "," + fmt(ls) + "\n";
        Json e;
        e["lambda"] = Json::array({re, im});
        e["mantissa"] = Json::array({mr, mi});
        e["logScale"] = ls;
        delta.push_back(std::move(e));
      }
    write_csv(cfg, csv);
  }
  Json out;
  out["samples"] = std::move(samples);
  if (!cfg.grid.empty()) {
    out["k"] = cfg.k;
    out["delta"] = std::move(delta);
  }
  write_output(cfg, formatted(out));
  return kExitOk;
}

int cmd_invariance(const Config& cfg) {
  const auto f = load_matrix(cfg.input, "");
  MatrixPtr g;
  if (!cfg.compare.empty()) {
    g = load_matrix(cfg.compare, cfg.params);
  } else if (!cfg.params.empty()) {
    g = load_matrix(cfg.input, cfg.params);
  } else {
    throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "invariance needs --compare or --params"};
  }
  const auto lams = lambda_pairs(cfg, 5);
  const std::optional<regkit_region> region =
      cfg.region.empty() ? std::nullopt : std::optional<regkit_region>(region_of(cfg));
  char* s = nullptr;
  check(regkit_invariance(f.get(), g.get(), lams.data(), lams.size() / 2, region ? &*region : nullptr, cfg.tol, &s));
  Json report = parse_json(take(s), "invariance report");
  check(regkit_spectral_map(f.get(), g.get(), lams.data(), lams.size() / 2, nullptr, 0, cfg.h, cfg.tol, &s));
  report["spectralMap"] = parse_json(take(s), "spectral map");

  bool ok = report["constancyResidual"].get<double>() <= cfg.threshold &&
            report["patternResidual"].get<double>() <= cfg.threshold &&
            report["phiResidual"].get<double>() <= cfg.threshold &&
            report["spectralMap"]["residual"].get<double>() <= cfg.map_threshold;
  if (region) ok = ok && report["weightResidual"].get<double>() <= cfg.threshold;
  report["thresholds"] = {{"residual", cfg.threshold}, {"spectralMap", cfg.map_threshold}};
  report["pass"] = ok;

  write_output(cfg, formatted(report));
  return ok ? kExitOk : kExitThreshold;
}

int cmd_sl2(const Config& cfg) {
  const Json j = parse_json(read_file(cfg.input), cfg.input);
  if (!j.contains("sigma")) throw Failure{REGKIT_ERR_PARSE, cfg.input + ": expected {\"sigma\": ..., \"r\": ...}"};
  const std::string sigma = j.at("sigma").dump();
  const std::string r = j.contains("r") ? j.at("r").dump() : std::string();
  const auto lams = cfg.lambdas;
  if (lams.size() % 2 != 0) throw Failure{REGKIT_ERR_INVALID_ARGUMENT, "--lambda takes RE IM pairs"};
  char* s = nullptr;
  check(regkit_sl2(sigma.c_str(), r.empty() ? nullptr : r.c_str(), cfg.count, lams.data(), lams.size() / 2, cfg.tol,
                   &s));
  const std::string text = take(s);
  write_output(cfg, text);
  const Json data = parse_json(text, "sl2 data");
  std::string csv = "n,lambda_re,lambda_im,mu_re,mu_im,alpha_re,alpha_im\n";
  for (std::size_t i = 0; i < data["dirichlet"].size(); ++i)
    csv += std::to_string(i + 1) + "," + fmt(data["dirichlet"][i][0].get<double>()) + "," +
           fmt(data["dirichlet"][i][1].get<double>()) + "," + fmt(data["quasiNeumann"][i][0].get<double>()) + "," +
           fmt(data["quasiNeumann"][i][1].get<double>()) + "," + fmt(data["weights"][i][0].get<double>()) + "," +
           fmt(data["weights"][i][1].get<double>()) + "\n";
  write_csv(cfg, csv);
  return kExitOk;
}

bool is_usage_status(regkit_status s) {
  switch (s) {
    case REGKIT_ERR_INVALID_ARGUMENT:
    case REGKIT_ERR_PARSE:
    case REGKIT_ERR_INDEX_OUT_OF_RANGE:
    case REGKIT_ERR_KEY_RANGE:
    case REGKIT_ERR_PATTERN_VIOLATION:
    case REGKIT_ERR_DISCONTINUOUS_AT_KNOT:
    case REGKIT_ERR_SIGNATURE_MISMATCH:
      return true;
    default:
      return false;
  }
}

int report_error(const Config& cfg, const std::string& code, const std::string& message, int exit_code) {
  Json err;
  err["error"] = code;
  err["message"] = message;
  err["exitCode"] = exit_code;
  std::string text = err.dump(2) + "\n";
  try {
    text = formatted(err);
    write_output(cfg, text);
  } catch (const Failure&) {
    std::cout << text;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularization and spectral data of higher-order differential expressions"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&](CLI::App* sub, bool region) {
    sub->add_option("--input", cfg.input, "Input JSON file")->required();
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--tol", cfg.tol, "Integration and root tolerance, in (0, 1e-2]")
        ->check(CLI::Range(1e-300, 1e-2));
    sub->add_option("--seed", cfg.seed, "Seed for sampled lambda points");
    if (region) sub->add_option("--region", cfg.region, "re0 re1 im0 im1")->expected(4);
  };

  auto* build = app.add_subcommand("build", "Associated matrix with all free parameters zero");
  add_common(build, false);
  auto* family = app.add_subcommand("family", "Family member for given free parameters");
  add_common(family, false);
  family->add_option("--params", cfg.params, "Family parameter JSON")->required();

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of problem k in a region");
  add_common(spectrum, true);
  spectrum->add_option("--params", cfg.params, "Family parameter JSON");
  spectrum->add_option("--k", cfg.k, "Problem index 1..n-1");
  spectrum->add_option("--csv", cfg.csv, "CSV table output");
  spectrum->get_option("--region")->required();

  auto* weyl = app.add_subcommand("weyl", "Weyl-Yurko matrix samples and Delta_k tables");
  add_common(weyl, false);
  weyl->add_option("--params", cfg.params, "Family parameter JSON");
  weyl->add_option("--lambda", cfg.lambdas, "RE IM (repeatable)")->expected(2)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  weyl->add_option("--grid", cfg.grid, "RE0 RE1 IM0 IM1 NRE NIM")->expected(6);
  weyl->add_option("--k", cfg.k, "Problem index for the Delta_k table");
  weyl->add_option("--csv", cfg.csv, "CSV table output");

  auto* weights = app.add_subcommand("weights", "Eigenvalues with weight matrices");
  add_common(weights, true);
  weights->add_option("--params", cfg.params, "Family parameter JSON");
  weights->add_option("--k", cfg.k, "Problem index 1..n-1");
  weights->add_option("--lambda", cfg.lambdas, "Single pole RE IM instead of a region search")->expected(2);
  weights->add_option("--radius", cfg.radius, "Contour radius (default: automatic)");
  weights->add_option("--nodes", cfg.nodes, "Contour nodes")->check(CLI::Range(16, 1 << 16));
  weights->add_option("--csv", cfg.csv, "CSV table output");

  auto* invariance = app.add_subcommand("invariance", "Compare two associated matrices of one coefficient set");
  invariance->set_help_flag("--help", "Print this help message and exit");
  add_common(invariance, true);
  invariance->add_option("--params", cfg.params, "Family parameters for the second matrix");
  invariance->add_option("--compare", cfg.compare, "Second matrix or coefficient JSON");
  invariance->add_option("--lambda", cfg.lambdas, "Sample RE IM (repeatable)")->expected(2)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  invariance->add_option("--h", cfg.h, "Finite-difference step for the transformation relation");
  invariance->add_option("--threshold", cfg.threshold, "Bound on constancy, pattern, Phi and weight residuals");
  invariance->add_option("--map-threshold", cfg.map_threshold, "Bound on the transformation-relation residual");

  auto* sl2 = app.add_subcommand("sl2", "Second-order spectra, weight numbers and Weyl function");
  add_common(sl2, false);
  sl2->add_option("--count", cfg.count, "Number of eigenvalues")->check(CLI::Range(1, 1000));
  sl2->add_option("--lambda", cfg.lambdas, "Weyl function sample RE IM (repeatable)")->expected(2)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sl2->add_option("--csv", cfg.csv, "CSV table output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(cfg, "Usage", e.what(), kExitUsage);
  }

  try {
    if (*build) return cmd_build(cfg);
    if (*family) return cmd_family(cfg);
    if (*spectrum) return cmd_spectrum(cfg, false);
    if (*weyl) return cmd_weyl(cfg);
    if (*weights) return cmd_spectrum(cfg, true);
    if (*invariance) return cmd_invariance(cfg);
    if (*sl2) return cmd_sl2(cfg);
  } catch (const Failure& f) {
    return report_error(cfg, regkit_status_name(f.status), f.message,
                        is_usage_status(f.status) ? kExitUsage : kExitNumerical);
  } catch (const std::exception& e) {
    return report_error(cfg, "Internal", e.what(), kExitNumerical);
  }
  return kExitUsage;
}
