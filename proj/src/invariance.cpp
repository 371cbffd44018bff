#include "regkit/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regkit/error.hpp"
#include "regkit/parallel.hpp"

namespace regkit {

namespace {

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

FundamentalSolution dense_solution(const SystemOperator& op, Complex lambda, double tol) {
  IntegratorOptions opts;
  opts.tol = tol;
  opts.dense = true;
  return integrate(op, lambda, opts);
}

std::vector<double> default_grid() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back(0.05 + 0.1 * i);
  return out;
}

// Greedy nearest matching of two equally long eigenvalue lists.
std::vector<std::size_t> match_nearest(const std::vector<EigenRecord>& a, const std::vector<EigenRecord>& b) {
  std::vector<std::size_t> out(a.size());
  std::vector<bool> used(b.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t best = b.size();
    double dist = HUGE_VAL;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(a[i].lambda0 - b[j].lambda0);
      if (d < dist) {
        dist = d;
        best = j;
      }
    }
    used[best] = true;
    out[i] = best;
  }
  return out;
}

}  // namespace

bool l_pattern_forced(const OrderSpec& order, int j, int k) { return j <= order.n() - order.m() || k > order.m(); }

void require_same_signature(const FMatrix& f, const FMatrix& ftilde, double tol) {
  if (!(f.order == ftilde.order)) fail(ErrorCode::SignatureMismatch, "associated matrices have different orders");
  const auto a = signature_of(f);
  const auto b = signature_of(ftilde);
  if (!a.tau_top_zero || !b.tau_top_zero)
    fail(ErrorCode::SignatureMismatch, "invariance checks require tau_{n-1} = 0 for both matrices");
  const double d = signature_distance(a, b);
  if (!(d <= tol))
    fail(ErrorCode::SignatureMismatch,
         "matrices regularize different coefficients (signature distance " + std::to_string(d) + ")");
}

InvarianceReport l_factor(const FMatrix& f, const FMatrix& ftilde, const std::vector<Complex>& lambdas,
                          const InvarianceOptions& opts) {
  require_same_signature(f, ftilde);
  if (lambdas.size() < 3) fail(ErrorCode::InvalidArgument, "l_factor needs at least 3 sample points");
  const OrderSpec& order = f.order;
  const int n = order.n();
  const int classical_rows = order.m() + order.s();
  const auto grid = opts.xgrid.empty() ? default_grid() : opts.xgrid;
  const SystemOperator op(f), opt(ftilde);

  std::vector<CMatrix> ls(lambdas.size());
  std::vector<double> phi(lambdas.size(), 0.0);
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const auto sol = dense_solution(op, lambdas[i], opts.tol);
    const auto sol_t = dense_solution(opt, lambdas[i], opts.tol);
    const CMatrix m = weyl_matrix(op, lambdas[i], opts.tol).m;
    const CMatrix mt = weyl_matrix(opt, lambdas[i], opts.tol).m;
    ls[i] = m * mt.inverse();
    for (double x : grid) {
      const CMatrix p = (sol.value(x) * m).topRows(classical_rows);
      const CMatrix pt = (sol_t.value(x) * mt).topRows(classical_rows);
      phi[i] = std::max(phi[i], max_abs(p - pt) / std::max(1.0, max_abs(p)));
    }
  });

  InvarianceReport out;
  out.l = CMatrix::Zero(n, n);
  for (const auto& l : ls) out.l += l;
  out.l /= static_cast<double>(ls.size());
  for (const auto& l : ls) out.constancy_residual = std::max(out.constancy_residual, max_abs(l - out.l));
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= n; ++k)
      if (l_pattern_forced(order, j, k))
        out.pattern_residual =
            std::max(out.pattern_residual, std::abs(out.l(j - 1, k - 1) - (j == k ? 1.0 : 0.0)));
  out.phi_residual = *std::max_element(phi.begin(), phi.end());
  return out;
}

std::vector<EigenRecord> smallest_eigenvalues(const SystemOperator& op, int k, int count, double tol) {
  if (count < 1) fail(ErrorCode::InvalidArgument, "eigenvalue count must be positive");
  for (double r = 16.0; r <= 1.1e6; r *= 4.0) {
    auto found = find_eigenvalues(op, k, Rect{-r, r, -r, r}, tol);
    if (static_cast<int>(found.size()) >= count &&
        std::abs(found[static_cast<std::size_t>(count - 1)].lambda0) <= r) {
      found.resize(static_cast<std::size_t>(count));
      return found;
    }
  }
  fail(ErrorCode::WindingMismatch, "fewer than " + std::to_string(count) + " eigenvalues within |lambda| <= 1e6");
}

WeightInvariance weight_invariance(const FMatrix& f, const FMatrix& ftilde, const Rect& region, int k, int limit,
                                   double tol, double match_tol) {
  require_same_signature(f, ftilde);
  const SystemOperator op(f), opt(ftilde);
  auto a = find_eigenvalues(op, k, region, tol);
  auto b = find_eigenvalues(opt, k, region, tol);
  if (limit > 0) {
    if (a.size() > static_cast<std::size_t>(limit)) a.resize(static_cast<std::size_t>(limit));
    if (b.size() > static_cast<std::size_t>(limit)) b.resize(static_cast<std::size_t>(limit));
  }
  if (a.size() != b.size())
    fail(ErrorCode::SpectrumMismatch, "eigenvalue counts differ: " + std::to_string(a.size()) + " vs " +
                                          std::to_string(b.size()));
  const auto match = match_nearest(a, b);

  WeightInvariance out;
  out.pairs.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex la = a[i].lambda0, lb = b[match[i]].lambda0;
    const double d = std::abs(la - lb);
    if (d > match_tol * std::max(1.0, std::abs(la)))
      fail(ErrorCode::SpectrumMismatch, "eigenvalue sets differ beyond tolerance");
    out.pole_residual = std::max(out.pole_residual, d);
    out.pairs[i].lambda = la;
    out.pairs[i].lambda_tilde = lb;
  }
  parallel_for(out.pairs.size(), [&](std::size_t i) {
    auto& p = out.pairs[i];
    WeightOptions wopts;
    wopts.tol = tol;
    wopts.radius = default_contour_radius(op, p.lambda, tol);
    p.weight = weight_matrix(op, p.lambda, wopts).n_matrix;
    p.weight_tilde = weight_matrix(opt, p.lambda_tilde, wopts).n_matrix;
  });
  for (const auto& p : out.pairs) out.weight_residual = std::max(out.weight_residual, max_abs(p.weight - p.weight_tilde));
  return out;
}

SpectralMapResult spectral_map_residual(const FMatrix& f, const FMatrix& ftilde, const std::vector<Complex>& lambdas,
                                        const std::vector<double>& xgrid, double h, double tol) {
  require_same_signature(f, ftilde);
  if (lambdas.empty()) fail(ErrorCode::InvalidArgument, "spectral_map_residual needs at least one lambda");
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  const SystemOperator op(f), opt(ftilde);
  const auto grid = xgrid.empty() ? default_grid() : xgrid;
  const std::vector<double> knots = merge_knots(op.knots(), opt.knots());
  const int n = f.order.n();

  SpectralMapResult out;
  out.xgrid = grid;
  std::vector<std::vector<CMatrix>> p_at(lambdas.size());
  std::vector<double> residual(lambdas.size(), 0.0);
  parallel_for(lambdas.size(), [&](std::size_t li) {
    const Complex lambda = lambdas[li];
    const auto sol = dense_solution(op, lambda, tol);
    const auto sol_t = dense_solution(opt, lambda, tol);
    const CMatrix m = weyl_matrix(op, lambda, tol).m;
    const CMatrix mt = weyl_matrix(opt, lambda, tol).m;
    auto p = [&](double x) -> CMatrix { return (sol.value(x) * m) * (sol_t.value(x) * mt).inverse(); };
    for (double x : grid) {
      auto hi = std::upper_bound(knots.begin(), knots.end(), x);
      if (hi == knots.end()) --hi;
      const double cell_lo = *std::prev(hi), cell_hi = *hi;
      CMatrix dp;
      if (x - h >= cell_lo && x + h <= cell_hi) {
        dp = (p(x + h) - p(x - h)) / (2.0 * h);
      } else if (x + 2.0 * h <= cell_hi) {
        dp = (-3.0 * p(x) + 4.0 * p(x + h) - p(x + 2.0 * h)) / (2.0 * h);
      } else if (x - 2.0 * h >= cell_lo) {
        dp = (3.0 * p(x) - 4.0 * p(x - h) + p(x - 2.0 * h)) / (2.0 * h);
      } else {
        fail(ErrorCode::InvalidArgument, "finite-difference step exceeds the coefficient cell size");
      }
      const CMatrix px = p(x);
      const CMatrix r = dp + px * opt.matrix(x, lambda) - op.matrix(x, lambda) * px;
      residual[li] = std::max(residual[li], max_abs(r));
      p_at[li].push_back(px);
    }
  });
  out.residual = *std::max_element(residual.begin(), residual.end());
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const CMatrix& px = p_at[li][g];
      out.lambda_spread = std::max(out.lambda_spread, max_abs(px - p_at[0][g]));
      for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k)
          out.triangularity = std::max(out.triangularity, std::abs(px(j, k) - (j == k ? 1.0 : 0.0)));
    }
  return out;
}

DiscriminationResult discrimination_probe(const FMatrix& f, const FMatrix& g, int count, double tol) {
  if (!(f.order == g.order)) fail(ErrorCode::InvalidArgument, "discrimination probe needs equal orders");
  DiscriminationResult out;
  out.signature_distance = signature_distance(signature_of(f), signature_of(g));
  const SystemOperator of(f), og(g);
  for (int k = 1; k <= f.order.n() - 1; ++k) {
    const auto a = smallest_eigenvalues(of, k, count, tol);
    const auto b = smallest_eigenvalues(og, k, count, tol);
    if (a.size() != b.size()) {
      out.count_mismatch = true;
      out.eigenvalue_difference = std::numeric_limits<double>::infinity();
      continue;
    }
    const auto match = match_nearest(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& ea = a[i];
      const auto& eb = b[match[i]];
      out.eigenvalue_difference = std::max(out.eigenvalue_difference, std::abs(ea.lambda0 - eb.lambda0));
      WeightOptions wopts;
      wopts.tol = tol;
      const CMatrix na = weight_matrix(of, ea.lambda0, wopts).n_matrix;
      const CMatrix nb = weight_matrix(og, eb.lambda0, wopts).n_matrix;
      out.weight_difference = std::max(out.weight_difference, max_abs(na - nb));
    }
  }
  return out;
}

}  // namespace regkit
