#include "regkit/sl2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "regkit/error.hpp"
#include "regkit/parallel.hpp"

namespace regkit {

namespace {

constexpr int kDirichletCol = 1;  // S(x, lambda) = C_2
constexpr int kNeumannCol = 0;    // C(x, lambda) = C_1

ScaledComplex end_entry(const SystemOperator& op, int col, Complex lambda, double tol) {
  IntegratorOptions opts;
  opts.tol = tol;
  const auto sol = integrate(op, lambda, opts);
  return {sol.end()(0, col), sol.log_scale()};
}

// The `count` zeros of C_col(1, lambda) with the largest real parts. The box
// bounds the real parts from above and the imaginary parts in terms of the
// coefficient size; its left edge moves out until enough zeros are inside.
std::vector<Complex> leading_zeros(const SystemOperator& op, int col, int count, double tol) {
  if (count < 1) fail(ErrorCode::InvalidArgument, "eigenvalue count must be positive");
  const double bound = 1.0 + 2.0 * op.f_bound();
  const double pi = std::numbers::pi;
  double left = -std::pow((count + 0.5) * pi, 2) - bound;
  AnalyticFunction g = [&](Complex z) { return end_entry(op, col, z, tol); };
  RootOptions ropts;
  ropts.tol = tol;
  for (int attempt = 0; attempt < 8; ++attempt) {
    auto roots = find_zeros(g, Rect{left, bound, -bound, bound}, ropts);
    if (static_cast<int>(roots.size()) >= count) {
      std::vector<Complex> out;
      for (const auto& rr : roots) {
        if (rr.multiplicity != 1) fail(ErrorCode::NonSimplePole, "multiple zero of the characteristic function");
        out.push_back(rr.z);
      }
      std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
      });
      out.resize(static_cast<std::size_t>(count));
      return out;
    }
    left = 2.0 * left - bound;
  }
  fail(ErrorCode::WindingMismatch, "could not enclose the requested number of eigenvalues");
}

Complex weight_number(const SystemOperator& op, Complex lambda, double tol) {
  IntegratorOptions opts;
  opts.tol = tol;
  opts.dense = true;
  const auto sol = integrate(op, lambda, opts);
  constexpr int kSub = 32;
  const GaussRule& rule = gauss_rule(8);
  const auto& knots = op.knots();
  Complex acc = 0.0;
  for (std::size_t c = 0; c + 1 < knots.size(); ++c) {
    const double h = (knots[c + 1] - knots[c]) / kSub;
    for (int s = 0; s < kSub; ++s)
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const Complex y = sol.value(knots[c] + h * (s + rule.nodes[q]))(0, kDirichletCol);
        acc += rule.weights[q] * h * y * y;
      }
  }
  return acc;
}

Complex weyl_value(const SystemOperator& op, Complex lambda, double tol) {
  IntegratorOptions opts;
  opts.tol = tol;
  const auto sol = integrate(op, lambda, opts);
  const Complex c = sol.end()(0, kNeumannCol);
  const Complex s = sol.end()(0, kDirichletCol);
  if (!(std::abs(s) > tol * std::max(std::abs(c), std::abs(s))))
    fail(ErrorCode::NearEigenvalue, "S(1, lambda) vanishes to solver resolution");
  return -c / s;
}

}  // namespace

FMatrix sl2_matrix(const PiecewisePoly& sigma, const PiecewisePoly& r) {
  FMatrix f{OrderSpec(2)};
  f.at(1, 1) = sigma;
  f.at(2, 1) = r - sigma * sigma;
  f.at(2, 2) = -sigma;
  return f;
}

CoefficientSet sl2_coefficients(const PiecewisePoly& sigma, const PiecewisePoly& r) {
  return CoefficientSet(OrderSpec(2), {sigma + antiderivative(r), PiecewisePoly::zero()}, true);
}

SL2Data sl2_spectra(const PiecewisePoly& sigma, const PiecewisePoly& r, int count, double tol) {
  const SystemOperator op(sl2_matrix(sigma, r));
  SL2Data out;
  out.dirichlet = leading_zeros(op, kDirichletCol, count, tol);
  out.quasi_neumann = leading_zeros(op, kNeumannCol, count, tol);
  out.weights.resize(out.dirichlet.size());
  parallel_for(out.dirichlet.size(), [&](std::size_t i) { out.weights[i] = weight_number(op, out.dirichlet[i], tol); });
  return out;
}

Complex weyl_function(const PiecewisePoly& sigma, const PiecewisePoly& r, Complex lambda, double tol) {
  return weyl_value(SystemOperator(sl2_matrix(sigma, r)), lambda, tol);
}

ResidueCheck residue_identity_check(const PiecewisePoly& sigma, const PiecewisePoly& r, int index, double tol,
                                    int nodes) {
  if (index < 1) fail(ErrorCode::InvalidArgument, "eigenvalue index is 1-based");
  if (nodes < 16) fail(ErrorCode::InvalidArgument, "residue contour needs at least 16 nodes");
  const SystemOperator op(sl2_matrix(sigma, r));
  const auto lams = leading_zeros(op, kDirichletCol, index + 1, tol);
  const auto i = static_cast<std::size_t>(index - 1);
  ResidueCheck out;
  out.lambda = lams[i];
  out.alpha = weight_number(op, out.lambda, tol);

  double nearest = HUGE_VAL;
  for (std::size_t j = 0; j < lams.size(); ++j)
    if (j != i) nearest = std::min(nearest, std::abs(lams[j] - out.lambda));
  const double radius = std::min(1.0, 0.5 * nearest);

  std::vector<Complex> offsets(static_cast<std::size_t>(nodes)), values(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j)
    offsets[static_cast<std::size_t>(j)] = std::polar(radius, 2.0 * std::numbers::pi * j / nodes);
  parallel_for(offsets.size(), [&](std::size_t j) { values[j] = weyl_value(op, out.lambda + offsets[j], tol); });
  Complex a1 = 0.0, a2 = 0.0;
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    a1 += values[j] * offsets[j];
    a2 += values[j] * offsets[j] * offsets[j];
  }
  a1 /= static_cast<double>(nodes);
  a2 /= static_cast<double>(nodes);
  if (std::abs(a2) > 1e-6 * radius * std::abs(a1))
    fail(ErrorCode::NonSimplePole, "Weyl function has a non-simple pole at the eigenvalue");
  out.residue = a1;
  out.discrepancy = std::abs(1.0 / out.alpha - out.residue);
  return out;
}

ShiftResult shift_experiment(const PiecewisePoly& sigma, const PiecewisePoly& r, Complex c,
                             const std::vector<Complex>& lambdas, int count, double tol) {
  const SystemOperator op(sl2_matrix(sigma, r));
  const SystemOperator op_c(sl2_matrix(sigma + PiecewisePoly::constant(c), r));
  ShiftResult out;
  const auto a = leading_zeros(op, kDirichletCol, count, tol);
  const auto b = leading_zeros(op_c, kDirichletCol, count, tol);
  for (std::size_t i = 0; i < a.size(); ++i)
    out.dirichlet_shift_residual = std::max(out.dirichlet_shift_residual, std::abs(a[i] - b[i]));

  if (!lambdas.empty()) {
    std::vector<Complex> diff(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
      diff[i] = weyl_value(op, lambdas[i], tol) - weyl_value(op_c, lambdas[i], tol);
    });
    Complex mean = 0.0;
    for (const auto& d : diff) mean += d;
    mean /= static_cast<double>(diff.size());
    out.mean_difference = mean;
    for (const auto& d : diff) out.weyl_shift_constancy = std::max(out.weyl_shift_constancy, std::abs(d - mean));
  }
  return out;
}

}  // namespace regkit
