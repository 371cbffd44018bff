#include <cmath>

#include "regkit/error.hpp"
#include "regkit/spectral.hpp"

namespace regkit {

double regularization_residual(const CoefficientSet& t, const FMatrix& f, Complex lambda, double tol) {
  if (!(t.order == f.order)) fail(ErrorCode::InvalidArgument, "coefficient set and matrix orders differ");
  const int n = t.order.n();
  const auto taus = classical_taus(t);
  SystemOperator op(f);
  IntegratorOptions opts;
  opts.tol = tol;
  opts.dense = true;
  const auto sol = integrate(op, lambda, opts);

  // Gauss points on a uniform refinement of the coefficient mesh.
  constexpr int kSub = 32;
  const GaussRule& rule = gauss_rule(8);
  const auto& knots = op.knots();
  std::vector<Complex> derivs(static_cast<std::size_t>(n) + 1);
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < knots.size(); ++c) {
    const double h = (knots[c + 1] - knots[c]) / kSub;
    for (int s = 0; s < kSub; ++s) {
      const double a = knots[c] + s * h;
      for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const double x = a + h * rule.nodes[g];
        for (int p = 0; p <= n; ++p) derivs[static_cast<std::size_t>(p)] = sol.derivative(x, p)(0, 0);
        const Complex lhs = classical_expression_at(t.order, taus, x, derivs);

        // y^{[n]} = (y^{[n-1]})' - sum_j f_{n,j} y^{[j-1]}
        const CMatrix y = sol.value(x);
        Complex quasi = sol.derivative(x, 1)(n - 1, 0);
        for (int j = 1; j <= n; ++j) quasi -= f.at(n, j)(x) * y(j - 1, 0);
        acc += rule.weights[g] * h * std::abs(lhs - quasi);
      }
    }
  }
  return acc;
}

double bilinear_form_residual(const CoefficientSet& t, const QMatrix& q, const PiecewisePoly& y,
                              const PiecewisePoly& z) {
  if (!(t.order == q.order)) fail(ErrorCode::InvalidArgument, "coefficient set and Q orders differ");
  const OrderSpec& order = t.order;
  const int m = order.m();
  const auto taus = classical_taus(t);
  const Complex lhs = integral(classical_expression(order, taus, y) * z);

  std::vector<PiecewisePoly> dy{y}, dz{z};
  for (int j = 1; j <= m + 1; ++j) {
    dy.push_back(derivative_cellwise(dy.back()));
    dz.push_back(derivative_cellwise(dz.back()));
  }
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  Complex rhs = sign * integral(dy[static_cast<std::size_t>(m + order.s())] * dz[static_cast<std::size_t>(m)]);
  for (int r = 0; r <= m; ++r)
    for (int j = 0; j <= m; ++j) {
      const auto& qrj = q.q(r, j);
      if (qrj.is_zero()) continue;
      rhs += integral(qrj * dy[static_cast<std::size_t>(r)] * dz[static_cast<std::size_t>(j)]);
    }
  return std::abs(lhs - rhs);
}

}  // namespace regkit
