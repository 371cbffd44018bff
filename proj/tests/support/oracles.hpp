#pragma once

// Reference computations written independently of the library: they use
// closed forms, dense polynomial algebra on plain vectors and direct solves,
// never the library's integrator, root finder or regularization algebra.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "regkit/regularization.hpp"

namespace regkit::oracle {

using C = std::complex<double>;
using Dense = std::vector<C>;  // coefficients of a global polynomial, lowest degree first

inline const double kPi = std::numbers::pi;

// ---- dense polynomial algebra ----

inline Dense d_add(const Dense& a, const Dense& b, C sb = 1.0) {
  Dense out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += sb * b[i];
  return out;
}

inline Dense d_mul(const Dense& a, const Dense& b) {
  if (a.empty() || b.empty()) return {};
  Dense out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline Dense d_diff(const Dense& a, int times = 1) {
  Dense out = a;
  for (int t = 0; t < times; ++t) {
    if (out.size() <= 1) return {};
    Dense d(out.size() - 1);
    for (std::size_t i = 1; i < out.size(); ++i) d[i - 1] = static_cast<double>(i) * out[i];
    out = std::move(d);
  }
  return out;
}

inline C d_eval(const Dense& a, double x) {
  C acc = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
  return acc;
}

// Global polynomial of a single-cell PiecewisePoly (its only cell starts at 0).
inline Dense dense_of(const PiecewisePoly& p) {
  if (p.cell_count() != 1) throw std::invalid_argument("oracle needs a single-cell polynomial");
  return Dense(p.cells()[0].begin(), p.cells()[0].end());
}

// ---- moment normalization by a hand-built Gram system ----

// Coefficients b_0..b_{i-1} of the polynomial p with int x^k (w + p) = 0,
// k < i, where mom[k] = int_0^1 x^k w.
inline std::vector<double> moment_correction(const std::vector<double>& mom) {
  const int i = static_cast<int>(mom.size());
  Eigen::MatrixXd g(i, i);
  Eigen::VectorXd rhs(i);
  for (int k = 0; k < i; ++k) {
    for (int l = 0; l < i; ++l) g(k, l) = 1.0 / (k + l + 1);
    rhs(k) = -mom[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd b = g.fullPivLu().solve(rhs);
  return std::vector<double>(b.data(), b.data() + i);
}

// ---- classical differential expression and the quasi-derivative chain ----

// tau_nu = (-1)^{i_nu} sigma_nu^{(i_nu)} for global polynomial sigma.
inline std::vector<Dense> classical_taus(const OrderSpec& order, const std::vector<PiecewisePoly>& sigma) {
  std::vector<Dense> out;
  const int m = order.m();
  for (int nu = 0; nu < order.n(); ++nu) {
    const int k = nu / 2, j = nu % 2;
    const int inu = m - k - j;
    Dense d = d_diff(dense_of(sigma[static_cast<std::size_t>(nu)]), inu);
    if (inu % 2) for (auto& v : d) v = -v;
    out.push_back(std::move(d));
  }
  return out;
}

// l_n(y) straight from its defining sum of divergence-form terms.
inline Dense classical_expression(const OrderSpec& order, const std::vector<Dense>& tau, const Dense& y) {
  const int m = order.m(), s = order.s();
  Dense out = d_diff(y, order.n());
  for (int k = 0; k <= m - 1 + s; ++k) {
    const Dense term = d_diff(d_mul(tau[static_cast<std::size_t>(2 * k)], d_diff(y, k)), k);
    out = d_add(out, term, (k % 2) ? -1.0 : 1.0);
  }
  for (int k = 0; k <= m - 1; ++k) {
    const Dense& t = tau[static_cast<std::size_t>(2 * k + 1)];
    const Dense a = d_diff(d_mul(t, d_diff(y, k)), k + 1);
    const Dense b = d_diff(d_mul(t, d_diff(y, k + 1)), k);
    out = d_add(out, d_add(a, b), (k % 2) ? 1.0 : -1.0);
  }
  return out;
}

// y^{[n]} from y^{[k]} = (y^{[k-1]})' - sum_{j<=k} f_{k,j} y^{[j-1]}.
inline Dense quasi_derivative_n(const FMatrix& f, const Dense& y) {
  const int n = f.order.n();
  std::vector<Dense> q{y};
  for (int k = 1; k <= n; ++k) {
    Dense next = d_diff(q.back());
    for (int j = 1; j <= k; ++j) {
      const auto& e = f.at(k, j);
      if (e.is_zero()) continue;
      next = d_add(next, d_mul(dense_of(e), q[static_cast<std::size_t>(j - 1)]), -1.0);
    }
    q.push_back(std::move(next));
  }
  return q.back();
}

// ---- second-order closed forms (q = 0) ----

inline C sqrt_neg(C lambda) { return std::sqrt(-lambda); }  // rho with lambda = -rho^2

inline C weyl_zero_potential(C lambda) {
  const C rho = sqrt_neg(lambda);
  return -rho * std::cos(rho) / std::sin(rho);
}

// Dirichlet data for y'' - alpha delta(x - 1/2) y = lambda y, lambda = -rho^2:
// y = sin(rho x)/rho on the left, y' jumps by alpha y(1/2), and y(1) is the
// characteristic function. Real rho only (alpha >= 0 keeps lambda < 0).
inline double delta_char(double alpha, double rho) {
  const double h = 0.5;
  const double y = std::sin(rho * h) / rho;
  const double yp = std::cos(rho * h) + alpha * y;
  return y * std::cos(rho * h) + yp * std::sin(rho * h) / rho;
}

inline std::vector<double> delta_dirichlet(double alpha, int count) {
  std::vector<double> out;
  const double step = 1e-3;
  double a = 1e-3, fa = delta_char(alpha, a);
  while (static_cast<int>(out.size()) < count) {
    const double b = a + step, fb = delta_char(alpha, b);
    if (fa == 0.0 || fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi), fm = delta_char(alpha, mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double rho = 0.5 * (lo + hi);
      out.push_back(-rho * rho);
    }
    a = b;
    fa = fb;
  }
  return out;
}

// ---- third order, F = 0: Weyl matrix from the exponential basis ----

// Solutions of y''' = lambda y are e^{w x} with w^3 = lambda. Phi_k satisfies
// Phi_k^{(j-1)}(0) = delta_{kj} for j <= k and Phi_k^{(r)}(1) = 0 for
// r = 0..n-k-1; then M_{jk} = Phi_k^{(j-1)}(0).
inline Eigen::MatrixXcd weyl_third_order_free(C lambda) {
  const int n = 3;
  std::vector<C> w(3);
  const C root = std::pow(lambda, 1.0 / 3.0);
  for (int i = 0; i < 3; ++i) w[static_cast<std::size_t>(i)] = root * std::polar(1.0, 2.0 * kPi * i / 3.0);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 1; k <= n - 1; ++k) {
    Eigen::MatrixXcd a(n, n);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    int row = 0;
    for (int j = 1; j <= k; ++j, ++row) {
      for (int i = 0; i < n; ++i) a(row, i) = std::pow(w[static_cast<std::size_t>(i)], j - 1);
      rhs(row) = (j == k) ? 1.0 : 0.0;
    }
    for (int r = 0; r <= n - k - 1; ++r, ++row)
      for (int i = 0; i < n; ++i)
        a(row, i) = std::pow(w[static_cast<std::size_t>(i)], r) * std::exp(w[static_cast<std::size_t>(i)]);
    const Eigen::VectorXcd coef = a.fullPivLu().solve(rhs);
    for (int j = k + 1; j <= n; ++j) {
      C v = 0.0;
      for (int i = 0; i < n; ++i) v += coef(i) * std::pow(w[static_cast<std::size_t>(i)], j - 1);
      m(j - 1, k - 1) = v;
    }
  }
  return m;
}

// ---- residue by least-squares rational fit off any contour ----

// Fits g(z) ~ a/(z - z0) + b0 + b1 (z - z0) + b2 (z - z0)^2 on points along
// a few rays through z0 and returns a.
inline C rational_fit_residue(const std::function<C(C)>& g, C z0, double radius) {
  std::vector<C> pts;
  for (int ray = 0; ray < 3; ++ray)
    for (int s = 1; s <= 4; ++s)
      pts.push_back(z0 + radius * (0.25 * s) * std::polar(1.0, 0.3 + 2.1 * ray));
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(pts.size()), 4);
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const C d = pts[i] - z0;
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = 1.0 / d;
    a(r, 1) = 1.0;
    a(r, 2) = d;
    a(r, 3) = d * d;
    rhs(r) = g(pts[i]);
  }
  return a.colPivHouseholderQr().solve(rhs)(0);
}

// ---- argument principle on a finely sampled boundary ----

inline int fine_winding(const std::function<C(C)>& g, double re0, double re1, double im0, double im1,
                        int per_edge = 4000) {
  const C corners[5] = {{re0, im0}, {re1, im0}, {re1, im1}, {re0, im1}, {re0, im0}};
  double total = 0.0;
  C prev = g(corners[0]);
  for (int e = 0; e < 4; ++e)
    for (int i = 1; i <= per_edge; ++i) {
      const C z = corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(i) / per_edge);
      const C cur = g(z);
      total += std::arg(cur / prev);
      prev = cur;
    }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

// ---- Richardson-extrapolated central difference ----

template <typename Fn>
auto richardson_derivative(const Fn& p, double x, double h) {
  auto central = [&](double s) { return (p(x + s) - p(x - s)) / (2.0 * s); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

}  // namespace regkit::oracle
