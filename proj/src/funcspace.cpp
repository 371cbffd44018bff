#include "regkit/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "regkit/error.hpp"

namespace regkit {

namespace poly {

Complex eval(std::span<const Complex> c, Complex t) noexcept {
  Complex acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

std::vector<Complex> mul(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() || b.empty()) return {Complex(0.0)};
  std::vector<Complex> out(a.size() + b.size() - 1, Complex(0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Complex(0.0)) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  trim(out);
  return out;
}

std::vector<Complex> add(std::span<const Complex> a, std::span<const Complex> b) {
  std::vector<Complex> out(std::max(a.size(), b.size()), Complex(0.0));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  trim(out);
  return out;
}

std::vector<Complex> derivative(std::span<const Complex> c) {
  if (c.size() <= 1) return {Complex(0.0)};
  std::vector<Complex> out(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) out[k - 1] = c[k] * static_cast<double>(k);
  trim(out);
  return out;
}

std::vector<Complex> shift(std::span<const Complex> c, double s) {
  std::vector<Complex> out(c.begin(), c.end());
  if (s == 0.0 || out.size() <= 1) return out;
  const std::size_t d = out.size() - 1;
  // Repeated synthetic division (Horner) by (t - s).
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = d - 1;; --j) {
      out[j] += s * out[j + 1];
      if (j == i) break;
    }
  trim(out);
  return out;
}

void trim(std::vector<Complex>& c) {
  while (c.size() > 1 && c.back() == Complex(0.0)) c.pop_back();
  if (c.empty()) c.push_back(Complex(0.0));
}

}  // namespace poly

namespace {

double cell_width(const std::vector<double>& knots, std::size_t c) {
  return knots[c + 1] - knots[c];
}

// Real roots of a real polynomial inside [lo, hi], polished by Newton.
std::vector<double> real_roots_in(std::vector<double> c, double lo, double hi) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  std::vector<double> roots;
  const std::size_t d = c.size() - 1;
  if (d == 0) return roots;
  if (d == 1) {
    roots.push_back(-c[0] / c[1]);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < d; ++i) companion(i, d - 1) = -c[i] / c[d];
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-7 * (1.0 + std::abs(z.real()))) roots.push_back(z.real());
    }
  }
  auto value = [&](double t) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
    return v;
  };
  auto slope = [&](double t) {
    double v = 0.0;
    for (std::size_t k = d; k >= 1; --k) v = v * t + c[k] * static_cast<double>(k);
    return v;
  };
  std::vector<double> kept;
  for (double r : roots) {
    for (int it = 0; it < 4; ++it) {
      const double s = slope(r);
      if (s == 0.0) break;
      r -= value(r) / s;
    }
    if (r > lo && r < hi) kept.push_back(r);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<double> real_parts(std::span<const Complex> c) {
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

// int_0^h of a local cell polynomial.
Complex cell_integral(std::span<const Complex> c, double h) {
  Complex acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * h + c[k] / static_cast<double>(k + 1);
  return acc * h;
}

Complex cell_integral_between(std::span<const Complex> c, double a, double b) {
  auto prim = [&](double t) {
    Complex acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k] / static_cast<double>(k + 1);
    return acc * t;
  };
  return prim(b) - prim(a);
}

}  // namespace

PiecewisePoly::PiecewisePoly() : knots_{0.0, 1.0}, cells_{Coeffs{Complex(0.0)}} {}

PiecewisePoly::PiecewisePoly(std::vector<double> knots, std::vector<Coeffs> cells)
    : knots_(std::move(knots)), cells_(std::move(cells)) {
  if (knots_.size() < 2) fail(ErrorCode::InvalidArgument, "PiecewisePoly: need at least two knots");
  if (knots_.front() != 0.0 || knots_.back() != 1.0)
    fail(ErrorCode::InvalidArgument, "PiecewisePoly: knots must start at 0 and end at 1");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i] > knots_[i - 1]))
      fail(ErrorCode::InvalidArgument, "PiecewisePoly: knots must be strictly increasing");
  if (cells_.size() + 1 != knots_.size())
    fail(ErrorCode::InvalidArgument, "PiecewisePoly: expected " + std::to_string(knots_.size() - 1) +
                                         " cells, got " + std::to_string(cells_.size()));
  for (auto& c : cells_) {
    if (c.empty()) fail(ErrorCode::InvalidArgument, "PiecewisePoly: empty cell");
    for (const auto& v : c)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        fail(ErrorCode::InvalidArgument, "PiecewisePoly: non-finite coefficient");
    poly::trim(c);
  }
}

PiecewisePoly PiecewisePoly::constant(Complex c) { return PiecewisePoly({0.0, 1.0}, {Coeffs{c}}); }

PiecewisePoly PiecewisePoly::polynomial(std::span<const Complex> coeffs, std::vector<double> knots) {
  std::vector<Coeffs> cells;
  cells.reserve(knots.size() - 1);
  Coeffs global(coeffs.begin(), coeffs.end());
  if (global.empty()) global.push_back(0.0);
  for (std::size_t c = 0; c + 1 < knots.size(); ++c) cells.push_back(poly::shift(global, knots[c]));
  return PiecewisePoly(std::move(knots), std::move(cells));
}

PiecewisePoly PiecewisePoly::polynomial(std::initializer_list<double> coeffs) {
  Coeffs c(coeffs.begin(), coeffs.end());
  return polynomial(c);
}

PiecewisePoly PiecewisePoly::step(double at, Complex left, Complex right) {
  if (!(at > 0.0 && at < 1.0)) fail(ErrorCode::InvalidArgument, "step: jump must be interior");
  return PiecewisePoly({0.0, at, 1.0}, {Coeffs{left}, Coeffs{right}});
}

int PiecewisePoly::degree() const noexcept {
  std::size_t d = 0;
  for (const auto& c : cells_) d = std::max(d, c.size() - 1);
  return static_cast<int>(d);
}

std::size_t PiecewisePoly::locate(double x) const noexcept {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::ptrdiff_t idx = (it - knots_.begin()) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(cells_.size()) - 1);
  return static_cast<std::size_t>(idx);
}

Complex PiecewisePoly::derivative_at(double x, int order) const noexcept {
  const std::size_t c = locate(x);
  const double t = x - knots_[c];
  const auto& co = cells_[c];
  Complex acc = 0.0;
  for (std::size_t k = co.size(); k-- > static_cast<std::size_t>(order);) {
    double fall = 1.0;
    for (int j = 0; j < order; ++j) fall *= static_cast<double>(k - j);
    acc = acc * t + co[k] * fall;
  }
  return acc;
}

PiecewisePoly PiecewisePoly::refined(const std::vector<double>& finer) const {
  if (finer == knots_) return *this;
  std::vector<Coeffs> cells;
  cells.reserve(finer.size() - 1);
  std::size_t src = 0;
  for (std::size_t c = 0; c + 1 < finer.size(); ++c) {
    while (src + 1 < cells_.size() && knots_[src + 1] <= finer[c]) ++src;
    const double offset = finer[c] - knots_[src];
    cells.push_back(poly::shift(cells_[src], offset));
  }
  for (double k : knots_)
    if (!std::binary_search(finer.begin(), finer.end(), k))
      fail(ErrorCode::InvalidArgument, "refined: target mesh is not a refinement");
  return PiecewisePoly(finer, std::move(cells));
}

bool PiecewisePoly::is_zero() const noexcept {
  for (const auto& c : cells_)
    for (const auto& v : c)
      if (v != Complex(0.0)) return false;
  return true;
}

bool PiecewisePoly::is_real() const noexcept {
  for (const auto& c : cells_)
    for (const auto& v : c)
      if (v.imag() != 0.0) return false;
  return true;
}

double PiecewisePoly::max_abs_coefficient() const noexcept {
  double m = 0.0;
  for (const auto& c : cells_)
    for (const auto& v : c) m = std::max(m, std::abs(v));
  return m;
}

PiecewisePoly PiecewisePoly::conj() const {
  PiecewisePoly out = *this;
  for (auto& c : out.cells_)
    for (auto& v : c) v = std::conj(v);
  return out;
}

PiecewisePoly PiecewisePoly::real_part() const {
  PiecewisePoly out = *this;
  for (auto& c : out.cells_) {
    for (auto& v : c) v = v.real();
    poly::trim(c);
  }
  return out;
}

std::vector<double> merge_knots(const std::vector<double>& a, const std::vector<double>& b) {
  if (a == b) return a;
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PiecewisePoly& PiecewisePoly::operator+=(const PiecewisePoly& other) {
  *this = arith(*this, other, ArithOp::Add);
  return *this;
}

PiecewisePoly& PiecewisePoly::operator-=(const PiecewisePoly& other) {
  *this = arith(*this, other, ArithOp::Sub);
  return *this;
}

PiecewisePoly& PiecewisePoly::operator*=(const PiecewisePoly& other) {
  *this = arith(*this, other, ArithOp::Mul);
  return *this;
}

PiecewisePoly& PiecewisePoly::operator*=(Complex s) {
  for (auto& c : cells_) {
    for (auto& v : c) v *= s;
    poly::trim(c);
  }
  return *this;
}

PiecewisePoly arith(const PiecewisePoly& a, const PiecewisePoly& b, ArithOp op) {
  if (op == ArithOp::Scale) {
    if (b.cell_count() != 1 || b.cells()[0].size() != 1)
      fail(ErrorCode::InvalidArgument, "arith(Scale): second operand must be a constant");
    PiecewisePoly out = a;
    out *= b.cells()[0][0];
    return out;
  }
  const auto knots = merge_knots(a.knots(), b.knots());
  const PiecewisePoly ra = a.refined(knots);
  const PiecewisePoly rb = b.refined(knots);
  std::vector<PiecewisePoly::Coeffs> cells(knots.size() - 1);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& x = ra.cells()[c];
    const auto& y = rb.cells()[c];
    switch (op) {
      case ArithOp::Add:
        cells[c] = poly::add(x, y);
        break;
      case ArithOp::Sub: {
        std::vector<Complex> neg(y.begin(), y.end());
        for (auto& v : neg) v = -v;
        cells[c] = poly::add(x, neg);
        break;
      }
      case ArithOp::Mul:
        cells[c] = poly::mul(x, y);
        break;
      case ArithOp::Scale:
        break;
    }
  }
  return PiecewisePoly(knots, std::move(cells));
}

PiecewisePoly operator+(PiecewisePoly a, const PiecewisePoly& b) { return arith(a, b, ArithOp::Add); }
PiecewisePoly operator-(PiecewisePoly a, const PiecewisePoly& b) { return arith(a, b, ArithOp::Sub); }
PiecewisePoly operator-(PiecewisePoly a) {
  a *= Complex(-1.0);
  return a;
}
PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b) { return arith(a, b, ArithOp::Mul); }
PiecewisePoly operator*(PiecewisePoly a, Complex s) {
  a *= s;
  return a;
}
PiecewisePoly operator*(Complex s, PiecewisePoly a) {
  a *= s;
  return a;
}

bool exactly_equal(const PiecewisePoly& a, const PiecewisePoly& b) {
  const auto knots = merge_knots(a.knots(), b.knots());
  const auto ra = a.refined(knots);
  const auto rb = b.refined(knots);
  return ra.cells() == rb.cells();
}

PiecewisePoly antiderivative(const PiecewisePoly& a, int order) {
  if (order < 1) fail(ErrorCode::InvalidArgument, "antiderivative: order must be >= 1");
  PiecewisePoly cur = a;
  for (int r = 0; r < order; ++r) {
    const auto& knots = cur.knots();
    std::vector<PiecewisePoly::Coeffs> cells(cur.cell_count());
    Complex carry = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& src = cur.cells()[c];
      PiecewisePoly::Coeffs out(src.size() + 1);
      out[0] = carry;
      for (std::size_t k = 0; k < src.size(); ++k) out[k + 1] = src[k] / static_cast<double>(k + 1);
      carry = poly::eval(out, cell_width(knots, c));
      cells[c] = std::move(out);
    }
    cur = PiecewisePoly(knots, std::move(cells));
  }
  return cur;
}

Complex integral(const PiecewisePoly& a) {
  Complex acc = 0.0;
  for (std::size_t c = 0; c < a.cell_count(); ++c) acc += cell_integral(a.cells()[c], cell_width(a.knots(), c));
  return acc;
}

Complex moment(const PiecewisePoly& a, int k) {
  Complex acc = 0.0;
  const auto& knots = a.knots();
  for (std::size_t c = 0; c < a.cell_count(); ++c) {
    // x^k = (x_c + t)^k in the local variable.
    std::vector<Complex> xk{Complex(1.0)};
    const std::vector<Complex> lin{Complex(knots[c]), Complex(1.0)};
    for (int j = 0; j < k; ++j) xk = poly::mul(xk, lin);
    acc += cell_integral(poly::mul(xk, a.cells()[c]), cell_width(knots, c));
  }
  return acc;
}

namespace {

// Monomial coefficients of the shifted Legendre polynomial P_k(2x - 1).
std::vector<double> shifted_legendre(int k) {
  std::vector<double> c(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) {
    double binom_kj = 1.0, binom_kjj = 1.0;
    for (int i = 1; i <= j; ++i) {
      binom_kj = binom_kj * (k - j + i) / i;
      binom_kjj = binom_kjj * (k + i) / i;
    }
    c[static_cast<std::size_t>(j)] = (((k + j) % 2) ? -1.0 : 1.0) * binom_kj * binom_kjj;
  }
  return c;
}

}  // namespace

PiecewisePoly moment_normalize(const PiecewisePoly& w, int i) {
  if (i < 0) fail(ErrorCode::InvalidArgument, "moment_normalize: i must be >= 0");
  if (i == 0) return w;
  // The correction lives in span{x^0..x^{i-1}} = span{P~_0..P~_{i-1}}, and
  // orthogonality of the shifted Legendre basis makes each coefficient
  // independent: b_k = -(2k+1) int P~_k w.
  std::vector<Complex> moments(static_cast<std::size_t>(i));
  for (int k = 0; k < i; ++k) moments[static_cast<std::size_t>(k)] = moment(w, k);
  std::vector<Complex> correction(static_cast<std::size_t>(i), Complex(0.0));
  for (int k = 0; k < i; ++k) {
    const auto pk = shifted_legendre(k);
    Complex proj = 0.0;
    for (int j = 0; j <= k; ++j) proj += pk[static_cast<std::size_t>(j)] * moments[static_cast<std::size_t>(j)];
    const Complex b = -static_cast<double>(2 * k + 1) * proj;
    for (int j = 0; j <= k; ++j) correction[static_cast<std::size_t>(j)] += b * pk[static_cast<std::size_t>(j)];
  }
  return w + PiecewisePoly::polynomial(correction, w.knots());
}

PiecewisePoly derivative_cellwise(const PiecewisePoly& a) {
  const auto& knots = a.knots();
  const double scale = std::max(a.max_abs_coefficient(), 1e-300);
  for (std::size_t c = 1; c < a.cell_count(); ++c) {
    const Complex left = poly::eval(a.cells()[c - 1], cell_width(knots, c - 1));
    const Complex right = a.cells()[c][0];
    if (std::abs(left - right) > 1e-12 * std::max({std::abs(left), std::abs(right), scale}))
      fail(ErrorCode::DiscontinuousAtKnot,
           "derivative_cellwise: jump at knot x = " + std::to_string(knots[c]) +
               " would produce a delta term");
  }
  std::vector<PiecewisePoly::Coeffs> cells(a.cell_count());
  for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = poly::derivative(a.cells()[c]);
  return PiecewisePoly(knots, std::move(cells));
}

PiecewisePoly derivative_cellwise(const PiecewisePoly& a, int order) {
  PiecewisePoly cur = a;
  for (int r = 0; r < order; ++r) cur = derivative_cellwise(cur);
  return cur;
}

const GaussRule& gauss_rule(int points) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(points);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  // Newton iteration on P_n from the Chebyshev-like initial guesses.
  for (int i = 0; i < points; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= points; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = points * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return cache.emplace(points, std::move(rule)).first->second;
}

double norm(const PiecewisePoly& a, NormKind kind) {
  const auto& knots = a.knots();
  switch (kind) {
    case NormKind::L2: {
      const Complex sq = integral(a * a.conj());
      return std::sqrt(std::max(sq.real(), 0.0));
    }
    case NormKind::Inf: {
      double best = 0.0;
      for (std::size_t c = 0; c < a.cell_count(); ++c) {
        const auto& co = a.cells()[c];
        const double h = cell_width(knots, c);
        best = std::max({best, std::abs(poly::eval(co, 0.0)), std::abs(poly::eval(co, h))});
        // Interior extrema of |p|^2 are roots of Re(p' conj(p)).
        std::vector<Complex> conj_co(co.begin(), co.end());
        for (auto& v : conj_co) v = std::conj(v);
        const auto crit = real_parts(poly::mul(poly::derivative(co), conj_co));
        for (double t : real_roots_in(crit, 0.0, h)) best = std::max(best, std::abs(poly::eval(co, t)));
      }
      return best;
    }
    case NormKind::L1: {
      double acc = 0.0;
      for (std::size_t c = 0; c < a.cell_count(); ++c) {
        const auto& co = a.cells()[c];
        const double h = cell_width(knots, c);
        bool real = true;
        for (const auto& v : co) real = real && v.imag() == 0.0;
        if (real) {
          // Exact integration between sign changes.
          std::vector<double> pts{0.0};
          for (double r : real_roots_in(real_parts(co), 0.0, h)) pts.push_back(r);
          pts.push_back(h);
          for (std::size_t k = 0; k + 1 < pts.size(); ++k)
            acc += std::abs(cell_integral_between(co, pts[k], pts[k + 1]).real());
        } else {
          auto f = [&](double t) { return std::abs(poly::eval(co, t)); };
          acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, h, 15, 1e-14);
        }
      }
      return acc;
    }
  }
  return 0.0;
}

}  // namespace regkit
