#include "regkit/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/rational.hpp>

#include "regkit/error.hpp"

namespace regkit {

namespace {

using Rational = boost::rational<long long>;

double sign_pow(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }

long long binomial(int i, int s) {
  if (s < 0 || i < 0 || s > i) return 0;
  long long out = 1;
  for (int k = 1; k <= s; ++k) out = out * (i - s + k) / k;
  return out;
}

std::string key_str(const ChiKey& k) {
  return "(" + std::to_string(k.first) + "," + std::to_string(k.second) + ")";
}

// Rational Gauss-Jordan inverse; returns false if singular.
bool invert(std::vector<std::vector<Rational>>& a, std::vector<std::vector<Rational>>& inv) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col].numerator() == 0) ++piv;
    if (piv == n) return false;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const Rational p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].numerator() == 0) continue;
      const Rational fct = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= fct * a[col][j];
        inv[r][j] -= fct * inv[col][j];
      }
    }
  }
  return true;
}

void check_q_pattern(const QMatrix& q) {
  const int m = q.order.m();
  if (q.q.rows() != m + 1 || q.q.cols() != m + 1)
    fail(ErrorCode::PatternViolation, "Q matrix has wrong size for n = " + std::to_string(q.order.n()));
  if (!q.order.odd() && !q.q(m, m).is_zero())
    fail(ErrorCode::PatternViolation, "Q matrix violates q_{m,m} = 0 (even order)");
}

void check_f_pattern(const FMatrix& f) {
  const int n = f.order.n();
  if (f.f.rows() != n || f.f.cols() != n)
    fail(ErrorCode::PatternViolation, "F matrix has wrong size for n = " + std::to_string(n));
  for (int k = 1; k <= n; ++k)
    for (int j = 1; j <= n; ++j)
      if (f_forced_zero(f.order, k, j) && !f.at(k, j).is_zero())
        fail(ErrorCode::PatternViolation,
             "F matrix entry (" + std::to_string(k) + "," + std::to_string(j) + ") must vanish");
}

}  // namespace

OrderSpec::OrderSpec(int n) : n_(n) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "order n must be >= 2, got " + std::to_string(n));
}

std::vector<int> singularity_orders(const OrderSpec& order) {
  std::vector<int> out(static_cast<std::size_t>(order.n()));
  for (int nu = 0; nu < order.n(); ++nu) {
    const int k = nu / 2, j = nu % 2;
    out[static_cast<std::size_t>(nu)] = order.m() - k - j;
  }
  return out;
}

ChiMatrix chi(const OrderSpec& order, int nu, int i) {
  const auto orders = singularity_orders(order);
  if (nu < 0 || nu >= order.n())
    fail(ErrorCode::IndexOutOfRange, "chi: nu = " + std::to_string(nu) + " out of range");
  if (i < 0 || i > orders[static_cast<std::size_t>(nu)])
    fail(ErrorCode::IndexOutOfRange, "chi: i = " + std::to_string(i) + " exceeds i_nu = " +
                                         std::to_string(orders[static_cast<std::size_t>(nu)]));
  ChiMatrix out;
  out.nu = nu;
  out.i = i;
  out.size = order.q_size();
  out.entries.assign(static_cast<std::size_t>(out.size * out.size), 0);
  const int k = nu / 2;
  auto put = [&](int r, int c, long long v) { out.entries[static_cast<std::size_t>(r * out.size + c)] = v; };
  if (nu % 2 == 0) {
    for (int s = 0; s <= i; ++s) put(s + k, i - s + k, binomial(i, s));
  } else {
    for (int s = 0; s <= i + 1; ++s) put(s + k, i + 1 - s + k, binomial(i + 1, s) - 2 * binomial(i, s - 1));
  }
  return out;
}

std::vector<ChiMatrix> chi_basis(const OrderSpec& order) {
  const auto orders = singularity_orders(order);
  std::vector<ChiMatrix> out;
  for (int nu = 0; nu < order.n(); ++nu)
    for (int i = 0; i <= orders[static_cast<std::size_t>(nu)]; ++i) out.push_back(chi(order, nu, i));
  return out;
}

int chi_rank(const OrderSpec& order) {
  const auto basis = chi_basis(order);
  std::vector<std::vector<Rational>> rows;
  for (const auto& c : basis) {
    std::vector<Rational> v(c.entries.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = Rational(c.entries[i]);
    rows.push_back(std::move(v));
  }
  int rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t col = 0; col < cols && rank < static_cast<int>(rows.size()); ++col) {
    std::size_t piv = static_cast<std::size_t>(rank);
    while (piv < rows.size() && rows[piv][col].numerator() == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[static_cast<std::size_t>(rank)]);
    const auto& prow = rows[static_cast<std::size_t>(rank)];
    for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < rows.size(); ++r) {
      if (rows[r][col].numerator() == 0) continue;
      const Rational f = rows[r][col] / prow[col];
      for (std::size_t j = col; j < cols; ++j) rows[r][j] -= f * prow[j];
    }
    ++rank;
  }
  return rank;
}

int chi_space_dimension(const OrderSpec& order) {
  const int side = order.q_size();
  return side * side - (order.odd() ? 0 : 1);
}

std::vector<double> PolyMatrix::knots() const {
  std::vector<double> out{0.0, 1.0};
  for (const auto& p : data_) out = merge_knots(out, p.knots());
  return out;
}

int PolyMatrix::max_degree() const {
  int d = 0;
  for (const auto& p : data_) d = std::max(d, p.degree());
  return d;
}

CoefficientSet::CoefficientSet(OrderSpec o, std::vector<PiecewisePoly> s, bool top_zero)
    : order(o), sigma(std::move(s)), tau_top_zero(top_zero) {
  validate();
}

void CoefficientSet::validate() const {
  if (static_cast<int>(sigma.size()) != order.n())
    fail(ErrorCode::InvalidArgument, "coefficient set: expected " + std::to_string(order.n()) +
                                         " sigma functions, got " + std::to_string(sigma.size()));
  if (tau_top_zero && !sigma.back().is_zero())
    fail(ErrorCode::InvalidArgument, "coefficient set: tauTopZero requires sigma_{n-1} = 0");
}

CoefficientSet canonical_signature(const CoefficientSet& t) {
  t.validate();
  const auto orders = singularity_orders(t.order);
  CoefficientSet out = t;
  for (int nu = 0; nu < t.order.n(); ++nu)
    out.sigma[static_cast<std::size_t>(nu)] =
        moment_normalize(t.sigma[static_cast<std::size_t>(nu)], orders[static_cast<std::size_t>(nu)]);
  return out;
}

double signature_distance(const CoefficientSet& a, const CoefficientSet& b) {
  if (!(a.order == b.order)) return HUGE_VAL;
  const auto ca = canonical_signature(a);
  const auto cb = canonical_signature(b);
  double acc = 0.0;
  for (std::size_t nu = 0; nu < ca.sigma.size(); ++nu) {
    const double d = norm(ca.sigma[nu] - cb.sigma[nu], NormKind::L2);
    acc += d * d;
  }
  return std::sqrt(acc);
}

QMatrix assemble_q(const OrderSpec& order, const ChiDecomposition& tau) {
  QMatrix q(order);
  const auto orders = singularity_orders(order);
  for (const auto& [key, fn] : tau) {
    const auto [nu, i] = key;
    if (nu < 0 || nu >= order.n() || i < 0 || i > orders[static_cast<std::size_t>(nu)])
      fail(ErrorCode::IndexOutOfRange, "assemble_q: key " + key_str(key) + " out of range");
    if (fn.is_zero()) continue;
    const ChiMatrix c = chi(order, nu, i);
    for (int r = 0; r < c.size; ++r)
      for (int j = 0; j < c.size; ++j)
        if (const long long v = c.at(r, j); v != 0)
          q.q(r, j) += fn * Complex(static_cast<double>(v));
  }
  return q;
}

QMatrix assemble_q_ms(const CoefficientSet& t) {
  t.validate();
  const auto orders = singularity_orders(t.order);
  ChiDecomposition tau;
  for (int nu = 0; nu < t.order.n(); ++nu)
    tau[{nu, orders[static_cast<std::size_t>(nu)]}] = t.sigma[static_cast<std::size_t>(nu)];
  return assemble_q(t.order, tau);
}

FMatrix s_n(const QMatrix& q) {
  check_q_pattern(q);
  const OrderSpec& order = q.order;
  const int m = order.m();
  FMatrix f(order);
  auto Q = [&](int r, int c) -> const PiecewisePoly& { return q.q(r, c); };
  if (!order.odd()) {
    for (int j = 1; j <= m; ++j) f.at(m, j) = Q(j - 1, m) * sign_pow(m + 1);
    for (int k = m + 1; k <= 2 * m; ++k) f.at(k, m + 1) = Q(m, 2 * m - k) * sign_pow(k + 1);
    for (int k = m + 1; k <= 2 * m; ++k)
      for (int j = 1; j <= m; ++j)
        f.at(k, j) = Q(j - 1, 2 * m - k) * sign_pow(k + 1) + (Q(j - 1, m) * Q(m, 2 * m - k)) * sign_pow(m + k);
  } else {
    for (int k = m + 1; k <= 2 * m + 1; ++k)
      for (int j = 1; j <= m + 1; ++j) f.at(k, j) = Q(j - 1, 2 * m + 1 - k) * sign_pow(k);
  }
  return f;
}

QMatrix s_n_inverse(const FMatrix& f) {
  check_f_pattern(f);
  const OrderSpec& order = f.order;
  const int m = order.m();
  QMatrix q(order);
  if (!order.odd()) {
    for (int j = 1; j <= m; ++j) q.q(j - 1, m) = f.at(m, j) * sign_pow(m + 1);
    for (int k = m + 1; k <= 2 * m; ++k) q.q(m, 2 * m - k) = f.at(k, m + 1) * sign_pow(k + 1);
    // The product is formed in the same operand order as in s_n so that the
    // round trip cancels bit for bit on exactly representable data.
    for (int k = m + 1; k <= 2 * m; ++k)
      for (int j = 1; j <= m; ++j)
        q.q(j - 1, 2 * m - k) = (f.at(k, j) - f.at(m, j) * f.at(k, m + 1)) * sign_pow(k + 1);
  } else {
    for (int k = m + 1; k <= 2 * m + 1; ++k)
      for (int j = 1; j <= m + 1; ++j) q.q(j - 1, 2 * m + 1 - k) = f.at(k, j) * sign_pow(k);
  }
  return q;
}

FMatrix ms_matrix(const CoefficientSet& t) { return s_n(assemble_q_ms(t)); }

ChiDecomposition decompose_chi(const QMatrix& q) {
  check_q_pattern(q);
  const OrderSpec& order = q.order;
  const int m = order.m();
  const auto basis = chi_basis(order);
  ChiDecomposition out;
  for (int d = 0; d <= 2 * m; ++d) {
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r <= m; ++r) {
      const int c = d - r;
      if (c < 0 || c > m) continue;
      if (!order.odd() && r == m && c == m) continue;
      cells.emplace_back(r, c);
    }
    std::vector<const ChiMatrix*> members;
    for (const auto& b : basis)
      if (b.diagonal() == d) members.push_back(&b);
    if (cells.empty() && members.empty()) continue;
    if (cells.size() != members.size())
      fail(ErrorCode::SingularBasis, "decompose_chi: anti-diagonal " + std::to_string(d) +
                                         " is not square");
    const std::size_t len = cells.size();
    std::vector<std::vector<Rational>> a(len, std::vector<Rational>(len));
    for (std::size_t p = 0; p < len; ++p)
      for (std::size_t b = 0; b < len; ++b) a[p][b] = Rational(members[b]->at(cells[p].first, cells[p].second));
    std::vector<std::vector<Rational>> inv;
    if (!invert(a, inv))
      fail(ErrorCode::SingularBasis, "decompose_chi: chi block on anti-diagonal " + std::to_string(d) +
                                         " is singular");
    for (std::size_t b = 0; b < len; ++b) {
      PiecewisePoly acc;
      for (std::size_t p = 0; p < len; ++p) {
        if (inv[b][p].numerator() == 0) continue;
        const double w = boost::rational_cast<double>(inv[b][p]);
        acc += q.q(cells[p].first, cells[p].second) * Complex(w);
      }
      out[{members[b]->nu, members[b]->i}] = std::move(acc);
    }
  }
  return out;
}

CoefficientSet reconstruct_signature(const ChiDecomposition& tau, const OrderSpec& order, double top_zero_tol) {
  const auto orders = singularity_orders(order);
  for (const auto& [key, fn] : tau) {
    (void)fn;
    if (key.first < 0 || key.first >= order.n() || key.second < 0 ||
        key.second > orders[static_cast<std::size_t>(key.first)])
      fail(ErrorCode::IndexOutOfRange, "reconstruct_signature: key " + key_str(key) + " out of range");
  }
  std::vector<PiecewisePoly> sigma(static_cast<std::size_t>(order.n()));
  for (int nu = 0; nu < order.n(); ++nu) {
    const int top = orders[static_cast<std::size_t>(nu)];
    // (-1)^top * sum_i (-1)^i A^{top-i} tau_{nu,i}: the top-fold antiderivative
    // of tau_nu = sum_i (-1)^i tau_{nu,i}^{(i)} up to a polynomial of degree
    // < top, which the moment normalization removes.
    PiecewisePoly acc;
    for (int i = 0; i <= top; ++i) {
      auto it = tau.find({nu, i});
      if (it == tau.end() || it->second.is_zero()) continue;
      PiecewisePoly term = (i == top) ? it->second : antiderivative(it->second, top - i);
      acc += term * sign_pow(i);
    }
    sigma[static_cast<std::size_t>(nu)] = moment_normalize(acc * sign_pow(top), top);
  }
  bool top_zero = false;
  if (norm(sigma.back(), NormKind::L2) <= top_zero_tol) {
    sigma.back() = PiecewisePoly::zero();
    top_zero = true;
  }
  return CoefficientSet(order, std::move(sigma), top_zero);
}

CoefficientSet signature_of(const FMatrix& f, double top_zero_tol) {
  return reconstruct_signature(decompose_chi(s_n_inverse(f)), f.order, top_zero_tol);
}

FMatrix family_matrix(const CoefficientSet& t, const FamilyParams& params) {
  t.validate();
  const OrderSpec& order = t.order;
  const auto orders = singularity_orders(order);
  auto check_key = [&](const ChiKey& key) {
    if (key.first < 0 || key.first >= order.n() || key.second < 0 ||
        key.second >= orders[static_cast<std::size_t>(key.first)])
      fail(ErrorCode::KeyRangeError, "family parameters: key " + key_str(key) +
                                         " is outside {(nu,i): i < i_nu}");
  };
  for (const auto& [key, fn] : params.tau) {
    (void)fn;
    check_key(key);
  }
  for (const auto& [key, c] : params.c) {
    (void)c;
    check_key(key);
  }

  ChiDecomposition tau;
  for (int nu = 0; nu < order.n(); ++nu) {
    const int top = orders[static_cast<std::size_t>(nu)];
    PiecewisePoly acc = t.sigma[static_cast<std::size_t>(nu)] * sign_pow(top);
    std::vector<Complex> poly_part(static_cast<std::size_t>(std::max(top, 1)), Complex(0.0));
    for (int i = 0; i < top; ++i) {
      if (auto it = params.tau.find({nu, i}); it != params.tau.end()) {
        tau[{nu, i}] = it->second;
        if (!it->second.is_zero()) acc -= antiderivative(it->second, top - i) * sign_pow(i);
      }
      if (auto it = params.c.find({nu, i}); it != params.c.end()) poly_part[static_cast<std::size_t>(i)] = it->second;
    }
    const PiecewisePoly w = moment_normalize(acc, top);
    PiecewisePoly top_fn = w * sign_pow(top);
    if (top > 0) top_fn += PiecewisePoly::polynomial(poly_part);
    tau[{nu, top}] = std::move(top_fn);
  }
  return s_n(assemble_q(order, tau));
}

bool f_forced_zero(const OrderSpec& order, int k, int j) {
  const int m = order.m();
  if (!order.odd()) return k < m || j > m + 1 || (k == m && j == m + 1);
  return k < m + 1 || j > m + 1;
}

bool check_class(const FMatrix& f, FClass cls, double tol) {
  const int n = f.order.n();
  if (f.f.rows() != n || f.f.cols() != n) return false;
  auto vanishes = [&](const PiecewisePoly& p) {
    return tol == 0.0 ? p.is_zero() : norm(p, NormKind::Inf) <= tol;
  };
  for (int k = 1; k <= n; ++k)
    for (int j = 1; j <= n; ++j)
      if (f_forced_zero(f.order, k, j) && !vanishes(f.at(k, j))) return false;
  if (cls == FClass::Fn0) {
    PiecewisePoly trace;
    for (int k = 1; k <= n; ++k) trace += f.at(k, k);
    if (!vanishes(trace)) return false;
  }
  return true;
}

std::vector<PiecewisePoly> classical_taus(const CoefficientSet& t) {
  t.validate();
  const auto orders = singularity_orders(t.order);
  std::vector<PiecewisePoly> out(t.sigma.size());
  for (std::size_t nu = 0; nu < t.sigma.size(); ++nu)
    out[nu] = derivative_cellwise(t.sigma[nu], orders[nu]) * sign_pow(orders[nu]);
  return out;
}

namespace {

// Visits every term coeff * tau_nu^{(l)} * y^{(p)} of the classical expansion
// of l_n(y) minus the leading y^{(n)}.
template <typename Visit>
void expand_expression(const OrderSpec& order, Visit&& visit) {
  const int m = order.m();
  const int s = order.s();
  for (int k = 0; k <= m - 1 + s; ++k)
    for (int l = 0; l <= k; ++l)
      visit(2 * k, l, 2 * k - l, sign_pow(k) * static_cast<double>(binomial(k, l)));
  for (int k = 0; k <= m - 1; ++k) {
    for (int l = 0; l <= k + 1; ++l)
      visit(2 * k + 1, l, 2 * k + 1 - l, sign_pow(k + 1) * static_cast<double>(binomial(k + 1, l)));
    for (int l = 0; l <= k; ++l)
      visit(2 * k + 1, l, 2 * k + 1 - l, sign_pow(k + 1) * static_cast<double>(binomial(k, l)));
  }
}

}  // namespace

Complex classical_expression_at(const OrderSpec& order, const std::vector<PiecewisePoly>& taus, double x,
                                std::span<const Complex> y_derivs) {
  if (static_cast<int>(y_derivs.size()) < order.n() + 1)
    fail(ErrorCode::InvalidArgument, "classical_expression_at: need y^{(0..n)}");
  Complex acc = y_derivs[static_cast<std::size_t>(order.n())];
  expand_expression(order, [&](int nu, int l, int p, double coeff) {
    acc += coeff * taus[static_cast<std::size_t>(nu)].derivative_at(x, l) * y_derivs[static_cast<std::size_t>(p)];
  });
  return acc;
}

PiecewisePoly classical_expression(const OrderSpec& order, const std::vector<PiecewisePoly>& taus,
                                   const PiecewisePoly& y) {
  std::vector<PiecewisePoly> dy{y};
  for (int j = 1; j <= order.n(); ++j) dy.push_back(derivative_cellwise(dy.back()));
  PiecewisePoly acc = dy[static_cast<std::size_t>(order.n())];
  expand_expression(order, [&](int nu, int l, int p, double coeff) {
    const auto& tau = taus[static_cast<std::size_t>(nu)];
    if (tau.is_zero()) return;
    acc += (derivative_cellwise(tau, l) * dy[static_cast<std::size_t>(p)]) * coeff;
  });
  return acc;
}

}  // namespace regkit
