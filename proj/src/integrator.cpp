#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <type_traits>

#include "exterior.hpp"
#include "regkit/error.hpp"
#include "regkit/spectral.hpp"

namespace regkit {

namespace {

constexpr double kRescaleAbove = 1e50;

using detail::MatrixT;

// Taylor terms below this fraction of the running sum end the series.
template <typename S>
constexpr S term_rel_tol() {
  return std::numeric_limits<S>::epsilon() / 16;
}

double binom(int i, int j) {
  double out = 1.0;
  for (int k = 1; k <= j; ++k) out = out * (i - j + k) / k;
  return out;
}

// Coefficients of A(t0 + u) in u.
template <typename S>
std::vector<MatrixT<S>> shift_coeffs(const std::vector<MatrixT<S>>& a, S t0) {
  if (t0 == S(0)) return a;
  std::vector<MatrixT<S>> out(a.size(), MatrixT<S>::Zero(a[0].rows(), a[0].cols()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      out[j] += a[i] * std::complex<S>(S(binom(static_cast<int>(i), static_cast<int>(j))) *
                                       std::pow(t0, static_cast<int>(i - j)));
  return out;
}

template <typename S>
struct TaylorStep {
  bool converged = false;
  MatrixT<S> value;
  std::vector<MatrixT<S>> terms;  // Z_k = Y_k h^k
};

// One Taylor step Y(u = h) for Y' = B(u) Y, Y(0) = y0.
template <typename S>
TaylorStep<S> taylor_step(const std::vector<MatrixT<S>>& b, const MatrixT<S>& y0, S h, int max_terms, bool keep) {
  TaylorStep<S> out;
  const int d = static_cast<int>(b.size()) - 1;
  std::vector<MatrixT<S>> bh(b.size());
  S pw = h;
  for (std::size_t j = 0; j < b.size(); ++j, pw *= h) bh[j] = b[j] * std::complex<S>(pw);

  std::vector<MatrixT<S>> z;
  z.reserve(static_cast<std::size_t>(max_terms) + 1);
  z.push_back(y0);
  MatrixT<S> sum = y0;
  const int needed_small = std::max(2, d + 1);
  int small_run = 0;
  for (int k = 0; k < max_terms; ++k) {
    MatrixT<S> next = MatrixT<S>::Zero(y0.rows(), y0.cols());
    for (int j = 0; j <= std::min(k, d); ++j)
      next.noalias() += bh[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(k - j)];
    next /= std::complex<S>(S(k + 1));
    sum += next;
    const S tn = next.cwiseAbs().maxCoeff();
    const S sn = sum.cwiseAbs().maxCoeff();
    z.push_back(std::move(next));
    small_run = (tn <= term_rel_tol<S>() * sn) ? small_run + 1 : 0;
    if (small_run >= needed_small) {
      out.converged = true;
      break;
    }
  }
  out.value = std::move(sum);
  if (keep) out.terms = std::move(z);
  return out;
}

CMatrix j_matrix(int n, Complex lambda) {
  CMatrix j = CMatrix::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) j(k, k + 1) = 1.0;
  j(n - 1, 0) += lambda;
  return j;
}

template <typename S>
struct MarchResult {
  MatrixT<S> y;
  S log_scale = 0;
  int steps = 0;
};

using SegmentSink = std::function<void(double, double, double, std::vector<CMatrix>&&)>;

// Integrates Y' = A(x) Y cell by cell, never stepping across a knot. `cells`
// holds the Taylor coefficients of A in the local variable of each cell and
// `rate` bounds the growth rate used to cap the step length.
template <typename S>
MarchResult<S> march(const std::vector<double>& knots, const std::vector<std::vector<MatrixT<S>>>& cells,
                     MatrixT<S> y, double rate, const IntegratorOptions& opts, const SegmentSink& sink) {
  if (!(opts.tol > 0.0)) fail(ErrorCode::InvalidArgument, "integrator tolerance must be positive");
  MarchResult<S> out;
  const double h_max = 2.0 / rate;
  double h = h_max;
  for (std::size_t cell = 0; cell + 1 < knots.size(); ++cell) {
    const auto& a = cells[cell];
    const double len = knots[cell + 1] - knots[cell];
    double t0 = 0.0;
    while (t0 < len) {
      const double remaining = len - t0;
      h = std::min({h, h_max, remaining});
      // Avoid leaving a sliver that would force a tiny final step.
      if (remaining - h < 1e-3 * h) h = remaining;
      if (h < opts.min_step && h < remaining)
        fail(ErrorCode::StepUnderflow, "integrator step fell below " + std::to_string(opts.min_step));

      const auto b0 = shift_coeffs<S>(a, S(t0));
      TaylorStep<S> full = taylor_step<S>(b0, y, S(h), opts.max_terms, false);
      if (!full.converged) {
        h *= 0.5;
        if (h < opts.min_step) fail(ErrorCode::StepUnderflow, "Taylor series failed to converge");
        continue;
      }
      const bool dense = static_cast<bool>(sink);
      TaylorStep<S> first = taylor_step<S>(b0, y, S(0.5 * h), opts.max_terms, dense);
      const auto b1 = shift_coeffs<S>(a, S(t0 + 0.5 * h));
      TaylorStep<S> second = taylor_step<S>(b1, first.value, S(0.5 * h), opts.max_terms, dense);
      const S scale = std::max<S>(second.value.cwiseAbs().maxCoeff(), S(1e-300));
      const double err = static_cast<double>((full.value - second.value).cwiseAbs().maxCoeff() / scale);
      if ((!first.converged || !second.converged || err > opts.tol) && 0.5 * h >= opts.min_step) {
        h *= 0.5;
        continue;
      }
      if constexpr (std::is_same_v<S, double>) {
        if (dense) {
          const double x0 = knots[cell] + t0;
          sink(x0, 0.5 * h, out.log_scale, std::move(first.terms));
          sink(x0 + 0.5 * h, 0.5 * h, out.log_scale, std::move(second.terms));
        }
      }
      y = std::move(second.value);
      t0 += h;
      out.steps += 2;
      if (err < 1e-3 * opts.tol) h *= 1.5;

      const S mag = y.cwiseAbs().maxCoeff();
      if (mag > S(kRescaleAbove)) {
        y /= std::complex<S>(mag);
        out.log_scale += std::log(mag);
      }
    }
  }
  out.y = std::move(y);
  return out;
}

// Basis e_I of the p-th exterior power, I ranging over sorted p-subsets of
// {0..n-1} in lexicographic order.
struct ExteriorIndex {
  int n;
  std::vector<std::vector<int>> sets;
  std::vector<int> position;  // by bitmask

  ExteriorIndex(int n_, int p) : n(n_), position(static_cast<std::size_t>(1) << n_, -1) {
    std::vector<int> cur;
    enumerate(p, 0, cur);
    for (std::size_t i = 0; i < sets.size(); ++i) position[mask(sets[i])] = static_cast<int>(i);
  }

  static std::size_t mask(const std::vector<int>& s) {
    std::size_t m = 0;
    for (int v : s) m |= static_cast<std::size_t>(1) << v;
    return m;
  }
  Eigen::Index find(const std::vector<int>& s) const { return position[mask(s)]; }

  // Matrix of the derivation v1^...^vp -> sum_l v1^..^A vl^..^vp.
  CMatrix derivation(const CMatrix& a) const {
    const auto dim = static_cast<Eigen::Index>(sets.size());
    CMatrix d = CMatrix::Zero(dim, dim);
    for (std::size_t col = 0; col < sets.size(); ++col) {
      const auto& set = sets[col];
      const std::size_t base = mask(set);
      for (std::size_t l = 0; l < set.size(); ++l) {
        const int jl = set[l];
        for (int r = 0; r < n; ++r) {
          const Complex v = a(r, jl);
          if (v == Complex(0.0)) continue;
          if (r != jl && (base >> r & 1U)) continue;
          // Sign of moving r into sorted position: elements strictly between.
          int between = 0;
          for (int e : set)
            if (e != jl && ((e > std::min(r, jl)) && (e < std::max(r, jl)))) ++between;
          const std::size_t target = (base & ~(static_cast<std::size_t>(1) << jl)) | (static_cast<std::size_t>(1) << r);
          d(position[target], static_cast<Eigen::Index>(col)) += (between % 2 ? -1.0 : 1.0) * v;
        }
      }
    }
    return d;
  }

 private:
  void enumerate(int p, int from, std::vector<int>& cur) {
    if (static_cast<int>(cur.size()) == p) {
      sets.push_back(cur);
      return;
    }
    for (int v = from; v < n; ++v) {
      cur.push_back(v);
      enumerate(p, v + 1, cur);
      cur.pop_back();
    }
  }
};

}  // namespace

SystemOperator::SystemOperator(const FMatrix& f) : n_(f.order.n()) {
  knots_ = f.f.knots();
  const std::size_t cells = knots_.size() - 1;
  cells_.resize(cells);
  std::vector<PiecewisePoly> refined;
  refined.reserve(static_cast<std::size_t>(n_ * n_));
  int degree = 0;
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) {
      refined.push_back(f.f(r, c).refined(knots_));
      degree = std::max(degree, refined.back().degree());
    }
  for (std::size_t cell = 0; cell < cells; ++cell) {
    auto& mats = cells_[cell];
    mats.assign(static_cast<std::size_t>(degree) + 1, CMatrix::Zero(n_, n_));
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) {
        const auto& coeffs = refined[static_cast<std::size_t>(r * n_ + c)].cells()[cell];
        for (std::size_t j = 0; j < coeffs.size(); ++j) mats[j](r, c) = coeffs[j];
      }
    const double len = knots_[cell + 1] - knots_[cell];
    double bound = 0.0;
    for (int r = 0; r < n_; ++r) {
      double row = 0.0;
      for (int c = 0; c < n_; ++c) {
        double pw = 1.0;
        for (const auto& m : mats) {
          row += std::abs(m(r, c)) * pw;
          pw *= len;
        }
      }
      bound = std::max(bound, row);
    }
    f_bound_ = std::max(f_bound_, bound);
  }
}

CMatrix SystemOperator::matrix(double x, Complex lambda) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t cell = (it == knots_.begin()) ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  cell = std::min(cell, cells_.size() - 1);
  const double t = x - knots_[cell];
  CMatrix out = CMatrix::Zero(n_, n_);
  for (std::size_t j = cells_[cell].size(); j-- > 0;) out = out * t + cells_[cell][j];
  for (int k = 0; k + 1 < n_; ++k) out(k, k + 1) += 1.0;
  out(n_ - 1, 0) += lambda;
  return out;
}

FundamentalSolution integrate(const SystemOperator& op, Complex lambda, const IntegratorOptions& opts) {
  const int n = op.n();
  FundamentalSolution sol;
  sol.n_ = n;
  sol.lambda_ = lambda;
  std::vector<std::vector<CMatrix>> cells;
  for (std::size_t c = 0; c + 1 < op.knots().size(); ++c) {
    cells.push_back(op.cell(c));
    cells.back()[0] += j_matrix(n, lambda);
  }
  const double rate = std::max(1.0, std::pow(std::abs(lambda), 1.0 / n)) + op.f_bound();
  auto keep = [&](double x0, double h, double log_scale, std::vector<CMatrix>&& terms) {
    sol.segments_.push_back({x0, h, log_scale, std::move(terms)});
  };
  auto run = march<double>(op.knots(), cells, CMatrix::Identity(n, n), rate, opts, opts.dense ? SegmentSink(keep) : SegmentSink());
  sol.end_ = std::move(run.y);
  sol.log_scale_ = run.log_scale;
  sol.steps_ = run.steps;
  return sol;
}

namespace detail {

template <typename S>
Minors<S> exterior_minors(const SystemOperator& op, std::complex<S> lambda, int p,
                          const std::vector<std::vector<int>>& column_sets, double tol) {
  const int n = op.n();
  if (p < 1 || p > n) fail(ErrorCode::InvalidArgument, "minor size must lie in 1..n");
  const ExteriorIndex index(n, p);
  const auto dim = static_cast<Eigen::Index>(index.sets.size());

  MatrixT<S> y0 = MatrixT<S>::Zero(dim, static_cast<Eigen::Index>(column_sets.size()));
  for (std::size_t c = 0; c < column_sets.size(); ++c) {
    const auto& set = column_sets[c];
    if (static_cast<int>(set.size()) != p || !std::is_sorted(set.begin(), set.end()) ||
        std::adjacent_find(set.begin(), set.end()) != set.end() || set.front() < 0 || set.back() >= n)
      fail(ErrorCode::InvalidArgument, "column sets must be sorted, distinct and in range");
    y0(index.find(set), static_cast<Eigen::Index>(c)) = S(1);
  }

  std::vector<std::vector<MatrixT<S>>> cells;
  // The derivation is linear, so J(lambda) contributes D(J(0)) + lambda D(E_n1).
  CMatrix corner = CMatrix::Zero(n, n);
  corner(n - 1, 0) = 1.0;
  const MatrixT<S> jm = index.derivation(j_matrix(n, 0.0)).template cast<std::complex<S>>() +
                        index.derivation(corner).template cast<std::complex<S>>() * lambda;
  for (std::size_t c = 0; c + 1 < op.knots().size(); ++c) {
    const std::vector<CMatrix>& a = op.cell(c);
    std::vector<MatrixT<S>> ext;
    ext.reserve(a.size());
    for (const auto& m : a) ext.push_back(index.derivation(m).template cast<std::complex<S>>());
    ext[0] += jm;
    cells.push_back(std::move(ext));
  }
  // The exterior system grows at up to p times the rate of the original one.
  const double mod = static_cast<double>(std::abs(lambda));
  const double rate = p * (std::max(1.0, std::pow(mod, 1.0 / n)) + op.f_bound());
  IntegratorOptions opts;
  opts.tol = tol;
  auto run = march<S>(op.knots(), cells, y0, rate, opts, nullptr);

  Minors<S> out;
  std::vector<int> rows(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) rows[static_cast<std::size_t>(i)] = i;
  const Eigen::Index top = index.find(rows);
  for (Eigen::Index c = 0; c < run.y.cols(); ++c) {
    out.minors.push_back(run.y(top, c));
    out.norms.push_back(run.y.col(c).cwiseAbs().maxCoeff());
  }
  out.log_scale = run.log_scale;
  return out;
}

template Minors<double> exterior_minors<double>(const SystemOperator&, std::complex<double>, int,
                                                const std::vector<std::vector<int>>&, double);
template Minors<long double> exterior_minors<long double>(const SystemOperator&, std::complex<long double>, int,
                                                          const std::vector<std::vector<int>>&, double);

}  // namespace detail

TerminalMinors terminal_minors(const SystemOperator& op, Complex lambda, int p,
                               const std::vector<std::vector<int>>& column_sets, double tol) {
  auto m = detail::exterior_minors<double>(op, lambda, p, column_sets, tol);
  return {std::move(m.minors), std::move(m.norms), m.log_scale};
}

CMatrix FundamentalSolution::derivative(double x, int order) const {
  if (segments_.empty()) fail(ErrorCode::InvalidArgument, "fundamental solution has no dense output");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const Segment& s) { return v < s.x0; });
  const Segment& seg = (it == segments_.begin()) ? segments_.front() : *std::prev(it);
  const double s = std::clamp((x - seg.x0) / seg.h, 0.0, 1.0);
  CMatrix out = CMatrix::Zero(n_, n_);
  const int terms = static_cast<int>(seg.coeffs.size());
  for (int k = terms - 1; k >= order; --k) {
    double fall = 1.0;
    for (int p = 0; p < order; ++p) fall *= static_cast<double>(k - p);
    out = out * s + seg.coeffs[static_cast<std::size_t>(k)] * fall;
  }
  return out * (std::exp(seg.log_scale) / std::pow(seg.h, order));
}

FundamentalMatrix integrate_fundamental(const FMatrix& f, Complex lambda, double tol) {
  SystemOperator op(f);
  IntegratorOptions opts;
  opts.tol = tol;
  const auto sol = integrate(op, lambda, opts);
  return {lambda, sol.end(), sol.log_scale()};
}

}  // namespace regkit
