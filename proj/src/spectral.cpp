#include <algorithm>
#include <cmath>
#include <numbers>

#include "exterior.hpp"
#include "regkit/error.hpp"
#include "regkit/parallel.hpp"
#include "regkit/spectral.hpp"

namespace regkit {

namespace {

void check_problem_index(int n, int k) {
  if (k < 1 || k > n - 1)
    fail(ErrorCode::IndexOutOfRange, "problem index k = " + std::to_string(k) + " must lie in 1.." +
                                         std::to_string(n - 1));
}


// Cramer's rule on the terminal conditions: Delta_k uses columns k+1..n,
// the numerator for M_{jk} swaps column j for column k.
template <typename S>
detail::MatrixT<S> weyl_core(const SystemOperator& op, std::complex<S> lambda, double tol) {
  const int n = op.n();
  detail::MatrixT<S> m = detail::MatrixT<S>::Identity(n, n);
  for (int k = 1; k <= n - 1; ++k) {
    std::vector<std::vector<int>> sets;
    std::vector<int> base;
    for (int j = k; j < n; ++j) base.push_back(j);
    sets.push_back(base);
    for (int j = k + 1; j <= n; ++j) {
      std::vector<int> s{k - 1};
      for (int c = k; c < n; ++c)
        if (c != j - 1) s.push_back(c);
      sets.push_back(std::move(s));
    }
    const auto tm = detail::exterior_minors<S>(op, lambda, n - k, sets, tol);
    const std::complex<S> delta = tm.minors[0];
    if (!(std::abs(delta) >= S(tol) * tm.norms[0]))
      fail(ErrorCode::NearEigenvalue, "lambda is within solver resolution of an eigenvalue of problem " +
                                          std::to_string(k));
    for (int j = k + 1; j <= n; ++j)
      m(j - 1, k - 1) = S((j - k) % 2 ? -1 : 1) * tm.minors[static_cast<std::size_t>(j - k)] / delta;
  }
  return m;
}

}  // namespace

CMatrix terminal_block(const CMatrix& c1, int k) {
  const int n = static_cast<int>(c1.rows());
  check_problem_index(n, k);
  return c1.block(0, k, n - k, n - k);
}

ScaledComplex char_function(const SystemOperator& op, int k, Complex lambda, double tol) {
  const int n = op.n();
  check_problem_index(n, k);
  std::vector<int> cols;
  for (int j = k; j < n; ++j) cols.push_back(j);
  const auto tm = terminal_minors(op, lambda, n - k, {cols}, tol);
  return {tm.minors[0], tm.log_scale};
}

ScaledComplex char_function(const FMatrix& f, int k, Complex lambda, double tol) {
  return char_function(SystemOperator(f), k, lambda, tol);
}

CMatrix weyl_from_c1(const CMatrix& c1, double tol) {
  const int n = static_cast<int>(c1.rows());
  // Scales from the full rows and columns of C(1) so that a block that is
  // small only because lambda is near a pole is not rescaled away.
  Eigen::VectorXd row_scale(n), col_scale(n);
  for (int i = 0; i < n; ++i) {
    const double r = c1.row(i).cwiseAbs().maxCoeff();
    const double c = c1.col(i).cwiseAbs().maxCoeff();
    row_scale(i) = r > 0.0 ? 1.0 / r : 1.0;
    col_scale(i) = c > 0.0 ? 1.0 / c : 1.0;
  }
  const CMatrix eq_full = row_scale.asDiagonal() * c1 * col_scale.asDiagonal();
  const double full_norm = Eigen::JacobiSVD<CMatrix>(eq_full).singularValues()(0);

  CMatrix m = CMatrix::Identity(n, n);
  for (int k = 1; k <= n - 1; ++k) {
    const int len = n - k;
    const CMatrix a = c1.block(0, k, len, len);
    const CMatrix eq = row_scale.head(len).asDiagonal() * a * col_scale.segment(k, len).asDiagonal();
    const auto sv = Eigen::JacobiSVD<CMatrix>(eq).singularValues();
    const double rcond = sv(len - 1) / std::max(full_norm, 1e-300);
    if (!(rcond >= tol))
      fail(ErrorCode::NearEigenvalue, "lambda is within solver resolution of an eigenvalue of problem " +
                                          std::to_string(k));
    const Eigen::VectorXcd rhs = -c1.block(0, k - 1, len, 1);
    m.block(k, k - 1, len, 1) = a.fullPivLu().solve(rhs);
  }
  return m;
}

WeylSample weyl_matrix(const SystemOperator& op, Complex lambda, double tol) {
  return {lambda, weyl_core<double>(op, lambda, tol)};
}

WeylSample weyl_matrix(const FMatrix& f, Complex lambda, double tol) {
  return weyl_matrix(SystemOperator(f), lambda, tol);
}

std::vector<EigenRecord> find_eigenvalues(const SystemOperator& op, int k, const Rect& region, double tol) {
  check_problem_index(op.n(), k);
  AnalyticFunction g = [&](Complex z) { return char_function(op, k, z, tol); };
  RootOptions ropts;
  ropts.tol = tol;
  std::vector<EigenRecord> out;
  for (const auto& root : find_zeros(g, region, ropts)) {
    EigenRecord rec;
    rec.k = k;
    rec.lambda0 = root.z;
    rec.simple = root.multiplicity == 1;
    rec.error_estimate = root.step;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<EigenRecord> find_eigenvalues(const FMatrix& f, int k, const Rect& region, double tol) {
  return find_eigenvalues(SystemOperator(f), k, region, tol);
}

double default_contour_radius(const SystemOperator& op, Complex lambda0, double tol) {
  const Rect box{lambda0.real() - 2.0, lambda0.real() + 2.0, lambda0.imag() - 2.0, lambda0.imag() + 2.0};
  const double same = 1e-6 * std::max(1.0, std::abs(lambda0));
  double nearest = HUGE_VAL;
  for (int k = 1; k <= op.n() - 1; ++k)
    for (const auto& rec : find_eigenvalues(op, k, box, tol)) {
      const double d = std::abs(rec.lambda0 - lambda0);
      if (d > same) nearest = std::min(nearest, d);
    }
  return std::min(1.0, 0.5 * nearest);
}

WeightResult weight_matrix(const SystemOperator& op, Complex lambda0, const WeightOptions& opts) {
  if (opts.nodes < 16) fail(ErrorCode::InvalidArgument, "weight_matrix needs at least 16 contour nodes");
  const double radius = opts.radius > 0.0 ? opts.radius : default_contour_radius(op, lambda0, opts.tol);
  const int n = op.n();
  const auto nodes = static_cast<std::size_t>(opts.nodes);

  // Long double throughout: the entries of N that vanish for a simple pole
  // come from cancellation between Laurent coefficients of size |lambda|^{j/n}.
  using LD = long double;
  using LC = std::complex<LD>;
  using LMatrix = detail::MatrixT<LD>;
  std::vector<LC> offsets(nodes);
  for (std::size_t j = 0; j < nodes; ++j)
    offsets[j] = std::polar<LD>(radius, 2 * std::numbers::pi_v<LD> * static_cast<LD>(j) / opts.nodes);
  const LC center(lambda0.real(), lambda0.imag());
  std::vector<LMatrix> samples(nodes);
  parallel_for(nodes, [&](std::size_t j) { samples[j] = weyl_core<LD>(op, center + offsets[j], opts.tol); });

  LMatrix m0 = LMatrix::Zero(n, n), m1 = LMatrix::Zero(n, n), m2 = LMatrix::Zero(n, n);
  for (std::size_t j = 0; j < nodes; ++j) {
    m0 += samples[j];
    m1 += samples[j] * offsets[j];
    m2 += samples[j] * (offsets[j] * offsets[j]);
  }
  const LC inv_n(LD(1) / static_cast<LD>(nodes));
  m0 *= inv_n;
  m1 *= inv_n;
  m2 *= inv_n;

  // About the center c, a simple pole at p gives m2 = m1 (p - c). The given
  // lambda0 is only as good as the root solve, so the regular part is
  // re-evaluated at the pole located from the moments themselves.
  Eigen::Index pi = 0, pj = 0;
  m1.cwiseAbs().maxCoeff(&pi, &pj);
  const LD res = std::abs(m1(pi, pj));
  if (!(res > LD(1e-13) * std::max<LD>(1, m0.cwiseAbs().maxCoeff())))
    fail(ErrorCode::InvalidArgument, "M has no pole at the given lambda0");
  const LC shift = m2(pi, pj) / m1(pi, pj);
  if (std::abs(shift) < LD(0.5) * radius) {
    m2 -= m1 * shift;
    LMatrix g = LMatrix::Zero(n, n);
    for (std::size_t j = 0; j < nodes; ++j) {
      const LC d = offsets[j] - shift;  // z_j - pole
      g += (samples[j] - m1 / d) * (offsets[j] / d);
    }
    m0 = g * inv_n;
  }

  WeightResult out;
  out.m0 = m0.cast<Complex>();
  out.m_minus1 = m1.cast<Complex>();
  out.m_minus2 = m2.cast<Complex>();
  out.simple = static_cast<double>(m2.cwiseAbs().maxCoeff()) <= opts.simple_tol * radius * static_cast<double>(res);
  if (!out.simple) fail(ErrorCode::NonSimplePole, "pole of M is not simple (second Laurent coefficient nonzero)");

  const auto lu = m0.fullPivLu();
  if (!lu.isInvertible() || lu.rcond() < 1e-12)
    fail(ErrorCode::SingularM0, "regular part of M at lambda0 is not invertible");
  out.n_matrix = lu.solve(m1).cast<Complex>();
  return out;
}

WeightResult weight_matrix(const FMatrix& f, Complex lambda0, const WeightOptions& opts) {
  return weight_matrix(SystemOperator(f), lambda0, opts);
}

}  // namespace regkit
