#pragma once

#include <map>
#include <utility>
#include <vector>

#include "regkit/funcspace.hpp"

namespace regkit {

/// Differential order n = 2m + s with parity bit s.
class OrderSpec {
 public:
  explicit OrderSpec(int n);

  int n() const noexcept { return n_; }
  int m() const noexcept { return n_ / 2; }
  int s() const noexcept { return n_ % 2; }
  bool odd() const noexcept { return s() == 1; }
  /// Side length of the bilinear-form matrix Q.
  int q_size() const noexcept { return m() + 1; }

  friend bool operator==(const OrderSpec&, const OrderSpec&) = default;

 private:
  int n_;
};

/// Singularity orders i_nu, nu = 0..n-1.
std::vector<int> singularity_orders(const OrderSpec& order);

/// Integer basis matrix chi_{nu,i}, supported on the anti-diagonal
/// r + j = nu + i.
struct ChiMatrix {
  int nu = 0;
  int i = 0;
  int size = 0;
  std::vector<long long> entries;  // row-major size x size

  long long at(int r, int j) const { return entries[static_cast<std::size_t>(r * size + j)]; }
  int diagonal() const noexcept { return nu + i; }
};

ChiMatrix chi(const OrderSpec& order, int nu, int i);
/// All chi_{nu,i} with 0 <= i <= i_nu, ordered by (nu, i).
std::vector<ChiMatrix> chi_basis(const OrderSpec& order);
/// Exact rank over the rationals of the vectorized chi basis.
int chi_rank(const OrderSpec& order);
/// Dimension of the matrix space the basis spans: (m+1)^2 - 1 even, (m+1)^2 odd.
int chi_space_dimension(const OrderSpec& order);

/// Dense matrix of piecewise polynomials with 0-based indexing.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  PiecewisePoly& operator()(int r, int c) { return data_[index(r, c)]; }
  const PiecewisePoly& operator()(int r, int c) const { return data_[index(r, c)]; }

  /// Union of all entry meshes.
  std::vector<double> knots() const;
  int max_degree() const;

 private:
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r * cols_ + c); }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<PiecewisePoly> data_;
};

/// Bilinear-form matrix [q_{r,j}]_{r,j=0}^m. Even orders require q_{m,m} = 0.
struct QMatrix {
  OrderSpec order{2};
  PolyMatrix q;

  explicit QMatrix(OrderSpec o) : order(o), q(o.q_size(), o.q_size()) {}
};

/// Associated matrix [f_{k,j}]_{k,j=1}^n, stored 0-based.
struct FMatrix {
  OrderSpec order{2};
  PolyMatrix f;

  explicit FMatrix(OrderSpec o) : order(o), f(o.n(), o.n()) {}
  /// 1-based access, matching the usual f_{k,j} indexing.
  PiecewisePoly& at(int k, int j) { return f(k - 1, j - 1); }
  const PiecewisePoly& at(int k, int j) const { return f(k - 1, j - 1); }
};

/// Coefficients tau_nu = (-1)^{i_nu} sigma_nu^{(i_nu)} represented through
/// their antiderivatives sigma_nu, nu = 0..n-1.
struct CoefficientSet {
  OrderSpec order{2};
  std::vector<PiecewisePoly> sigma;
  bool tau_top_zero = false;

  CoefficientSet() = default;
  CoefficientSet(OrderSpec o, std::vector<PiecewisePoly> s, bool top_zero);

  void validate() const;
};

/// Moment-normalized sigma_nu (order i_nu): equal for two coefficient sets
/// iff they define the same distributions tau_nu.
CoefficientSet canonical_signature(const CoefficientSet& t);
/// sqrt(sum_nu ||sigma_nu - sigma~_nu||_2^2) between canonical signatures.
double signature_distance(const CoefficientSet& a, const CoefficientSet& b);

using ChiKey = std::pair<int, int>;  // (nu, i)
using ChiDecomposition = std::map<ChiKey, PiecewisePoly>;

/// Free data of one member of the associated-matrix family: tau_{nu,i} and
/// c_{nu,i} for i < i_nu. Missing keys are zero.
struct FamilyParams {
  std::map<ChiKey, PiecewisePoly> tau;
  std::map<ChiKey, Complex> c;
};

/// Q = sum_nu sigma_nu chi_{nu, i_nu}.
QMatrix assemble_q_ms(const CoefficientSet& t);
/// Q = sum tau_{nu,i} chi_{nu,i}.
QMatrix assemble_q(const OrderSpec& order, const ChiDecomposition& tau);

/// The bijection Q -> F between the Q- and F-pattern spaces.
FMatrix s_n(const QMatrix& q);
QMatrix s_n_inverse(const FMatrix& f);

/// Mirzoev-Shkalikov associated matrix S_n(Q_n(Sigma)).
FMatrix ms_matrix(const CoefficientSet& t);

/// Unique coefficients of Q in the chi basis, solved per anti-diagonal with
/// exact rational inverses of the integer chi blocks.
ChiDecomposition decompose_chi(const QMatrix& q);

/// Canonical coefficient set of the expression generated by a chi
/// decomposition, computed at antiderivative level.
/// sigma_{n-1} below `top_zero_tol` in L2 is snapped to zero and flagged.
CoefficientSet reconstruct_signature(const ChiDecomposition& tau, const OrderSpec& order,
                                     double top_zero_tol = 1e-12);

/// reconstruct_signature(decompose_chi(s_n_inverse(f))).
CoefficientSet signature_of(const FMatrix& f, double top_zero_tol = 1e-12);

/// Family member F(T, params).
FMatrix family_matrix(const CoefficientSet& t, const FamilyParams& params);

enum class FClass { Fn, Fn0 };

/// Pattern membership (plus trace == 0 for Fn0). `tol` bounds the allowed
/// sup-norm of pattern-forbidden entries and of the trace; 0 means exact.
bool check_class(const FMatrix& f, FClass cls, double tol = 0.0);

/// Pattern predicate: true where the F pattern forces a zero (1-based).
bool f_forced_zero(const OrderSpec& order, int k, int j);

/// Classical tau_nu = (-1)^{i_nu} sigma_nu^{(i_nu)} for smooth sigma.
std::vector<PiecewisePoly> classical_taus(const CoefficientSet& t);

/// l_n(y) evaluated classically at x from y^{(0..n)}(x) and smooth tau_nu.
Complex classical_expression_at(const OrderSpec& order, const std::vector<PiecewisePoly>& taus,
                                double x, std::span<const Complex> y_derivs);
/// l_n(y) for a smooth piecewise polynomial y.
PiecewisePoly classical_expression(const OrderSpec& order, const std::vector<PiecewisePoly>& taus,
                                   const PiecewisePoly& y);

}  // namespace regkit
