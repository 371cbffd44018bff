#pragma once

#include <complex>
#include <span>
#include <vector>

namespace regkit {

using Complex = std::complex<double>;

/// Exact piecewise polynomial on a knot mesh of [0,1].
///
/// Cell `c` covers [knots[c], knots[c+1]) and stores coefficients in the
/// local variable t = x - knots[c], lowest degree first. The last cell is
/// closed at x = 1. Coefficients are complex; real-valued data simply has
/// zero imaginary parts.
class PiecewisePoly {
 public:
  using Coeffs = std::vector<Complex>;

  /// Zero function on the trivial mesh {0, 1}.
  PiecewisePoly();
  PiecewisePoly(std::vector<double> knots, std::vector<Coeffs> cells);

  static PiecewisePoly zero() { return PiecewisePoly(); }
  static PiecewisePoly constant(Complex c);
  /// Global polynomial sum_k coeffs[k] x^k, optionally split on `knots`.
  static PiecewisePoly polynomial(std::span<const Complex> coeffs,
                                  std::vector<double> knots = {0.0, 1.0});
  static PiecewisePoly polynomial(std::initializer_list<double> coeffs);
  /// `left` on [0, at), `right` on [at, 1].
  static PiecewisePoly step(double at, Complex left, Complex right);

  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<Coeffs>& cells() const noexcept { return cells_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  int degree() const noexcept;

  /// Index of the cell containing x (right-continuous at interior knots).
  std::size_t locate(double x) const noexcept;

  Complex operator()(double x) const noexcept { return derivative_at(x, 0); }
  /// Classical derivative of the cell polynomial containing x.
  Complex derivative_at(double x, int order) const noexcept;

  /// Re-express on a refinement; `finer` must contain every current knot.
  PiecewisePoly refined(const std::vector<double>& finer) const;

  bool is_zero() const noexcept;
  bool is_real() const noexcept;
  double max_abs_coefficient() const noexcept;

  PiecewisePoly conj() const;
  PiecewisePoly real_part() const;

  PiecewisePoly& operator+=(const PiecewisePoly& other);
  PiecewisePoly& operator-=(const PiecewisePoly& other);
  PiecewisePoly& operator*=(const PiecewisePoly& other);
  PiecewisePoly& operator*=(Complex s);

 private:
  std::vector<double> knots_;
  std::vector<Coeffs> cells_;
};

PiecewisePoly operator+(PiecewisePoly a, const PiecewisePoly& b);
PiecewisePoly operator-(PiecewisePoly a, const PiecewisePoly& b);
PiecewisePoly operator-(PiecewisePoly a);
PiecewisePoly operator*(const PiecewisePoly& a, const PiecewisePoly& b);
PiecewisePoly operator*(PiecewisePoly a, Complex s);
PiecewisePoly operator*(Complex s, PiecewisePoly a);

enum class ArithOp { Add, Sub, Mul, Scale };

/// Binary arithmetic on the common refinement of both meshes. For
/// `ArithOp::Scale` the scalar is taken from the constant `b` (b must be a
/// single constant cell).
PiecewisePoly arith(const PiecewisePoly& a, const PiecewisePoly& b, ArithOp op);

/// Sorted union of two knot vectors.
std::vector<double> merge_knots(const std::vector<double>& a,
                                const std::vector<double>& b);

/// True when the two functions have identical coefficients on the common
/// refinement (bitwise, after trimming).
bool exactly_equal(const PiecewisePoly& a, const PiecewisePoly& b);

/// Order-fold antiderivative, continuous across knots, vanishing at x = 0
/// together with its first order-1 derivatives. Combine with
/// moment_normalize for the canonical choice.
PiecewisePoly antiderivative(const PiecewisePoly& a, int order = 1);

/// w + p with p the unique polynomial of degree < i that makes the moments
/// int_0^1 x^k (w + p) dx vanish for k = 0..i-1. i = 0 returns w unchanged.
PiecewisePoly moment_normalize(const PiecewisePoly& w, int i);

/// Cellwise classical derivative. Throws DiscontinuousAtKnot if `a` jumps at
/// an interior knot, since the jump would be a delta the result cannot hold.
PiecewisePoly derivative_cellwise(const PiecewisePoly& a);

/// n-fold cellwise derivative (each intermediate must be continuous).
PiecewisePoly derivative_cellwise(const PiecewisePoly& a, int order);

/// int_0^1 a(x) dx.
Complex integral(const PiecewisePoly& a);
/// int_0^1 x^k a(x) dx.
Complex moment(const PiecewisePoly& a, int k);

enum class NormKind { L1, L2, Inf };

double norm(const PiecewisePoly& a, NormKind kind);

/// Gauss-Legendre points and weights on [0,1], cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_rule(int points);

namespace poly {
// Dense polynomial helpers on coefficient vectors, lowest degree first.
Complex eval(std::span<const Complex> c, Complex t) noexcept;
std::vector<Complex> mul(std::span<const Complex> a, std::span<const Complex> b);
std::vector<Complex> add(std::span<const Complex> a, std::span<const Complex> b);
std::vector<Complex> derivative(std::span<const Complex> c);
/// Coefficients of p(t + shift).
std::vector<Complex> shift(std::span<const Complex> c, double shift);
void trim(std::vector<Complex>& c);
}  // namespace poly

}  // namespace regkit
