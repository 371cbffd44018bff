#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "regkit/regularization.hpp"

namespace regkit {

using CMatrix = Eigen::MatrixXcd;

/// mantissa * exp(log_scale); keeps characteristic values representable
/// when the fundamental matrix grows exponentially in |lambda|.
struct ScaledComplex {
  Complex mantissa{0.0, 0.0};
  double log_scale = 0.0;

  Complex value() const { return mantissa * std::exp(log_scale); }
};

/// Y' = (F(x) + J(lambda)) Y on [0,1] as a polynomial system, precomputed
/// per mesh cell so lambda sweeps reuse the coefficient expansion.
class SystemOperator {
 public:
  explicit SystemOperator(const FMatrix& f);

  int n() const noexcept { return n_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  /// Coefficients of F on cell c in t = x - knots[c], lowest degree first.
  const std::vector<CMatrix>& cell(std::size_t c) const { return cells_[c]; }
  /// Sup norm of F (max row sum over cells, coarse bound).
  double f_bound() const noexcept { return f_bound_; }
  /// F(x) + J(lambda).
  CMatrix matrix(double x, Complex lambda) const;

 private:
  int n_;
  std::vector<double> knots_;
  std::vector<std::vector<CMatrix>> cells_;
  double f_bound_ = 0.0;
};

struct IntegratorOptions {
  double tol = 1e-10;       // step-doubling relative error per step
  double min_step = 1e-13;  // below this StepUnderflow is raised
  int max_terms = 40;       // Taylor terms per step
  bool dense = false;       // keep per-step Taylor coefficients
};

/// Fundamental matrix C(x, lambda) with C(0) = I, rows indexed by the
/// quasi-derivative order and columns by the solution.
class FundamentalSolution {
 public:
  int n() const noexcept { return n_; }
  Complex lambda() const noexcept { return lambda_; }
  /// Mantissa of C(1); true value is exp(log_scale()) times this.
  const CMatrix& end() const noexcept { return end_; }
  double log_scale() const noexcept { return log_scale_; }
  int steps() const noexcept { return steps_; }

  bool has_dense() const noexcept { return !segments_.empty(); }
  /// True value of d^order/dx^order C(x); classical derivative inside the
  /// step containing x (right-continuous at step boundaries).
  CMatrix derivative(double x, int order) const;
  CMatrix value(double x) const { return derivative(x, 0); }

 private:
  friend FundamentalSolution integrate(const SystemOperator&, Complex, const IntegratorOptions&);

  struct Segment {
    double x0 = 0.0;
    double h = 0.0;
    double log_scale = 0.0;
    std::vector<CMatrix> coeffs;  // Taylor coefficients in u = x - x0
  };

  int n_ = 0;
  Complex lambda_;
  CMatrix end_;
  double log_scale_ = 0.0;
  int steps_ = 0;
  std::vector<Segment> segments_;
};

FundamentalSolution integrate(const SystemOperator& op, Complex lambda, const IntegratorOptions& opts = {});

struct FundamentalMatrix {
  Complex lambda;
  CMatrix c1;  // mantissa of C(1, lambda)
  double log_scale = 0.0;
};

FundamentalMatrix integrate_fundamental(const FMatrix& f, Complex lambda, double tol);

/// p x p minors of C(1, lambda) on rows 0..p-1 and the given 0-based column
/// sets, read off the p-th exterior power of the system. Each minor is one
/// coordinate of an integrated vector, so none is formed by cancellation
/// between exponentially large entries of C(1).
struct TerminalMinors {
  std::vector<Complex> minors;  // mantissas; true value is exp(log_scale) times these
  std::vector<double> norms;    // sup norm of each integrated exterior vector
  double log_scale = 0.0;
};

TerminalMinors terminal_minors(const SystemOperator& op, Complex lambda, int p,
                               const std::vector<std::vector<int>>& column_sets, double tol = 1e-10);

/// Terminal-condition block [C_j^{[r]}(1)] for rows r = 0..n-k-1 and
/// columns j = k+1..n (k is 1-based).
CMatrix terminal_block(const CMatrix& c1, int k);

/// Delta_k(lambda) = det of the terminal block, carried with its scale.
ScaledComplex char_function(const SystemOperator& op, int k, Complex lambda, double tol = 1e-10);
ScaledComplex char_function(const FMatrix& f, int k, Complex lambda, double tol = 1e-10);

struct WeylSample {
  Complex lambda;
  CMatrix m;  // unit lower triangular
};

/// Weyl-Yurko matrix from the mantissa of C(1). Throws NearEigenvalue when
/// an equilibrated terminal block has reciprocal conditioning below tol.
CMatrix weyl_from_c1(const CMatrix& c1, double tol);
/// Weyl-Yurko matrix by Cramer's rule on terminal minors; NearEigenvalue when
/// |Delta_k| falls below tol times the norm of its exterior vector.
WeylSample weyl_matrix(const SystemOperator& op, Complex lambda, double tol = 1e-10);
WeylSample weyl_matrix(const FMatrix& f, Complex lambda, double tol = 1e-10);

/// Closed box [re0, re1] x [im0, im1] in the lambda plane.
struct Rect {
  double re0 = 0.0, re1 = 0.0, im0 = 0.0, im1 = 0.0;

  bool contains(Complex z) const {
    return z.real() >= re0 && z.real() <= re1 && z.imag() >= im0 && z.imag() <= im1;
  }
  double width() const { return re1 - re0; }
  double height() const { return im1 - im0; }
  Complex center() const { return {0.5 * (re0 + re1), 0.5 * (im0 + im1)}; }
};

struct RootOptions {
  double tol = 1e-10;         // relative tolerance on root location
  int edge_samples = 16;      // initial samples per box edge
  int max_perturbations = 6;  // region nudges when a zero sits on the boundary
};

struct RootRecord {
  Complex z;
  int multiplicity = 1;  // > 1 only for unresolved clusters
  double step = 0.0;     // last Newton correction, an a-posteriori error estimate
};

using AnalyticFunction = std::function<ScaledComplex(Complex)>;

/// Winding number of g along the boundary of the box, or nullopt when the
/// phase cannot be resolved (a zero on or extremely close to the boundary).
std::optional<int> winding_number(const AnalyticFunction& g, const Rect& box, int edge_samples = 16);

/// All zeros of g inside the region, sorted by modulus. Boxes are split by
/// winding number and single zeros are polished by Newton iteration.
std::vector<RootRecord> find_zeros(const AnalyticFunction& g, Rect region, const RootOptions& opts = {});

struct EigenRecord {
  int k = 1;
  Complex lambda0;
  bool simple = true;
  double error_estimate = 0.0;
  CMatrix weight;  // empty until weight_matrix fills it
};

/// Eigenvalues of problem L_k (zeros of Delta_k) in the region.
std::vector<EigenRecord> find_eigenvalues(const SystemOperator& op, int k, const Rect& region, double tol = 1e-10);
std::vector<EigenRecord> find_eigenvalues(const FMatrix& f, int k, const Rect& region, double tol = 1e-10);

/// Half the distance from lambda0 to the nearest other zero of any Delta_k,
/// capped at 1.
double default_contour_radius(const SystemOperator& op, Complex lambda0, double tol = 1e-10);

struct WeightResult {
  CMatrix n_matrix;   // M_<0>^{-1} M_<-1>
  CMatrix m_minus1;   // residue
  // m0 and m_minus2 are expanded about the pole located from the contour
  // moments (about the center, m_-2 = m_-1 times the offset to the pole).
  CMatrix m_minus2;   // must vanish for a simple pole
  CMatrix m0;
  bool simple = true;
};

struct WeightOptions {
  double radius = 0.0;  // 0 selects default_contour_radius
  int nodes = 64;
  double tol = 1e-10;       // integration tolerance for the Weyl samples
  double simple_tol = 1e-6;  // bound on |M_<-2>| / (radius |M_<-1>|)
};

/// Laurent coefficients of M at lambda0 by the trapezoid rule on a circle
/// and the weight matrix built from them, in long double arithmetic.
/// Throws NonSimplePole or SingularM0.
WeightResult weight_matrix(const SystemOperator& op, Complex lambda0, const WeightOptions& opts = {});
WeightResult weight_matrix(const FMatrix& f, Complex lambda0, const WeightOptions& opts = {});

/// Classical l_n(y) - lambda y for y = C_1(., lambda) and smooth
/// coefficients, in L1 over [0,1].
double regularization_residual(const CoefficientSet& t, const FMatrix& f, Complex lambda, double tol = 1e-10);

/// |int l_n(y) z - bilinear form(y, z)| for smooth polynomial y, z that
/// vanish to order n at both ends; the coefficients come from Q.
double bilinear_form_residual(const CoefficientSet& t, const QMatrix& q, const PiecewisePoly& y,
                              const PiecewisePoly& z);

}  // namespace regkit
