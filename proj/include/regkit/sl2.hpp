#pragma once

#include <vector>

#include "regkit/spectral.hpp"

namespace regkit {

// Second-order case y'' - q y = lambda y with q = sigma' + r.

/// [[sigma, 0], [-sigma^2 + r, -sigma]].
FMatrix sl2_matrix(const PiecewisePoly& sigma, const PiecewisePoly& r);

/// Coefficient set of y'' - q y (tau_0 = -q) in antiderivative form, with
/// tau_1 = 0.
CoefficientSet sl2_coefficients(const PiecewisePoly& sigma, const PiecewisePoly& r);

struct SL2Data {
  std::vector<Complex> dirichlet;      // zeros of S(1, lambda), by decreasing real part
  std::vector<Complex> quasi_neumann;  // zeros of C(1, lambda)
  std::vector<Complex> weights;        // alpha_n = int_0^1 S(x, lambda_n)^2 dx
};

SL2Data sl2_spectra(const PiecewisePoly& sigma, const PiecewisePoly& r, int count, double tol = 1e-10);

/// m(lambda) = -C(1, lambda) / S(1, lambda). Throws NearEigenvalue when S(1)
/// vanishes to solver resolution.
Complex weyl_function(const PiecewisePoly& sigma, const PiecewisePoly& r, Complex lambda, double tol = 1e-10);

struct ResidueCheck {
  Complex lambda;
  Complex alpha;
  Complex residue;
  double discrepancy = 0;  // |1/alpha - residue|
};

/// Compares 1/alpha_n with the residue of m at lambda_n (1-based index),
/// the latter from the trapezoid rule on a circle.
ResidueCheck residue_identity_check(const PiecewisePoly& sigma, const PiecewisePoly& r, int index,
                                    double tol = 1e-10, int nodes = 64);

struct ShiftResult {
  double dirichlet_shift_residual = 0;  // max |lambda_n(sigma) - lambda_n(sigma + c)|
  double weyl_shift_constancy = 0;      // max |(m - m_c) - mean(m - m_c)|
  Complex mean_difference;
};

ShiftResult shift_experiment(const PiecewisePoly& sigma, const PiecewisePoly& r, Complex c,
                             const std::vector<Complex>& lambdas, int count = 5, double tol = 1e-10);

}  // namespace regkit
