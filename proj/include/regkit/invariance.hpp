#pragma once

#include <algorithm>
#include <vector>

#include "regkit/spectral.hpp"

namespace regkit {

/// True where the constant factor L must equal the identity entry
/// (j <= n - m or k > m, 1-based).
bool l_pattern_forced(const OrderSpec& order, int j, int k);

/// Throws SignatureMismatch unless both matrices regularize the same
/// coefficients with tau_{n-1} = 0.
void require_same_signature(const FMatrix& f, const FMatrix& ftilde, double tol = 1e-10);

struct InvarianceReport {
  CMatrix l;                       // mean of M(lambda) Mtilde(lambda)^{-1}
  double constancy_residual = 0;   // max_lambda |L(lambda) - L|
  double pattern_residual = 0;     // max |L - I| on forced entries
  double phi_residual = 0;         // classical rows of Phi - Phitilde, relative
  double weight_residual = 0;      // filled by callers that also compare weights
};

struct InvarianceOptions {
  double tol = 1e-10;
  std::vector<double> xgrid;  // empty selects 0.05, 0.15, ..., 0.95
};

/// Estimates the constant factor relating M and Mtilde over the sample
/// points and checks it against the L_n pattern and the Phi identity.
InvarianceReport l_factor(const FMatrix& f, const FMatrix& ftilde, const std::vector<Complex>& lambdas,
                          const InvarianceOptions& opts = {});

struct MatchedEigen {
  Complex lambda;
  Complex lambda_tilde;
  CMatrix weight;
  CMatrix weight_tilde;
};

struct WeightInvariance {
  std::vector<MatchedEigen> pairs;
  double pole_residual = 0;    // max |lambda - lambda~| over matched pairs
  double weight_residual = 0;  // max |N - N~| (max entry) over matched pairs
};

/// Eigenvalues of problem k in the region for both matrices, matched as
/// sets, with their weight matrices. `limit` > 0 keeps only the eigenvalues
/// of smallest modulus. Throws SpectrumMismatch if the sets differ.
WeightInvariance weight_invariance(const FMatrix& f, const FMatrix& ftilde, const Rect& region, int k = 1,
                                   int limit = 0, double tol = 1e-10, double match_tol = 1e-6);

/// The `count` eigenvalues of problem k of smallest modulus, found in square
/// regions about 0 that double until they contain enough of them.
std::vector<EigenRecord> smallest_eigenvalues(const SystemOperator& op, int k, int count, double tol = 1e-10);

struct SpectralMapResult {
  double residual = 0;             // max |P' + P(Ft + J) - (F + J) P| on the grid
  double lambda_spread = 0;        // max |P(x, lambda) - P(x, lambda_0)|
  double triangularity = 0;        // max |P - unit lower triangular part|
  std::vector<double> xgrid;
};

/// Forms P = Phi Phitilde^{-1} on the grid and evaluates the transformation
/// relation with finite-difference P' of step h (central, or one-sided
/// second order within 2h of a knot or an end).
SpectralMapResult spectral_map_residual(const FMatrix& f, const FMatrix& ftilde, const std::vector<Complex>& lambdas,
                                        const std::vector<double>& xgrid, double h, double tol = 1e-12);

struct DiscriminationResult {
  double signature_distance = 0;
  double eigenvalue_difference = 0;  // max over matched eigenvalues; inf if counts differ
  double weight_difference = 0;      // max |N - N~| over matched eigenvalues
  bool count_mismatch = false;

  double spectral_difference() const { return std::max(eigenvalue_difference, weight_difference); }
};

/// Compares the discrete spectral data of the first `count` eigenvalues of
/// each problem k = 1..n-1 for two (possibly unrelated) associated matrices.
/// The result is evidence for distinctness, not a proof.
DiscriminationResult discrimination_probe(const FMatrix& f, const FMatrix& g, int count = 3, double tol = 1e-10);

}  // namespace regkit
