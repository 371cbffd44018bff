#pragma once

// Scalar-generic form of terminal_minors; lambda is taken at the working
// precision so contour nodes are not rounded to double first. Weight matrices use the long
// double instantiation, since N = M0^{-1} M-1 cancels digits between
// Laurent coefficients that grow like powers of |lambda|^{1/n}.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "regkit/spectral.hpp"

namespace regkit::detail {

template <typename S>
using MatrixT = Eigen::Matrix<std::complex<S>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
struct Minors {
  std::vector<std::complex<S>> minors;
  std::vector<S> norms;
  S log_scale = 0;
};

template <typename S>
Minors<S> exterior_minors(const SystemOperator& op, std::complex<S> lambda, int p,
                          const std::vector<std::vector<int>>& column_sets, double tol);

extern template Minors<double> exterior_minors<double>(const SystemOperator&, std::complex<double>, int,
                                                       const std::vector<std::vector<int>>&, double);
extern template Minors<long double> exterior_minors<long double>(const SystemOperator&, std::complex<long double>, int,
                                                                 const std::vector<std::vector<int>>&, double);

}  // namespace regkit::detail
