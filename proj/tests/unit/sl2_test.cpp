#include <algorithm>

#include "doctest.h"
#include "regkit/sl2.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace regkit;

namespace {
const double kPi = oracle::kPi;
}

TEST_CASE("second-order associated matrix") {
  testing::Rng rng(61);
  const auto s = testing::random_poly(rng, 2, 1.0);
  const auto r = testing::random_poly(rng, 1, 1.0);
  const FMatrix f = sl2_matrix(s, r);
  CHECK(exactly_equal(f.at(1, 1), s));
  CHECK(f.at(1, 2).is_zero());
  CHECK(exactly_equal(f.at(2, 1), r - s * s));
  CHECK(exactly_equal(f.at(2, 2), -s));
  CHECK(check_class(f, FClass::Fn0));
  // It regularizes the coefficient set it claims to.
  CHECK(signature_distance(signature_of(f), sl2_coefficients(s, r)) < 1e-12);
}

TEST_CASE("zero potential spectra") {
  const auto z = PiecewisePoly::zero();
  const auto d = sl2_spectra(z, z, 6, 1e-12);
  for (int k = 1; k <= 6; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    CHECK(std::abs(d.dirichlet[i] + std::pow(k * kPi, 2)) < 1e-8 * std::pow(k * kPi, 2));
    CHECK(std::abs(d.quasi_neumann[i] + std::pow((k - 0.5) * kPi, 2)) < 1e-8 * std::pow(k * kPi, 2));
    CHECK(std::abs(d.weights[i] - 1.0 / (2.0 * k * k * kPi * kPi)) < 1e-10);
  }
}

TEST_CASE("interlacing and counting for real potentials") {
  testing::Rng rng(62);
  for (int trial = 0; trial < 3; ++trial) {
    const auto sigma = testing::random_piecewise_linear(rng, 1.5);
    const auto d = sl2_spectra(sigma, PiecewisePoly::zero(), 8, 1e-11);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::abs(d.dirichlet[i].imag()) < 1e-8);
      CHECK(d.quasi_neumann[i].real() > d.dirichlet[i].real());
      if (i + 1 < 8) CHECK(d.dirichlet[i].real() > d.quasi_neumann[i + 1].real());
      CHECK(d.weights[i].real() > 0.0);
    }
    // Bounded sigma moves lambda_k by o(k^2): the k-th eigenvalue stays in
    // the window between -((k -+ 1/2) pi)^2.
    for (int k = 3; k <= 8; ++k) {
      const double v = d.dirichlet[static_cast<std::size_t>(k - 1)].real();
      CHECK(v < -std::pow((k - 0.5) * kPi, 2));
      CHECK(v > -std::pow((k + 0.5) * kPi, 2));
    }
  }
}

TEST_CASE("delta potential against the transfer-matrix oracle") {
  for (double alpha : {1.0, 5.0}) {
    const auto d = sl2_spectra(PiecewisePoly::step(0.5, 0.0, alpha), PiecewisePoly::zero(), 3, 1e-12);
    const auto want = oracle::delta_dirichlet(alpha, 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(d.dirichlet[i] - want[i]) < 1e-7);
  }
}

TEST_CASE("second-order spectra agree with the generic path") {
  testing::Rng rng(63);
  const auto sigma = testing::random_piecewise_linear(rng, 1.0);
  const auto r = PiecewisePoly::constant(0.5);
  const auto d = sl2_spectra(sigma, r, 3, 1e-12);
  auto eig = find_eigenvalues(sl2_matrix(sigma, r), 1, Rect{-120.0, 20.0, -1.0, 1.0}, 1e-12);
  std::sort(eig.begin(), eig.end(), [](const auto& a, const auto& b) { return a.lambda0.real() > b.lambda0.real(); });
  REQUIRE(eig.size() >= 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(d.dirichlet[i] - eig[i].lambda0) < 1e-8);
  const Complex lambda(-30.0, 4.0);
  CHECK(std::abs(weyl_function(sigma, r, lambda, 1e-12) - weyl_matrix(sl2_matrix(sigma, r), lambda, 1e-12).m(1, 0)) <
        1e-9);
}

TEST_CASE("residue identity") {
  testing::Rng rng(64);
  const auto sigma = testing::random_piecewise_linear(rng, 1.0);
  for (int idx = 1; idx <= 2; ++idx) {
    const auto c = residue_identity_check(sigma, PiecewisePoly::zero(), idx, 1e-12);
    CHECK(c.discrepancy < 1e-5 * std::max(1.0, std::abs(c.residue)));
  }
}

TEST_CASE("shift experiment") {
  testing::Rng rng(65);
  const auto sigma = testing::random_piecewise_linear(rng, 1.0);
  const auto s = shift_experiment(sigma, PiecewisePoly::zero(), 0.75, {{2.0, 1.0}, {-20.0, 5.0}, {10.0, -2.0}}, 4,
                                  1e-12);
  CHECK(s.dirichlet_shift_residual < 1e-8);
  CHECK(s.weyl_shift_constancy < 1e-8);
  CHECK(std::abs(s.mean_difference.imag()) < 1e-8);
}
