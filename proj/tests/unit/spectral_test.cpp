#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "regkit/error.hpp"
#include "regkit/sl2.hpp"
#include "regkit/spectral.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace regkit;

namespace {

const double kPi = oracle::kPi;

FMatrix zero_matrix(int n) { return FMatrix(OrderSpec(n)); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("fundamental matrix at lambda = 0 with F = 0") {
  // C(x) = exp(xJ(0)): C_{ij} = x^{i-j} / (i-j)! below the diagonal.
  for (int n = 2; n <= 5; ++n) {
    IntegratorOptions opts;
    opts.dense = true;
    const auto sol = integrate(SystemOperator(zero_matrix(n)), 0.0, opts);
    for (double x : {0.0, 0.3, 0.71, 1.0}) {
      const CMatrix c = sol.value(x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double want = j >= i ? std::pow(x, j - i) / std::tgamma(j - i + 1) : 0.0;
          CHECK(std::abs(c(i, j) - want) < 1e-13);
        }
    }
  }
}

TEST_CASE("dense output satisfies the system") {
  testing::Rng rng(41);
  const OrderSpec o(3);
  const FMatrix f = ms_matrix(testing::random_coefficients(rng, o, 1.0));
  const SystemOperator op(f);
  IntegratorOptions opts;
  opts.dense = true;
  opts.tol = 1e-12;
  const Complex lambda(-20.0, 4.0);
  const auto sol = integrate(op, lambda, opts);
  for (double x : {0.13, 0.42, 0.66, 0.9}) {
    const CMatrix lhs = sol.derivative(x, 1);
    const CMatrix rhs = op.matrix(x, lambda) * sol.value(x);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
  }
  const CMatrix end = sol.end() * std::exp(sol.log_scale());
  CHECK((sol.value(1.0) - end).cwiseAbs().maxCoeff() < 1e-10 * end.cwiseAbs().maxCoeff());
}

TEST_CASE("zero potential Weyl function") {
  for (int j = 0; j < 8; ++j) {
    const Complex lambda(-90.0 + 25.0 * j, 1.0 + j);
    const CMatrix m = weyl_matrix(zero_matrix(2), lambda, 1e-12).m;
    CHECK(rel(m(1, 0), oracle::weyl_zero_potential(lambda)) < 1e-9);
    CHECK(m(0, 0) == Complex(1.0));
    CHECK(m(0, 1) == Complex(0.0));
  }
}

TEST_CASE("third order free Weyl matrix against the exponential basis") {
  for (Complex lambda : {Complex(5.0, 3.0), Complex(-40.0, 10.0), Complex(200.0, -50.0), Complex(-1.0, 0.5)}) {
    const CMatrix m = weyl_matrix(zero_matrix(3), lambda, 1e-12).m;
    const auto want = oracle::weyl_third_order_free(lambda);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(rel(m(j, k), want(j, k)) < 1e-8);
  }
}

TEST_CASE("compound and direct Weyl matrices agree at moderate lambda") {
  testing::Rng rng(42);
  for (int n = 2; n <= 4; ++n) {
    const FMatrix f = ms_matrix(testing::random_coefficients(rng, OrderSpec(n), 1.0));
    const SystemOperator op(f);
    const Complex lambda(3.0, 2.0);
    const CMatrix a = weyl_matrix(op, lambda, 1e-12).m;
    const CMatrix b = weyl_from_c1(integrate_fundamental(f, lambda, 1e-12).c1, 1e-12);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("conjugation symmetry for real coefficients") {
  testing::Rng rng(43);
  for (int n = 2; n <= 4; ++n) {
    const FMatrix f = ms_matrix(testing::random_coefficients(rng, OrderSpec(n), 1.0));
    const SystemOperator op(f);
    const Complex lambda(-12.0, 7.0);
    const CMatrix a = weyl_matrix(op, lambda, 1e-12).m;
    const CMatrix b = weyl_matrix(op, std::conj(lambda), 1e-12).m;
    CHECK((a.conjugate() - b).cwiseAbs().maxCoeff() < 1e-9 * a.cwiseAbs().maxCoeff());
    for (int k = 1; k < n; ++k) {
      const auto d1 = char_function(op, k, lambda, 1e-12).value();
      const auto d2 = char_function(op, k, std::conj(lambda), 1e-12).value();
      CHECK(std::abs(std::conj(d1) - d2) < 1e-9 * std::abs(d1));
    }
  }
}

TEST_CASE("characteristic function stays representable at large lambda") {
  const auto d = char_function(zero_matrix(4), 1, Complex(-1e12, 1e9), 1e-10);
  CHECK(std::isfinite(d.mantissa.real()));
  CHECK(std::isfinite(d.log_scale));
  CHECK(d.log_scale > 10.0);
}

TEST_CASE("eigenvalues of a constant potential") {
  // q = 1: y'' - y = lambda y with Dirichlet ends, lambda_n = -(n pi)^2 - 1.
  const FMatrix f = sl2_matrix(PiecewisePoly::zero(), PiecewisePoly::constant(1.0));
  const auto eig = find_eigenvalues(f, 1, Rect{-50.0, 0.0, -1.0, 1.0}, 1e-12);
  REQUIRE(eig.size() == 2);
  std::vector<double> got;
  for (const auto& e : eig) got.push_back(e.lambda0.real());
  std::sort(got.begin(), got.end());
  CHECK(std::abs(got[1] + kPi * kPi + 1.0) < 1e-9);
  CHECK(std::abs(got[0] + 4 * kPi * kPi + 1.0) < 1e-9);
  for (const auto& e : eig) CHECK(e.simple);
}

TEST_CASE("winding number against a finely sampled boundary") {
  testing::Rng rng(44);
  const FMatrix f = ms_matrix(testing::random_coefficients(rng, OrderSpec(3), 1.0));
  const SystemOperator op(f);
  AnalyticFunction g = [&](Complex z) { return char_function(op, 1, z, 1e-10); };
  auto plain = [&](Complex z) {
    const auto v = g(z);
    return v.mantissa * std::exp(v.log_scale - 10.0);
  };
  for (const Rect& box : {Rect{-400.0, 50.0, -30.0, 25.0}, Rect{-1500.0, -300.0, -10.0, 12.0}}) {
    const auto w = winding_number(g, box);
    REQUIRE(w.has_value());
    CHECK(*w == oracle::fine_winding(plain, box.re0, box.re1, box.im0, box.im1, 500));
    CHECK(*w == static_cast<int>(find_eigenvalues(op, 1, box, 1e-10).size()));
  }
}

TEST_CASE("root finder on a polynomial") {
  const Complex r1(0.5, 0.25), r2(-1.0, 0.0), r3(2.0, -1.5);
  AnalyticFunction g = [&](Complex z) { return ScaledComplex{(z - r1) * (z - r2) * (z - r3), 0.0}; };
  const auto roots = find_zeros(g, Rect{-3.0, 3.0, -3.0, 3.0});
  REQUIRE(roots.size() == 3);
  for (Complex want : {r1, r2, r3}) {
    double best = HUGE_VAL;
    for (const auto& r : roots) best = std::min(best, std::abs(r.z - want));
    CHECK(best < 1e-10);
  }
  CHECK(find_zeros(g, Rect{3.5, 4.0, 0.0, 1.0}).empty());
}

TEST_CASE("weight matrix of the zero potential") {
  const FMatrix f = zero_matrix(2);
  for (int k = 1; k <= 3; ++k) {
    const double lam = -std::pow(k * kPi, 2);
    const auto w = weight_matrix(f, lam);
    CHECK(w.simple);
    CHECK(std::abs(w.n_matrix(1, 0) - 2.0 * k * k * kPi * kPi) < 1e-8 * std::pow(k * kPi, 2));
    CHECK(std::abs(w.n_matrix(0, 0)) < 1e-9);
    CHECK(std::abs(w.n_matrix(0, 1)) < 1e-12);
    CHECK(std::abs(w.n_matrix(1, 1)) < 1e-9);
  }
}

TEST_CASE("weight matrix converges spectrally in the node count") {
  testing::Rng rng(45);
  const auto sigma = testing::random_piecewise_linear(rng, 1.0);
  const FMatrix f = sl2_matrix(sigma, PiecewisePoly::zero());
  const SystemOperator op(f);
  const auto eig = find_eigenvalues(op, 1, Rect{-60.0, 10.0, -1.0, 1.0}, 1e-12);
  REQUIRE_FALSE(eig.empty());
  WeightOptions a, b;
  a.nodes = 32;
  b.nodes = 64;
  a.tol = b.tol = 1e-12;
  const auto wa = weight_matrix(op, eig[0].lambda0, a);
  const auto wb = weight_matrix(op, eig[0].lambda0, b);
  CHECK((wa.n_matrix - wb.n_matrix).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("weight matrix against a rational-fit residue") {
  testing::Rng rng(46);
  const auto sigma = testing::random_piecewise_linear(rng, 1.0);
  const FMatrix f = sl2_matrix(sigma, PiecewisePoly::zero());
  const SystemOperator op(f);
  const auto eig = find_eigenvalues(op, 1, Rect{-60.0, 10.0, -1.0, 1.0}, 1e-12);
  REQUIRE_FALSE(eig.empty());
  const Complex z0 = eig[0].lambda0;
  const auto w = weight_matrix(op, z0);
  auto m = [&](Complex z) { return weyl_matrix(op, z, 1e-12).m(1, 0); };
  const Complex fit = oracle::rational_fit_residue(m, z0, 0.05);
  CHECK(std::abs(w.n_matrix(1, 0) - fit) < 1e-6 * std::max(1.0, std::abs(fit)));
}

TEST_CASE("weight matrix rejects bad input") {
  WeightOptions opts;
  opts.nodes = 8;
  CHECK(code_of([&] { (void)weight_matrix(zero_matrix(2), -kPi * kPi, opts); }) == ErrorCode::InvalidArgument);
  WeightOptions far;
  far.radius = 0.5;
  CHECK(code_of([&] { (void)weight_matrix(zero_matrix(2), -5.0, far); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("problem index and near-eigenvalue errors") {
  CHECK(code_of([] { (void)char_function(zero_matrix(3), 3, 1.0); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([] { (void)char_function(zero_matrix(3), 0, 1.0); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([] { (void)weyl_matrix(zero_matrix(2), -kPi * kPi, 1e-10); }) == ErrorCode::NearEigenvalue);
  IntegratorOptions bad;
  bad.tol = 0.0;
  CHECK(code_of([&] { (void)integrate(SystemOperator(zero_matrix(2)), 1.0, bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("classical consistency for smooth coefficients") {
  testing::Rng rng(47);
  for (int n = 2; n <= 4; ++n) {
    const auto t = testing::smooth_coefficients(rng, OrderSpec(n), 1.0);
    const FMatrix f = ms_matrix(t);
    CHECK(regularization_residual(t, f, Complex(1.0, 1.0), 1e-10) < 1e-6);
  }
}
