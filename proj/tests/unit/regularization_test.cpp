#include <set>
#include <string>

#include "doctest.h"
#include "regkit/error.hpp"
#include "regkit/regularization.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace regkit;

namespace {

bool same_q(const QMatrix& a, const QMatrix& b) {
  for (int r = 0; r < a.order.q_size(); ++r)
    for (int j = 0; j < a.order.q_size(); ++j)
      if (!exactly_equal(a.q(r, j), b.q(r, j))) return false;
  return true;
}

bool same_f(const FMatrix& a, const FMatrix& b) {
  for (int k = 1; k <= a.order.n(); ++k)
    for (int j = 1; j <= a.order.n(); ++j)
      if (!exactly_equal(a.at(k, j), b.at(k, j))) return false;
  return true;
}

double l2(const PiecewisePoly& a) { return norm(a, NormKind::L2); }

std::vector<long long> chi_entries(const OrderSpec& o, int nu, int i) { return chi(o, nu, i).entries; }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("singularity orders") {
  CHECK(singularity_orders(OrderSpec(2)) == std::vector<int>{1, 0});
  CHECK(singularity_orders(OrderSpec(3)) == std::vector<int>{1, 0, 0});
  CHECK(singularity_orders(OrderSpec(4)) == std::vector<int>{2, 1, 1, 0});
  CHECK(code_of([] { OrderSpec o(1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("chi matrices") {
  CHECK(chi_entries(OrderSpec(2), 1, 0) == std::vector<long long>{0, 1, -1, 0});
  CHECK(chi_entries(OrderSpec(4), 0, 2) == std::vector<long long>{0, 0, 1, 0, 2, 0, 1, 0, 0});
  CHECK(chi_entries(OrderSpec(3), 2, 0) == std::vector<long long>{0, 0, 0, 1});
  for (int n = 2; n <= 8; ++n) {
    const OrderSpec o(n);
    for (const auto& x : chi_basis(o))
      for (int r = 0; r < x.size; ++r)
        for (int j = 0; j < x.size; ++j)
          if (r + j != x.diagonal()) CHECK(x.at(r, j) == 0);
    CHECK(chi_rank(o) == chi_space_dimension(o));
    const int m = o.m();
    CHECK(chi_space_dimension(o) == (o.odd() ? (m + 1) * (m + 1) : (m + 1) * (m + 1) - 1));
  }
}

TEST_CASE("n = 2 Q and F displays") {
  testing::Rng rng(21);
  const auto s0 = testing::dyadic_poly(rng, 2);
  const auto s1 = testing::dyadic_poly(rng, 2);
  const CoefficientSet t(OrderSpec(2), {s0, s1}, false);
  const QMatrix q = assemble_q_ms(t);
  CHECK(exactly_equal(q.q(0, 0), PiecewisePoly::zero()));
  CHECK(exactly_equal(q.q(0, 1), s0 + s1));
  CHECK(exactly_equal(q.q(1, 0), s0 - s1));
  const FMatrix f = s_n(q);
  CHECK(exactly_equal(f.at(1, 1), s1 + s0));
  CHECK(exactly_equal(f.at(1, 2), PiecewisePoly::zero()));
  CHECK(exactly_equal(f.at(2, 1), s1 * s1 - s0 * s0));
  CHECK(exactly_equal(f.at(2, 2), s1 - s0));
  CHECK(same_q(s_n_inverse(f), q));
}

TEST_CASE("n = 4 unit sigma_0 gives chi_{0,2}") {
  const OrderSpec o(4);
  std::vector<PiecewisePoly> sigma(4);
  sigma[0] = PiecewisePoly::constant(1.0);
  const QMatrix q = assemble_q_ms(CoefficientSet(o, sigma, true));
  const long long want[3][3] = {{0, 0, 1}, {0, 2, 0}, {1, 0, 0}};
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < 3; ++j) CHECK(exactly_equal(q.q(r, j), PiecewisePoly::constant(double(want[r][j]))));
}

TEST_CASE("n = 3 S_n by hand expansion") {
  testing::Rng rng(22);
  QMatrix q(OrderSpec(3));
  for (int r = 0; r < 2; ++r)
    for (int j = 0; j < 2; ++j) q.q(r, j) = testing::dyadic_poly(rng, 2);
  const FMatrix f = s_n(q);
  FMatrix want(OrderSpec(3));
  want.at(2, 1) = q.q(0, 1);
  want.at(2, 2) = q.q(1, 1);
  want.at(3, 1) = -q.q(0, 0);
  want.at(3, 2) = -q.q(1, 0);
  CHECK(same_f(f, want));
}

TEST_CASE("S_n is a bijection between the pattern spaces") {
  testing::Rng rng(23);
  for (int n = 2; n <= 6; ++n) {
    const OrderSpec o(n);
    for (int trial = 0; trial < 40; ++trial) {
      const QMatrix q = testing::dyadic_q(rng, o);
      CHECK(same_q(s_n_inverse(s_n(q)), q));
      const FMatrix f = testing::dyadic_f(rng, o);
      CHECK(same_f(s_n(s_n_inverse(f)), f));
      CHECK(check_class(s_n(q), FClass::Fn));
    }
  }
}

TEST_CASE("pattern violations are rejected") {
  QMatrix q(OrderSpec(2));
  q.q(1, 1) = PiecewisePoly::constant(1.0);
  CHECK(code_of([&] { (void)s_n(q); }) == ErrorCode::PatternViolation);
  FMatrix f(OrderSpec(4));
  f.at(1, 1) = PiecewisePoly::constant(1.0);
  CHECK_FALSE(check_class(f, FClass::Fn));
  CHECK(code_of([&] { (void)s_n_inverse(f); }) == ErrorCode::PatternViolation);
}

TEST_CASE("chi decomposition") {
  SUBCASE("n = 2 by hand") {
    testing::Rng rng(24);
    QMatrix q(OrderSpec(2));
    const auto a = testing::dyadic_poly(rng, 2), b = testing::dyadic_poly(rng, 2), c = testing::dyadic_poly(rng, 2);
    q.q(0, 0) = a;
    q.q(0, 1) = b;
    q.q(1, 0) = c;
    const auto d = decompose_chi(q);
    CHECK(exactly_equal(d.at({0, 0}), a));
    CHECK(exactly_equal(d.at({0, 1}), (b + c) * Complex(0.5)));
    CHECK(exactly_equal(d.at({1, 0}), (b - c) * Complex(0.5)));
  }
  SUBCASE("MS matrix decomposes onto the top orders") {
    testing::Rng rng(25);
    for (int n = 2; n <= 6; ++n) {
      const OrderSpec o(n);
      const auto orders = singularity_orders(o);
      const auto t = testing::random_coefficients(rng, o, 1.0, false);
      const auto d = decompose_chi(assemble_q_ms(t));
      for (int nu = 0; nu < n; ++nu)
        for (int i = 0; i <= orders[static_cast<std::size_t>(nu)]; ++i) {
          const auto it = d.find({nu, i});
          const PiecewisePoly v = it == d.end() ? PiecewisePoly::zero() : it->second;
          if (i == orders[static_cast<std::size_t>(nu)])
            CHECK(l2(v - t.sigma[static_cast<std::size_t>(nu)]) < 1e-13);
          else
            CHECK(l2(v) < 1e-13);
        }
    }
  }
  SUBCASE("assemble after decompose is the identity") {
    testing::Rng rng(26);
    for (int n = 2; n <= 6; ++n) {
      const OrderSpec o(n);
      for (int trial = 0; trial < 10; ++trial) {
        const QMatrix q = testing::dyadic_q(rng, o);
        const QMatrix back = assemble_q(o, decompose_chi(q));
        for (int r = 0; r < o.q_size(); ++r)
          for (int j = 0; j < o.q_size(); ++j) CHECK(l2(back.q(r, j) - q.q(r, j)) < 1e-13);
      }
    }
  }
}

TEST_CASE("canonical signature") {
  testing::Rng rng(27);
  SUBCASE("moments vanish and normalization is idempotent") {
    for (int n = 2; n <= 5; ++n) {
      const OrderSpec o(n);
      const auto orders = singularity_orders(o);
      const auto t = testing::random_coefficients(rng, o, 1.0);
      const auto c = canonical_signature(t);
      for (int nu = 0; nu < n; ++nu)
        for (int k = 0; k < orders[static_cast<std::size_t>(nu)]; ++k)
          CHECK(std::abs(moment(c.sigma[static_cast<std::size_t>(nu)], k)) < 1e-13);
      CHECK(signature_distance(c, canonical_signature(c)) < 1e-14);
      CHECK(signature_distance(t, c) < 1e-14);
    }
  }
  SUBCASE("adding a polynomial of degree below i_nu does not change tau") {
    const OrderSpec o(4);
    auto t = testing::random_coefficients(rng, o, 1.0);
    auto u = t;
    u.sigma[0] += PiecewisePoly::polynomial({0.7, -1.3});  // i_0 = 2
    u.sigma[1] += PiecewisePoly::constant(2.5);            // i_1 = 1
    CHECK(signature_distance(t, u) < 1e-13);
    u.sigma[2] += PiecewisePoly::polynomial({0.0, 0.1});  // degree i_2: a genuine change
    CHECK(signature_distance(t, u) > 1e-2);
  }
}

TEST_CASE("n = 2 reconstructed signature of r") {
  testing::Rng rng(28);
  const auto r = testing::random_poly(rng, 2, 1.0);
  ChiDecomposition d;
  d[{0, 0}] = r;
  d[{0, 1}] = PiecewisePoly::zero();
  const auto sig = reconstruct_signature(d, OrderSpec(2));
  const auto want = moment_normalize(-antiderivative(r, 1), 1);
  CHECK(l2(sig.sigma[0] - want) < 1e-13);
  CHECK(l2(sig.sigma[1]) < 1e-13);
}

TEST_CASE("family members") {
  testing::Rng rng(29);
  SUBCASE("zero parameters give the MS matrix of the canonical signature") {
    for (int n = 2; n <= 5; ++n) {
      const OrderSpec o(n);
      const auto t = testing::random_coefficients(rng, o, 1.0);
      const FMatrix a = family_matrix(t, {});
      const FMatrix b = ms_matrix(canonical_signature(t));
      for (int k = 1; k <= n; ++k)
        for (int j = 1; j <= n; ++j) CHECK(l2(a.at(k, j) - b.at(k, j)) < 1e-13);
    }
  }
  SUBCASE("n = 2 with r and an additive constant") {
    const OrderSpec o(2);
    const auto sigma = testing::random_piecewise_linear(rng, 1.0);
    const CoefficientSet t(o, {sigma, PiecewisePoly::zero()}, true);
    const auto r = testing::random_poly(rng, 2, 1.0);
    FamilyParams p;
    p.tau[{0, 0}] = r;
    p.c[{0, 0}] = 0.375;
    const FMatrix f = family_matrix(t, p);
    // tau_{0,1} = (tau_{0,0} - tau_0)^{(-1)} + c_{0,0} and f_21 = -(q_00 + q_01 q_10),
    // so the r of the [[s, 0], [-s^2 + r, -s]] form is -tau_{0,0}.
    const auto base = moment_normalize(sigma, 1) + moment_normalize(antiderivative(r, 1), 1);
    const auto s = base + PiecewisePoly::constant(0.375);
    CHECK(l2(f.at(1, 1) - s) < 1e-12);
    CHECK(l2(f.at(2, 2) + s) < 1e-12);
    CHECK(l2(f.at(2, 1) - (-r - s * s)) < 1e-12);
    CHECK(check_class(f, FClass::Fn0, 1e-12));
  }
  SUBCASE("signature stability over random parameters") {
    for (int n = 2; n <= 6; ++n) {
      const OrderSpec o(n);
      const auto t = testing::random_coefficients(rng, o, 1.0);
      for (int trial = 0; trial < 5; ++trial) {
        const FMatrix f = family_matrix(t, testing::random_params(rng, o, 1.0));
        CHECK(check_class(f, FClass::Fn));
        CHECK(signature_distance(signature_of(f), t) < 1e-12);
      }
    }
  }
  SUBCASE("parameter keys out of range are rejected") {
    const OrderSpec o(2);
    const auto t = testing::random_coefficients(rng, o, 1.0);
    FamilyParams p;
    p.c[{0, 1}] = 1.0;  // i_0 = 1, so only (0, 0) is free
    CHECK(code_of([&] { (void)family_matrix(t, p); }) == ErrorCode::KeyRangeError);
  }
}

TEST_CASE("disjointness of families") {
  // Members of different families carry different signatures; hashing the
  // canonical signatures of many members shows no collisions across sets.
  testing::Rng rng(30);
  for (int n = 2; n <= 4; ++n) {
    const OrderSpec o(n);
    std::vector<CoefficientSet> sets;
    for (int s = 0; s < 4; ++s) sets.push_back(canonical_signature(testing::random_coefficients(rng, o, 1.0)));
    std::set<std::pair<long long, int>> seen;
    for (std::size_t s = 0; s < sets.size(); ++s)
      for (int trial = 0; trial < 4; ++trial) {
        const auto sig = signature_of(family_matrix(sets[s], testing::random_params(rng, o, 1.0)));
        int owner = -1;
        for (std::size_t u = 0; u < sets.size(); ++u)
          if (signature_distance(sig, sets[u]) < 1e-10) {
            CHECK(owner == -1);
            owner = static_cast<int>(u);
          }
        CHECK(owner == static_cast<int>(s));
        const long long key = std::llround(1e6 * norm(sig.sigma[0], NormKind::L2));
        seen.insert({key, owner});
      }
    std::set<long long> keys;
    for (const auto& [key, owner] : seen) keys.insert(key);
    CHECK(keys.size() == sets.size());
  }
}

TEST_CASE("regularization identity for polynomial coefficients") {
  // y^[n] from the quasi-derivative chain equals l_n(y) from its defining
  // sum, both in dense polynomial algebra.
  testing::Rng rng(31);
  for (int n = 2; n <= 6; ++n) {
    const OrderSpec o(n);
    for (int trial = 0; trial < 5; ++trial) {
      const auto t = testing::smooth_coefficients(rng, o, 1.0);
      const FMatrix f = ms_matrix(t);
      const auto taus = oracle::classical_taus(o, t.sigma);
      std::vector<oracle::C> y(12);
      for (auto& v : y) v = rng.uniform(-1.0, 1.0);
      const auto lhs = oracle::classical_expression(o, taus, y);
      const auto rhs = oracle::quasi_derivative_n(f, y);
      const auto diff = oracle::d_add(lhs, rhs, -1.0);
      double worst = 0.0;
      for (const auto& v : diff) worst = std::max(worst, std::abs(v));
      CHECK(worst < 1e-9);
      // The library's classical evaluation agrees with the oracle's.
      const auto lib = classical_expression(o, classical_taus(t), PiecewisePoly::polynomial(y));
      for (double x : {0.1, 0.5, 0.9}) CHECK(std::abs(lib(x) - oracle::d_eval(lhs, x)) < 1e-8);
    }
  }
}
