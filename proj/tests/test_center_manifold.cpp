#include <doctest.h>

#include <cmath>

#include "bifurcade/center_manifold.hpp"
#include "bifurcade/error.hpp"
#include "bifurcade/integrator.hpp"
#include "support/oracles.hpp"

using namespace bifurcade;
using Eigen::VectorXd;

namespace {

struct Setup {
  SpectralModel model;
  CrossingData crossing;
  ReducedField reduced;
};

Setup ch_reduction(double b2, double b3, double lambda0, int order, int n = 8) {
  auto m = build_cahn_hilliard_1d(std::numbers::pi, b2, b3, n);
  auto c = crossing_data(m, lambda0);
  auto r = reduce(m, c, order);
  return {std::move(m), std::move(c), std::move(r)};
}

const MultiPoly* slave_of(const ReducedField& r, int mode) {
  for (const auto& s : r.slave)
    if (s.mode == mode) return &s.map;
  return nullptr;
}

}  // namespace

TEST_CASE("reduced field and slave map against the exact rational oracle") {
  struct Case {
    int b2_num, b2_den, b3_num, b3_den, center, order;
  };
  for (const Case& c : {Case{0, 1, 1, 1, 1, 3}, Case{1, 1, 1, 1, 1, 3}, Case{3, 2, 2, 1, 1, 5},
                        Case{1, 2, 1, 1, 2, 4}, Case{0, 1, 3, 1, 3, 5}}) {
    const oracle::Rational b2(c.b2_num, c.b2_den), b3(c.b3_num, c.b3_den);
    const int n = 8;
    const auto exact = oracle::ch_exact_reduction(b2, b3, n, c.center, c.order);
    const auto s = ch_reduction(oracle::to_double(b2), oracle::to_double(b3), c.center * c.center, c.order, n);
    CAPTURE(c.b2_num);
    CAPTURE(c.center);
    CHECK(s.reduced.unfolding[0] == doctest::Approx(c.center * c.center));
    for (int d = 2; d <= c.order; ++d) {
      CHECK(std::abs(s.reduced.nonlinear[0].coefficient({d}) - oracle::to_double(exact.reduced[d])) <= 1e-8);
      for (const auto& [mode, series] : exact.slave) {
        const MultiPoly* xi = slave_of(s.reduced, mode - 1);
        const double got = xi ? xi->coefficient({d}) : 0.0;
        CHECK(std::abs(got - oracle::to_double(series[d])) <= 1e-8);
      }
    }
  }
}

TEST_CASE("closed-form coefficients at the first crossing") {
  for (double b2 : {0.0, 1.0, 2.5}) {
    const double b3 = 1.0;
    const auto s = ch_reduction(b2, b3, 1.0, 3);
    CHECK(std::abs(s.reduced.nonlinear[0].coefficient({3}) - (b2 * b2 / 6.0 - 0.75 * b3)) <= 1e-8);
    const MultiPoly* xi2 = slave_of(s.reduced, 1);
    if (b2 != 0.0) {
      REQUIRE(xi2);
      CHECK(std::abs(xi2->coefficient({2}) + b2 / 6.0) <= 1e-8);
    }
    const MultiPoly* xi3 = slave_of(s.reduced, 2);
    REQUIRE(xi3);
    // The mode-3 cubic slave picks up a quadratic-interaction term b2^2 / 48 besides -b3 / 32.
    CHECK(std::abs(xi3->coefficient({3}) - (-b3 / 32.0 + b2 * b2 / 48.0)) <= 1e-8);
  }
}

TEST_CASE("slave map tangency and order consistency") {
  const auto s3 = ch_reduction(0.8, 1.0, 1.0, 3);
  const auto s2 = ch_reduction(0.8, 1.0, 1.0, 2);
  for (const auto& sl : s3.reduced.slave) {
    CHECK(sl.map.coefficient({0}) == 0.0);
    CHECK(sl.map.coefficient({1}) == 0.0);
    CHECK(sl.map.min_degree() != 0);
    CHECK(sl.map.min_degree() != 1);
  }
  CHECK(s3.reduced.nonlinear[0].coefficient({1}) == 0.0);
  CHECK(s2.reduced.nonlinear[0].coefficient({2}) == s3.reduced.nonlinear[0].coefficient({2}));
  for (const auto& sl : s2.reduced.slave) {
    const MultiPoly* other = slave_of(s3.reduced, sl.mode);
    REQUIRE(other);
    CHECK(sl.map.coefficient({2}) == other->coefficient({2}));
  }
}

TEST_CASE("odd symmetry for b2 = 0") {
  const auto s = ch_reduction(0.0, 1.0, 1.0, 5);
  for (int d = 2; d <= 5; d += 2) CHECK(std::abs(s.reduced.nonlinear[0].coefficient({d})) <= 1e-12);
  for (const auto& sl : s.reduced.slave) {
    if ((sl.mode + 1) % 2 == 1)
      for (int d = 2; d <= 5; d += 2) CHECK(std::abs(sl.map.coefficient({d})) <= 1e-12);
  }
}

TEST_CASE("invariance residual decays at order p + 1") {
  for (int order : {2, 3, 4}) {
    for (double b2 : {0.0, 1.0}) {
      const auto s = ch_reduction(b2, 1.0, 1.0, order);
      for (double h : {1e-1, 5e-2}) {
        const double ratio = invariance_residual(s.model, s.reduced, h) / invariance_residual(s.model, s.reduced, h / 2);
        CAPTURE(order);
        CAPTURE(b2);
        CAPTURE(h);
        CHECK(ratio >= std::pow(2.0, order + 1) * 0.8);
      }
    }
  }
}

TEST_CASE("a corrupted coefficient spoils the decay") {
  auto s = ch_reduction(1.0, 1.0, 1.0, 3);
  for (auto& sl : s.reduced.slave)
    if (sl.mode == 1) sl.map.add_term({2}, 1e-2);
  const double ratio = invariance_residual(s.model, s.reduced, 0.05) / invariance_residual(s.model, s.reduced, 0.025);
  CHECK(ratio < 5.0);
  CHECK(ratio > 3.0);
}

TEST_CASE("linear models have zero residual and a one-mode model reduces to itself") {
  ModelDescription d;
  d.label = "linear";
  d.mu = {1.0, 2.0, 3.0};
  d.linear = {{1.0, -1.0}, {3.0}, {5.0}};
  const auto lin = build_custom(d);
  const auto rl = reduce(lin, crossing_data(lin, 1.0), 3);
  CHECK(invariance_residual(lin, rl, 0.1) == 0.0);
  CHECK(rl.nonlinear[0].is_zero());

  ModelDescription p;
  p.label = "scalar";
  p.mu = {1.0};
  p.linear = {{0.0, -1.0}};
  p.add_quadratic(0, 0, 0, 0.3);
  p.add_cubic(0, 0, 0, 0, -1.0);
  const auto one = build_custom(p);
  const auto r = reduce(one, crossing_data(one, 0.0), 3);
  CHECK(r.slave.empty());
  CHECK(r.nonlinear[0].coefficient({2}) == doctest::Approx(0.3));
  CHECK(r.nonlinear[0].coefficient({3}) == doctest::Approx(-1.0));
  for (double w : {-0.4, 0.2, 0.7})
    CHECK(evaluate_reduced(r, 0.25, VectorXd::Constant(1, w))[0] ==
          doctest::Approx(vector_field(one, 0.25, VectorXd::Constant(1, w))[0]));
}

TEST_CASE("evaluate_reduced examples") {
  const auto s = ch_reduction(0.0, 1.0, 1.0, 3);
  CHECK(evaluate_reduced(s.reduced, 0.1, VectorXd::Zero(1)).norm() == 0.0);
  const double w = std::sqrt(0.4 / 3.0);
  CHECK(std::abs(evaluate_reduced(s.reduced, 0.1, VectorXd::Constant(1, w))[0]) < 1e-14);
  CHECK(evaluate_reduced(s.reduced, 0.0, VectorXd::Constant(1, 0.3))[0] ==
        doctest::Approx(s.reduced.nonlinear[0].evaluate(VectorXd::Constant(1, 0.3))));
  const auto J = reduced_jacobian(s.reduced, 0.1, VectorXd::Constant(1, w));
  CHECK(J(0, 0) == doctest::Approx(0.1 - 2.25 * w * w));
}

TEST_CASE("lifted reduced equilibria are full equilibria to order p + 1") {
  for (double b2 : {0.0, 0.5}) {
    const auto s = ch_reduction(b2, 1.0, 1.0, 3);
    const double c3 = s.reduced.nonlinear[0].coefficient({3});
    auto residual = [&](double nu) {
      const VectorXd w = VectorXd::Constant(1, std::sqrt(-nu / c3));
      return vector_field(s.model, 1.0 + nu, lift(s.reduced, w)).norm();
    };
    // |w| halves when nu is divided by four.
    CHECK(residual(0.04) / residual(0.01) >= std::pow(2.0, 4) * 0.8);
  }
  const auto s = ch_reduction(0.0, 1.0, 1.0, 3);
  const VectorXd w = VectorXd::Constant(1, 0.2);
  const VectorXd lifted = lift(s.reduced, w);
  CHECK(lifted[0] == w[0]);
  CHECK(lifted[2] == doctest::Approx(-std::pow(w[0], 3) / 32.0));
}

TEST_CASE("reduced equilibrium agrees with the brute-force steady state") {
  const auto s = ch_reduction(0.0, 1.0, 1.0, 3);
  const double w = std::sqrt(4.0 * 0.1 / 3.0);
  VectorXd a0 = VectorXd::Zero(8);
  a0[0] = 0.01;
  const auto ss = integrate_to_steady_state(s.model, 1.1, a0, 4000.0);
  REQUIRE(ss.converged);
  CHECK(std::abs(ss.state[0] - w) < 1e-3);
  CHECK((lift(s.reduced, VectorXd::Constant(1, w)) - ss.state).norm() < 1e-3);
}

TEST_CASE("inconsistent crossing is rejected") {
  const auto m = build_cahn_hilliard_1d(std::numbers::pi, 0.0, 1.0, 4);
  auto c = crossing_data(m, 4.0);
  c.center_modes = {0};
  try {
    reduce(m, c, 3);
    FAIL("expected InconsistentCrossing");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InconsistentCrossing);
  }
  CHECK_THROWS_AS(reduce(m, crossing_data(m, 1.0), 6), Error);
}
