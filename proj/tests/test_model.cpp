#include <doctest.h>

#include <cmath>
#include <random>

#include "bifurcade/error.hpp"
#include "bifurcade/integrator.hpp"
#include "bifurcade/model.hpp"
#include "support/oracles.hpp"

using namespace bifurcade;
using Eigen::VectorXd;

namespace {

SpectralModel ch(double b2 = 0.0, double b3 = 1.0, int n = 8, double L = std::numbers::pi) {
  return build_cahn_hilliard_1d(L, b2, b3, n);
}

/// Random gradient-free model with symmetric tensors.
SpectralModel random_model(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModelDescription d;
  d.label = "random";
  for (int k = 0; k < n; ++k) {
    d.mu.push_back(k + 1.0);
    d.linear.push_back({u(rng), u(rng), 0.3 * u(rng)});
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        d.add_quadratic(k, i, j, u(rng));
        for (int l = j; l < n; ++l) d.add_cubic(k, i, j, l, u(rng));
      }
  return build_custom(std::move(d));
}

}  // namespace

TEST_CASE("cahn-hilliard spectrum and linear part") {
  const auto m = ch(0.0, 1.0, 5);
  const std::vector<double> mu(m.mu().begin(), m.mu().end());
  for (int k = 0; k < 5; ++k) {
    CHECK(mu[k] == doctest::Approx((k + 1.0) * (k + 1.0)).epsilon(1e-14));
    CHECK(m.linear_c0()[k] == doctest::Approx(mu[k] * mu[k]));
    CHECK(m.linear_c1()[k] == doctest::Approx(mu[k]));
  }
  CHECK(m.affine());
  // beta_k(lambda) = mu_k (mu_k - lambda)
  CHECK(m.beta(0, 0.5) == doctest::Approx(0.5));
  CHECK(m.beta(2, 9.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cahn-hilliard builder rejects bad input") {
  CHECK_THROWS_AS(ch(0.0, 0.0), Error);
  CHECK_THROWS_AS(ch(0.0, -1.0), Error);
  CHECK_THROWS_AS(ch(0.0, 1.0, 2), Error);
  try {
    ch(0.0, 1.0, 2);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidModel);
  }
}

TEST_CASE("cahn-hilliard tensors match quadrature and are symmetric") {
  for (double L : {std::numbers::pi, 2.5}) {
    const auto m = ch(0.7, 1.3, 5, L);
    for (int k = 1; k <= 5; ++k) {
      for (int i = 1; i <= 5; ++i) {
        for (int j = 1; j <= 5; ++j) {
          const double q = m.quadratic(k - 1, i - 1, j - 1);
          CHECK(std::abs(q - 0.7 * oracle::ch_quadratic_entry(L, k, i, j)) <= 1e-10);
          CHECK(q == m.quadratic(k - 1, j - 1, i - 1));
          for (int l = 1; l <= 5; ++l) {
            const double c = m.cubic(k - 1, i - 1, j - 1, l - 1);
            CHECK(std::abs(c - 1.3 * oracle::ch_cubic_entry(L, k, i, j, l)) <= 1e-10);
            CHECK(c == m.cubic(k - 1, j - 1, i - 1, l - 1));
            CHECK(c == m.cubic(k - 1, l - 1, j - 1, i - 1));
            CHECK(c == m.cubic(k - 1, i - 1, l - 1, j - 1));
          }
        }
      }
    }
  }
}

TEST_CASE("mode-1 self cubic is -3/4 on L = pi") {
  const auto m = ch(0.0, 1.0, 5);
  CHECK(m.cubic(0, 0, 0, 0) == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(std::abs(oracle::ch_cubic_entry(std::numbers::pi, 1, 1, 1, 1) + 0.75) < 1e-12);
}

TEST_CASE("cube integrals of single cosine modes vanish") {
  for (double L : {1.0, std::numbers::pi, 7.3}) {
    const auto m = ch(0.4, 1.0, 6, L);
    for (int k = 0; k < 6; ++k) {
      const double closed = check_cube_integral(m, k);
      const double c = std::numbers::pi / L;
      const double q = oracle::quad([&](double x) { return std::pow(std::cos((k + 1) * c * x), 3); }, 0.0, L);
      CHECK(closed == 0.0);
      CHECK(std::abs(closed - q) <= 1e-12);
    }
  }
}

TEST_CASE("declared cube integrals are echoed and missing ones are unsupported") {
  ModelDescription d;
  d.label = "declared";
  d.mu = {1.0};
  d.linear = {{0.0, -1.0}};
  d.add_quadratic(0, 0, 0, -1.0);
  d.gradient = GradientInfo{{1.0}, std::nullopt, {2.5}};
  const auto m = build_custom(d);
  CHECK(check_cube_integral(m, 0) == 2.5);

  ModelDescription bare = d;
  bare.gradient.reset();
  try {
    check_cube_integral(build_custom(bare), 0);
    FAIL("expected Unsupported");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unsupported);
  }
}

TEST_CASE("vector field examples") {
  const auto m = ch(0.0, 1.0, 8);
  CHECK(vector_field(m, 3.3, VectorXd::Zero(8)).norm() == 0.0);

  VectorXd a = VectorXd::Zero(8);
  a[0] = 0.4;
  const double lambda = 2.2;
  const VectorXd f = vector_field(m, lambda, a);
  CHECK(f[0] == doctest::Approx((lambda - 1.0) * 0.4 - 0.75 * std::pow(0.4, 3)).epsilon(1e-13));
  CHECK(f[2] == doctest::Approx(-2.25 * std::pow(0.4, 3)).epsilon(1e-13));
  CHECK(f[1] == 0.0);

  ModelDescription d;
  d.label = "uncoupled";
  d.mu = {1.0};
  d.linear = {{0.0, -1.0}};
  const auto single = build_custom(d);
  CHECK(vector_field(single, 3.0, VectorXd::Constant(1, 2.0))[0] == doctest::Approx(6.0));

  CHECK_THROWS_AS(vector_field(m, 1.0, VectorXd::Zero(3)), Error);
}

TEST_CASE("jacobian at zero is diagonal") {
  const auto m = ch(0.5, 1.0, 6);
  const auto J = jacobian(m, 1.0, VectorXd::Zero(6));
  for (int k = 0; k < 6; ++k) {
    const double mu = (k + 1.0) * (k + 1.0);
    CHECK(J(k, k) == doctest::Approx(-mu * (mu - 1.0)));
  }
  CHECK((J - Eigen::MatrixXd(J.diagonal().asDiagonal())).norm() == 0.0);
  CHECK_THROWS_AS(jacobian(m, 1.0, VectorXd::Zero(2)), Error);
}

TEST_CASE("jacobian matches central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(-2.0, 12.0);
  const auto models = std::vector<SpectralModel>{ch(0.0, 1.0, 6), ch(1.2, 0.8, 5), random_model(rng, 4)};
  for (const auto& m : models) {
    for (int s = 0; s < 100; ++s) {
      const double lambda = lam(rng);
      const VectorXd a = oracle::random_vector(rng, m.dim(), 1.0);
      const auto J = jacobian(m, lambda, a);
      Eigen::MatrixXd fd(m.dim(), m.dim());
      const double h = 1e-5;
      for (int j = 0; j < m.dim(); ++j) {
        VectorXd ap = a, am = a;
        ap[j] += h;
        am[j] -= h;
        fd.col(j) = (vector_field(m, lambda, ap) - vector_field(m, lambda, am)) / (2 * h);
      }
      CHECK((J - fd).norm() / std::max(1.0, J.norm()) <= 1e-6);
    }
  }
}

TEST_CASE("add_quadratic and add_cubic fill every permutation; asymmetry is rejected") {
  ModelDescription d;
  d.label = "perm";
  d.mu = {1.0, 2.0, 3.0};
  d.linear = {{1.0}, {1.0}, {1.0}};
  d.add_cubic(0, 0, 1, 2, 0.5);
  d.add_quadratic(1, 0, 2, -0.25);
  const auto m = build_custom(d);
  CHECK(m.cubic(0, 2, 1, 0) == 0.5);
  CHECK(m.cubic(0, 1, 0, 2) == 0.5);
  CHECK(m.quadratic(1, 2, 0) == -0.25);

  ModelDescription bad = d;
  bad.quadratic.push_back({0, 0, 1, 1.0});
  CHECK_THROWS_AS(build_custom(bad), Error);

  ModelDescription unsorted = d;
  unsorted.mu = {2.0, 1.0, 3.0};
  CHECK_THROWS_AS(build_custom(unsorted), Error);
}

TEST_CASE("custom model examples") {
  ModelDescription p;
  p.label = "pitchfork";
  p.mu = {1.0};
  p.linear = {{0.0, -1.0}};
  p.add_cubic(0, 0, 0, 0, -1.0);
  const auto pitch = build_custom(p);
  CHECK(vector_field(pitch, 0.5, VectorXd::Constant(1, 0.3))[0] == doctest::Approx(0.5 * 0.3 - 0.027));

  ModelDescription t;
  t.label = "transcritical";
  t.mu = {1.0};
  t.linear = {{0.0, -1.0}};
  t.add_quadratic(0, 0, 0, -2.0);
  const auto trans = build_custom(t);
  CHECK(vector_field(trans, 0.5, VectorXd::Constant(1, 0.3))[0] == doctest::Approx(0.15 - 2.0 * 0.09));

  ModelDescription r;
  r.label = "reconnect";
  r.mu = {1.0};
  r.linear = {{2.0, -3.0, 1.0}};  // beta = (lambda - 1)(lambda - 2)
  r.add_cubic(0, 0, 0, 0, -1.0);
  const auto rec = build_custom(r);
  CHECK(!rec.affine());
  CHECK(vector_field(rec, 1.5, VectorXd::Constant(1, 0.5))[0] == doctest::Approx(0.25 * 0.5 - 0.125));
}

TEST_CASE("lyapunov functional") {
  const auto m = ch(0.0, 1.0, 6);
  CHECK(lyapunov_value(m, 2.0, VectorXd::Zero(6)) == 0.0);

  // Single mode: (pi/2) alpha^2 / 2 - (lambda / 2)(pi / 2) alpha^2 + (b3 / 4)(3 pi / 8) alpha^4
  for (double alpha : {0.1, 0.5, 1.3}) {
    for (double lambda : {0.0, 1.5}) {
      VectorXd a = VectorXd::Zero(6);
      a[0] = alpha;
      const double closed = 0.5 * (std::numbers::pi / 2) * alpha * alpha -
                            0.5 * lambda * (std::numbers::pi / 2) * alpha * alpha +
                            0.25 * (3 * std::numbers::pi / 8) * std::pow(alpha, 4);
      const double quad = oracle::quad(
          [&](double x) {
            const double u = alpha * std::cos(x), ux = -alpha * std::sin(x);
            return 0.5 * ux * ux - 0.5 * lambda * u * u + 0.25 * u * u * u * u;
          },
          0.0, std::numbers::pi);
      CHECK(lyapunov_value(m, lambda, a) == doctest::Approx(closed).epsilon(1e-12));
      CHECK(closed == doctest::Approx(quad).epsilon(1e-12));
    }
  }
  ModelDescription bare;
  bare.label = "bare";
  bare.mu = {1.0};
  bare.linear = {{1.0}};
  CHECK_THROWS_AS(lyapunov_value(build_custom(bare), 0.0, VectorXd::Zero(1)), Error);
}

TEST_CASE("the flow is the weighted negative gradient of J") {
  std::mt19937_64 rng(3);
  const auto m = ch(0.9, 1.1, 5, 3.7);
  const auto& w = m.gradient_info()->weights;
  for (int s = 0; s < 20; ++s) {
    const VectorXd a = oracle::random_vector(rng, 5, 0.8);
    const double lambda = 3.0 * s / 20.0;
    const VectorXd f = vector_field(m, lambda, a);
    for (int k = 0; k < 5; ++k) {
      VectorXd ap = a, am = a;
      const double h = 1e-5;
      ap[k] += h;
      am[k] -= h;
      const double grad = (lyapunov_value(m, lambda, ap) - lyapunov_value(m, lambda, am)) / (2 * h);
      CHECK(std::abs(-grad / w[k] - f[k]) <= 1e-6 * std::max(1.0, std::abs(f[k])));
    }
  }
}

TEST_CASE("integration: decay below the first crossing") {
  const auto m = ch(0.0, 1.0, 8);
  VectorXd a0 = VectorXd::Zero(8);
  a0[0] = 0.01;
  a0[1] = -0.005;
  const auto traj = integrate(m, 0.5, a0, 50.0, 1e-10);
  CHECK(traj.status == IntegrationStatus::Completed);
  CHECK(traj.final_state().norm() < 1e-8);
}

TEST_CASE("integration: equilibria stay put and the pitchfork state is reached") {
  const auto m = ch(0.0, 1.0, 8);
  const auto still = integrate(m, 2.0, VectorXd::Zero(8), 10.0, 1e-10);
  CHECK(still.final_state().norm() == 0.0);

  VectorXd a0 = VectorXd::Zero(8);
  a0[0] = 0.01;
  const auto traj = integrate(m, 1.1, a0, 400.0, 1e-10);
  REQUIRE(traj.status == IntegrationStatus::Completed);
  const double expected = std::sqrt(4.0 * 0.1 / 3.0);
  // The full system differs from the reduced law by the slaved mode-3 correction.
  CHECK(std::abs(std::abs(traj.final_state()[0]) - expected) < 1e-3);
  CHECK(vector_field(m, 1.1, traj.final_state()).norm() <= 10 * 1e-8);
}

TEST_CASE("integration: J is non-increasing along trajectories") {
  std::mt19937_64 rng(5);
  for (double b2 : {0.0, 0.8}) {
    const auto m = ch(b2, 1.0, 6);
    for (int s = 0; s < 4; ++s) {
      const VectorXd a0 = oracle::random_vector(rng, 6, 0.6);
      const double lambda = 2.0 + 3.0 * s;
      const auto traj = integrate(m, lambda, a0, 20.0, 1e-10);
      REQUIRE(traj.states.size() > 2);
      double prev = lyapunov_value(m, lambda, traj.states.front());
      for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const double j = lyapunov_value(m, lambda, traj.states[i]);
        CHECK(j <= prev + 1e-9 * std::max(1.0, std::abs(prev)));
        prev = j;
      }
    }
  }
}

TEST_CASE("integration: blow-up is reported, not thrown") {
  ModelDescription d;
  d.label = "blowup";
  d.mu = {1.0};
  d.linear = {{0.0}};
  d.add_quadratic(0, 0, 0, 1.0);  // a' = a^2
  const auto m = build_custom(d);
  IntegrationOptions opts;
  opts.blowup_bound = 1e3;
  const auto traj = integrate(m, 0.0, VectorXd::Constant(1, 1.0), 5.0, opts);
  CHECK(traj.status == IntegrationStatus::Diverged);
}

TEST_CASE("integration: explicit and stiff paths agree") {
  const auto m = ch(0.3, 1.0, 4);
  VectorXd a0 = VectorXd::Zero(4);
  a0[0] = 0.2;
  a0[1] = 0.1;
  IntegrationOptions e, s;
  e.method = IntegrationMethod::Explicit;
  s.method = IntegrationMethod::Stiff;
  const auto te = integrate(m, 1.5, a0, 20.0, e);
  const auto ts = integrate(m, 1.5, a0, 20.0, s);
  CHECK((te.final_state() - ts.final_state()).norm() < 1e-6);
}

TEST_CASE("v_norm") {
  const auto m = ch(0.0, 1.0, 3);
  VectorXd a(3);
  a << 1.0, 1.0, 1.0;
  CHECK(v_norm(m, a) == doctest::Approx(std::sqrt(1.0 + 4.0 + 9.0)));
}
