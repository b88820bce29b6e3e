#include "bifurcade/center_manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "bifurcade/error.hpp"

namespace bifurcade {

namespace {

/// Degree-`degree` part of the model nonlinearity N(u) for polynomial inputs u.
std::vector<MultiPoly> nonlinearity_part(const SpectralModel& model, const std::vector<MultiPoly>& u,
                                         int nvars, int degree) {
  const int dim = model.dim();
  std::vector<MultiPoly> out(dim, MultiPoly(nvars));
  std::vector<std::vector<MultiPoly>> pair(dim);
  std::vector<std::vector<bool>> have(dim, std::vector<bool>(dim, false));
  auto product = [&](int i, int j) -> const MultiPoly& {
    if (pair[i].empty()) pair[i].assign(dim, MultiPoly(nvars));
    if (!have[i][j]) {
      pair[i][j] = multiply_truncated(u[i], u[j], degree);
      have[i][j] = true;
    }
    return pair[i][j];
  };

  for (const auto& t : model.quadratic_terms()) {
    if (u[t.i].is_zero() || u[t.j].is_zero()) continue;
    MultiPoly term = product(t.i, t.j).homogeneous_part(degree);
    term *= t.value;
    out[t.k] += term;
  }
  for (const auto& t : model.cubic_terms()) {
    if (u[t.i].is_zero() || u[t.j].is_zero() || u[t.l].is_zero()) continue;
    MultiPoly term = multiply_truncated(product(t.i, t.j), u[t.l], degree).homogeneous_part(degree);
    term *= t.value;
    out[t.k] += term;
  }
  return out;
}

bool is_center(const ReducedField& r, int k) {
  return std::find(r.center_modes.begin(), r.center_modes.end(), k) != r.center_modes.end();
}

}  // namespace

ReducedField reduce(const SpectralModel& model, const CrossingData& crossing, int order) {
  if (order < 2 || order > 5) throw Error(ErrorKind::InvalidArgument, "reduction order must be in 2..5");
  if (crossing.center_modes.empty()) throw Error(ErrorKind::InvalidArgument, "crossing has no center modes");

  ReducedField r;
  r.lambda0 = crossing.lambda0;
  r.center_modes = crossing.center_modes;
  r.n = static_cast<int>(crossing.center_modes.size());
  r.order = order;
  r.model_dim = model.dim();
  r.unfolding.resize(r.n);
  for (int c = 0; c < r.n; ++c) {
    const int k = r.center_modes[c];
    if (k < 0 || k >= model.dim()) throw Error(ErrorKind::InvalidArgument, "center mode out of range");
    r.unfolding[c] = -model.beta_slope(k, r.lambda0);
  }

  std::vector<MultiPoly> u(model.dim(), MultiPoly(r.n));
  for (int c = 0; c < r.n; ++c) u[r.center_modes[c]] = MultiPoly::variable(r.n, c);

  std::vector<double> slave_beta(model.dim(), 0.0);
  for (int k = 0; k < model.dim(); ++k) {
    if (is_center(r, k)) continue;
    slave_beta[k] = model.beta(k, r.lambda0);
    const auto c = model.linear_coefficients(k);
    double scale = 1.0;
    for (double v : c) scale = std::max(scale, std::abs(v));
    if (std::abs(slave_beta[k]) <= 1e-12 * scale * std::max(1.0, std::abs(r.lambda0))) {
      std::ostringstream os;
      os << "mode " << k + 1 << " is neutral at lambda0 = " << r.lambda0 << " but not listed as a center mode";
      throw Error(ErrorKind::InconsistentCrossing, os.str());
    }
    r.slave.push_back({k, MultiPoly(r.n)});
  }
  r.nonlinear.assign(r.n, MultiPoly(r.n));

  for (int d = 2; d <= order; ++d) {
    const auto forcing = nonlinearity_part(model, u, r.n, d);
    // Homological equation at degree d; lower-degree data is already final.
    for (auto& s : r.slave) {
      MultiPoly transport(r.n);
      for (int c = 0; c < r.n; ++c) {
        const MultiPoly grad = s.map.derivative(c);
        if (grad.is_zero() || r.nonlinear[c].is_zero()) continue;
        transport += multiply_truncated(grad, r.nonlinear[c], d).homogeneous_part(d);
      }
      MultiPoly update = forcing[s.mode] - transport;
      update *= 1.0 / slave_beta[s.mode];
      s.map += update;
    }
    for (int c = 0; c < r.n; ++c) r.nonlinear[c] += forcing[r.center_modes[c]];
    for (const auto& s : r.slave) u[s.mode] = s.map;
  }
  return r;
}

Eigen::VectorXd evaluate_reduced(const ReducedField& reduced, double nu,
                                 const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (w.size() != reduced.n) throw Error(ErrorKind::InvalidState, "reduced state has wrong dimension");
  Eigen::VectorXd f(reduced.n);
  for (int c = 0; c < reduced.n; ++c) f[c] = reduced.unfolding[c] * nu * w[c] + reduced.nonlinear[c].evaluate(w);
  return f;
}

Eigen::MatrixXd reduced_jacobian(const ReducedField& reduced, double nu,
                                 const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (w.size() != reduced.n) throw Error(ErrorKind::InvalidState, "reduced state has wrong dimension");
  Eigen::MatrixXd jac(reduced.n, reduced.n);
  for (int c = 0; c < reduced.n; ++c) {
    for (int v = 0; v < reduced.n; ++v) jac(c, v) = reduced.nonlinear[c].derivative(v).evaluate(w);
    jac(c, c) += reduced.unfolding[c] * nu;
  }
  return jac;
}

Eigen::VectorXd lift(const ReducedField& reduced, const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (w.size() != reduced.n) throw Error(ErrorKind::InvalidState, "reduced state has wrong dimension");
  Eigen::VectorXd a = Eigen::VectorXd::Zero(reduced.model_dim);
  for (int c = 0; c < reduced.n; ++c) a[reduced.center_modes[c]] = w[c];
  for (const auto& s : reduced.slave) a[s.mode] = s.map.evaluate(w);
  return a;
}

double invariance_residual(const SpectralModel& model, const ReducedField& reduced, double h, int samples) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
  std::vector<Eigen::VectorXd> points;
  if (reduced.n == 1) {
    points.push_back(Eigen::VectorXd::Constant(1, h));
    points.push_back(Eigen::VectorXd::Constant(1, -h));
  } else if (reduced.n == 2) {
    for (int s = 0; s < samples; ++s) {
      const double th = 2.0 * std::numbers::pi * s / samples;
      points.push_back(Eigen::Vector2d(h * std::cos(th), h * std::sin(th)));
    }
  } else {
    std::mt19937_64 rng(0);
    std::normal_distribution<double> normal;
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd w(reduced.n);
      for (int c = 0; c < reduced.n; ++c) w[c] = normal(rng);
      points.push_back(h * w.normalized());
    }
  }

  double worst = 0.0;
  for (const auto& w : points) {
    const Eigen::VectorXd field = vector_field(model, reduced.lambda0, lift(reduced, w));
    const Eigen::VectorXd flow = evaluate_reduced(reduced, 0.0, w);
    double sq = 0.0;
    for (const auto& s : reduced.slave) {
      double tangent = 0.0;
      for (int c = 0; c < reduced.n; ++c) tangent += s.map.derivative(c).evaluate(w) * flow[c];
      const double diff = tangent - field[s.mode];
      sq += diff * diff;
    }
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

}  // namespace bifurcade
