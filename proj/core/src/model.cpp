#include "bifurcade/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "bifurcade/error.hpp"
#include "bifurcade/polynomial.hpp"

namespace bifurcade {

namespace {

bool close_rel(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

auto quad_key(const QuadraticTerm& t) { return std::tie(t.k, t.i, t.j); }
auto cubic_key(const CubicTerm& t) { return std::tie(t.k, t.i, t.j, t.l); }

void check_dim(const SpectralModel& model, const Eigen::Ref<const Eigen::VectorXd>& a) {
  if (a.size() != model.dim()) {
    std::ostringstream os;
    os << "state has " << a.size() << " components, model '" << model.label() << "' has "
       << model.dim() << " modes";
    throw Error(ErrorKind::InvalidState, os.str());
  }
}

}  // namespace

void ModelDescription::add_quadratic(int k, int i, int j, double value) {
  quadratic.push_back({k, i, j, value});
  if (i != j) quadratic.push_back({k, j, i, value});
}

void ModelDescription::add_cubic(int k, int i, int j, int l, double value) {
  std::array<int, 3> idx{i, j, l};
  std::sort(idx.begin(), idx.end());
  do {
    cubic.push_back({k, idx[0], idx[1], idx[2], value});
  } while (std::next_permutation(idx.begin(), idx.end()));
}

double SpectralModel::beta(int k, double lambda) const { return poly_eval(linear_[k], lambda); }

double SpectralModel::beta_slope(int k, double lambda) const {
  return poly_eval(poly_derivative(linear_[k]), lambda);
}

Eigen::VectorXd SpectralModel::betas(double lambda) const {
  Eigen::VectorXd b(dim());
  for (int k = 0; k < dim(); ++k) b[k] = beta(k, lambda);
  return b;
}

bool SpectralModel::affine() const {
  return std::all_of(linear_.begin(), linear_.end(),
                     [](const auto& p) { return poly_degree(p) <= 1; });
}

std::vector<double> SpectralModel::linear_c0() const {
  std::vector<double> c(dim());
  for (int k = 0; k < dim(); ++k) c[k] = linear_[k].empty() ? 0.0 : linear_[k][0];
  return c;
}

std::vector<double> SpectralModel::linear_c1() const {
  std::vector<double> c(dim());
  for (int k = 0; k < dim(); ++k) c[k] = linear_[k].size() > 1 ? -linear_[k][1] : 0.0;
  return c;
}

double SpectralModel::quadratic(int k, int i, int j) const {
  const QuadraticTerm probe{k, i, j, 0.0};
  const auto it = std::lower_bound(quadratic_.begin(), quadratic_.end(), probe,
                                   [](const auto& a, const auto& b) { return quad_key(a) < quad_key(b); });
  return (it != quadratic_.end() && quad_key(*it) == quad_key(probe)) ? it->value : 0.0;
}

double SpectralModel::cubic(int k, int i, int j, int l) const {
  const CubicTerm probe{k, i, j, l, 0.0};
  const auto it = std::lower_bound(cubic_.begin(), cubic_.end(), probe,
                                   [](const auto& a, const auto& b) { return cubic_key(a) < cubic_key(b); });
  return (it != cubic_.end() && cubic_key(*it) == cubic_key(probe)) ? it->value : 0.0;
}

SpectralModel build_custom(ModelDescription d) {
  const int n = static_cast<int>(d.mu.size());
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::InvalidModel, (d.label.empty() ? std::string("model") : d.label) + ": " + why);
  };
  if (n < 1) fail("at least one mode is required");
  for (int k = 0; k < n; ++k) {
    if (!(d.mu[k] > 0.0) || !std::isfinite(d.mu[k])) fail("mu must be strictly positive and finite");
    if (k > 0 && d.mu[k] < d.mu[k - 1]) fail("mu must be sorted non-decreasing");
  }
  if (static_cast<int>(d.linear.size()) != n) fail("linear part must list one polynomial per mode");
  for (auto& p : d.linear) {
    if (p.empty()) p.push_back(0.0);
    for (double c : p) {
      if (!std::isfinite(c)) fail("linear coefficients must be finite");
    }
  }

  auto in_range = [n](int x) { return x >= 0 && x < n; };
  for (const auto& t : d.quadratic) {
    if (!in_range(t.k) || !in_range(t.i) || !in_range(t.j)) fail("quadratic entry index out of range");
    if (!std::isfinite(t.value)) fail("quadratic entry is not finite");
  }
  for (const auto& t : d.cubic) {
    if (!in_range(t.k) || !in_range(t.i) || !in_range(t.j) || !in_range(t.l))
      fail("cubic entry index out of range");
    if (!std::isfinite(t.value)) fail("cubic entry is not finite");
  }

  std::erase_if(d.quadratic, [](const auto& t) { return t.value == 0.0; });
  std::erase_if(d.cubic, [](const auto& t) { return t.value == 0.0; });
  std::sort(d.quadratic.begin(), d.quadratic.end(),
            [](const auto& a, const auto& b) { return quad_key(a) < quad_key(b); });
  std::sort(d.cubic.begin(), d.cubic.end(),
            [](const auto& a, const auto& b) { return cubic_key(a) < cubic_key(b); });
  for (std::size_t e = 1; e < d.quadratic.size(); ++e) {
    if (quad_key(d.quadratic[e]) == quad_key(d.quadratic[e - 1])) fail("duplicate quadratic entry");
  }
  for (std::size_t e = 1; e < d.cubic.size(); ++e) {
    if (cubic_key(d.cubic[e]) == cubic_key(d.cubic[e - 1])) fail("duplicate cubic entry");
  }

  SpectralModel m;
  m.label_ = std::move(d.label);
  m.mu_ = std::move(d.mu);
  m.linear_ = std::move(d.linear);
  m.quadratic_ = std::move(d.quadratic);
  m.cubic_ = std::move(d.cubic);

  for (const auto& t : m.quadratic_) {
    if (!close_rel(t.value, m.quadratic(t.k, t.j, t.i))) {
      std::ostringstream os;
      os << "quadratic tensor not symmetric at Q[" << t.k + 1 << "][" << t.i + 1 << "][" << t.j + 1 << "]";
      fail(os.str());
    }
  }
  for (const auto& t : m.cubic_) {
    std::array<int, 3> idx{t.i, t.j, t.l};
    std::sort(idx.begin(), idx.end());
    do {
      if (!close_rel(t.value, m.cubic(t.k, idx[0], idx[1], idx[2]))) {
        std::ostringstream os;
        os << "cubic tensor not symmetric at C[" << t.k + 1 << "][" << t.i + 1 << "][" << t.j + 1
           << "][" << t.l + 1 << "]";
        fail(os.str());
      }
    } while (std::next_permutation(idx.begin(), idx.end()));
  }

  if (d.gradient) {
    auto& g = *d.gradient;
    if (static_cast<int>(g.weights.size()) != n) fail("gradient weights must list one value per mode");
    for (double w : g.weights) {
      if (!(w > 0.0) || !std::isfinite(w)) fail("gradient weights must be positive");
    }
    if (!g.cube_integrals.empty() && static_cast<int>(g.cube_integrals.size()) != n)
      fail("cube integrals must list one value per mode");
    if (g.domain && !(g.domain->length > 0.0)) fail("domain length must be positive");
    // A potential exists iff weights[k] * T[k][i][j] is symmetric in all indices.
    for (const auto& t : m.quadratic_) {
      const double lhs = g.weights[t.k] * t.value;
      const double rhs = g.weights[t.i] * m.quadratic(t.i, t.k, t.j);
      if (!close_rel(lhs, rhs)) fail("declared gradient structure is inconsistent with Q");
    }
    for (const auto& t : m.cubic_) {
      const double lhs = g.weights[t.k] * t.value;
      const double rhs = g.weights[t.i] * m.cubic(t.i, t.k, t.j, t.l);
      if (!close_rel(lhs, rhs)) fail("declared gradient structure is inconsistent with C");
    }
    m.gradient_ = std::move(g);
  }
  return m;
}

double cosine_triple_integral(double length, int i, int j, int k) {
  int hits = 0;
  for (int si : {1, -1}) {
    for (int sj : {1, -1}) {
      if (k + si * i + sj * j == 0) ++hits;
    }
  }
  return length * hits / 4.0;
}

double cosine_quadruple_integral(double length, int i, int j, int k, int l) {
  int hits = 0;
  for (int si : {1, -1}) {
    for (int sj : {1, -1}) {
      for (int sk : {1, -1}) {
        if (l + si * i + sj * j + sk * k == 0) ++hits;
      }
    }
  }
  return length * hits / 8.0;
}

SpectralModel build_cahn_hilliard_1d(double length, double b2, double b3, int modes) {
  if (!(length > 0.0)) throw Error(ErrorKind::InvalidModel, "cahn_hilliard_1d: L must be positive");
  if (!(b3 > 0.0)) throw Error(ErrorKind::InvalidModel, "cahn_hilliard_1d: b3 must be positive");
  if (modes < 3) throw Error(ErrorKind::InvalidModel, "cahn_hilliard_1d: at least 3 modes are required");

  ModelDescription d;
  std::ostringstream label;
  label << "cahn_hilliard_1d(L=" << length << ",b2=" << b2 << ",b3=" << b3 << ",N=" << modes << ")";
  d.label = label.str();
  const double norm2 = length / 2.0;  // integral of cos^2(k pi x / L)
  for (int k = 1; k <= modes; ++k) {
    const double mu = std::pow(k * std::numbers::pi / length, 2);
    d.mu.push_back(mu);
    d.linear.push_back({mu * mu, -mu});
  }
  for (int k = 1; k <= modes; ++k) {
    const double mu = d.mu[k - 1];
    for (int i = 1; i <= modes; ++i) {
      for (int j = 1; j <= modes; ++j) {
        const double t = cosine_triple_integral(length, i, j, k) / norm2;
        if (t != 0.0 && b2 != 0.0) d.quadratic.push_back({k - 1, i - 1, j - 1, -mu * b2 * t});
        for (int l = 1; l <= modes; ++l) {
          const double s = cosine_quadruple_integral(length, i, j, l, k) / norm2;
          if (s != 0.0) d.cubic.push_back({k - 1, i - 1, j - 1, l - 1, -mu * b3 * s});
        }
      }
    }
  }
  GradientInfo g;
  for (double mu : d.mu) g.weights.push_back(norm2 / mu);
  g.domain = CosineDomain{length, b2, b3};
  d.gradient = std::move(g);
  return build_custom(std::move(d));
}

double check_cube_integral(const SpectralModel& model, int k) {
  if (k < 0 || k >= model.dim()) throw Error(ErrorKind::InvalidArgument, "mode index out of range");
  const auto& g = model.gradient_info();
  if (!g) throw Error(ErrorKind::Unsupported, "model '" + model.label() + "' has no gradient info");
  if (g->domain) return cosine_triple_integral(g->domain->length, k + 1, k + 1, k + 1);
  if (static_cast<int>(g->cube_integrals.size()) > k && g->cube_integrals[k])
    return *g->cube_integrals[k];
  throw Error(ErrorKind::Unsupported, "model '" + model.label() + "' declares no cube integral for mode " +
                                          std::to_string(k + 1));
}

Eigen::VectorXd vector_field(const SpectralModel& model, double lambda,
                             const Eigen::Ref<const Eigen::VectorXd>& a) {
  check_dim(model, a);
  Eigen::VectorXd f = -model.betas(lambda).cwiseProduct(a);
  for (const auto& t : model.quadratic_terms()) f[t.k] += t.value * a[t.i] * a[t.j];
  for (const auto& t : model.cubic_terms()) f[t.k] += t.value * a[t.i] * a[t.j] * a[t.l];
  return f;
}

Eigen::MatrixXd jacobian(const SpectralModel& model, double lambda,
                         const Eigen::Ref<const Eigen::VectorXd>& a) {
  check_dim(model, a);
  Eigen::MatrixXd jac = (-model.betas(lambda)).asDiagonal();
  // Symmetry of the tensors lets each ordered entry contribute to one column only.
  for (const auto& t : model.quadratic_terms()) jac(t.k, t.i) += 2.0 * t.value * a[t.j];
  for (const auto& t : model.cubic_terms()) jac(t.k, t.i) += 3.0 * t.value * a[t.j] * a[t.l];
  return jac;
}

Eigen::VectorXd parameter_derivative(const SpectralModel& model, double lambda,
                                     const Eigen::Ref<const Eigen::VectorXd>& a) {
  check_dim(model, a);
  Eigen::VectorXd d(model.dim());
  for (int k = 0; k < model.dim(); ++k) d[k] = -model.beta_slope(k, lambda) * a[k];
  return d;
}

double lyapunov_value(const SpectralModel& model, double lambda,
                      const Eigen::Ref<const Eigen::VectorXd>& a) {
  check_dim(model, a);
  const auto& g = model.gradient_info();
  if (!g) throw Error(ErrorKind::Unsupported, "model '" + model.label() + "' has no gradient info");

  if (g->domain) {
    // J(u) = 1/2 |u_x|^2 + int F(u), F(s) = -lambda/2 s^2 + b2/3 s^3 + b3/4 s^4.
    // The integrand is a cosine polynomial of degree <= 4N in t = pi x / L, so
    // the trapezoid rule with more than 2N panels is exact.
    const auto& dom = *g->domain;
    const int n = model.dim();
    double gradient_part = 0.0;
    for (int k = 0; k < n; ++k) gradient_part += model.mu()[k] * a[k] * a[k];
    gradient_part *= 0.5 * dom.length / 2.0;

    const int panels = 4 * n + 4;
    const double h = dom.length / panels;
    double integral = 0.0;
    for (int p = 0; p <= panels; ++p) {
      const double t = std::numbers::pi * p / panels;
      double u = 0.0;
      for (int k = 0; k < n; ++k) u += a[k] * std::cos((k + 1) * t);
      const double u2 = u * u;
      const double f = -0.5 * lambda * u2 + dom.b2 / 3.0 * u2 * u + dom.b3 / 4.0 * u2 * u2;
      integral += (p == 0 || p == panels) ? 0.5 * f : f;
    }
    return gradient_part + integral * h;
  }

  // J = sum_k w_k [beta_k a_k^2 / 2 - (1/3) Q_k(a,a) a_k - (1/4) C_k(a,a,a) a_k]
  double j = 0.0;
  for (int k = 0; k < model.dim(); ++k) j += 0.5 * g->weights[k] * model.beta(k, lambda) * a[k] * a[k];
  for (const auto& t : model.quadratic_terms())
    j -= g->weights[t.k] * t.value * a[t.k] * a[t.i] * a[t.j] / 3.0;
  for (const auto& t : model.cubic_terms())
    j -= g->weights[t.k] * t.value * a[t.k] * a[t.i] * a[t.j] * a[t.l] / 4.0;
  return j;
}

double v_norm(const SpectralModel& model, const Eigen::Ref<const Eigen::VectorXd>& a) {
  check_dim(model, a);
  double s = 0.0;
  for (int k = 0; k < model.dim(); ++k) s += model.mu()[k] * a[k] * a[k];
  return std::sqrt(s);
}

}  // namespace bifurcade
