#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bifurcade {

// Modes are addressed by 0-based index in the C++ API. Mode index k refers to
// the (k+1)-th retained basis function; file formats and reports use the
// 1-based mode number.

/// Coefficient of a_i a_j in mode k's equation; stored for every ordered (i, j).
struct QuadraticTerm {
  int k, i, j;
  double value;
};

/// Coefficient of a_i a_j a_l in mode k's equation; stored for every ordered (i, j, l).
struct CubicTerm {
  int k, i, j, l;
  double value;
};

/// Geometry of the 1D Neumann cosine basis cos(k pi x / L) behind the
/// Cahn-Hilliard builder; enables exact evaluation of the energy functional.
struct CosineDomain {
  double length = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
};

/// Gradient structure of a model: the flow is a_k' = -(1/weights[k]) dJ/da_k.
struct GradientInfo {
  std::vector<double> weights;
  std::optional<CosineDomain> domain;
  /// Declared values of the integral of e_k^3 (custom models only).
  std::vector<std::optional<double>> cube_integrals;
};

/// Unvalidated model input. The tensor lists hold ordered entries; use
/// add_quadratic / add_cubic to insert a value under every permutation of
/// its lower indices.
struct ModelDescription {
  std::string label;
  std::vector<double> mu;
  /// beta_k(lambda) = sum_j linear[k][j] * lambda^j.
  std::vector<std::vector<double>> linear;
  std::vector<QuadraticTerm> quadratic;
  std::vector<CubicTerm> cubic;
  std::optional<GradientInfo> gradient;

  void add_quadratic(int k, int i, int j, double value);
  void add_cubic(int k, int i, int j, int l, double value);
};

/// Finite spectral Galerkin model  a' = -beta(lambda) a + Q(a, a) + C(a, a, a).
/// Immutable after construction.
class SpectralModel {
 public:
  int dim() const { return static_cast<int>(mu_.size()); }
  const std::string& label() const { return label_; }
  std::span<const double> mu() const { return mu_; }
  std::span<const double> linear_coefficients(int k) const { return linear_[k]; }

  double beta(int k, double lambda) const;
  double beta_slope(int k, double lambda) const;
  Eigen::VectorXd betas(double lambda) const;

  /// True when every beta_k is affine: beta_k = c0[k] - lambda * c1[k].
  bool affine() const;
  std::vector<double> linear_c0() const;
  std::vector<double> linear_c1() const;

  std::span<const QuadraticTerm> quadratic_terms() const { return quadratic_; }
  std::span<const CubicTerm> cubic_terms() const { return cubic_; }
  double quadratic(int k, int i, int j) const;
  double cubic(int k, int i, int j, int l) const;

  const std::optional<GradientInfo>& gradient_info() const { return gradient_; }

 private:
  friend SpectralModel build_custom(ModelDescription description);

  std::string label_;
  std::vector<double> mu_;
  std::vector<std::vector<double>> linear_;
  std::vector<QuadraticTerm> quadratic_;  // sorted by (k, i, j)
  std::vector<CubicTerm> cubic_;          // sorted by (k, i, j, l)
  std::optional<GradientInfo> gradient_;
};

/// Validates and freezes a model. Throws InvalidModel on non-positive or
/// unsorted mu, out-of-range or non-finite entries, tensors that are not
/// symmetric in their lower indices, or an inconsistent gradient declaration.
SpectralModel build_custom(ModelDescription description);

/// Cahn-Hilliard  u_t + u_xxxx + lambda u_xx = (b2 u^2 + b3 u^3)_xx  on (0, L)
/// with Neumann conditions and zero mean, projected on cos(k pi x / L),
/// k = 1..modes.
SpectralModel build_cahn_hilliard_1d(double length, double b2, double b3, int modes);

/// Integral over (0, L) of cos(i t) cos(j t) cos(k t), t = pi x / L (1-based modes).
double cosine_triple_integral(double length, int i, int j, int k);
/// Integral over (0, L) of cos(i t) cos(j t) cos(k t) cos(l t).
double cosine_quadruple_integral(double length, int i, int j, int k, int l);

/// Integral of e_k^3 for the 0-based mode index k. Throws Unsupported without gradient info.
double check_cube_integral(const SpectralModel& model, int k);

Eigen::VectorXd vector_field(const SpectralModel& model, double lambda,
                             const Eigen::Ref<const Eigen::VectorXd>& a);

Eigen::MatrixXd jacobian(const SpectralModel& model, double lambda,
                         const Eigen::Ref<const Eigen::VectorXd>& a);

/// Derivative of the vector field with respect to lambda.
Eigen::VectorXd parameter_derivative(const SpectralModel& model, double lambda,
                                     const Eigen::Ref<const Eigen::VectorXd>& a);

/// Energy functional J, non-increasing along trajectories of gradient models.
double lyapunov_value(const SpectralModel& model, double lambda,
                      const Eigen::Ref<const Eigen::VectorXd>& a);

/// (sum_k mu_k a_k^2)^(1/2), the norm used for reporting branch sizes.
double v_norm(const SpectralModel& model, const Eigen::Ref<const Eigen::VectorXd>& a);

}  // namespace bifurcade
