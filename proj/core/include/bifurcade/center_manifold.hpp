#pragma once

#include <vector>

#include <Eigen/Core>

#include "bifurcade/model.hpp"
#include "bifurcade/polynomial.hpp"
#include "bifurcade/spectrum.hpp"

namespace bifurcade {

struct SlaveComponent {
  int mode;       ///< 0-based non-center mode index
  MultiPoly map;  ///< xi_mode(w), degrees 2..order
};

/// Polynomial center-manifold reduction at a crossing. In center coordinates
/// w (one per center mode) and nu = lambda - lambda0 the reduced flow is
///   w_c' = unfolding[c] * nu * w_c + nonlinear[c](w),
/// and the manifold is the graph a = w + xi(w) over the center modes.
struct ReducedField {
  double lambda0 = 0.0;
  std::vector<int> center_modes;
  int n = 0;
  int order = 0;
  Eigen::VectorXd unfolding;        ///< -d beta_c / d lambda at lambda0
  std::vector<MultiPoly> nonlinear;  ///< one per center mode
  std::vector<SlaveComponent> slave;
  int model_dim = 0;
};

/// Solves the invariance equation order by order up to total degree `order`
/// (2..5). The slave map is computed at lambda0; the parameter enters only
/// through the linear unfolding term.
ReducedField reduce(const SpectralModel& model, const CrossingData& crossing, int order = 3);

Eigen::VectorXd evaluate_reduced(const ReducedField& reduced, double nu,
                                 const Eigen::Ref<const Eigen::VectorXd>& w);

Eigen::MatrixXd reduced_jacobian(const ReducedField& reduced, double nu,
                                 const Eigen::Ref<const Eigen::VectorXd>& w);

/// Full-space state w + xi(w).
Eigen::VectorXd lift(const ReducedField& reduced, const Eigen::Ref<const Eigen::VectorXd>& w);

/// Max over `samples` points with |w| = h of the slave-mode mismatch
/// || D xi(w) F(w) - f_slave(w + xi(w)) || at lambda0. Decays like h^(order+1).
double invariance_residual(const SpectralModel& model, const ReducedField& reduced, double h,
                           int samples = 16);

}  // namespace bifurcade
