#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bifurcade/model.hpp"

namespace bifurcade {

enum class IntegrationStatus {
  Completed,
  Diverged,   ///< the state left the configured norm bound
  StepFloor,  ///< step size fell below the floor; the problem is too stiff for the explicit pair
  MaxSteps,
};

std::string_view to_string(IntegrationStatus status) noexcept;

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  double lambda = 0.0;
  IntegrationStatus status = IntegrationStatus::Completed;

  const Eigen::VectorXd& final_state() const { return states.back(); }
};

enum class IntegrationMethod {
  Auto,      ///< model integrations switch to Stiff when max |beta_k| exceeds stiffness_threshold
  Explicit,  ///< Dormand-Prince 5(4)
  Stiff,     ///< variable-order BDF (GSL msbdf) with the analytic Jacobian
};

struct IntegrationOptions {
  IntegrationMethod method = IntegrationMethod::Auto;
  double stiffness_threshold = 50.0;
  double tolerance = 1e-10;      ///< absolute and relative local error target
  double blowup_bound = 1e6;     ///< Euclidean norm bound before reporting Diverged
  double min_step = 1e-12;
  double initial_step = 1e-3;
  long max_steps = 5'000'000;
  bool record_every_step = true;  ///< otherwise only the endpoints are kept
};

using Rhs = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;
using JacobianFn = std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)>;

/// Adaptive Dormand-Prince 5(4) integration of x' = rhs(x) on [0, t_end].
Trajectory integrate_field(const Rhs& rhs, const Eigen::VectorXd& x0, double t_end,
                           const IntegrationOptions& options);

/// BDF integration of x' = rhs(x) with Jacobian jac, unless the options
/// force the explicit pair.
Trajectory integrate_field(const Rhs& rhs, const JacobianFn& jac, const Eigen::VectorXd& x0, double t_end,
                           const IntegrationOptions& options);

/// Reference semiflow of the Galerkin model at fixed lambda.
Trajectory integrate(const SpectralModel& model, double lambda, const Eigen::VectorXd& a0,
                     double t_end, double tolerance);
Trajectory integrate(const SpectralModel& model, double lambda, const Eigen::VectorXd& a0,
                     double t_end, const IntegrationOptions& options);

struct SteadyStateOptions {
  IntegrationOptions integration;
  double residual = 1e-9;        ///< ||f|| threshold at a checkpoint
  int consecutive = 3;           ///< checkpoints in a row below the threshold
  double checkpoint_interval = 1.0;
  bool reversed_time = false;
};

struct SteadyStateResult {
  bool converged = false;
  Trajectory trajectory;  ///< times are physical |t| along the integration direction
  Eigen::VectorXd state;
  double residual = 0.0;
};

/// Integrates until the vector field stays below the residual threshold for
/// the configured number of checkpoints, or until t_max.
SteadyStateResult integrate_to_steady_state(const SpectralModel& model, double lambda,
                                            const Eigen::VectorXd& a0, double t_max,
                                            const SteadyStateOptions& options = {});

}  // namespace bifurcade
