#include "bifurcade/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include "bifurcade/error.hpp"

namespace bifurcade {

namespace odeint = boost::numeric::odeint;

std::string_view to_string(IntegrationStatus status) noexcept {
  switch (status) {
    case IntegrationStatus::Completed: return "Completed";
    case IntegrationStatus::Diverged: return "Diverged";
    case IntegrationStatus::StepFloor: return "StepFloor";
    case IntegrationStatus::MaxSteps: return "MaxSteps";
  }
  return "Unknown";
}

namespace {

using Buffer = std::vector<double>;

class Stepper {
 public:
  virtual ~Stepper() = default;
  /// Attempts one step from t of size at most dt without passing t_end; on
  /// success advances t and proposes the next dt.
  virtual bool try_step(Eigen::VectorXd& state, double& t, double& dt, double t_end) = 0;
};

class ExplicitStepper final : public Stepper {
 public:
  ExplicitStepper(const Rhs& rhs, int dim, double tolerance)
      : rhs_(rhs),
        dx_(dim),
        buf_(static_cast<std::size_t>(dim)),
        stepper_(odeint::make_controlled<odeint::runge_kutta_dopri5<Buffer>>(tolerance, tolerance)) {}

  bool try_step(Eigen::VectorXd& state, double& t, double& dt, double) override {
    auto sys = [this](const Buffer& s, Buffer& ds, double) {
      Eigen::Map<const Eigen::VectorXd> xs(s.data(), static_cast<Eigen::Index>(s.size()));
      rhs_(xs, dx_);
      std::copy(dx_.data(), dx_.data() + dx_.size(), ds.begin());
    };
    std::copy(state.data(), state.data() + state.size(), buf_.begin());
    if (stepper_.try_step(sys, buf_, t, dt) != odeint::success) return false;
    state = Eigen::Map<const Eigen::VectorXd>(buf_.data(), state.size());
    return true;
  }

 private:
  const Rhs& rhs_;
  Eigen::VectorXd dx_;
  Buffer buf_;
  odeint::controlled_runge_kutta<odeint::runge_kutta_dopri5<Buffer>> stepper_;
};

// Variable-order BDF from GSL for stiff Galerkin systems.
class StiffStepper final : public Stepper {
 public:
  StiffStepper(const Rhs& rhs, const JacobianFn& jac, int dim, double tolerance)
      : rhs_(rhs), jac_(jac), dim_(dim), x_(dim), dx_(dim), j_(dim, dim), buf_(static_cast<std::size_t>(dim)) {
    sys_ = {&StiffStepper::function, &StiffStepper::jacobian, static_cast<std::size_t>(dim), this};
    static const bool quiet = [] {
      gsl_set_error_handler_off();
      return true;
    }();
    (void)quiet;
    // the multistep BDF stepper reads its control object through a driver
    driver_ = gsl_odeiv2_driver_alloc_y_new(&sys_, gsl_odeiv2_step_msbdf, 1e-6, tolerance, tolerance);
  }
  ~StiffStepper() override { gsl_odeiv2_driver_free(driver_); }
  StiffStepper(const StiffStepper&) = delete;
  StiffStepper& operator=(const StiffStepper&) = delete;

  bool try_step(Eigen::VectorXd& state, double& t, double& dt, double t_end) override {
    std::copy(state.data(), state.data() + state.size(), buf_.begin());
    double h = dt;
    if (gsl_odeiv2_evolve_apply(driver_->e, driver_->c, driver_->s, &sys_, &t, t_end, &h, buf_.data()) != GSL_SUCCESS)
      return false;
    dt = h;
    state = Eigen::Map<const Eigen::VectorXd>(buf_.data(), dim_);
    return true;
  }

 private:
  static int function(double, const double y[], double f[], void* self) {
    auto* s = static_cast<StiffStepper*>(self);
    s->x_ = Eigen::Map<const Eigen::VectorXd>(y, s->dim_);
    s->rhs_(s->x_, s->dx_);
    if (!s->dx_.allFinite()) return GSL_EBADFUNC;
    std::copy(s->dx_.data(), s->dx_.data() + s->dim_, f);
    return GSL_SUCCESS;
  }
  static int jacobian(double, const double y[], double* dfdy, double dfdt[], void* self) {
    auto* s = static_cast<StiffStepper*>(self);
    s->x_ = Eigen::Map<const Eigen::VectorXd>(y, s->dim_);
    s->jac_(s->x_, s->j_);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(dfdy, s->dim_, s->dim_) = s->j_;
    std::fill(dfdt, dfdt + s->dim_, 0.0);
    return GSL_SUCCESS;
  }

  const Rhs& rhs_;
  const JacobianFn& jac_;
  int dim_;
  Eigen::VectorXd x_, dx_;
  Eigen::MatrixXd j_;
  Buffer buf_;
  gsl_odeiv2_system sys_{};
  gsl_odeiv2_driver* driver_ = nullptr;
};

Trajectory run(Stepper& stepper, const Eigen::VectorXd& x0, double t_end, const IntegrationOptions& options) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "integration end time must be positive");
  if (!(options.tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  Eigen::VectorXd x = x0;
  double t = 0.0;
  double dt = std::min(options.initial_step, t_end);
  long steps = 0;
  while (t < t_end) {
    if (steps++ >= options.max_steps) {
      traj.status = IntegrationStatus::MaxSteps;
      break;
    }
    dt = std::min(dt, t_end - t);
    const double t_before = t;
    bool accepted = false;
    for (int attempt = 0; attempt < 500 && !accepted; ++attempt) {
      accepted = stepper.try_step(x, t, dt, t_end);
      if (!accepted && dt < options.min_step) break;
    }
    if (!accepted) {
      traj.status = IntegrationStatus::StepFloor;
      break;
    }
    const bool last = t >= t_end || t == t_before;
    if (options.record_every_step || last) {
      traj.times.push_back(t);
      traj.states.push_back(x);
    }
    if (!x.allFinite() || x.norm() > options.blowup_bound) {
      if (!options.record_every_step && !last) {
        traj.times.push_back(t);
        traj.states.push_back(x);
      }
      traj.status = IntegrationStatus::Diverged;
      break;
    }
    if (t == t_before) break;  // dt underflow relative to t
  }
  if (!options.record_every_step && traj.times.back() != t) {
    traj.times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

bool use_stiff(const SpectralModel& model, double lambda, const IntegrationOptions& options) {
  switch (options.method) {
    case IntegrationMethod::Explicit: return false;
    case IntegrationMethod::Stiff: return true;
    case IntegrationMethod::Auto: break;
  }
  return model.betas(lambda).cwiseAbs().maxCoeff() > options.stiffness_threshold;
}

}  // namespace

Trajectory integrate_field(const Rhs& rhs, const Eigen::VectorXd& x0, double t_end,
                           const IntegrationOptions& options) {
  ExplicitStepper stepper(rhs, static_cast<int>(x0.size()), options.tolerance);
  return run(stepper, x0, t_end, options);
}

Trajectory integrate_field(const Rhs& rhs, const JacobianFn& jac, const Eigen::VectorXd& x0, double t_end,
                           const IntegrationOptions& options) {
  if (options.method == IntegrationMethod::Explicit) return integrate_field(rhs, x0, t_end, options);
  StiffStepper stepper(rhs, jac, static_cast<int>(x0.size()), options.tolerance);
  return run(stepper, x0, t_end, options);
}

namespace {

Trajectory integrate_model(const SpectralModel& model, double lambda, double sign, const Eigen::VectorXd& a0,
                           double t_end, const IntegrationOptions& options) {
  const Rhs rhs = [&](const Eigen::VectorXd& a, Eigen::VectorXd& da) { da = sign * vector_field(model, lambda, a); };
  if (!use_stiff(model, lambda, options)) return integrate_field(rhs, a0, t_end, options);
  const JacobianFn jac = [&](const Eigen::VectorXd& a, Eigen::MatrixXd& j) { j = sign * jacobian(model, lambda, a); };
  IntegrationOptions stiff = options;
  stiff.method = IntegrationMethod::Stiff;
  return integrate_field(rhs, jac, a0, t_end, stiff);
}

}  // namespace

Trajectory integrate(const SpectralModel& model, double lambda, const Eigen::VectorXd& a0,
                     double t_end, double tolerance) {
  IntegrationOptions options;
  options.tolerance = tolerance;
  return integrate(model, lambda, a0, t_end, options);
}

Trajectory integrate(const SpectralModel& model, double lambda, const Eigen::VectorXd& a0,
                     double t_end, const IntegrationOptions& options) {
  if (a0.size() != model.dim()) throw Error(ErrorKind::InvalidState, "initial state has wrong dimension");
  Trajectory traj = integrate_model(model, lambda, 1.0, a0, t_end, options);
  traj.lambda = lambda;
  return traj;
}

SteadyStateResult integrate_to_steady_state(const SpectralModel& model, double lambda,
                                            const Eigen::VectorXd& a0, double t_max,
                                            const SteadyStateOptions& options) {
  if (a0.size() != model.dim()) throw Error(ErrorKind::InvalidState, "initial state has wrong dimension");
  const double sign = options.reversed_time ? -1.0 : 1.0;

  SteadyStateResult result;
  result.trajectory.lambda = lambda;
  result.trajectory.times.push_back(0.0);
  result.trajectory.states.push_back(a0);
  Eigen::VectorXd x = a0;
  double t = 0.0;
  int below = 0;
  while (t < t_max) {
    const double span = std::min(options.checkpoint_interval, t_max - t);
    Trajectory piece = integrate_model(model, lambda, sign, x, span, options.integration);
    for (std::size_t i = 1; i < piece.times.size(); ++i) {
      result.trajectory.times.push_back(t + piece.times[i]);
      result.trajectory.states.push_back(piece.states[i]);
    }
    t += piece.times.back();
    x = piece.final_state();
    if (piece.status != IntegrationStatus::Completed) {
      result.trajectory.status = piece.status;
      break;
    }
    result.residual = vector_field(model, lambda, x).norm();
    below = result.residual <= options.residual ? below + 1 : 0;
    if (below >= options.consecutive) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged && result.trajectory.status == IntegrationStatus::Completed && t >= t_max)
    result.trajectory.status = IntegrationStatus::MaxSteps;
  result.state = x;
  return result;
}

}  // namespace bifurcade
