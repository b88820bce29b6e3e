#include "bifurcade/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "bifurcade/center_manifold.hpp"
#include "bifurcade/error.hpp"
#include "bifurcade/integrator.hpp"

namespace bifurcade {

std::string_view to_string(TerminationKind k) noexcept {
  switch (k) {
    case TerminationKind::HitParamBoundary: return "HitParamBoundary";
    case TerminationKind::HitNormBoundary: return "HitNormBoundary";
    case TerminationKind::ReconnectTrivial: return "ReconnectTrivial";
    case TerminationKind::AccumulateAtZero: return "AccumulateAtZero";
    case TerminationKind::MaxSteps: return "MaxSteps";
  }
  return "?";
}

TrivialBranch trace_trivial_branch(const SpectralModel& model, double lambda_lo, double lambda_hi) {
  const DetectionResult det = detect_bifurcation_values(model, lambda_lo, lambda_hi);
  TrivialBranch out;
  for (const auto& c : det.crossings) out.breakpoints.push_back(c.lambda0);
  for (const auto& d : det.degenerate) out.breakpoints.push_back(d.lambda0);
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  std::vector<double> edges{lambda_lo};
  for (double b : out.breakpoints)
    if (b > lambda_lo && b < lambda_hi) edges.push_back(b);
  edges.push_back(lambda_hi);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    out.segments.push_back({edges[i], edges[i + 1], unstable_dimension(model, 0.5 * (edges[i] + edges[i + 1]))});
  return out;
}

int stability_signature(const SpectralModel& model, double lambda, const Eigen::VectorXd& a) {
  const Eigen::MatrixXd jac = jacobian(model, lambda, a);
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(jac, false).eigenvalues();
  int count = 0;
  for (const auto& z : ev)
    if (z.real() > 1e-8) ++count;
  return count;
}

double polish_equilibrium(const SpectralModel& model, double lambda, Eigen::VectorXd& a, int max_iterations) {
  Eigen::VectorXd f = vector_field(model, lambda, a);
  for (int it = 0; it < max_iterations && f.norm() > 1e-14; ++it) {
    const Eigen::VectorXd step = jacobian(model, lambda, a).partialPivLu().solve(-f);
    if (!step.allFinite()) break;
    a += step;
    const Eigen::VectorXd next = vector_field(model, lambda, a);
    if (next.norm() >= f.norm() && step.norm() < 1e-15) break;
    f = next;
  }
  return f.norm();
}

namespace {

int sign_of(double v) { return (v > 0) - (v < 0); }

// Rows [jacobian | d f / d lambda] of the equilibrium map at x = (a, lambda).
Eigen::MatrixXd extended_jacobian(const SpectralModel& model, const Eigen::VectorXd& x) {
  const int n = model.dim();
  const double lambda = x[n];
  const Eigen::VectorXd a = x.head(n);
  Eigen::MatrixXd h(n, n + 1);
  h.leftCols(n) = jacobian(model, lambda, a);
  h.col(n) = parameter_derivative(model, lambda, a);
  return h;
}

Eigen::VectorXd residual(const SpectralModel& model, const Eigen::VectorXd& x) {
  const int n = model.dim();
  return vector_field(model, x[n], x.head(n));
}

// Newton on f(a, lambda) = 0 plus one scalar constraint g(x) = 0 with gradient dg.
template <class G, class DG>
bool constrained_newton(const SpectralModel& model, Eigen::VectorXd& x, G g, DG dg, double tol, int max_it,
                        int* iterations = nullptr) {
  const int n = model.dim();
  for (int it = 0; it < max_it; ++it) {
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = residual(model, x);
    rhs[n] = g(x);
    Eigen::MatrixXd jac(n + 1, n + 1);
    jac.topRows(n) = extended_jacobian(model, x);
    jac.row(n) = dg(x).transpose();
    const Eigen::VectorXd step = jac.partialPivLu().solve(-rhs);
    if (!step.allFinite()) return false;
    x += step;
    if (iterations) *iterations = it + 1;
    if (!x.allFinite()) return false;
    if (step.norm() <= 1e-13 * (1.0 + x.norm()) && residual(model, x).norm() <= tol) return true;
  }
  return residual(model, x).norm() <= tol && std::abs(g(x)) <= 1e-10;
}

Eigen::VectorXd tangent_from(const SpectralModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& ref) {
  const int n = model.dim();
  Eigen::MatrixXd m(n + 1, n + 1);
  m.topRows(n) = extended_jacobian(model, x);
  m.row(n) = ref.transpose();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
  e[n] = 1.0;
  Eigen::VectorXd t = m.partialPivLu().solve(e);
  if (!t.allFinite() || t.norm() == 0.0) return ref;
  t.normalize();
  if (t.dot(ref) < 0) t = -t;
  return t;
}

Eigen::VectorXd initial_tangent(const SpectralModel& model, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd h = extended_jacobian(model, x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeFullV);
  return svd.matrixV().col(h.cols() - 1).normalized();
}

BranchPoint make_point(const SpectralModel& model, const Eigen::VectorXd& x, double arclength) {
  const int n = model.dim();
  BranchPoint p;
  p.lambda = x[n];
  p.a = x.head(n);
  p.v_norm = v_norm(model, p.a);
  p.n_unstable = stability_signature(model, p.lambda, p.a);
  p.arclength = arclength;
  return p;
}

void validate_window(const Window& w) {
  if (!std::isfinite(w.lambda_lo) || !std::isfinite(w.lambda_hi) || !(w.lambda_lo < w.lambda_hi))
    throw Error(ErrorKind::InvalidArgument, "window needs finite lambda_lo < lambda_hi");
  if (!(w.norm_bound > 0)) throw Error(ErrorKind::InvalidArgument, "window norm bound must be positive");
}

void validate_steps(const StepConfig& s) {
  if (!(s.min_step > 0 && s.min_step <= s.initial_step && s.initial_step <= s.max_step))
    throw Error(ErrorKind::InvalidArgument, "step sizes must satisfy 0 < min <= initial <= max");
  if (s.max_points < 2 || s.newton_max_iterations < 1)
    throw Error(ErrorKind::InvalidArgument, "step config limits must be positive");
}

}  // namespace

SwitchResult switch_branch(const SpectralModel& model, const CrossingData& crossing, double h) {
  if (crossing.n != 1) throw Error(ErrorKind::WrongArity, "branch switching requires crossing number 1");
  if (!std::isfinite(h) || h == 0.0) throw Error(ErrorKind::InvalidArgument, "switch amplitude must be nonzero");
  const ReducedField r = reduce(model, crossing, 3);
  const int c = crossing.center_modes.front();
  const int n = model.dim();

  double g = 0.0;
  for (int d = 2; d <= r.order; ++d) g += r.nonlinear[0].coefficient(Monomial{d}) * std::pow(h, d - 1);
  SwitchResult out;
  out.predicted_lambda = r.lambda0 - g / r.unfolding[0];

  Eigen::VectorXd x(n + 1);
  x.head(n) = lift(r, Eigen::VectorXd::Constant(1, h));
  x[n] = out.predicted_lambda;
  const auto constraint = [c, h](const Eigen::VectorXd& y) { return y[c] - h; };
  const auto gradient = [c, n](const Eigen::VectorXd&) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
    e[c] = 1.0;
    return e;
  };
  if (!constrained_newton(model, x, constraint, gradient, 1e-11, 20, &out.iterations)) {
    std::ostringstream os;
    os << "Newton correction of the branch predictor at lambda0 = " << crossing.lambda0 << ", h = " << h
       << " did not converge in 20 iterations";
    throw Error(ErrorKind::SwitchFailed, os.str());
  }
  out.lambda = x[n];
  out.a = x.head(n);
  return out;
}

Branch continue_branch(const SpectralModel& model, const BranchStart& start, const Window& window,
                       const StepConfig& steps) {
  validate_window(window);
  validate_steps(steps);
  const int n = model.dim();
  if (start.a.size() != n) throw Error(ErrorKind::InvalidState, "start state has the wrong dimension");
  if (vector_field(model, start.lambda, start.a).norm() > 1e-8)
    throw Error(ErrorKind::InvalidState, "start point is not an equilibrium");
  if (start.direction != 1 && start.direction != -1) throw Error(ErrorKind::InvalidArgument, "direction must be +1 or -1");

  Branch br;
  br.origin = start.origin;
  br.center_modes = start.center_modes;
  br.direction = start.direction;

  std::vector<double> known;
  {
    const double pad = 1e-3 * (window.lambda_hi - window.lambda_lo);
    const DetectionResult det = detect_bifurcation_values(model, window.lambda_lo - pad, window.lambda_hi + pad);
    for (const auto& cd : det.crossings) known.push_back(cd.lambda0);
    for (const auto& d : det.degenerate) known.push_back(d.lambda0);
  }

  Eigen::VectorXd x(n + 1);
  x.head(n) = start.a;
  x[n] = start.lambda;
  double arclength = 0.0;
  if (start.origin) {
    Eigen::VectorXd o = Eigen::VectorXd::Zero(n + 1);
    o[n] = *start.origin;
    br.points.push_back(make_point(model, o, 0.0));
    arclength = (x - o).norm();
  }
  br.points.push_back(make_point(model, x, arclength));

  Eigen::VectorXd t = initial_tangent(model, x);
  if (start.origin && !start.center_modes.empty()) {
    const int c = start.center_modes.front();
    if (t[c] * start.a[c] < 0) t = -t;
  } else if (sign_of(t[n]) != 0 && sign_of(t[n]) != start.direction) {
    t = -t;
  }

  const auto finish = [&](TerminationKind kind, double value, std::string diag) {
    br.termination = {kind, value, std::move(diag)};
    return br;
  };

  double ds = steps.initial_step;
  while (static_cast<int>(br.points.size()) < steps.max_points) {
    const Eigen::VectorXd pred = x + ds * t;
    Eigen::VectorXd y = pred;
    const Eigen::VectorXd t_fixed = t;
    int iters = 0;
    bool ok = constrained_newton(
        model, y, [&](const Eigen::VectorXd& z) { return t_fixed.dot(z - pred); },
        [&](const Eigen::VectorXd&) { return t_fixed; }, steps.newton_tolerance, steps.newton_max_iterations, &iters);
    Eigen::VectorXd t_new;
    if (ok) {
      ok = (y - x).norm() <= 2.0 * ds;
      if (ok) {
        t_new = tangent_from(model, y, t);
        ok = t_new.dot(t) > 0.8;
      }
    }
    if (!ok) {
      ds *= 0.5;
      if (ds < steps.min_step) {
        std::ostringstream os;
        os << "corrector failed below the minimum step at lambda = " << x[n] << ", |a|_V = " << v_norm(model, x.head(n));
        return finish(TerminationKind::MaxSteps, x[n], os.str());
      }
      continue;
    }

    // leaving the parameter window: land exactly on its edge
    if (y[n] < window.lambda_lo || y[n] > window.lambda_hi) {
      const double edge = y[n] < window.lambda_lo ? window.lambda_lo : window.lambda_hi;
      const double s = (edge - x[n]) / (y[n] - x[n]);
      Eigen::VectorXd z = x + s * (y - x);
      const bool landed = constrained_newton(
          model, z, [edge, n](const Eigen::VectorXd& v) { return v[n] - edge; },
          [n](const Eigen::VectorXd&) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
            e[n] = 1.0;
            return e;
          },
          steps.newton_tolerance, 20);
      if (landed) {
        arclength += (z - x).norm();
        br.points.push_back(make_point(model, z, arclength));
        return finish(TerminationKind::HitParamBoundary, edge, "");
      }
      ds *= 0.5;
      if (ds < steps.min_step) return finish(TerminationKind::MaxSteps, x[n], "could not land on the parameter edge");
      continue;
    }

    // leaving the norm ball
    if (v_norm(model, y.head(n)) > window.norm_bound) {
      const double bound = window.norm_bound;
      const double nx = v_norm(model, x.head(n)), ny = v_norm(model, y.head(n));
      Eigen::VectorXd z = x + (bound - nx) / (ny - nx) * (y - x);
      const auto mu = model.mu();
      const bool landed = constrained_newton(
          model, z,
          [&](const Eigen::VectorXd& v) { return v_norm(model, v.head(n)) * v_norm(model, v.head(n)) - bound * bound; },
          [&](const Eigen::VectorXd& v) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
            for (int k = 0; k < n; ++k) e[k] = 2.0 * mu[static_cast<std::size_t>(k)] * v[k];
            return e;
          },
          steps.newton_tolerance, 20);
      if (landed) {
        arclength += (z - x).norm();
        br.points.push_back(make_point(model, z, arclength));
        return finish(TerminationKind::HitNormBoundary, bound, "");
      }
      ds *= 0.5;
      if (ds < steps.min_step) return finish(TerminationKind::MaxSteps, x[n], "could not land on the norm bound");
      continue;
    }

    // crossing or touching the trivial branch
    const Eigen::VectorXd ax = x.head(n), ay = y.head(n);
    if (ax.dot(ay) < 0.0 || ay.norm() <= steps.reconnect_tolerance) {
      const Eigen::VectorXd dir = ax.normalized();
      Eigen::VectorXd z = x;
      double eps = ax.norm();
      bool reached = false;
      while (!reached) {
        eps *= 0.5;
        if (eps < 0.1 * steps.reconnect_tolerance) {
          eps = 0.1 * steps.reconnect_tolerance;
          reached = true;
        }
        const bool conv = constrained_newton(
            model, z, [&](const Eigen::VectorXd& v) { return dir.dot(v.head(n)) - eps; },
            [&](const Eigen::VectorXd&) {
              Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
              e.head(n) = dir;
              return e;
            },
            steps.newton_tolerance, 30);
        if (!conv)
          return finish(TerminationKind::MaxSteps, z[n], "amplitude-constrained approach to the trivial branch failed");
        arclength += (z - x).norm();
        br.points.push_back(make_point(model, z, arclength));
        x = z;
      }
      const double lambda1 = x[n];
      double best = std::numeric_limits<double>::infinity();
      double match = lambda1;
      for (double v : known)
        if (std::abs(v - lambda1) < best) {
          best = std::abs(v - lambda1);
          match = v;
        }
      if (best > steps.match_tolerance) {
        std::ostringstream os;
        os << "branch reached the trivial branch at lambda = " << lambda1 << " away from every detected bifurcation value";
        return finish(TerminationKind::MaxSteps, lambda1, os.str());
      }
      if (start.origin && std::abs(match - *start.origin) <= steps.match_tolerance)
        return finish(TerminationKind::AccumulateAtZero, lambda1,
                      "branch returns to the trivial solution at its own bifurcation value; evidence only");
      return finish(TerminationKind::ReconnectTrivial, lambda1, "");
    }

    arclength += (y - x).norm();
    BranchPoint p = make_point(model, y, arclength);
    if (p.n_unstable != br.points.back().n_unstable && br.points.size() > (start.origin ? 1u : 0u))
      br.stability_changes.push_back(p.lambda);
    br.points.push_back(std::move(p));
    x = y;
    t = t_new;
    if (iters <= 3) ds = std::min(ds * 1.5, steps.max_step);
    else if (iters >= 6) ds = std::max(ds * 0.7, steps.min_step);
  }
  return finish(TerminationKind::MaxSteps, x[n], "point budget exhausted");
}

GlobalReport global_report(const SpectralModel& model, const Window& window, const StepConfig& steps,
                           double switch_amplitude) {
  validate_window(window);
  GlobalReport rep;
  rep.window = window;
  rep.crossings = detect_bifurcation_values(model, window.lambda_lo, window.lambda_hi).crossings;
  std::vector<double> reached;
  for (const CrossingData& cd : rep.crossings) {
    const auto hit = std::find_if(reached.begin(), reached.end(),
                                  [&](double v) { return std::abs(v - cd.lambda0) <= steps.match_tolerance; });
    if (hit != reached.end()) {
      rep.skipped.push_back({cd.lambda0, "already reached by an earlier branch"});
      continue;
    }
    if (cd.n != 1) {
      rep.skipped.push_back({cd.lambda0, "crossing number " + std::to_string(cd.n) + " is not switched automatically"});
      continue;
    }
    try {
      const SwitchResult sw = switch_branch(model, cd, switch_amplitude);
      BranchStart start{sw.lambda, sw.a, cd.lambda0, cd.center_modes, switch_amplitude > 0 ? 1 : -1};
      BranchSummary s;
      s.branch = continue_branch(model, start, window, steps);
      switch (s.branch.termination.kind) {
        case TerminationKind::HitParamBoundary:
        case TerminationKind::HitNormBoundary: s.alternative = "(1) branch meets the window boundary"; break;
        case TerminationKind::AccumulateAtZero:
          s.alternative = "(2) nontrivial solutions accumulate at 0 at lambda0 (evidence only)";
          break;
        case TerminationKind::ReconnectTrivial: {
          std::ostringstream os;
          os << "(3) (0, lambda1) in the branch with lambda1 = " << s.branch.termination.value;
          s.alternative = os.str();
          reached.push_back(s.branch.termination.value);
          break;
        }
        case TerminationKind::MaxSteps: s.alternative = "undetermined"; break;
      }
      rep.branches.push_back(std::move(s));
    } catch (const Error& e) {
      rep.skipped.push_back({cd.lambda0, std::string(to_string(e.kind())) + ": " + e.what()});
    }
  }
  for (const auto& s : rep.branches)
    for (const auto& p : s.branch.points) {
      rep.lambda_min = std::min(rep.lambda_min.value_or(p.lambda), p.lambda);
      rep.lambda_max = std::max(rep.lambda_max.value_or(p.lambda), p.lambda);
    }
  return rep;
}

HeteroclinicProbe heteroclinic_probe(const SpectralModel& model, double lambda, int n_directions, double t_max,
                                     double epsilon) {
  if (n_directions < 1 || !(t_max > 0) || !(epsilon > 0))
    throw Error(ErrorKind::InvalidArgument, "probe needs n_directions >= 1, t_max > 0 and epsilon > 0");
  HeteroclinicProbe probe;
  probe.lambda = lambda;
  const int n = model.dim();
  const Eigen::VectorXd beta = model.betas(lambda);
  std::vector<int> unstable, stable;
  for (int k = 0; k < n; ++k) {
    if (beta[k] < -1e-12) unstable.push_back(k);
    else if (beta[k] > 1e-12) stable.push_back(k);
  }
  if (unstable.empty()) {
    probe.note = "0 has no unstable direction at this lambda; nothing to probe";
    probe.verdict = "empty";
    return probe;
  }
  std::sort(stable.begin(), stable.end(), [&](int a, int b) { return beta[a] < beta[b]; });
  const bool gradient = model.gradient_info().has_value();

  struct Seed {
    int mode;
    bool reversed;
  };
  std::vector<Seed> seeds;
  for (int k : unstable)
    if (static_cast<int>(seeds.size()) < n_directions) seeds.push_back({k, false});
  for (int k : stable)
    if (static_cast<int>(seeds.size()) < n_directions) seeds.push_back({k, true});

  int sigma_minus = 0;
  for (const Seed& s : seeds)
    for (int sign : {1, -1}) {
      ProbeRecord rec;
      rec.mode = s.mode;
      rec.sign = sign;
      rec.reversed = s.reversed;
      Eigen::VectorXd a0 = Eigen::VectorXd::Zero(n);
      a0[s.mode] = sign * epsilon;
      SteadyStateOptions opts;
      opts.reversed_time = s.reversed;
      opts.integration.blowup_bound = 1e4;
      const SteadyStateResult res = integrate_to_steady_state(model, lambda, a0, t_max, opts);
      rec.converged = res.converged;
      rec.residual = res.residual;
      if (res.converged) rec.limit = res.state;
      if (gradient) {
        rec.j_zero = lyapunov_value(model, lambda, Eigen::VectorXd::Zero(n));
        if (res.converged) rec.j_limit = lyapunov_value(model, lambda, res.state);
        double prev = lyapunov_value(model, lambda, res.trajectory.states.front());
        for (std::size_t i = 1; i < res.trajectory.states.size(); ++i) {
          const double cur = lyapunov_value(model, lambda, res.trajectory.states[i]);
          // physical time runs backwards along a reversed integration
          const double increase = s.reversed ? prev - cur : cur - prev;
          rec.j_max_violation = std::max(rec.j_max_violation, increase);
          prev = cur;
        }
        rec.j_monotone = rec.j_max_violation <= 1e-9;
      }
      if (!s.reversed && rec.converged && rec.limit.norm() > 10 * epsilon &&
          (!rec.j_limit || *rec.j_limit < 0.0))
        ++sigma_minus;
      probe.records.push_back(std::move(rec));
    }
  std::ostringstream os;
  os << sigma_minus << " of " << 2 * std::count_if(seeds.begin(), seeds.end(), [](const Seed& s) { return !s.reversed; })
     << " unstable seeds connect 0 to a nontrivial equilibrium";
  if (gradient) os << " with J(omega) < 0 = J(0)";
  probe.verdict = os.str();
  if (!gradient) probe.note = "model has no gradient structure; J values omitted";
  return probe;
}

}  // namespace bifurcade
