#include "bifurcade/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "bifurcade/error.hpp"
#include "bifurcade/integrator.hpp"
#include "bifurcade/polynomial.hpp"

namespace bifurcade {

std::string_view to_string(TrivialVerdict v) noexcept {
  switch (v) {
    case TrivialVerdict::AttractorOnCenter: return "AttractorOnCenter";
    case TrivialVerdict::RepellerOnCenter: return "RepellerOnCenter";
    case TrivialVerdict::NeitherIsolated: return "NeitherIsolated";
    case TrivialVerdict::Unresolved: return "Unresolved";
  }
  return "?";
}

std::string_view to_string(InvariantSetKind k) noexcept {
  switch (k) {
    case InvariantSetKind::Empty: return "Empty";
    case InvariantSetKind::EquilibriumPoints: return "EquilibriumPoints";
    case InvariantSetKind::SphereBoundary: return "SphereBoundary";
    case InvariantSetKind::Unresolved: return "Unresolved";
  }
  return "?";
}

std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Saddle: return "Saddle";
    case Stability::NonHyperbolic: return "NonHyperbolic";
  }
  return "?";
}

std::string_view to_string(StaticAlternative a) noexcept {
  switch (a) {
    case StaticAlternative::AccumulatingNontrivialEquilibria: return "AccumulatingNontrivialEquilibria";
    case StaticAlternative::OneSidedTwoSolutions: return "OneSidedTwoSolutions";
    case StaticAlternative::TwoSidedOneSolution: return "TwoSidedOneSolution";
  }
  return "?";
}

namespace {

constexpr int kRadialDirections = 360;

Eigen::VectorXd direction(double theta) {
  Eigen::VectorXd e(2);
  e << std::cos(theta), std::sin(theta);
  return e;
}

double radial_component(const ReducedField& r, int degree, const Eigen::VectorXd& e) {
  Eigen::VectorXd g(r.n);
  for (int c = 0; c < r.n; ++c) g[c] = r.nonlinear[c].homogeneous_part(degree).evaluate(e);
  return g.dot(e);
}

Rhs reduced_rhs(const ReducedField& r, double nu, double sign) {
  return [&r, nu, sign](const Eigen::VectorXd& w, Eigen::VectorXd& dw) { dw = sign * evaluate_reduced(r, nu, w); };
}

bool ring_contracts(const ReducedField& r, double sign, int degree, double coefficient) {
  const double r0 = 0.05;
  const double scale = std::abs(coefficient) * std::pow(r0, degree - 1);
  const double t_end = std::min(4.0 / std::max(scale, 1e-12), 1e4);
  IntegrationOptions opts;
  opts.record_every_step = false;
  opts.blowup_bound = 1e3;
  opts.tolerance = 1e-9;
  for (int k = 0; k < 16; ++k) {
    const Eigen::VectorXd w0 = r0 * direction(2.0 * std::numbers::pi * k / 16);
    Trajectory t = integrate_field(reduced_rhs(r, 0.0, sign), w0, t_end, opts);
    if (t.status != IntegrationStatus::Completed || !(t.final_state().norm() < 0.9 * r0)) return false;
  }
  return true;
}

Stability label(const Eigen::VectorXd& re, double thr) {
  int pos = 0, neg = 0, zero = 0;
  for (double v : re) {
    if (v > thr) ++pos;
    else if (v < -thr) ++neg;
    else ++zero;
  }
  if (zero > 0) return Stability::NonHyperbolic;
  if (pos == 0) return Stability::Stable;
  if (neg == 0) return Stability::Unstable;
  return Stability::Saddle;
}

ReducedEquilibrium make_equilibrium(const ReducedField& r, double nu, const Eigen::VectorXd& w, double thr) {
  ReducedEquilibrium e;
  e.w = w;
  Eigen::MatrixXd jac = reduced_jacobian(r, nu, w);
  e.eigenvalues = Eigen::EigenSolver<Eigen::MatrixXd>(jac, false).eigenvalues().real();
  std::sort(e.eigenvalues.begin(), e.eigenvalues.end());
  e.stability = label(e.eigenvalues, thr);
  return e;
}

// Newton iteration with a least-squares step; returns the final residual.
double newton_reduced(const ReducedField& r, double nu, Eigen::VectorXd& w) {
  Eigen::VectorXd f = evaluate_reduced(r, nu, w);
  for (int it = 0; it < 60 && f.norm() > 1e-14; ++it) {
    Eigen::MatrixXd jac = reduced_jacobian(r, nu, w);
    Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-f);
    if (!step.allFinite()) break;
    w += step;
    if (!w.allFinite() || w.norm() > 1e6) return std::numeric_limits<double>::infinity();
    f = evaluate_reduced(r, nu, w);
    if (step.norm() < 1e-16) break;
  }
  return f.norm();
}

double ray_exit(const Box& box, const Eigen::VectorXd& e) {
  double t = std::numeric_limits<double>::infinity();
  for (int i = 0; i < e.size(); ++i) {
    if (e[i] > 1e-15) t = std::min(t, box.hi[i] / e[i]);
    else if (e[i] < -1e-15) t = std::min(t, box.lo[i] / e[i]);
  }
  return t;
}

// True when the flow sign * F started at w0 reaches the ball of radius `inner`
// before leaving the ball of radius `outer`.
bool reaches_origin(const ReducedField& r, double nu, double sign, const Eigen::VectorXd& w0, double inner,
                    double outer) {
  IntegrationOptions opts;
  opts.record_every_step = false;
  opts.blowup_bound = outer;
  opts.tolerance = 1e-10;
  const double chunk = 1.0;
  Eigen::VectorXd w = w0;
  for (int k = 0; k < 4000; ++k) {
    Trajectory t = integrate_field(reduced_rhs(r, nu, sign), w, chunk, opts);
    if (t.status == IntegrationStatus::Diverged) return false;
    w = t.final_state();
    if (w.norm() < inner) return true;
    if (t.status != IntegrationStatus::Completed) return false;
  }
  return w.norm() < w0.norm();
}

void check_trusted(const CrossingData& crossing, const ReducedField& reduced, double lambda) {
  if (!std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be finite");
  if (reduced.n != crossing.n || reduced.lambda0 != crossing.lambda0)
    throw Error(ErrorKind::InvalidArgument, "reduced field does not belong to this crossing");
  if (lambda < crossing.gaps.lambda_lo || lambda > crossing.gaps.lambda_hi) {
    std::ostringstream os;
    os << "lambda = " << lambda << " is outside the trusted interval [" << crossing.gaps.lambda_lo << ", "
       << crossing.gaps.lambda_hi << "] of the crossing at " << crossing.lambda0;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

int sign_of(double v) { return (v > 0) - (v < 0); }

bool predicts_nonempty(const TrivialClassification& tc, const CrossingData& crossing, int side) {
  if (side == 0) return false;
  switch (tc.verdict) {
    case TrivialVerdict::AttractorOnCenter: return side == crossing.unstable_side();
    case TrivialVerdict::RepellerOnCenter: return side == -crossing.unstable_side();
    case TrivialVerdict::NeitherIsolated: return true;
    case TrivialVerdict::Unresolved: return false;
  }
  return false;
}

Field reduced_field(const ReducedField& r, double nu) {
  return [&r, nu](const Eigen::VectorXd& w) { return evaluate_reduced(r, nu, w); };
}

}  // namespace

TrivialClassification classify_trivial(const ReducedField& r, double tol) {
  TrivialClassification tc;
  tc.order_used = r.order;
  if (r.n == 1) {
    for (int d = 2; d <= r.order; ++d) {
      const double c = r.nonlinear[0].coefficient(Monomial{d});
      if (std::abs(c) <= tol) continue;
      tc.degree = d;
      tc.coefficient = c;
      if (d % 2 == 0) tc.verdict = TrivialVerdict::NeitherIsolated;
      else tc.verdict = c < 0 ? TrivialVerdict::AttractorOnCenter : TrivialVerdict::RepellerOnCenter;
      std::ostringstream os;
      os << "leading reduced term " << c << " w^" << d;
      tc.witness = os.str();
      return tc;
    }
    tc.witness = "all reduced coefficients vanish through order " + std::to_string(r.order);
    return tc;
  }
  if (r.n != 2) {
    tc.witness = "radial test implemented for n <= 2";
    return tc;
  }
  for (int d = 2; d <= r.order; ++d) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < kRadialDirections; ++k) {
      const double g = radial_component(r, d, direction(2.0 * std::numbers::pi * k / kRadialDirections));
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    if (std::max(std::abs(lo), std::abs(hi)) <= tol) continue;
    tc.degree = d;
    std::ostringstream os;
    os << "radial component of the degree-" << d << " part ranges over [" << lo << ", " << hi << "]";
    tc.witness = os.str();
    if (hi < -tol) {
      tc.verdict = TrivialVerdict::AttractorOnCenter;
      tc.coefficient = hi;
      tc.flow_confirmed = ring_contracts(r, 1.0, d, hi);
    } else if (lo > tol) {
      tc.verdict = TrivialVerdict::RepellerOnCenter;
      tc.coefficient = lo;
      tc.flow_confirmed = ring_contracts(r, -1.0, d, lo);
    } else if (lo < -tol && hi > tol) {
      tc.verdict = TrivialVerdict::NeitherIsolated;
      tc.coefficient = hi;
    } else {
      tc.verdict = TrivialVerdict::Unresolved;
      tc.witness += "; radial part vanishes on some directions";
    }
    return tc;
  }
  tc.witness = "all reduced coefficients vanish through order " + std::to_string(r.order);
  return tc;
}

Box reduced_box(int n, double half_width) {
  if (n < 1 || !(half_width > 0)) throw Error(ErrorKind::InvalidArgument, "invalid reduced box");
  Box b;
  b.lo = Eigen::VectorXd::Constant(n, -half_width);
  b.hi = Eigen::VectorXd::Constant(n, half_width);
  return b;
}

InvariantSetReport bifurcating_set(const SpectralModel& model, const CrossingData& crossing,
                                   const ReducedField& r, double lambda, const Box& box,
                                   const LocalOptions& options) {
  (void)model;
  check_trusted(crossing, r, lambda);
  if (r.n > 2) throw Error(ErrorKind::Unsupported, "bifurcating sets are computed for n <= 2");
  if (box.dim() != r.n) throw Error(ErrorKind::InvalidArgument, "box dimension differs from the crossing number");
  for (int i = 0; i < r.n; ++i)
    if (!(box.lo[i] < 0 && box.hi[i] > 0)) throw Error(ErrorKind::InvalidArgument, "box must contain 0 in its interior");

  const double nu = lambda - r.lambda0;
  const TrivialClassification tc = classify_trivial(r, options.tol);
  InvariantSetReport rep;
  rep.lambda = lambda;

  std::vector<Eigen::VectorXd> found;
  auto accept = [&](Eigen::VectorXd w) {
    if (w.norm() <= options.dedup_radius || !box.contains(w)) return;
    if (evaluate_reduced(r, nu, w).norm() > options.residual_tolerance) return;
    for (const auto& f : found)
      if ((f - w).norm() <= options.dedup_radius) return;
    found.push_back(std::move(w));
  };

  if (r.n == 1) {
    std::vector<double> coeffs(static_cast<std::size_t>(r.order), 0.0);
    coeffs[0] = r.unfolding[0] * nu;
    for (int d = 2; d <= r.order; ++d) coeffs[static_cast<std::size_t>(d - 1)] = r.nonlinear[0].coefficient(Monomial{d});
    for (double root : poly_real_roots(coeffs, box.lo[0], box.hi[0])) {
      Eigen::VectorXd w = Eigen::VectorXd::Constant(1, root);
      newton_reduced(r, nu, w);
      accept(std::move(w));
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  } else {
    const int s = options.seeds_per_axis;
    for (int j = 0; j < s; ++j)
      for (int i = 0; i < s; ++i) {
        Eigen::VectorXd w(2);
        w << box.lo[0] + (box.hi[0] - box.lo[0]) * (i + 0.5) / s, box.lo[1] + (box.hi[1] - box.lo[1]) * (j + 0.5) / s;
        if (newton_reduced(r, nu, w) <= options.residual_tolerance) accept(std::move(w));
      }
  }
  for (const auto& w : found) {
    rep.points.push_back(make_equilibrium(r, nu, w, options.stability_threshold));
    rep.lifted_points.push_back(lift(r, w));
  }

  const int side = sign_of(nu);
  const bool attractor_case = tc.verdict == TrivialVerdict::AttractorOnCenter;
  const bool sphere_side = (attractor_case || tc.verdict == TrivialVerdict::RepellerOnCenter) &&
                           predicts_nonempty(tc, crossing, side);
  if (sphere_side) {
    if (r.n == 1) {
      const Eigen::VectorXd* neg = nullptr;
      const Eigen::VectorXd* pos = nullptr;
      for (const auto& w : found) {
        if (w[0] < 0) neg = &w;
        else if (!pos) pos = &w;
      }
      if (neg) rep.sphere_samples.push_back(*neg);
      if (pos) rep.sphere_samples.push_back(*pos);
    } else {
      // 0 attracts under the reversed flow in the attractor case and under
      // the forward flow in the repeller case; its basin boundary is the sphere.
      const double flow = attractor_case ? -1.0 : 1.0;
      for (int k = 0; k < options.rays; ++k) {
        const Eigen::VectorXd e = direction(2.0 * std::numbers::pi * k / options.rays);
        const double r_hi = ray_exit(box, e);
        double lo = 1e-3 * r_hi, hi = r_hi;
        const double inner = 0.5 * lo;
        if (!reaches_origin(r, nu, flow, lo * e, inner, 2.0 * r_hi))
          throw Error(ErrorKind::NoInvariantSetFound, "0 does not attract along a sampled ray");
        if (reaches_origin(r, nu, flow, hi * e, inner, 2.0 * r_hi))
          throw Error(ErrorKind::NoInvariantSetFound, "basin of 0 reaches the box boundary; enlarge the box");
        while (hi - lo > options.ray_tolerance) {
          const double mid = 0.5 * (lo + hi);
          (reaches_origin(r, nu, flow, mid * e, inner, 2.0 * r_hi) ? lo : hi) = mid;
        }
        rep.sphere_samples.push_back(0.5 * (lo + hi) * e);
      }
    }
  }

  std::vector<Eigen::VectorXd> k_samples = rep.sphere_samples;
  for (const auto& p : rep.points) k_samples.push_back(p.w);
  for (const auto& w : k_samples) rep.d_H_to_zero = std::max(rep.d_H_to_zero, w.norm());

  if (r.n == 2 && !rep.sphere_samples.empty()) rep.kind = InvariantSetKind::SphereBoundary;
  else if (!rep.points.empty()) rep.kind = InvariantSetKind::EquilibriumPoints;
  else if (tc.verdict == TrivialVerdict::Unresolved) rep.kind = InvariantSetKind::Unresolved;
  else rep.kind = InvariantSetKind::Empty;

  rep.note = std::string("trivial solution on the center manifold: ") + std::string(to_string(tc.verdict));
  if (rep.kind == InvariantSetKind::Empty && predicts_nonempty(tc, crossing, side)) {
    std::ostringstream os;
    os << "no bifurcating invariant set found at lambda = " << lambda << " although the local theory predicts one ("
       << to_string(tc.verdict) << ")";
    throw Error(ErrorKind::NoInvariantSetFound, os.str());
  }
  return rep;
}

ConleyIndex reduced_trivial_index(const ReducedField& r, double half_width) {
  if (r.n > 2) throw Error(ErrorKind::Unsupported, "Conley indices are computed for n <= 2");
  const Box box = reduced_box(r.n, half_width);
  return conley_index(reduced_field(r, 0.0), box, {r.n == 1 ? 8 : 16, 16});
}

BifurcatingIndex index_of_bifurcating_set(const SpectralModel& model, const CrossingData& crossing,
                                          const ReducedField& r, double lambda, const Box& box,
                                          const LocalOptions& options) {
  const InvariantSetReport rep = bifurcating_set(model, crossing, r, lambda, box, options);
  if (rep.points.empty() && rep.sphere_samples.empty())
    throw Error(ErrorKind::NoInvariantSetFound, "K_lambda is empty at lambda = " + std::to_string(lambda));
  const double nu = lambda - r.lambda0;
  const Field field = reduced_field(r, nu);
  BifurcatingIndex out;

  if (rep.kind == InvariantSetKind::SphereBoundary) {
    double r_min = std::numeric_limits<double>::infinity(), r_max = 0.0;
    for (const auto& w : rep.sphere_samples) {
      r_min = std::min(r_min, w.norm());
      r_max = std::max(r_max, w.norm());
    }
    double outer = 1.5 * r_max;
    for (int i = 0; i < 2; ++i) outer = std::min({outer, -box.lo[i], box.hi[i]});
    const double inner = 0.5 * r_min / std::numbers::sqrt2;
    out.reduced_index = conley_index(field, reduced_box(2, outer), {16, 16}, {}, reduced_box(2, inner));
  } else {
    std::vector<double> dist(rep.points.size());
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      double d = rep.points[i].w.norm();
      for (std::size_t j = 0; j < rep.points.size(); ++j)
        if (j != i) d = std::min(d, (rep.points[i].w - rep.points[j].w).norm());
      dist[i] = 0.5 * d;
    }
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      Box b;
      b.lo = rep.points[i].w.array() - dist[i];
      b.hi = rep.points[i].w.array() + dist[i];
      out.reduced_index = wedge(out.reduced_index, conley_index(field, b, {r.n == 1 ? 8 : 16, 16}));
    }
  }
  out.index = suspend(out.reduced_index, crossing.m);
  out.nontrivial = !out.index.trivial();

  double half = std::numeric_limits<double>::infinity();
  for (int i = 0; i < r.n; ++i) half = std::min({half, -box.lo[i], box.hi[i]});
  out.trivial_index = suspend(reduced_trivial_index(r, 0.5 * half), crossing.m);
  const bool center_unstable = sign_of(nu) != 0 && sign_of(nu) == crossing.unstable_side();
  out.reference = ConleyIndex::sphere(crossing.m + (center_unstable ? crossing.n : 0));
  out.predicted_nontrivial = !(out.trivial_index == out.reference);
  return out;
}

StaticClassification classify_static_n1(const SpectralModel& model, const CrossingData& crossing,
                                        const ReducedField& reduced, double tol) {
  (void)model;
  if (crossing.n != 1 || reduced.n != 1)
    throw Error(ErrorKind::WrongArity, "static classification requires crossing number 1");
  StaticClassification sc;
  sc.basis = classify_trivial(reduced, tol);
  switch (sc.basis.verdict) {
    case TrivialVerdict::Unresolved:
      sc.alternative = StaticAlternative::AccumulatingNontrivialEquilibria;
      sc.caveat = "reduced field vanishes through order " + std::to_string(reduced.order) +
                  "; this is evidence for accumulating equilibria, not a proof";
      break;
    case TrivialVerdict::AttractorOnCenter:
    case TrivialVerdict::RepellerOnCenter:
      sc.alternative = StaticAlternative::OneSidedTwoSolutions;
      break;
    case TrivialVerdict::NeitherIsolated:
      sc.alternative = StaticAlternative::TwoSidedOneSolution;
      break;
  }
  return sc;
}

double hausdorff_semidistance(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  if (a.empty()) return 0.0;
  if (b.empty()) return std::numeric_limits<double>::infinity();
  double sup = 0.0;
  for (const auto& x : a) {
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& y : b) {
      if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "point dimensions differ");
      inf = std::min(inf, (x - y).norm());
    }
    sup = std::max(sup, inf);
  }
  return sup;
}

}  // namespace bifurcade
