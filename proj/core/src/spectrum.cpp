#include "bifurcade/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bifurcade/error.hpp"
#include "bifurcade/polynomial.hpp"

namespace bifurcade {

namespace {

double coefficient_scale(std::span<const double> c, double x) {
  double s = 0.0, p = 1.0;
  for (double v : c) {
    s += std::abs(v) * p;
    p *= std::abs(x);
  }
  return std::max(1.0, s);
}

bool vanishes_at(const SpectralModel& model, int k, double lambda, double tol) {
  const auto c = model.linear_coefficients(k);
  return std::abs(poly_eval(c, lambda)) <= tol * coefficient_scale(c, lambda);
}

/// min and max of beta_k over [lo, hi]: endpoints plus interior critical points.
std::pair<double, double> beta_range(const SpectralModel& model, int k, double lo, double hi) {
  const auto c = model.linear_coefficients(k);
  double mn = std::min(poly_eval(c, lo), poly_eval(c, hi));
  double mx = std::max(poly_eval(c, lo), poly_eval(c, hi));
  const auto dc = poly_derivative(c);
  for (double x : poly_real_roots(dc, lo, hi)) {
    const double v = poly_eval(c, x);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return {mn, mx};
}

}  // namespace

std::vector<ModeValue> linear_spectrum(const SpectralModel& model, double lambda) {
  std::vector<ModeValue> out;
  out.reserve(model.dim());
  for (int k = 0; k < model.dim(); ++k) out.push_back({k, model.beta(k, lambda)});
  return out;
}

int unstable_dimension(const SpectralModel& model, double lambda) {
  int count = 0;
  for (int k = 0; k < model.dim(); ++k) count += model.beta(k, lambda) < 0.0 ? 1 : 0;
  return count;
}

CrossingData crossing_data(const SpectralModel& model, double lambda0, double tol) {
  CrossingData cd;
  cd.lambda0 = lambda0;
  for (int k = 0; k < model.dim(); ++k) {
    if (vanishes_at(model, k, lambda0, tol)) cd.center_modes.push_back(k);
  }
  if (cd.center_modes.empty()) {
    std::ostringstream os;
    os << "no linear coefficient vanishes at lambda = " << lambda0;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  cd.n = static_cast<int>(cd.center_modes.size());

  int orientation = 0;
  bool mixed = false;
  for (int k : cd.center_modes) {
    const double slope = model.beta_slope(k, lambda0);
    if (std::abs(slope) < kTransversalityThreshold) {
      std::ostringstream os;
      os << "mode " << k + 1 << " crosses non-transversally at lambda = " << lambda0;
      throw Error(ErrorKind::Degenerate, os.str());
    }
    cd.transversality.push_back(slope);
    const int s = slope > 0.0 ? 1 : -1;
    if (orientation == 0) orientation = s;
    else if (orientation != s) mixed = true;
  }
  cd.h4_orientation = mixed ? 0 : orientation;

  std::vector<int> others;
  for (int k = 0; k < model.dim(); ++k) {
    if (std::find(cd.center_modes.begin(), cd.center_modes.end(), k) == cd.center_modes.end()) {
      others.push_back(k);
      if (model.beta(k, lambda0) < 0.0) ++cd.m;
    }
  }

  // Nearest other root of any linear coefficient bounds the interval.
  constexpr double kSearch = 1e8;
  double nearest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < model.dim(); ++k) {
    for (double r : poly_real_roots(model.linear_coefficients(k), lambda0 - kSearch, lambda0 + kSearch)) {
      const double dist = std::abs(r - lambda0);
      if (dist > tol * std::max(1.0, std::abs(lambda0))) nearest = std::min(nearest, dist);
    }
  }
  double eta = std::isfinite(nearest) ? 0.5 * nearest : 1.0;

  for (int attempt = 0; attempt < 80; ++attempt, eta *= 0.5) {
    const double lo = lambda0 - eta, hi = lambda0 + eta;
    double center_max = 0.0;
    for (int k : cd.center_modes) {
      const auto [mn, mx] = beta_range(model, k, lo, hi);
      center_max = std::max({center_max, std::abs(mn), std::abs(mx)});
    }
    double unstable_gap = std::numeric_limits<double>::infinity();
    double stable_gap = std::numeric_limits<double>::infinity();
    bool separated = true;
    for (int k : others) {
      const auto [mn, mx] = beta_range(model, k, lo, hi);
      if (model.beta(k, lambda0) < 0.0) {
        if (mx >= 0.0) separated = false;
        unstable_gap = std::min(unstable_gap, -mx);
      } else {
        if (mn <= 0.0) separated = false;
        stable_gap = std::min(stable_gap, mn);
      }
    }
    if (!separated) continue;
    double alpha1 = 0.5 * unstable_gap;
    double alpha4 = 0.5 * stable_gap;
    double limit = std::min(alpha1, alpha4);
    if (!std::isfinite(limit)) limit = center_max + 1.0;
    if (!(center_max < limit)) continue;
    if (!std::isfinite(alpha1)) alpha1 = limit;
    if (!std::isfinite(alpha4)) alpha4 = limit;
    const double mid = 0.5 * (center_max + limit);
    cd.gaps = SpectralGaps{alpha1, mid, mid, alpha4, eta, lo, hi};
    return cd;
  }
  std::ostringstream os;
  os << "no separating interval around lambda = " << lambda0 << " (nearest other crossing at distance "
     << nearest << ")";
  throw Error(ErrorKind::IntervalTooTight, os.str());
}

DetectionResult detect_bifurcation_values(const SpectralModel& model, double lambda_lo,
                                          double lambda_hi, double tol) {
  if (!(lambda_lo < lambda_hi)) throw Error(ErrorKind::InvalidArgument, "lambda window must satisfy lo < hi");
  struct Root {
    double value;
    int mode;
  };
  std::vector<Root> roots;
  for (int k = 0; k < model.dim(); ++k) {
    for (double r : poly_real_roots(model.linear_coefficients(k), lambda_lo, lambda_hi)) roots.push_back({r, k});
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    return a.value < b.value || (a.value == b.value && a.mode < b.mode);
  });

  DetectionResult result;
  for (std::size_t i = 0; i < roots.size();) {
    std::size_t j = i + 1;
    while (j < roots.size() &&
           roots[j].value - roots[i].value <= tol * std::max(1.0, std::abs(roots[i].value)))
      ++j;
    double mean = 0.0;
    std::vector<int> modes;
    for (std::size_t r = i; r < j; ++r) {
      mean += roots[r].value;
      modes.push_back(roots[r].mode);
    }
    mean /= static_cast<double>(j - i);
    try {
      result.crossings.push_back(crossing_data(model, mean, tol));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate && e.kind() != ErrorKind::IntervalTooTight) throw;
      result.degenerate.push_back({mean, modes, e.what()});
    }
    i = j;
  }
  return result;
}

}  // namespace bifurcade
