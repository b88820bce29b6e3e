#pragma once

#include <string>
#include <vector>

#include "bifurcade/model.hpp"

namespace bifurcade {

struct ModeValue {
  int mode;  ///< 0-based mode index
  double beta;
};

/// Spectral gap constants on the parameter interval [lambda_lo, lambda_hi]
/// around a crossing:  beta < -alpha1 < -alpha2 <= beta_center < alpha3 < alpha4 < beta
/// for the unstable, center and stable groups respectively.
struct SpectralGaps {
  double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0, alpha4 = 0.0;
  double eta = 0.0;
  double lambda_lo = 0.0, lambda_hi = 0.0;
};

struct CrossingData {
  double lambda0 = 0.0;
  std::vector<int> center_modes;  ///< 0-based indices with beta_k(lambda0) = 0
  int n = 0;                      ///< crossing number
  int m = 0;                      ///< unstable dimension: #{beta_k(lambda0) < 0}
  SpectralGaps gaps;
  std::vector<double> transversality;  ///< d beta_k / d lambda at lambda0, per center mode
  /// +1 when the center eigenvalues of L go from negative to positive as lambda
  /// increases (0 loses stability as lambda decreases), -1 for the reverse, 0
  /// when the center modes disagree.
  int h4_orientation = 0;

  /// +1 / -1: the side of lambda0 on which every center mode is unstable; 0 if none.
  int unstable_side() const { return -h4_orientation; }
};

struct DegenerateValue {
  double lambda0 = 0.0;
  std::vector<int> modes;
  std::string reason;
};

struct DetectionResult {
  std::vector<CrossingData> crossings;  ///< ascending in lambda0
  std::vector<DegenerateValue> degenerate;
};

inline constexpr double kRootMergeTolerance = 1e-9;
inline constexpr double kTransversalityThreshold = 1e-8;

std::vector<ModeValue> linear_spectrum(const SpectralModel& model, double lambda);

/// Number of modes with beta_k(lambda) < 0, i.e. growing linear modes.
int unstable_dimension(const SpectralModel& model, double lambda);

/// All parameter values in [lambda_lo, lambda_hi] where some beta_k vanishes,
/// merged within `tol`. Non-transversal roots are reported separately.
DetectionResult detect_bifurcation_values(const SpectralModel& model, double lambda_lo,
                                          double lambda_hi, double tol = kRootMergeTolerance);

/// Full spectral bookkeeping at a root lambda0. Throws InvalidArgument when no
/// beta vanishes there, Degenerate for a non-transversal crossing and
/// IntervalTooTight when no separating interval can be found.
CrossingData crossing_data(const SpectralModel& model, double lambda0, double tol = kRootMergeTolerance);

}  // namespace bifurcade
