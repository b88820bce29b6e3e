#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bifurcade/center_manifold.hpp"
#include "bifurcade/conley.hpp"
#include "bifurcade/model.hpp"
#include "bifurcade/spectrum.hpp"

namespace bifurcade {

enum class TrivialVerdict { AttractorOnCenter, RepellerOnCenter, NeitherIsolated, Unresolved };
std::string_view to_string(TrivialVerdict v) noexcept;

struct TrivialClassification {
  TrivialVerdict verdict = TrivialVerdict::Unresolved;
  int degree = 0;            ///< degree of the leading nonvanishing term, 0 if none
  double coefficient = 0.0;  ///< n = 1: leading coefficient; n = 2: extreme radial value of the leading part
  int order_used = 0;
  /// n = 2 only: the reduced flow (or its time reversal) pulls a ring of
  /// initial points towards 0, as the verdict claims.
  std::optional<bool> flow_confirmed;
  std::string witness;
};

TrivialClassification classify_trivial(const ReducedField& reduced, double tol = 1e-10);

enum class InvariantSetKind { Empty, EquilibriumPoints, SphereBoundary, Unresolved };
std::string_view to_string(InvariantSetKind k) noexcept;

enum class Stability { Stable, Unstable, Saddle, NonHyperbolic };
std::string_view to_string(Stability s) noexcept;

struct ReducedEquilibrium {
  Eigen::VectorXd w;
  Stability stability = Stability::NonHyperbolic;
  Eigen::VectorXd eigenvalues;  ///< real parts of the reduced Jacobian eigenvalues
};

struct InvariantSetReport {
  double lambda = 0.0;
  InvariantSetKind kind = InvariantSetKind::Empty;
  std::vector<ReducedEquilibrium> points;
  std::vector<Eigen::VectorXd> sphere_samples;
  std::vector<Eigen::VectorXd> lifted_points;
  double d_H_to_zero = 0.0;
  std::string note;
};

struct LocalOptions {
  int seeds_per_axis = 32;
  double dedup_radius = 1e-6;
  double stability_threshold = 1e-8;
  double residual_tolerance = 1e-9;
  int rays = 64;
  double ray_tolerance = 1e-7;
  double tol = 1e-10;  ///< coefficient threshold passed to classify_trivial
};

/// Square box of the given half-width in reduced coordinates.
Box reduced_box(int n, double half_width = 1.0);

/// Nonzero equilibria of the reduced field near 0 at parameter `lambda`, plus
/// the basin boundary of 0 (the bifurcating sphere) when the trivial solution
/// is an attractor or repeller on the center manifold.
InvariantSetReport bifurcating_set(const SpectralModel& model, const CrossingData& crossing,
                                   const ReducedField& reduced, double lambda, const Box& box,
                                   const LocalOptions& options = {});

struct BifurcatingIndex {
  ConleyIndex index;            ///< index of K_lambda in the full system (suspended by m)
  ConleyIndex reduced_index;    ///< index of K_lambda for the reduced flow
  ConleyIndex trivial_index;    ///< h(Phi_0, S_0) of the full system at lambda0
  ConleyIndex reference;        ///< index of 0 at lambda for the full system
  bool nontrivial = false;
  bool predicted_nontrivial = false;  ///< trivial_index differs from reference
};

BifurcatingIndex index_of_bifurcating_set(const SpectralModel& model, const CrossingData& crossing,
                                          const ReducedField& reduced, double lambda, const Box& box,
                                          const LocalOptions& options = {});

/// h(Phi_0, S_0) of the reduced flow at nu = 0, computed from a block of the
/// given half-width around 0.
ConleyIndex reduced_trivial_index(const ReducedField& reduced, double half_width);

enum class StaticAlternative { AccumulatingNontrivialEquilibria, OneSidedTwoSolutions, TwoSidedOneSolution };
std::string_view to_string(StaticAlternative a) noexcept;

struct StaticClassification {
  StaticAlternative alternative;
  TrivialClassification basis;
  std::string caveat;
};

StaticClassification classify_static_n1(const SpectralModel& model, const CrossingData& crossing,
                                        const ReducedField& reduced, double tol = 1e-10);

/// sup over a in A of dist(a, B); 0 for empty A, +inf for nonempty A and empty B.
double hausdorff_semidistance(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b);

}  // namespace bifurcade
