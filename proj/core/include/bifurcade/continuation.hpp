#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bifurcade/model.hpp"
#include "bifurcade/spectrum.hpp"

namespace bifurcade {

struct TrivialSegment {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  int n_unstable = 0;
};

struct TrivialBranch {
  std::vector<TrivialSegment> segments;
  std::vector<double> breakpoints;  ///< every root of some beta_k in the window
};

TrivialBranch trace_trivial_branch(const SpectralModel& model, double lambda_lo, double lambda_hi);

/// Product window: lambda range times a ball in the V-norm.
struct Window {
  double lambda_lo = 0.0;
  double lambda_hi = 1.0;
  double norm_bound = 50.0;
};

struct StepConfig {
  double initial_step = 1e-2;
  double min_step = 1e-4;
  double max_step = 1e-1;
  int max_points = 20000;
  double newton_tolerance = 1e-11;
  int newton_max_iterations = 10;
  double reconnect_tolerance = 1e-6;  ///< amplitude below which the branch has reached the trivial branch
  double match_tolerance = 1e-6;      ///< distance to a bifurcation value for ReconnectTrivial
};

struct SwitchResult {
  double lambda = 0.0;
  Eigen::VectorXd a;
  double predicted_lambda = 0.0;
  int iterations = 0;
};

/// Corrected first point of the bifurcating branch with center amplitude h.
/// The parameter guess comes from the reduced equation; Newton then solves
/// f(a, lambda) = 0 together with a_c = h. Requires a simple crossing.
SwitchResult switch_branch(const SpectralModel& model, const CrossingData& crossing, double h);

enum class TerminationKind { HitParamBoundary, HitNormBoundary, ReconnectTrivial, AccumulateAtZero, MaxSteps };
std::string_view to_string(TerminationKind k) noexcept;

struct Termination {
  TerminationKind kind = TerminationKind::MaxSteps;
  double value = 0.0;  ///< lambda_end, norm, lambda1 or lambda*, depending on kind
  std::string diagnostics;
};

struct BranchPoint {
  double lambda = 0.0;
  Eigen::VectorXd a;
  double v_norm = 0.0;
  int n_unstable = 0;
  double arclength = 0.0;
};

struct Branch {
  std::optional<double> origin;     ///< lambda0 of the crossing; empty for a start off the trivial branch
  std::vector<int> center_modes;
  std::vector<BranchPoint> points;
  Termination termination;
  int direction = 1;
  std::vector<double> stability_changes;  ///< lambdas where n_unstable changes along the branch
};

struct BranchStart {
  double lambda = 0.0;
  Eigen::VectorXd a;
  std::optional<double> origin;
  std::vector<int> center_modes;
  /// Orientation of the initial tangent: along the center amplitude for a
  /// switched start, along lambda otherwise.
  int direction = 1;
};

/// Pseudo-arclength continuation from a corrected equilibrium until the
/// branch leaves the window or returns to the trivial branch.
Branch continue_branch(const SpectralModel& model, const BranchStart& start, const Window& window,
                       const StepConfig& steps = {});

/// Number of Jacobian eigenvalues with real part above 1e-8.
int stability_signature(const SpectralModel& model, double lambda, const Eigen::VectorXd& a);

/// Newton polish of an equilibrium at fixed lambda; returns the final residual.
double polish_equilibrium(const SpectralModel& model, double lambda, Eigen::VectorXd& a, int max_iterations = 20);

struct BranchSummary {
  Branch branch;
  std::string alternative;  ///< the global alternative this branch realizes
};

struct SkippedCrossing {
  double lambda0 = 0.0;
  std::string reason;
};

struct GlobalReport {
  Window window;
  std::vector<CrossingData> crossings;
  std::vector<BranchSummary> branches;
  std::vector<SkippedCrossing> skipped;
  std::optional<double> lambda_min;  ///< proxy for Lambda_0: min lambda over branch points
  std::optional<double> lambda_max;  ///< proxy for Lambda_1: max lambda over branch points
};

GlobalReport global_report(const SpectralModel& model, const Window& window, const StepConfig& steps = {},
                           double switch_amplitude = 0.05);

struct ProbeRecord {
  int mode = 0;            ///< 0-based eigenmode of the seed direction
  int sign = 1;
  bool reversed = false;   ///< stable direction followed backwards in time
  bool converged = false;  ///< false: Diverged or no steady state within t_max
  Eigen::VectorXd limit;   ///< omega-limit (forward) or alpha-limit (reversed) when converged
  double residual = 0.0;
  std::optional<double> j_limit;
  std::optional<double> j_zero;
  bool j_monotone = true;  ///< J non-increasing in physical time along the recorded steps
  double j_max_violation = 0.0;
};

struct HeteroclinicProbe {
  double lambda = 0.0;
  std::vector<ProbeRecord> records;
  std::string verdict;
  std::string note;
};

HeteroclinicProbe heteroclinic_probe(const SpectralModel& model, double lambda, int n_directions, double t_max,
                                     double epsilon = 1e-4);

}  // namespace bifurcade
