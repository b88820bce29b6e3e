#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bifurcade {

/// Homology Conley index as a Betti vector over the rationals. Degrees with
/// rank zero are not stored; the empty map is the trivial index.
class ConleyIndex {
 public:
  ConleyIndex() = default;
  explicit ConleyIndex(std::map<int, int> betti);

  /// Index of a hyperbolic equilibrium with `m` unstable directions.
  static ConleyIndex sphere(int m);
  static ConleyIndex trivial_index() { return {}; }

  const std::map<int, int>& betti() const { return betti_; }
  int rank(int degree) const;
  bool trivial() const { return betti_.empty(); }

  friend bool operator==(const ConleyIndex&, const ConleyIndex&) = default;

 private:
  std::map<int, int> betti_;
};

/// Shift every degree up by m (suspension by an m-sphere).
ConleyIndex suspend(const ConleyIndex& index, int m);
/// Degreewise sum of ranks (index of a disjoint union).
ConleyIndex wedge(const ConleyIndex& a, const ConleyIndex& b);

std::string to_string(const ConleyIndex& index);

using Field = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Eigen::VectorXd& p) const;
};

Box make_box(std::initializer_list<double> lo, std::initializer_list<double> hi);

/// A codimension-one face on the boundary of a block: a grid vertex in 1D, a
/// grid edge in 2D. `node` is the grid node at its lower corner.
struct BoundaryFace {
  int normal_axis = 0;
  int outward = 1;  ///< sign of the outward normal along normal_axis
  std::array<int, 2> node{0, 0};
};

/// Gridded isolating block B (a union of grid cells) together with the
/// classification of its boundary into exit set B- and ingress part.
struct IsolatingBlock {
  int dim = 0;
  Box box;
  std::array<int, 2> resolution{1, 1};
  std::optional<Box> hole;
  std::vector<char> cells;  ///< cell mask, index ix + resolution[0] * iy
  std::vector<BoundaryFace> exit_faces;
  std::vector<BoundaryFace> ingress_faces;
  std::vector<BoundaryFace> tangency_report;  ///< faces where the normal component changes sign
  int refinements = 0;

  bool accepted() const { return tangency_report.empty(); }
  Eigen::VectorXd node_position(int i, int j = 0) const;
  /// End points of a face (identical in 1D).
  std::pair<Eigen::VectorXd, Eigen::VectorXd> face_endpoints(const BoundaryFace& face) const;
};

struct BlockOptions {
  int samples_per_edge = 5;  ///< interior samples per face in addition to its end points
  int max_refinements = 6;
};

/// Takes B = box (minus the cells whose centers lie in `hole`), classifies
/// every boundary face by the sign of the outward normal component of the
/// field at its sample points, and doubles the grid while some face mixes
/// signs. The returned block may carry a non-empty tangency report.
IsolatingBlock try_build_isolating_block(const Field& field, const Box& box, std::array<int, 2> grid,
                                         const BlockOptions& options = {},
                                         const std::optional<Box>& hole = std::nullopt);

/// Same as try_build_isolating_block but throws PersistentTangency when no
/// transverse block is found.
IsolatingBlock build_isolating_block(const Field& field, const Box& box, std::array<int, 2> grid,
                                     const BlockOptions& options = {},
                                     const std::optional<Box>& hole = std::nullopt);

/// Betti numbers of the relative cubical homology H_*(B, B-), with ranks taken
/// modulo a large prime.
ConleyIndex relative_betti(const IsolatingBlock& block);

/// Convenience: block construction followed by relative homology.
ConleyIndex conley_index(const Field& field, const Box& box, std::array<int, 2> grid,
                         const BlockOptions& options = {}, const std::optional<Box>& hole = std::nullopt);

struct SweepSample {
  double lambda = 0.0;
  std::optional<ConleyIndex> index;  ///< empty when isolation was lost
  bool isolation_lost() const { return !index.has_value(); }
};

struct SweepResult {
  std::vector<SweepSample> samples;
  bool constant = true;                 ///< same index at every isolated sample
  std::vector<double> changes;          ///< lambdas where the index differs from the previous isolated sample
  std::vector<double> isolation_lost;   ///< lambdas where the box failed to be a block
};

/// Computes the index in a fixed box for every parameter value. The interval
/// form takes `steps` equally spaced samples including both end points.
SweepResult index_constancy_sweep(const std::function<Field(double)>& family, const Box& box,
                                  std::array<int, 2> grid, const std::vector<double>& lambdas,
                                  const BlockOptions& options = {});
SweepResult index_constancy_sweep(const std::function<Field(double)>& family, const Box& box,
                                  std::array<int, 2> grid, double lambda_lo, double lambda_hi, int steps,
                                  const BlockOptions& options = {});

}  // namespace bifurcade
