#include "bifurcade/conley.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_map>

#include "bifurcade/error.hpp"

namespace bifurcade {

ConleyIndex::ConleyIndex(std::map<int, int> betti) {
  for (auto [degree, rank] : betti) {
    if (rank < 0) throw Error(ErrorKind::InvalidArgument, "negative Betti number");
    if (rank > 0) betti_[degree] = rank;
  }
}

ConleyIndex ConleyIndex::sphere(int m) {
  if (m < 0) throw Error(ErrorKind::InvalidArgument, "sphere dimension must be non-negative");
  return ConleyIndex(std::map<int, int>{{m, 1}});
}

int ConleyIndex::rank(int degree) const {
  auto it = betti_.find(degree);
  return it == betti_.end() ? 0 : it->second;
}

ConleyIndex suspend(const ConleyIndex& index, int m) {
  if (m < 0) throw Error(ErrorKind::InvalidArgument, "suspension order must be non-negative");
  std::map<int, int> out;
  for (auto [degree, rank] : index.betti()) out[degree + m] = rank;
  return ConleyIndex(std::move(out));
}

ConleyIndex wedge(const ConleyIndex& a, const ConleyIndex& b) {
  std::map<int, int> out = a.betti();
  for (auto [degree, rank] : b.betti()) out[degree] += rank;
  return ConleyIndex(std::move(out));
}

std::string to_string(const ConleyIndex& index) {
  if (index.trivial()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto [degree, rank] : index.betti()) {
    if (!first) os << " v ";
    first = false;
    if (rank > 1) os << rank << "*";
    os << "S^" << degree;
  }
  return os.str();
}

bool Box::contains(const Eigen::VectorXd& p) const {
  for (int i = 0; i < dim(); ++i)
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  return true;
}

Box make_box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Box b;
  b.lo = Eigen::Map<const Eigen::VectorXd>(lo.begin(), static_cast<Eigen::Index>(lo.size()));
  b.hi = Eigen::Map<const Eigen::VectorXd>(hi.begin(), static_cast<Eigen::Index>(hi.size()));
  return b;
}

Eigen::VectorXd IsolatingBlock::node_position(int i, int j) const {
  Eigen::VectorXd p(dim);
  p[0] = box.lo[0] + (box.hi[0] - box.lo[0]) * i / resolution[0];
  if (dim == 2) p[1] = box.lo[1] + (box.hi[1] - box.lo[1]) * j / resolution[1];
  return p;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> IsolatingBlock::face_endpoints(const BoundaryFace& f) const {
  Eigen::VectorXd a = node_position(f.node[0], f.node[1]);
  if (dim == 1) return {a, a};
  // a 2D face runs along the axis other than its normal
  if (f.normal_axis == 0) return {a, node_position(f.node[0], f.node[1] + 1)};
  return {a, node_position(f.node[0] + 1, f.node[1])};
}

namespace {

void validate_box(const Box& box, std::array<int, 2> grid) {
  const int d = box.dim();
  if (d != 1 && d != 2)
    throw Error(ErrorKind::Unsupported, "isolating blocks are implemented for dimension 1 and 2");
  if (box.hi.size() != d) throw Error(ErrorKind::InvalidArgument, "box corners differ in dimension");
  for (int i = 0; i < d; ++i) {
    if (!(box.hi[i] > box.lo[i])) throw Error(ErrorKind::InvalidArgument, "box has empty extent");
    if (grid[i] < 1) throw Error(ErrorKind::InvalidArgument, "grid resolution must be positive");
  }
}

struct Grid {
  int nx, ny, dim;
  const std::vector<char>* cells;
  bool in(int i, int j) const {
    if (i < 0 || i >= nx) return false;
    if (dim == 2 && (j < 0 || j >= ny)) return false;
    return (*cells)[static_cast<std::size_t>(i + nx * (dim == 2 ? j : 0))] != 0;
  }
};

std::vector<BoundaryFace> boundary_faces(const IsolatingBlock& b) {
  Grid g{b.resolution[0], b.resolution[1], b.dim, &b.cells};
  std::vector<BoundaryFace> faces;
  if (b.dim == 1) {
    for (int i = 0; i <= g.nx; ++i) {
      const bool left = g.in(i - 1, 0), right = g.in(i, 0);
      if (left != right) faces.push_back({0, right ? -1 : 1, {i, 0}});
    }
    return faces;
  }
  // vertical edges (normal along x)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const bool left = g.in(i - 1, j), right = g.in(i, j);
      if (left != right) faces.push_back({0, right ? -1 : 1, {i, j}});
    }
  // horizontal edges (normal along y)
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const bool below = g.in(i, j - 1), above = g.in(i, j);
      if (below != above) faces.push_back({1, above ? -1 : 1, {i, j}});
    }
  return faces;
}

IsolatingBlock make_block(const Box& box, std::array<int, 2> grid, const std::optional<Box>& hole) {
  IsolatingBlock b;
  b.dim = box.dim();
  b.box = box;
  b.resolution = {grid[0], b.dim == 2 ? grid[1] : 1};
  b.hole = hole;
  const int nx = b.resolution[0], ny = b.resolution[1];
  b.cells.assign(static_cast<std::size_t>(nx * ny), 1);
  if (hole) {
    if (hole->dim() != b.dim) throw Error(ErrorKind::InvalidArgument, "hole dimension differs from box");
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        Eigen::VectorXd c = (b.node_position(i, j) + b.node_position(i + 1, b.dim == 2 ? j + 1 : 0)) / 2.0;
        if (hole->contains(c)) b.cells[static_cast<std::size_t>(i + nx * j)] = 0;
      }
  }
  return b;
}

// 0 transverse outward, 1 transverse inward, 2 mixed or tangent
int classify_face(const IsolatingBlock& b, const BoundaryFace& f, const Field& field, int samples) {
  auto [p, q] = b.face_endpoints(f);
  const int count = b.dim == 1 ? 1 : samples + 2;
  int positive = 0, negative = 0;
  for (int s = 0; s < count; ++s) {
    const double t = count == 1 ? 0.0 : static_cast<double>(s) / (count - 1);
    Eigen::VectorXd x = (1.0 - t) * p + t * q;
    Eigen::VectorXd v = field(x);
    if (v.size() != b.dim) throw Error(ErrorKind::InvalidArgument, "field returned a vector of wrong size");
    const double n = v[f.normal_axis] * f.outward;
    if (!std::isfinite(n)) return 2;
    if (n > 0.0) ++positive;
    else if (n < 0.0) ++negative;
    else return 2;
  }
  if (negative == 0) return 0;
  if (positive == 0) return 1;
  return 2;
}

// Rank of a sparse integer matrix over Z/p with p = 2^31 - 1. The cubical
// complexes here are planar, hence torsion free, so this equals the rank
// over the rationals.
constexpr std::int64_t kPrime = 2147483647;

std::int64_t mod_pow(std::int64_t base, std::int64_t exp) {
  std::int64_t r = 1;
  base %= kPrime;
  if (base < 0) base += kPrime;
  while (exp > 0) {
    if (exp & 1) r = r * base % kPrime;
    base = base * base % kPrime;
    exp >>= 1;
  }
  return r;
}

using SparseColumn = std::vector<std::pair<int, std::int64_t>>;  // sorted by row

int sparse_rank(std::vector<SparseColumn> columns) {
  std::unordered_map<int, std::size_t> pivot_column;
  int rank = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    SparseColumn& col = columns[c];
    while (!col.empty()) {
      const int low = col.back().first;
      auto it = pivot_column.find(low);
      if (it == pivot_column.end()) break;
      const SparseColumn& piv = columns[it->second];
      const std::int64_t factor = col.back().second * mod_pow(piv.back().second, kPrime - 2) % kPrime;
      SparseColumn merged;
      merged.reserve(col.size() + piv.size());
      std::size_t a = 0, b = 0;
      while (a < col.size() || b < piv.size()) {
        if (b == piv.size() || (a < col.size() && col[a].first < piv[b].first)) {
          merged.push_back(col[a++]);
        } else if (a == col.size() || piv[b].first < col[a].first) {
          merged.emplace_back(piv[b].first, (kPrime - factor * piv[b].second % kPrime) % kPrime);
          ++b;
        } else {
          std::int64_t v = (col[a].second - factor * piv[b].second % kPrime) % kPrime;
          if (v < 0) v += kPrime;
          if (v != 0) merged.emplace_back(col[a].first, v);
          ++a;
          ++b;
        }
      }
      col.swap(merged);
    }
    if (!col.empty()) {
      pivot_column[col.back().first] = c;
      ++rank;
    }
  }
  return rank;
}

SparseColumn make_column(std::vector<std::pair<int, int>> entries) {
  std::sort(entries.begin(), entries.end());
  SparseColumn col;
  for (auto [row, v] : entries) {
    if (row < 0) continue;  // dropped: belongs to the exit subcomplex
    std::int64_t m = v % kPrime;
    if (m < 0) m += kPrime;
    col.emplace_back(row, m);
  }
  return col;
}

}  // namespace

IsolatingBlock try_build_isolating_block(const Field& field, const Box& box, std::array<int, 2> grid,
                                         const BlockOptions& options, const std::optional<Box>& hole) {
  validate_box(box, grid);
  if (options.samples_per_edge < 0 || options.max_refinements < 0)
    throw Error(ErrorKind::InvalidArgument, "block options must be non-negative");
  IsolatingBlock block;
  std::array<int, 2> res = grid;
  for (int level = 0; level <= options.max_refinements; ++level) {
    block = make_block(box, res, hole);
    block.refinements = level;
    bool nonempty = std::any_of(block.cells.begin(), block.cells.end(), [](char c) { return c != 0; });
    if (!nonempty) throw Error(ErrorKind::InvalidArgument, "hole removes every cell of the box");
    for (const BoundaryFace& f : boundary_faces(block)) {
      switch (classify_face(block, f, field, options.samples_per_edge)) {
        case 0: block.exit_faces.push_back(f); break;
        case 1: block.ingress_faces.push_back(f); break;
        default: block.tangency_report.push_back(f); break;
      }
    }
    if (block.accepted()) return block;
    res = {res[0] * 2, res[1] * 2};
  }
  return block;
}

IsolatingBlock build_isolating_block(const Field& field, const Box& box, std::array<int, 2> grid,
                                     const BlockOptions& options, const std::optional<Box>& hole) {
  IsolatingBlock block = try_build_isolating_block(field, box, grid, options, hole);
  if (!block.accepted()) {
    std::ostringstream os;
    os << "no transverse block after " << block.refinements << " refinements; "
       << block.tangency_report.size() << " boundary faces are tangent, first at ";
    auto [p, q] = block.face_endpoints(block.tangency_report.front());
    Eigen::VectorXd mid = (p + q) / 2.0;
    os << "(";
    for (int i = 0; i < mid.size(); ++i) os << (i ? ", " : "") << mid[i];
    os << ")";
    throw Error(ErrorKind::PersistentTangency, os.str());
  }
  return block;
}

ConleyIndex relative_betti(const IsolatingBlock& b) {
  if (!b.accepted())
    throw Error(ErrorKind::InvalidArgument, "relative homology requires an accepted block");
  Grid g{b.resolution[0], b.resolution[1], b.dim, &b.cells};
  const int nx = g.nx, ny = g.ny;

  if (b.dim == 1) {
    std::vector<char> vin(static_cast<std::size_t>(nx + 1), 0), vexit(static_cast<std::size_t>(nx + 1), 0);
    for (int i = 0; i < nx; ++i)
      if (g.in(i, 0)) vin[static_cast<std::size_t>(i)] = vin[static_cast<std::size_t>(i + 1)] = 1;
    for (const BoundaryFace& f : b.exit_faces) vexit[static_cast<std::size_t>(f.node[0])] = 1;
    std::vector<int> vid(static_cast<std::size_t>(nx + 1), -1);
    int V = 0;
    for (int i = 0; i <= nx; ++i)
      if (vin[static_cast<std::size_t>(i)] && !vexit[static_cast<std::size_t>(i)]) vid[static_cast<std::size_t>(i)] = V++;
    std::vector<SparseColumn> d1;
    for (int i = 0; i < nx; ++i)
      if (g.in(i, 0)) d1.push_back(make_column({{vid[static_cast<std::size_t>(i)], -1}, {vid[static_cast<std::size_t>(i + 1)], 1}}));
    const int E = static_cast<int>(d1.size());
    const int r1 = sparse_rank(std::move(d1));
    return ConleyIndex(std::map<int, int>{{0, V - r1}, {1, E - r1}});
  }

  const auto hid = [&](int i, int j) { return i + nx * j; };         // i < nx, j <= ny
  const auto vid = [&](int i, int j) { return i + (nx + 1) * j; };   // i <= nx, j < ny
  const auto pid = [&](int i, int j) { return i + (nx + 1) * j; };   // vertices
  const std::size_t n_h = static_cast<std::size_t>(nx * (ny + 1));
  const std::size_t n_v = static_cast<std::size_t>((nx + 1) * ny);
  const std::size_t n_p = static_cast<std::size_t>((nx + 1) * (ny + 1));

  std::vector<char> h_in(n_h, 0), v_in(n_v, 0), p_in(n_p, 0);
  std::vector<char> h_exit(n_h, 0), v_exit(n_v, 0), p_exit(n_p, 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!g.in(i, j)) continue;
      h_in[hid(i, j)] = h_in[hid(i, j + 1)] = 1;
      v_in[vid(i, j)] = v_in[vid(i + 1, j)] = 1;
      p_in[pid(i, j)] = p_in[pid(i + 1, j)] = p_in[pid(i, j + 1)] = p_in[pid(i + 1, j + 1)] = 1;
    }
  for (const BoundaryFace& f : b.exit_faces) {
    const int i = f.node[0], j = f.node[1];
    if (f.normal_axis == 0) {
      v_exit[vid(i, j)] = 1;
      p_exit[pid(i, j)] = p_exit[pid(i, j + 1)] = 1;
    } else {
      h_exit[hid(i, j)] = 1;
      p_exit[pid(i, j)] = p_exit[pid(i + 1, j)] = 1;
    }
  }

  // relative chain bases: cells of B not in the exit subcomplex
  std::vector<int> p_row(n_p, -1), h_row(n_h, -1), v_row(n_v, -1);
  int V = 0, E = 0;
  for (std::size_t k = 0; k < n_p; ++k)
    if (p_in[k] && !p_exit[k]) p_row[k] = V++;
  for (std::size_t k = 0; k < n_h; ++k)
    if (h_in[k] && !h_exit[k]) h_row[k] = E++;
  for (std::size_t k = 0; k < n_v; ++k)
    if (v_in[k] && !v_exit[k]) v_row[k] = E++;

  std::vector<SparseColumn> d1;
  d1.reserve(static_cast<std::size_t>(E));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (h_row[hid(i, j)] >= 0) d1.push_back(make_column({{p_row[pid(i, j)], -1}, {p_row[pid(i + 1, j)], 1}}));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (v_row[vid(i, j)] >= 0) d1.push_back(make_column({{p_row[pid(i, j)], -1}, {p_row[pid(i, j + 1)], 1}}));

  std::vector<SparseColumn> d2;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (g.in(i, j))
        d2.push_back(make_column({{h_row[hid(i, j)], 1},
                                  {v_row[vid(i + 1, j)], 1},
                                  {h_row[hid(i, j + 1)], -1},
                                  {v_row[vid(i, j)], -1}}));
  const int S = static_cast<int>(d2.size());
  const int r1 = sparse_rank(std::move(d1));
  const int r2 = sparse_rank(std::move(d2));
  return ConleyIndex(std::map<int, int>{{0, V - r1}, {1, E - r1 - r2}, {2, S - r2}});
}

ConleyIndex conley_index(const Field& field, const Box& box, std::array<int, 2> grid,
                         const BlockOptions& options, const std::optional<Box>& hole) {
  return relative_betti(build_isolating_block(field, box, grid, options, hole));
}

SweepResult index_constancy_sweep(const std::function<Field(double)>& family, const Box& box,
                                  std::array<int, 2> grid, const std::vector<double>& lambdas,
                                  const BlockOptions& options) {
  SweepResult out;
  std::optional<ConleyIndex> previous;
  for (double lambda : lambdas) {
    SweepSample s;
    s.lambda = lambda;
    IsolatingBlock block = try_build_isolating_block(family(lambda), box, grid, options);
    if (block.accepted()) {
      s.index = relative_betti(block);
      if (previous && !(*previous == *s.index)) {
        out.constant = false;
        out.changes.push_back(lambda);
      }
      previous = s.index;
    } else {
      out.isolation_lost.push_back(lambda);
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

SweepResult index_constancy_sweep(const std::function<Field(double)>& family, const Box& box,
                                  std::array<int, 2> grid, double lambda_lo, double lambda_hi, int steps,
                                  const BlockOptions& options) {
  if (steps < 1 || !(lambda_hi >= lambda_lo) || (steps == 1 && lambda_hi > lambda_lo))
    throw Error(ErrorKind::InvalidArgument, "sweep needs lambda_hi >= lambda_lo and two samples for an interval");
  std::vector<double> lambdas;
  if (steps == 1) lambdas.push_back(lambda_lo);
  for (int k = 0; steps > 1 && k < steps; ++k)
    lambdas.push_back(lambda_lo + (lambda_hi - lambda_lo) * k / (steps - 1));
  return index_constancy_sweep(family, box, grid, lambdas, options);
}

}  // namespace bifurcade
