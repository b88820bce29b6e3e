#include "bifurcade/serialize.hpp"

namespace bifurcade {

using nlohmann::json;

namespace {

json modes_json(const std::vector<int>& modes) {
  json out = json::array();
  for (int k : modes) out.push_back(k + 1);
  return out;
}

json face_json(const IsolatingBlock& b, const BoundaryFace& f) {
  auto [p, q] = b.face_endpoints(f);
  return {{"normal_axis", f.normal_axis}, {"outward", f.outward}, {"from", vector_json(p)}, {"to", vector_json(q)}};
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void to_json(json& j, const SpectralGaps& g) {
  j = {{"alpha1", g.alpha1}, {"alpha2", g.alpha2}, {"alpha3", g.alpha3}, {"alpha4", g.alpha4},
       {"eta", g.eta},       {"lambda_lo", g.lambda_lo}, {"lambda_hi", g.lambda_hi}};
}

void to_json(json& j, const CrossingData& c) {
  j = {{"lambda0", c.lambda0},
       {"center_modes", modes_json(c.center_modes)},
       {"n", c.n},
       {"m", c.m},
       {"gaps", c.gaps},
       {"transversality", c.transversality},
       {"h4_orientation", c.h4_orientation},
       {"unstable_side", c.unstable_side()}};
}

void to_json(json& j, const DegenerateValue& d) {
  j = {{"lambda0", d.lambda0}, {"modes", modes_json(d.modes)}, {"reason", d.reason}};
}

void to_json(json& j, const DetectionResult& d) { j = {{"crossings", d.crossings}, {"degenerate", d.degenerate}}; }

void to_json(json& j, const ReducedField& r) {
  json nonlinear = json::array();
  for (const auto& p : r.nonlinear) nonlinear.push_back(to_string(p));
  json slave = json::array();
  for (const auto& s : r.slave) slave.push_back({{"mode", s.mode + 1}, {"map", to_string(s.map)}});
  j = {{"lambda0", r.lambda0},         {"center_modes", modes_json(r.center_modes)},
       {"n", r.n},                     {"order", r.order},
       {"unfolding", vector_json(r.unfolding)}, {"nonlinear", nonlinear},
       {"slave", slave}};
}

void to_json(json& j, const ConleyIndex& c) {
  json betti = json::object();
  for (auto [degree, rank] : c.betti()) betti[std::to_string(degree)] = rank;
  j = {{"betti", betti}, {"trivial", c.trivial()}, {"text", to_string(c)}};
}

void to_json(json& j, const IsolatingBlock& b) {
  json exits = json::array(), ingress = json::array(), tangent = json::array();
  for (const auto& f : b.exit_faces) exits.push_back(face_json(b, f));
  for (const auto& f : b.ingress_faces) ingress.push_back(face_json(b, f));
  for (const auto& f : b.tangency_report) tangent.push_back(face_json(b, f));
  j = {{"dim", b.dim},
       {"box", {{"lo", vector_json(b.box.lo)}, {"hi", vector_json(b.box.hi)}}},
       {"resolution", b.dim == 1 ? json{b.resolution[0]} : json{b.resolution[0], b.resolution[1]}},
       {"hole", b.hole ? json{{"lo", vector_json(b.hole->lo)}, {"hi", vector_json(b.hole->hi)}} : json(nullptr)},
       {"refinements", b.refinements},
       {"accepted", b.accepted()},
       {"exit_faces", exits},
       {"ingress_faces", ingress},
       {"tangency_report", tangent}};
}

void to_json(json& j, const SweepResult& s) {
  json samples = json::array();
  for (const auto& x : s.samples)
    samples.push_back({{"lambda", x.lambda}, {"index", x.index ? json(*x.index) : json(nullptr)},
                       {"isolation_lost", x.isolation_lost()}});
  j = {{"samples", samples}, {"constant", s.constant}, {"changes", s.changes}, {"isolation_lost", s.isolation_lost}};
}

void to_json(json& j, const TrivialClassification& t) {
  j = {{"verdict", to_string(t.verdict)}, {"degree", t.degree},        {"coefficient", t.coefficient},
       {"order_used", t.order_used},      {"witness", t.witness}, {"flow_confirmed", optional_json(t.flow_confirmed)}};
}

void to_json(json& j, const InvariantSetReport& r) {
  json points = json::array();
  for (const auto& p : r.points)
    points.push_back({{"w", vector_json(p.w)}, {"stability", to_string(p.stability)},
                      {"eigenvalues", vector_json(p.eigenvalues)}});
  json sphere = json::array(), lifted = json::array();
  for (const auto& w : r.sphere_samples) sphere.push_back(vector_json(w));
  for (const auto& a : r.lifted_points) lifted.push_back(vector_json(a));
  j = {{"lambda", r.lambda}, {"kind", to_string(r.kind)}, {"points", points},         {"sphere_samples", sphere},
       {"lifted_points", lifted}, {"d_H_to_zero", r.d_H_to_zero}, {"note", r.note}};
}

void to_json(json& j, const BifurcatingIndex& b) {
  j = {{"index", b.index},
       {"reduced_index", b.reduced_index},
       {"trivial_index", b.trivial_index},
       {"reference", b.reference},
       {"nontrivial", b.nontrivial},
       {"predicted_nontrivial", b.predicted_nontrivial}};
}

void to_json(json& j, const StaticClassification& s) {
  j = {{"alternative", to_string(s.alternative)}, {"basis", s.basis}, {"caveat", s.caveat}};
}

void to_json(json& j, const TrivialBranch& t) {
  json segments = json::array();
  for (const auto& s : t.segments)
    segments.push_back({{"lambda_lo", s.lambda_lo}, {"lambda_hi", s.lambda_hi}, {"n_unstable", s.n_unstable}});
  j = {{"segments", segments}, {"breakpoints", t.breakpoints}};
}

void to_json(json& j, const SwitchResult& s) {
  j = {{"lambda", s.lambda}, {"a", vector_json(s.a)}, {"predicted_lambda", s.predicted_lambda},
       {"iterations", s.iterations}};
}

void to_json(json& j, const Branch& b) {
  json points = json::array();
  for (const auto& p : b.points)
    points.push_back({{"lambda", p.lambda}, {"arclength", p.arclength}, {"v_norm", p.v_norm},
                      {"n_unstable", p.n_unstable}, {"a", vector_json(p.a)}});
  j = {{"origin", optional_json(b.origin)},
       {"center_modes", modes_json(b.center_modes)},
       {"direction", b.direction},
       {"termination",
        {{"kind", to_string(b.termination.kind)}, {"value", b.termination.value},
         {"diagnostics", b.termination.diagnostics}}},
       {"stability_changes", b.stability_changes},
       {"points", points}};
}

void to_json(json& j, const GlobalReport& g) {
  json branches = json::array();
  for (const auto& s : g.branches) {
    json b = s.branch;
    b["alternative"] = s.alternative;
    branches.push_back(std::move(b));
  }
  json skipped = json::array();
  for (const auto& s : g.skipped) skipped.push_back({{"lambda0", s.lambda0}, {"reason", s.reason}});
  j = {{"window",
        {{"lambda_lo", g.window.lambda_lo}, {"lambda_hi", g.window.lambda_hi}, {"norm_bound", g.window.norm_bound}}},
       {"crossings", g.crossings},
       {"branches", branches},
       {"skipped", skipped},
       {"lambda_min", optional_json(g.lambda_min)},
       {"lambda_max", optional_json(g.lambda_max)},
       {"note", "only equilibrium branches are continued"}};
}

void to_json(json& j, const HeteroclinicProbe& p) {
  json records = json::array();
  for (const auto& r : p.records)
    records.push_back({{"mode", r.mode + 1},
                       {"sign", r.sign},
                       {"reversed", r.reversed},
                       {"limit", r.converged ? vector_json(r.limit) : json("Diverged")},
                       {"residual", r.residual},
                       {"J_at_limit", optional_json(r.j_limit)},
                       {"J_at_zero", optional_json(r.j_zero)},
                       {"J_monotone", r.j_monotone},
                       {"J_max_violation", r.j_max_violation}});
  j = {{"lambda", p.lambda}, {"records", records}, {"verdict", p.verdict}, {"note", p.note}};
}

void to_json(json& j, const Trajectory& t) {
  j = {{"lambda", t.lambda},
       {"status", to_string(t.status)},
       {"steps", t.times.empty() ? 0 : t.times.size() - 1},
       {"t_end", t.times.empty() ? 0.0 : t.times.back()},
       {"final_state", t.states.empty() ? json(nullptr) : vector_json(t.final_state())}};
}

}  // namespace bifurcade
