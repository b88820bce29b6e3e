#include "bifurcade_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "bifurcade/bifurcation.hpp"
#include "bifurcade/center_manifold.hpp"
#include "bifurcade/conley.hpp"
#include "bifurcade/error.hpp"
#include "bifurcade/integrator.hpp"
#include "bifurcade/model_io.hpp"
#include "bifurcade/serialize.hpp"
#include "bifurcade/spectrum.hpp"

namespace bifurcade::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& why) { throw Error(ErrorKind::InvalidArgument, why); }

std::string num(double v) { return fmt::format("{:.17g}", v); }

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row_strings(header); }
  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    for (double v : values) s.push_back(num(v));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

std::vector<std::string> mode_columns(const std::string& prefix, int n) {
  std::vector<std::string> cols;
  for (int k = 1; k <= n; ++k) cols.push_back(prefix + std::to_string(k));
  return cols;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Context {
  const RunConfig& config;
  SpectralModel model;
  Artifacts artifacts;
  bool csv() const { return config.formats.count("csv") > 0; }
};

CrossingData select_crossing(const Context& ctx) {
  const RunConfig& c = ctx.config;
  if (c.lambda0) return crossing_data(ctx.model, *c.lambda0);
  const DetectionResult det = detect_bifurcation_values(ctx.model, c.lambda_lo, c.lambda_hi);
  if (det.crossings.empty()) bad("no transversal crossing in the lambda window");
  return det.crossings.front();
}

// Distance from lambda0 used for default evaluation points and scans.
double local_offset(const CrossingData& cd) {
  const double room = std::min(cd.lambda0 - cd.gaps.lambda_lo, cd.gaps.lambda_hi - cd.lambda0);
  return std::min(0.1, 0.5 * room);
}

int nonempty_side(const TrivialClassification& tc, const CrossingData& cd) {
  switch (tc.verdict) {
    case TrivialVerdict::AttractorOnCenter: return cd.unstable_side() != 0 ? cd.unstable_side() : 1;
    case TrivialVerdict::RepellerOnCenter: return cd.unstable_side() != 0 ? -cd.unstable_side() : 1;
    default: return 1;
  }
}

double window_mid(const RunConfig& c) { return 0.5 * (c.lambda_lo + c.lambda_hi); }

json cmd_spectrum(Context& ctx) {
  const RunConfig& c = ctx.config;
  const double lambda = c.lambda.value_or(window_mid(c));
  json modes = json::array();
  for (const auto& mv : linear_spectrum(ctx.model, lambda))
    modes.push_back({{"mode", mv.mode + 1}, {"mu", ctx.model.mu()[static_cast<std::size_t>(mv.mode)]}, {"beta", mv.beta}});
  if (ctx.csv()) {
    std::vector<std::string> header{"lambda"};
    for (auto& s : mode_columns("beta_", ctx.model.dim())) header.push_back(s);
    Csv csv(header);
    for (int i = 0; i <= 100; ++i) {
      const double l = c.lambda_lo + (c.lambda_hi - c.lambda_lo) * i / 100.0;
      std::vector<double> row{l};
      for (int k = 0; k < ctx.model.dim(); ++k) row.push_back(ctx.model.beta(k, l));
      csv.row(row);
    }
    ctx.artifacts["spectrum.csv"] = csv.str();
  }
  return {{"lambda", lambda}, {"modes", modes}, {"unstable_dimension", unstable_dimension(ctx.model, lambda)}};
}

json cmd_detect(Context& ctx) {
  const DetectionResult det = detect_bifurcation_values(ctx.model, ctx.config.lambda_lo, ctx.config.lambda_hi);
  if (ctx.csv()) {
    Csv csv({"lambda0", "n", "m", "center_modes"});
    for (const auto& cd : det.crossings) {
      std::string modes;
      for (int k : cd.center_modes) modes += (modes.empty() ? "" : ";") + std::to_string(k + 1);
      csv.row_strings({num(cd.lambda0), std::to_string(cd.n), std::to_string(cd.m), modes});
    }
    ctx.artifacts["crossings.csv"] = csv.str();
  }
  return det;
}

json cmd_reduce(Context& ctx) {
  const CrossingData cd = select_crossing(ctx);
  const ReducedField r = reduce(ctx.model, cd, ctx.config.order);
  const double r1 = invariance_residual(ctx.model, r, 0.1);
  const double r2 = invariance_residual(ctx.model, r, 0.05);
  return {{"crossing", cd},
          {"reduced", r},
          {"invariance_residual", {{"h", {0.1, 0.05}}, {"residual", {r1, r2}}, {"ratio", r2 > 0 ? json(r1 / r2) : json(nullptr)}}}};
}

json cmd_classify(Context& ctx) {
  const CrossingData cd = select_crossing(ctx);
  const ReducedField r = reduce(ctx.model, cd, ctx.config.order);
  json out{{"crossing", cd}, {"classification", classify_trivial(r)}};
  if (cd.n == 1) out["static"] = classify_static_n1(ctx.model, cd, r);
  if (cd.n <= 2) out["trivial_index_reduced"] = reduced_trivial_index(r, 0.5 * ctx.config.box_half_width);
  return out;
}

json cmd_localbif(Context& ctx) {
  const RunConfig& c = ctx.config;
  const CrossingData cd = select_crossing(ctx);
  const ReducedField r = reduce(ctx.model, cd, c.order);
  const TrivialClassification tc = classify_trivial(r);
  const double d = local_offset(cd);
  const double lambda = c.lambda.value_or(cd.lambda0 + nonempty_side(tc, cd) * d);
  const Box box = reduced_box(cd.n, c.box_half_width);
  const InvariantSetReport rep = bifurcating_set(ctx.model, cd, r, lambda, box);

  json scan = json::array();
  int below = 0, above = 0;
  Csv dh({"lambda", "d_H_to_zero", "points"});
  for (int side : {-1, 1})
    for (int k = 1; k <= c.side_samples; ++k) {
      const double l = cd.lambda0 + side * d * k / c.side_samples;
      const InvariantSetReport s = bifurcating_set(ctx.model, cd, r, l, box);
      const bool nonempty = s.kind == InvariantSetKind::EquilibriumPoints || s.kind == InvariantSetKind::SphereBoundary;
      (side < 0 ? below : above) += nonempty ? 1 : 0;
      scan.push_back({{"lambda", l}, {"kind", to_string(s.kind)}, {"d_H_to_zero", s.d_H_to_zero}});
      dh.row({l, s.d_H_to_zero, static_cast<double>(s.points.size())});
    }
  if (ctx.csv()) {
    ctx.artifacts["scan.csv"] = dh.str();
    if (cd.n == 2 && !rep.sphere_samples.empty()) {
      Csv sphere({"angle", "radius"});
      for (const auto& w : rep.sphere_samples) sphere.row({std::atan2(w[1], w[0]), w.norm()});
      ctx.artifacts["sphere.csv"] = sphere.str();
    }
  }
  return {{"crossing", cd},
          {"classification", tc},
          {"report", rep},
          {"scan", scan},
          {"nonempty_below", below},
          {"nonempty_above", above},
          {"samples_per_side", c.side_samples}};
}

json cmd_index(Context& ctx) {
  const RunConfig& c = ctx.config;
  const CrossingData cd = select_crossing(ctx);
  const ReducedField r = reduce(ctx.model, cd, c.order);
  const TrivialClassification tc = classify_trivial(r);
  const double d = local_offset(cd);
  const double lambda = c.lambda.value_or(cd.lambda0 + nonempty_side(tc, cd) * d);
  const Box box = reduced_box(cd.n, c.box_half_width);
  const BifurcatingIndex bi = index_of_bifurcating_set(ctx.model, cd, r, lambda, box);
  const Box trivial_box = reduced_box(cd.n, 0.5 * c.box_half_width);
  const auto field_at = [&r](double nu) -> Field {
    return [&r, nu](const Eigen::VectorXd& w) { return evaluate_reduced(r, nu, w); };
  };
  const IsolatingBlock trivial_block = try_build_isolating_block(field_at(0.0), trivial_box, {cd.n == 1 ? 8 : 16, 16});
  const SweepResult sweep = index_constancy_sweep(
      [&](double l) { return field_at(l - cd.lambda0); }, box, {cd.n == 1 ? 8 : 16, 16}, cd.lambda0 - d,
      cd.lambda0 + d, 2 * c.side_samples + 1);
  if (ctx.csv()) {
    Csv csv({"lambda", "isolated", "betti"});
    for (const auto& s : sweep.samples) {
      std::string betti;
      if (s.index)
        for (auto [deg, rank] : s.index->betti()) betti += (betti.empty() ? "" : ";") + fmt::format("{}:{}", deg, rank);
      csv.row_strings({num(s.lambda), s.index ? "1" : "0", betti});
    }
    ctx.artifacts["index_sweep.csv"] = csv.str();
  }
  return {{"crossing", cd}, {"lambda", lambda}, {"index", bi}, {"trivial_block", trivial_block}, {"sweep", sweep}};
}

json cmd_branch(Context& ctx) {
  const RunConfig& c = ctx.config;
  const CrossingData cd = select_crossing(ctx);
  const SwitchResult sw = switch_branch(ctx.model, cd, c.switch_amplitude);
  const BranchStart start{sw.lambda, sw.a, cd.lambda0, cd.center_modes, c.switch_amplitude > 0 ? 1 : -1};
  const Branch br = continue_branch(ctx.model, start, {c.lambda_lo, c.lambda_hi, c.norm_bound});
  if (ctx.csv())
    for (auto& [name, text] : emit_diagram({br})) ctx.artifacts[name] = text;
  return {{"crossing", cd}, {"switch", sw}, {"branch", br}};
}

json cmd_global(Context& ctx) {
  const RunConfig& c = ctx.config;
  const GlobalReport rep = global_report(ctx.model, {c.lambda_lo, c.lambda_hi, c.norm_bound}, {}, c.switch_amplitude);
  if (ctx.csv() && !rep.branches.empty()) {
    std::vector<Branch> branches;
    for (const auto& s : rep.branches) branches.push_back(s.branch);
    for (auto& [name, text] : emit_diagram(branches)) ctx.artifacts[name] = text;
  }
  return rep;
}

json cmd_probe(Context& ctx) {
  const RunConfig& c = ctx.config;
  return heteroclinic_probe(ctx.model, c.lambda.value_or(window_mid(c)), c.directions, c.t_max);
}

json cmd_simulate(Context& ctx) {
  const RunConfig& c = ctx.config;
  const int n = ctx.model.dim();
  const double lambda = c.lambda.value_or(window_mid(c));
  Eigen::VectorXd a0(n);
  if (!c.initial_state.empty()) {
    if (static_cast<int>(c.initial_state.size()) != n) bad("initial_state has the wrong length");
    for (int k = 0; k < n; ++k) a0[k] = c.initial_state[static_cast<std::size_t>(k)];
  } else {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < n; ++k) a0[k] = c.perturbation * u(rng);
  }
  const Trajectory traj = integrate(ctx.model, lambda, a0, c.t_end, IntegrationOptions{});
  const bool gradient = ctx.model.gradient_info().has_value();
  if (ctx.csv()) {
    std::vector<std::string> header{"t"};
    for (auto& s : mode_columns("a", n)) header.push_back(s);
    if (gradient) header.push_back("J");
    Csv csv(header);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      std::vector<double> row{traj.times[i]};
      for (int k = 0; k < n; ++k) row.push_back(traj.states[i][k]);
      if (gradient) row.push_back(lyapunov_value(ctx.model, lambda, traj.states[i]));
      csv.row(row);
    }
    ctx.artifacts["trajectory.csv"] = csv.str();
  }
  json out{{"initial_state", vector_json(a0)}, {"trajectory", traj},
           {"final_residual", vector_field(ctx.model, lambda, traj.final_state()).norm()}};
  if (gradient) out["J_final"] = lyapunov_value(ctx.model, lambda, traj.final_state());
  return out;
}

using Command = std::function<json(Context&)>;

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"spectrum", cmd_spectrum}, {"detect", cmd_detect}, {"reduce", cmd_reduce},   {"classify", cmd_classify},
      {"localbif", cmd_localbif}, {"index", cmd_index},   {"branch", cmd_branch},   {"global", cmd_global},
      {"probe", cmd_probe},       {"simulate", cmd_simulate}};
  return table;
}

void write_artifacts(const std::filesystem::path& dir, const Artifacts& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  }
}

template <class T>
void read_key(const json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"spectrum", "detect", "reduce", "classify", "localbif",
                                              "index",    "branch", "global", "probe",    "simulate"};
  return names;
}

json config_to_json(const RunConfig& c) {
  return {{"model", c.model},
          {"L", c.length},
          {"b2", c.b2},
          {"b3", c.b3},
          {"N", c.modes},
          {"lambda_lo", c.lambda_lo},
          {"lambda_hi", c.lambda_hi},
          {"norm_bound", c.norm_bound},
          {"lambda", c.lambda ? json(*c.lambda) : json(nullptr)},
          {"lambda0", c.lambda0 ? json(*c.lambda0) : json(nullptr)},
          {"order", c.order},
          {"box_half_width", c.box_half_width},
          {"side_samples", c.side_samples},
          {"switch_amplitude", c.switch_amplitude},
          {"directions", c.directions},
          {"t_max", c.t_max},
          {"t_end", c.t_end},
          {"perturbation", c.perturbation},
          {"initial_state", c.initial_state},
          {"out", c.out.string()},
          {"formats", c.formats},
          {"seed", c.seed}};
}

void apply_config_json(RunConfig& c, const json& doc) {
  if (!doc.is_object()) bad("config must be a JSON object");
  static const std::set<std::string> known{"model",  "L",     "b2",        "b3",     "N",
                                           "lambda_lo", "lambda_hi", "norm_bound", "lambda", "lambda0",
                                           "order",  "box_half_width", "side_samples", "switch_amplitude",
                                           "directions", "t_max", "t_end", "perturbation", "initial_state",
                                           "out",    "formats", "seed"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) bad("unknown config key \"" + key + "\"");
  try {
    read_key(doc, "model", c.model);
    read_key(doc, "L", c.length);
    read_key(doc, "b2", c.b2);
    read_key(doc, "b3", c.b3);
    read_key(doc, "N", c.modes);
    read_key(doc, "lambda_lo", c.lambda_lo);
    read_key(doc, "lambda_hi", c.lambda_hi);
    read_key(doc, "norm_bound", c.norm_bound);
    if (doc.contains("lambda")) c.lambda = doc["lambda"].is_null() ? std::nullopt : std::optional(doc["lambda"].get<double>());
    if (doc.contains("lambda0"))
      c.lambda0 = doc["lambda0"].is_null() ? std::nullopt : std::optional(doc["lambda0"].get<double>());
    read_key(doc, "order", c.order);
    read_key(doc, "box_half_width", c.box_half_width);
    read_key(doc, "side_samples", c.side_samples);
    read_key(doc, "switch_amplitude", c.switch_amplitude);
    read_key(doc, "directions", c.directions);
    read_key(doc, "t_max", c.t_max);
    read_key(doc, "t_end", c.t_end);
    read_key(doc, "perturbation", c.perturbation);
    read_key(doc, "initial_state", c.initial_state);
    if (doc.contains("out")) c.out = doc["out"].get<std::string>();
    read_key(doc, "formats", c.formats);
    read_key(doc, "seed", c.seed);
  } catch (const json::exception& e) {
    bad(std::string("config: ") + e.what());
  }
}

void validate(const RunConfig& c) {
  if (!std::isfinite(c.lambda_lo) || !std::isfinite(c.lambda_hi) || !(c.lambda_lo < c.lambda_hi))
    bad("lambda window needs finite lambda_lo < lambda_hi");
  if (!(c.norm_bound > 0)) bad("norm_bound must be positive");
  if (c.order < 2 || c.order > 5) bad("order must be in 2..5");
  if (!(c.box_half_width > 0)) bad("box_half_width must be positive");
  if (c.side_samples < 1) bad("side_samples must be positive");
  if (!std::isfinite(c.switch_amplitude) || c.switch_amplitude == 0.0) bad("switch_amplitude must be nonzero");
  if (c.directions < 1) bad("directions must be positive");
  if (!(c.t_max > 0) || !(c.t_end > 0)) bad("t_max and t_end must be positive");
  if (!(c.perturbation > 0)) bad("perturbation must be positive");
  if (c.formats.empty()) bad("at least one output format is required");
  for (const auto& f : c.formats)
    if (f != "json" && f != "csv") bad("unknown format \"" + f + "\"");
  if (c.lambda && !std::isfinite(*c.lambda)) bad("lambda must be finite");
  if (c.lambda0 && !std::isfinite(*c.lambda0)) bad("lambda0 must be finite");
}

SpectralModel load_model(const RunConfig& c) {
  if (c.model == "cahn_hilliard_1d") return build_cahn_hilliard_1d(c.length, c.b2, c.b3, c.modes);
  if (!std::filesystem::is_regular_file(c.model))
    throw Error(ErrorKind::InvalidModel, "unknown builtin model or missing file: " + c.model);
  return bifurcade::load_model(c.model);
}

Artifacts emit_diagram(const std::vector<Branch>& branches) {
  if (branches.empty()) bad("emit_diagram needs at least one branch");
  Artifacts files;
  Csv combined({"lambda", "v_norm", "n_unstable", "branch_id"});
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const Branch& br = branches[b];
    const int n = br.points.empty() ? 0 : static_cast<int>(br.points.front().a.size());
    std::vector<std::string> header{"lambda", "arclength", "v_norm", "n_unstable"};
    for (auto& s : mode_columns("a", n)) header.push_back(s);
    Csv csv(header);
    for (const auto& p : br.points) {
      std::vector<double> row{p.lambda, p.arclength, p.v_norm, static_cast<double>(p.n_unstable)};
      for (int k = 0; k < n; ++k) row.push_back(p.a[k]);
      csv.row(row);
      combined.row({p.lambda, p.v_norm, static_cast<double>(p.n_unstable), static_cast<double>(b + 1)});
    }
    files[fmt::format("branch_{}.csv", b + 1)] = csv.str();
  }
  files["branches.csv"] = combined.str();
  return files;
}

void emit_diagram(const std::vector<Branch>& branches, const std::filesystem::path& dir) {
  write_artifacts(dir, emit_diagram(branches));
}

int run(const std::string& subcommand, const RunConfig& c) {
  const auto it = commands().find(subcommand);
  if (it == commands().end()) {
    spdlog::error("unknown subcommand '{}'", subcommand);
    return 2;
  }
  json report{{"schema", 1}, {"subcommand", subcommand}, {"config", config_to_json(c)}, {"timestamp", utc_timestamp()}};
  try {
    validate(c);
    Context ctx{c, load_model(c), {}};
    spdlog::info("{}: model {} with {} modes", subcommand, ctx.model.label(), ctx.model.dim());
    report["model"] = ctx.model.label();
    report["status"] = "ok";
    report["result"] = it->second(ctx);
    if (c.formats.count("json")) ctx.artifacts["report.json"] = report.dump(2) + "\n";
    write_artifacts(c.out, ctx.artifacts);
    spdlog::info("{}: wrote {} files to {}", subcommand, ctx.artifacts.size(), c.out.string());
    return 0;
  } catch (const Error& e) {
    if (!e.numerical()) {
      spdlog::error("{}", e.what());
      return 2;
    }
    spdlog::error("numerical failure: {}", e.what());
    report["status"] = "error";
    report.erase("result");
    report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    try {
      write_artifacts(c.out, {{"report.json", report.dump(2) + "\n"}});
    } catch (const std::exception& w) {
      spdlog::error("{}", w.what());
    }
    return 3;
  }
}

}  // namespace bifurcade::cli
