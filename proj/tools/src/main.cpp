#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bifurcade/error.hpp"
#include "bifurcade_cli/cli.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("bifurcade");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("BIFURCADE_LOG")) {
    const std::string v = env;
    if (v == "error") spdlog::set_level(spdlog::level::err);
    else if (v == "warn") spdlog::set_level(spdlog::level::warn);
    else if (v == "info") spdlog::set_level(spdlog::level::info);
    else if (v == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring BIFURCADE_LOG={} (expected error, warn, info or debug)", v);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  namespace bc = bifurcade::cli;

  CLI::App app{"Dynamic bifurcation analysis of spectral Galerkin models"};
  app.require_subcommand(1);

  std::string config_path, model, out, formats;
  double length = 0, b2 = 0, b3 = 0, lambda_lo = 0, lambda_hi = 0, norm_bound = 0, lambda = 0, lambda0 = 0;
  double box = 0, amplitude = 0, t_max = 0, t_end = 0;
  int modes = 0, order = 0, directions = 0, side_samples = 0;
  std::uint64_t seed = 0;

  const std::map<std::string, std::string> about{
      {"spectrum", "linear coefficients and unstable dimension at --lambda"},
      {"detect", "bifurcation values in the window"},
      {"reduce", "center-manifold reduction at --lambda0"},
      {"classify", "attractor/repeller test for the trivial solution"},
      {"localbif", "bifurcating invariant sets on both sides of --lambda0"},
      {"index", "Conley index of the bifurcating set and sweep"},
      {"branch", "continue the branch from --lambda0"},
      {"global", "branches from every crossing and their alternatives"},
      {"probe", "connecting orbits from 0 and the Lyapunov function"},
      {"simulate", "integrate from a sampled initial state"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& name : bc::subcommands()) {
    const auto it = about.find(name);
    CLI::App* sub = app.add_subcommand(name, it == about.end() ? std::string() : it->second);
    sub->fallthrough();
    subs.push_back(sub);
  }
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  auto* o_model = app.add_option("--model", model, "builtin model name (cahn_hilliard_1d) or model file");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_format = app.add_option("--format", formats, "comma-separated subset of json,csv");
  auto* o_lo = app.add_option("--lambda-lo", lambda_lo, "lower end of the parameter window");
  auto* o_hi = app.add_option("--lambda-hi", lambda_hi, "upper end of the parameter window");
  auto* o_order = app.add_option("--order", order, "reduction order (2..5)");
  auto* o_seed = app.add_option("--seed", seed, "seed for sampled initial states");
  auto* o_lambda = app.add_option("--lambda", lambda, "evaluation parameter");
  auto* o_lambda0 = app.add_option("--lambda0", lambda0, "bifurcation value to analyse");
  auto* o_norm = app.add_option("--norm-bound", norm_bound, "V-norm bound of the continuation window");
  auto* o_L = app.add_option("--L", length, "Cahn-Hilliard domain length");
  auto* o_b2 = app.add_option("--b2", b2, "Cahn-Hilliard quadratic coefficient");
  auto* o_b3 = app.add_option("--b3", b3, "Cahn-Hilliard cubic coefficient");
  auto* o_N = app.add_option("--N", modes, "number of Galerkin modes");
  auto* o_box = app.add_option("--box", box, "half-width of the reduced-coordinate box");
  auto* o_amp = app.add_option("--amplitude", amplitude, "branch switching amplitude");
  auto* o_dirs = app.add_option("--directions", directions, "eigendirections per heteroclinic probe");
  auto* o_side = app.add_option("--side-samples", side_samples, "parameter samples per side in local scans");
  auto* o_tmax = app.add_option("--t-max", t_max, "time budget of probe trajectories");
  auto* o_tend = app.add_option("--t-end", t_end, "simulation end time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  bc::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      bc::apply_config_json(cfg, nlohmann::json::parse(in));
    }
  } catch (const std::exception& e) {
    spdlog::error("config: {}", e.what());
    return 2;
  }
  auto set = [](CLI::Option* o) { return o->count() > 0; };
  if (set(o_model)) cfg.model = model;
  if (set(o_out)) cfg.out = out;
  if (set(o_format)) {
    cfg.formats.clear();
    std::stringstream ss(formats);
    for (std::string f; std::getline(ss, f, ',');)
      if (!f.empty()) cfg.formats.insert(f);
  }
  if (set(o_lo)) cfg.lambda_lo = lambda_lo;
  if (set(o_hi)) cfg.lambda_hi = lambda_hi;
  if (set(o_order)) cfg.order = order;
  if (set(o_seed)) cfg.seed = seed;
  if (set(o_lambda)) cfg.lambda = lambda;
  if (set(o_lambda0)) cfg.lambda0 = lambda0;
  if (set(o_norm)) cfg.norm_bound = norm_bound;
  if (set(o_L)) cfg.length = length;
  if (set(o_b2)) cfg.b2 = b2;
  if (set(o_b3)) cfg.b3 = b3;
  if (set(o_N)) cfg.modes = modes;
  if (set(o_box)) cfg.box_half_width = box;
  if (set(o_amp)) cfg.switch_amplitude = amplitude;
  if (set(o_dirs)) cfg.directions = directions;
  if (set(o_side)) cfg.side_samples = side_samples;
  if (set(o_tmax)) cfg.t_max = t_max;
  if (set(o_tend)) cfg.t_end = t_end;

  for (auto* sub : subs)
    if (sub->parsed()) return bc::run(sub->get_name(), cfg);
  return 2;
}
