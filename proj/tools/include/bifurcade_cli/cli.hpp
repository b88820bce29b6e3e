#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bifurcade/continuation.hpp"
#include "bifurcade/model.hpp"

namespace bifurcade::cli {

struct RunConfig {
  std::string model = "cahn_hilliard_1d";  ///< builtin name or path to a model file
  double length = 3.14159265358979323846;
  double b2 = 0.0;
  double b3 = 1.0;
  int modes = 8;

  double lambda_lo = 0.0;
  double lambda_hi = 10.0;
  double norm_bound = 50.0;
  std::optional<double> lambda;   ///< evaluation point for localbif, index, probe, simulate
  std::optional<double> lambda0;  ///< crossing to analyse; default the first one in the window

  int order = 3;
  double box_half_width = 1.0;
  int side_samples = 20;  ///< lambda samples per side for the dichotomy scan
  double switch_amplitude = 0.05;
  int directions = 2;
  double t_max = 200.0;
  double t_end = 50.0;
  double perturbation = 1e-3;  ///< amplitude of the seeded random initial state for simulate
  std::vector<double> initial_state;

  std::filesystem::path out = "out";
  std::set<std::string> formats{"json", "csv"};
  std::uint64_t seed = 0;
};

nlohmann::json config_to_json(const RunConfig& c);
/// Overwrites the fields present in `doc`; throws InvalidArgument on unknown keys or bad types.
void apply_config_json(RunConfig& c, const nlohmann::json& doc);
void validate(const RunConfig& c);

SpectralModel load_model(const RunConfig& c);

const std::vector<std::string>& subcommands();

/// Runs one pipeline stage and writes its artifacts into c.out. Returns
/// 0 on success, 2 on validation errors (nothing written) and 3 on numerical
/// failures (report.json carries the diagnostics).
int run(const std::string& subcommand, const RunConfig& c);

/// In-memory artifacts: file name -> content.
using Artifacts = std::map<std::string, std::string>;

/// One CSV per branch plus branches.csv with (lambda, v_norm, n_unstable, branch_id).
Artifacts emit_diagram(const std::vector<Branch>& branches);
void emit_diagram(const std::vector<Branch>& branches, const std::filesystem::path& dir);

}  // namespace bifurcade::cli
