#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bifurcade_cli/cli.hpp"

using namespace bifurcade;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path models_dir = BIFURCADE_MODELS_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("bifurcade_cli_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_report(const fs::path& dir) { return json::parse(slurp(dir / "report.json")); }

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("detect on the builtin model") {
  TempDir dir("detect");
  cli::RunConfig c;
  c.out = dir.path;
  REQUIRE(cli::run("detect", c) == 0);
  const auto r = read_report(dir.path);
  CHECK(r.at("schema") == 1);
  CHECK(r.at("status") == "ok");
  CHECK(r.at("config") == cli::config_to_json(c));
  const auto& cr = r.at("result").at("crossings");
  REQUIRE(cr.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(cr[i].at("lambda0").get<double>() == doctest::Approx((i + 1.0) * (i + 1.0)).epsilon(1e-10));
    CHECK(cr[i].at("n") == 1);
    CHECK(cr[i].at("m") == i);
  }
  CHECK(fs::exists(dir.path / "crossings.csv"));
}

TEST_CASE("every subcommand runs on the builtin model") {
  for (const auto& sub : cli::subcommands()) {
    TempDir dir("all_" + sub);
    cli::RunConfig c;
    c.out = dir.path;
    c.lambda_hi = 12.0;
    c.lambda = sub == "probe" ? 6.0 : 1.1;
    c.directions = 1;
    c.t_max = 100.0;
    CAPTURE(sub);
    CHECK(cli::run(sub, c) == 0);
    CHECK(fs::exists(dir.path / "report.json"));
  }
}

TEST_CASE("global on the reconnect model labels the third alternative") {
  TempDir dir("reconnect");
  cli::RunConfig c;
  c.model = (models_dir / "reconnect.json").string();
  c.lambda_lo = 0.0;
  c.lambda_hi = 3.0;
  c.norm_bound = 10.0;
  c.out = dir.path;
  REQUIRE(cli::run("global", c) == 0);
  const auto r = read_report(dir.path);
  const auto& branches = r.at("result").at("branches");
  REQUIRE(branches.size() == 1);
  const std::string alt = branches[0].at("alternative");
  CHECK(alt.rfind("(3)", 0) == 0);
  CHECK(alt.find("lambda1 = 2") != std::string::npos);

  const auto rows = read_csv(dir.path / "branch_1.csv");
  REQUIRE(rows.size() > 2);
  // lambda, arclength, v_norm, n_unstable, a1
  CHECK(std::abs(rows.front()[4]) <= 1e-6);
  CHECK(std::abs(rows.back()[4]) <= 1e-6);
  CHECK(std::abs(rows.front()[0] - 1.0) <= 1e-6);
  CHECK(std::abs(rows.back()[0] - 2.0) <= 1e-6);
}

TEST_CASE("validation and model errors exit with 2 and write nothing") {
  {
    TempDir dir("malformed");
    const auto bad = fs::temp_directory_path() / "bifurcade_cli_bad_model.json";
    std::ofstream(bad) << "{\"mu\": [1.0], \"linear\": ";
    cli::RunConfig c;
    c.model = bad.string();
    c.out = dir.path;
    CHECK(cli::run("detect", c) == 2);
    CHECK(!fs::exists(dir.path));
    fs::remove(bad);
  }
  {
    TempDir dir("window");
    cli::RunConfig c;
    c.lambda_lo = 5.0;
    c.lambda_hi = 1.0;
    c.out = dir.path;
    CHECK(cli::run("detect", c) == 2);
    CHECK(!fs::exists(dir.path));
  }
  {
    TempDir dir("unknown");
    cli::RunConfig c;
    c.out = dir.path;
    CHECK(cli::run("nonsense", c) == 2);
    CHECK(!fs::exists(dir.path));
  }
  cli::RunConfig c;
  CHECK_THROWS(cli::apply_config_json(c, json{{"no_such_key", 1}}));
  cli::apply_config_json(c, json{{"lambda_hi", 4.5}, {"b2", 0.25}});
  CHECK(c.lambda_hi == 4.5);
  CHECK(c.b2 == 0.25);
}

TEST_CASE("numerical failures exit with 3 and a diagnostic report") {
  TempDir dir("numerical");
  cli::RunConfig c;
  c.out = dir.path;
  c.lambda = 1.1;
  c.box_half_width = 0.1;
  REQUIRE(cli::run("localbif", c) == 3);
  const auto r = read_report(dir.path);
  CHECK(r.at("status") == "error");
  CHECK(r.at("error").at("kind") == "NoInvariantSetFound");
  CHECK(!r.contains("result"));
}

TEST_CASE("identical configurations give identical reports") {
  TempDir dir("determinism");
  cli::RunConfig c;
  c.lambda_hi = 12.0;
  c.out = dir.path;
  auto snapshot = [&] {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir.path)) files[entry.path().filename()] = slurp(entry.path());
    auto report = json::parse(files.at("report.json"));
    report.erase("timestamp");
    files["report.json"] = report.dump();
    return files;
  };
  REQUIRE(cli::run("global", c) == 0);
  const auto first = snapshot();
  fs::remove_all(dir.path);
  REQUIRE(cli::run("global", c) == 0);
  CHECK(first == snapshot());
}

TEST_CASE("diagram files") {
  const auto model = build_cahn_hilliard_1d(3.141592653589793, 0.0, 1.0, 8);
  const auto g = global_report(model, Window{0.0, 12.0, 50.0});
  std::vector<Branch> branches;
  for (const auto& s : g.branches) branches.push_back(s.branch);
  const auto files = cli::emit_diagram(branches);
  CHECK(files.size() == 4);
  TempDir dir("diagram");
  cli::emit_diagram(branches, dir.path);
  for (int b = 1; b <= 3; ++b) {
    std::string header;
    const auto rows = read_csv(dir.path / ("branch_" + std::to_string(b) + ".csv"), &header);
    CHECK(header.rfind("lambda,arclength,v_norm,n_unstable,a1", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] > rows[i - 1][1]);
  }
  std::string header;
  const auto combined = read_csv(dir.path / "branches.csv", &header);
  CHECK(header == "lambda,v_norm,n_unstable,branch_id");
  std::size_t total = 0;
  for (const auto& br : branches) total += br.points.size();
  CHECK(combined.size() == total);
  CHECK_THROWS(cli::emit_diagram(std::vector<Branch>{}));
}
