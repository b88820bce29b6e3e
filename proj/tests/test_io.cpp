#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bifurcade/error.hpp"
#include "bifurcade/model_io.hpp"
#include "bifurcade/serialize.hpp"

using namespace bifurcade;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path models_dir = BIFURCADE_MODELS_DIR;

void expect_invalid(const json& doc) {
  try {
    model_from_json(doc);
    FAIL("expected InvalidModel for " << doc.dump());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidModel);
  }
}

}  // namespace

TEST_CASE("shipped model files load") {
  const auto pitch = load_model(models_dir / "pitchfork.json");
  CHECK(pitch.dim() == 1);
  CHECK(pitch.cubic(0, 0, 0, 0) == -1.0);
  CHECK(pitch.beta(0, 0.3) == doctest::Approx(-0.3));

  const auto rec = load_model(models_dir / "reconnect.json");
  CHECK(rec.beta(0, 1.5) == doctest::Approx(-0.25));
  CHECK(rec.gradient_info().has_value());

  const auto trans = load_model(models_dir / "transcritical.json");
  CHECK(trans.quadratic(0, 0, 0) == -1.0);

  const auto sph = load_model(models_dir / "sphere2.json");
  CHECK(sph.dim() == 2);
  CHECK(sph.cubic(0, 1, 0, 1) == doctest::Approx(-1.0 / 3.0));
  CHECK(sph.cubic(1, 0, 1, 0) == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("round trip through the canonical form") {
  for (const auto* name : {"pitchfork.json", "reconnect.json", "transcritical.json", "sphere2.json"}) {
    const auto m = load_model(models_dir / name);
    const json doc = model_to_json(m);
    const auto back = model_from_json(doc);
    CHECK(model_to_json(back) == doc);
    CHECK(back.dim() == m.dim());
    for (double lambda : {-0.5, 0.7, 2.0}) {
      Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(m.dim(), 0.3, -0.4);
      CHECK((vector_field(back, lambda, a) - vector_field(m, lambda, a)).norm() == 0.0);
    }
  }
  const auto ch = build_cahn_hilliard_1d(2.0, 0.5, 1.0, 4);
  const auto tmp = fs::temp_directory_path() / "bifurcade_io_roundtrip.json";
  save_model(ch, tmp);
  const auto back = load_model(tmp);
  fs::remove(tmp);
  Eigen::VectorXd a(4);
  a << 0.1, -0.2, 0.05, 0.3;
  CHECK((vector_field(back, 3.0, a) - vector_field(ch, 3.0, a)).norm() <= 1e-14);
}

TEST_CASE("malformed model documents") {
  expect_invalid(json::array());
  expect_invalid(json{{"label", "x"}});
  expect_invalid(json{{"mu", {1.0}}});
  expect_invalid(json{{"mu", {1.0}}, {"dim", 2}, {"linear", {{"c0", {0.0}}, {"c1", {1.0}}}}});
  expect_invalid(json{{"mu", {1.0}}, {"linear", {{"c0", {0.0}}}}});
  expect_invalid(json{{"mu", {1.0}}, {"linear", {{"c0", {0.0}}, {"c1", {1.0}}}}, {"Q", {{1, 1, 2, 1.0}}}});
  expect_invalid(json{{"mu", {1.0}}, {"linear", {{"c0", {0.0}}, {"c1", {1.0}}}}, {"C", {{1, 1, 1, 1}}}});
  expect_invalid(json{{"mu", {-1.0}}, {"linear", {{"c0", {0.0}}, {"c1", {1.0}}}}});
  expect_invalid(json{{"mu", {"one"}}, {"linear", {{"c0", {0.0}}, {"c1", {1.0}}}}});

  const auto tmp = fs::temp_directory_path() / "bifurcade_io_malformed.json";
  std::ofstream(tmp) << "{ \"mu\": [1.0, ";
  try {
    load_model(tmp);
    FAIL("expected InvalidModel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidModel);
  }
  fs::remove(tmp);
  CHECK_THROWS_AS(load_model(models_dir / "does-not-exist.json"), Error);
}

TEST_CASE("serialized results use 1-based modes") {
  const auto m = build_cahn_hilliard_1d(3.141592653589793, 0.0, 1.0, 8);
  const auto det = detect_bifurcation_values(m, 0.0, 10.0);
  const json j = det;
  REQUIRE(j.at("crossings").size() == 3);
  CHECK(j.at("crossings")[1].at("center_modes") == json::array({2}));
  CHECK(j.at("crossings")[1].at("m") == 1);

  const json idx = wedge(ConleyIndex::sphere(0), ConleyIndex::sphere(1));
  CHECK(idx.at("betti") == json{{"0", 1}, {"1", 1}});
  CHECK(idx.at("trivial") == false);
  CHECK(idx.at("text") == "S^0 v S^1");
}
