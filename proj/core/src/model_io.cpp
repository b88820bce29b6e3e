#include "bifurcade/model_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "bifurcade/error.hpp"

namespace bifurcade {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorKind::InvalidModel, "model file: " + why); }

std::vector<double> number_list(const json& j, const char* what) {
  if (!j.is_array()) invalid(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) invalid(std::string(what) + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

int mode_index(const json& v, int dim) {
  if (!v.is_number_integer()) invalid("tensor indices must be integers");
  const int k = v.get<int>();
  if (k < 1 || k > dim) invalid("tensor index " + std::to_string(k) + " outside 1.." + std::to_string(dim));
  return k - 1;
}

}  // namespace

SpectralModel model_from_json(const json& doc) {
  if (!doc.is_object()) invalid("top level must be an object");
  ModelDescription d;
  d.label = doc.value("label", std::string("custom"));
  if (!doc.contains("mu")) invalid("missing \"mu\"");
  d.mu = number_list(doc.at("mu"), "mu");
  const int dim = static_cast<int>(d.mu.size());
  if (doc.contains("dim") && (!doc.at("dim").is_number_integer() || doc.at("dim").get<int>() != dim))
    invalid("\"dim\" does not match the length of \"mu\"");

  if (!doc.contains("linear") || !doc.at("linear").is_object()) invalid("missing \"linear\" object");
  const json& lin = doc.at("linear");
  if (lin.contains("poly")) {
    if (!lin.at("poly").is_array()) invalid("linear.poly must be an array");
    for (const auto& p : lin.at("poly")) d.linear.push_back(number_list(p, "linear.poly entry"));
  } else {
    if (!lin.contains("c0") || !lin.contains("c1")) invalid("linear needs \"c0\" and \"c1\" or \"poly\"");
    const auto c0 = number_list(lin.at("c0"), "linear.c0");
    const auto c1 = number_list(lin.at("c1"), "linear.c1");
    if (c0.size() != c1.size()) invalid("linear.c0 and linear.c1 differ in length");
    for (std::size_t k = 0; k < c0.size(); ++k) d.linear.push_back({c0[k], -c1[k]});
  }

  if (doc.contains("Q")) {
    if (!doc.at("Q").is_array()) invalid("\"Q\" must be an array");
    for (const auto& e : doc.at("Q")) {
      if (!e.is_array() || e.size() != 4 || !e[3].is_number()) invalid("Q entries are [k, i, j, value]");
      d.add_quadratic(mode_index(e[0], dim), mode_index(e[1], dim), mode_index(e[2], dim), e[3].get<double>());
    }
  }
  if (doc.contains("C")) {
    if (!doc.at("C").is_array()) invalid("\"C\" must be an array");
    for (const auto& e : doc.at("C")) {
      if (!e.is_array() || e.size() != 5 || !e[4].is_number()) invalid("C entries are [k, i, j, l, value]");
      d.add_cubic(mode_index(e[0], dim), mode_index(e[1], dim), mode_index(e[2], dim), mode_index(e[3], dim),
                  e[4].get<double>());
    }
  }
  if (doc.contains("gradient_info")) {
    const json& g = doc.at("gradient_info");
    if (!g.is_object() || !g.contains("weights")) invalid("gradient_info needs \"weights\"");
    GradientInfo info;
    info.weights = number_list(g.at("weights"), "gradient_info.weights");
    if (g.contains("cube_integrals")) {
      if (!g.at("cube_integrals").is_array()) invalid("gradient_info.cube_integrals must be an array");
      for (const auto& v : g.at("cube_integrals")) {
        if (v.is_null()) info.cube_integrals.emplace_back();
        else if (v.is_number()) info.cube_integrals.emplace_back(v.get<double>());
        else invalid("cube_integrals entries must be numbers or null");
      }
    }
    d.gradient = std::move(info);
  }
  return build_custom(std::move(d));
}

SpectralModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

json model_to_json(const SpectralModel& model) {
  json doc;
  doc["label"] = model.label();
  doc["dim"] = model.dim();
  doc["mu"] = std::vector<double>(model.mu().begin(), model.mu().end());
  if (model.affine()) {
    doc["linear"] = {{"c0", model.linear_c0()}, {"c1", model.linear_c1()}};
  } else {
    json poly = json::array();
    for (int k = 0; k < model.dim(); ++k) {
      const auto c = model.linear_coefficients(k);
      poly.push_back(std::vector<double>(c.begin(), c.end()));
    }
    doc["linear"] = {{"poly", poly}};
  }
  json q = json::array();
  for (const auto& t : model.quadratic_terms())
    if (t.i <= t.j) q.push_back({t.k + 1, t.i + 1, t.j + 1, t.value});
  json c = json::array();
  for (const auto& t : model.cubic_terms())
    if (t.i <= t.j && t.j <= t.l) c.push_back({t.k + 1, t.i + 1, t.j + 1, t.l + 1, t.value});
  doc["Q"] = std::move(q);
  doc["C"] = std::move(c);
  if (const auto& g = model.gradient_info()) {
    json gi;
    gi["weights"] = g->weights;
    if (!g->cube_integrals.empty()) {
      json ci = json::array();
      for (const auto& v : g->cube_integrals) ci.push_back(v ? json(*v) : json(nullptr));
      gi["cube_integrals"] = std::move(ci);
    }
    doc["gradient_info"] = std::move(gi);
  }
  return doc;
}

void save_model(const SpectralModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << model_to_json(model).dump(2) << '\n';
}

}  // namespace bifurcade
