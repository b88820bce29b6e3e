#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "bifurcade/model.hpp"

namespace bifurcade {

/// Model file format (mode numbers are 1-based):
///
///   {
///     "label": "pitchfork",
///     "dim": 1,
///     "mu": [1.0],
///     "linear": {"c0": [0.0], "c1": [-1.0]}      or  {"poly": [[c0, c1, c2, ...], ...]},
///     "Q": [[k, i, j, value], ...],
///     "C": [[k, i, j, l, value], ...],
///     "gradient_info": {"weights": [...], "cube_integrals": [null, ...]}   (optional)
///   }
///
/// Each tensor entry is listed once per class of permuted lower indices; the
/// loader fills in the permutations. beta_k(lambda) = c0[k] + c1[k] lambda.
SpectralModel model_from_json(const nlohmann::json& doc);
SpectralModel load_model(const std::filesystem::path& path);

/// Canonical form: lower indices sorted, one entry per class.
nlohmann::json model_to_json(const SpectralModel& model);
void save_model(const SpectralModel& model, const std::filesystem::path& path);

}  // namespace bifurcade
