#pragma once

#include <nlohmann/json.hpp>

#include "bifurcade/bifurcation.hpp"
#include "bifurcade/center_manifold.hpp"
#include "bifurcade/conley.hpp"
#include "bifurcade/continuation.hpp"
#include "bifurcade/integrator.hpp"
#include "bifurcade/spectrum.hpp"

// JSON views of the analysis results. Mode numbers are written 1-based.
namespace bifurcade {

void to_json(nlohmann::json& j, const SpectralGaps& g);
void to_json(nlohmann::json& j, const CrossingData& c);
void to_json(nlohmann::json& j, const DegenerateValue& d);
void to_json(nlohmann::json& j, const DetectionResult& d);
void to_json(nlohmann::json& j, const ReducedField& r);
void to_json(nlohmann::json& j, const ConleyIndex& c);
void to_json(nlohmann::json& j, const IsolatingBlock& b);
void to_json(nlohmann::json& j, const SweepResult& s);
void to_json(nlohmann::json& j, const TrivialClassification& t);
void to_json(nlohmann::json& j, const InvariantSetReport& r);
void to_json(nlohmann::json& j, const BifurcatingIndex& b);
void to_json(nlohmann::json& j, const StaticClassification& s);
void to_json(nlohmann::json& j, const TrivialBranch& t);
void to_json(nlohmann::json& j, const SwitchResult& s);
void to_json(nlohmann::json& j, const Branch& b);
void to_json(nlohmann::json& j, const GlobalReport& g);
void to_json(nlohmann::json& j, const HeteroclinicProbe& p);
void to_json(nlohmann::json& j, const Trajectory& t);

nlohmann::json vector_json(const Eigen::VectorXd& v);

}  // namespace bifurcade
