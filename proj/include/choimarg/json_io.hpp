#pragma once

// JSON reading and writing for channels, scenarios, reports and tasks.
//
// Floating-point values are rounded to 12 significant digits on output so
// that equal inputs give byte-identical documents.

#include <string>

#include <json.hpp>

#include "choimarg/classical_cmp.hpp"
#include "choimarg/cmp_sdp.hpp"
#include "choimarg/witness_tasks.hpp"

namespace choimarg {

using Json = nlohmann::ordered_json;

/// v rounded to 12 significant digits, with -0 mapped to 0.
double rounded(double v);

Json to_json(const LabeledSpace& s);
Json to_json(const LabeledOperator& op);
Json to_json(const QuantumChannel& ch);
Json to_json(const MarginalScenario& sc);
Json to_json(const StochasticChannel& ch);
Json to_json(const ClassicalScenario& sc);
Json to_json(const RobustnessReport& rep);
Json to_json(const ChannelWitness& w);
Json to_json(const DiscriminationTask& task);

// Readers throw ParseError for malformed documents and the usual
// validation errors for well-formed but invalid content.
LabeledSpace space_from_json(const Json& j);
LabeledOperator operator_from_json(const Json& j);
QuantumChannel channel_from_json(const Json& j, const ToleranceConfig& tol = {});
MarginalScenario scenario_from_json(const Json& j, const ToleranceConfig& tol = {});
StochasticChannel stochastic_from_json(const Json& j, double tol_eq = 1e-7);
ClassicalScenario classical_scenario_from_json(const Json& j, double tol_eq = 1e-7);

Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);

}  // namespace choimarg
