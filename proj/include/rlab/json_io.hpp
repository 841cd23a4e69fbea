#pragma once

#include <json.hpp>
#include <string>

#include "rlab/covering.hpp"
#include "rlab/fields.hpp"
#include "rlab/graph.hpp"
#include "rlab/inequalities.hpp"
#include "rlab/maximal_cz.hpp"
#include "rlab/spectral.hpp"

namespace rlab {

using json = nlohmann::json;

// Field serialization: plain array aligned to the graph's vertex order.
json field_to_json(const ScalarField& f);
ScalarField field_from_json(const WeightedGraph& g, const json& j);

json to_json(const VolumeGrowthReport& r);
json to_json(const HeatBoundReport& r);
json to_json(const CZPropertyReport& r);
json to_json(const CoveringReport& r);
json to_json(const LeibnizReport& r);
json to_json(const AssemblyDetail& d);
json to_json(const QuadratureReport& r);

/// Estimate row {tag, p, q, constant, method, witness_file, context}.
/// witness_file empty when the witness is kept inline/unsaved.
json to_json(const InequalityEstimate& e, const std::string& witness_file = "");

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rlab
