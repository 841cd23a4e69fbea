#pragma once

#include <cstdint>
#include <string>

#include "rlab/config.hpp"
#include "rlab/json_io.hpp"

namespace rlab {

struct RunReport {
    json config_echo;
    json rows = json::array();     // one row per (level, pipeline) result
    json failures = json::array(); // pipelines that aborted, with reasons
    double wall_seconds = 0.0;
    std::string versions;
    std::uint64_t run_hash = 0;    // FNV-1a over the result rows
};

/// Builds the model at the requested level.
WeightedGraph build_model(const ModelSpec& spec, int level, double r0_override = 0.0);

/// Executes the configured pipelines per refinement level. A failing pipeline
/// is recorded and the rest continue. Writes report.json, tables/*.csv and
/// plots/*.csv under out_dir (unless out_dir is empty).
RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

std::uint64_t fnv1a(const std::string& data);

}  // namespace rlab
