#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace rlab {

/// Minimal structured-text config: `[table]` headers and `key = value` lines,
/// values being numbers, quoted strings, booleans, or flat arrays. Chosen for
/// diffability in refinement studies.
struct ConfigValue {
    std::variant<double, std::string, bool, std::vector<double>,
                 std::vector<std::string>>
        v;
    double as_number() const;
    std::string as_string() const;
    bool as_bool() const;
    std::vector<double> as_numbers() const;
    std::vector<std::string> as_strings() const;
};

using ConfigTable = std::map<std::string, ConfigValue>;

std::map<std::string, ConfigTable> parse_config_text(const std::string& text);

struct ModelSpec {
    std::string builder = "lattice";  // lattice | connected_sum | conic
    int n = 3;
    double spacing = 1.0;
    int neck = 1;
    double cross_scale = 1.0;
    std::vector<int> levels = {9};  // sides (lattice/connected_sum), ring counts (conic)
};

struct ExperimentConfig {
    ModelSpec model;
    std::vector<std::string> pipelines;
    double p = 2.0;
    std::vector<double> p_values;  // optional sweep for constant-vs-p plots
    double q = 1.5;
    double r0 = 0.0;  // 0 = builder default
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool parallel_levels = false;

    double quad_eps = 0.0;
    double quad_R = 0.0;
    int quad_nodes = 200;

    int dict_bumps = 4, dict_noise = 3, dict_tents = 3, dict_powers = 4, dict_potentials = 2;
    int ascent_iterations = 200;
    int dense_cap = 3000;
};

struct Diagnostic {
    enum class Level { Error, Warning } level;
    std::string message;
};

ExperimentConfig config_from_text(const std::string& text);

/// Range checks, pipeline-specific exponent windows, quadrature sanity and a
/// memory estimate. Errors make `run` refuse the config.
std::vector<Diagnostic> validate(const ExperimentConfig& cfg);

const std::vector<std::string>& known_pipelines();

}  // namespace rlab
