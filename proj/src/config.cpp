#include "rlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rlab {

double ConfigValue::as_number() const {
    if (auto* d = std::get_if<double>(&v)) return *d;
    if (auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    throw std::invalid_argument("config: expected a number");
}
std::string ConfigValue::as_string() const {
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    throw std::invalid_argument("config: expected a string");
}
bool ConfigValue::as_bool() const {
    if (auto* b = std::get_if<bool>(&v)) return *b;
    throw std::invalid_argument("config: expected a boolean");
}
std::vector<double> ConfigValue::as_numbers() const {
    if (auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    if (auto* d = std::get_if<double>(&v)) return {*d};
    throw std::invalid_argument("config: expected a number array");
}
std::vector<std::string> ConfigValue::as_strings() const {
    if (auto* a = std::get_if<std::vector<std::string>>(&v)) return *a;
    if (auto* s = std::get_if<std::string>(&v)) return {*s};
    throw std::invalid_argument("config: expected a string array");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

ConfigValue parse_scalar(const std::string& tok) {
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
        return {tok.substr(1, tok.size() - 2)};
    if (tok == "true") return {true};
    if (tok == "false") return {false};
    try {
        size_t used = 0;
        const double d = std::stod(tok, &used);
        if (used == tok.size()) return {d};
    } catch (...) {
    }
    throw std::invalid_argument("config: cannot parse value '" + tok + "'");
}

ConfigValue parse_value(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) throw std::invalid_argument("config: empty value");
    if (s.front() != '[') return parse_scalar(s);
    if (s.back() != ']') throw std::invalid_argument("config: unterminated array");
    std::vector<std::string> toks;
    std::string item;
    for (char c : s.substr(1, s.size() - 2)) {
        if (c == ',') {
            toks.push_back(trim(item));
            item.clear();
        } else {
            item += c;
        }
    }
    if (!trim(item).empty()) toks.push_back(trim(item));
    if (toks.empty()) return {std::vector<double>{}};
    if (!toks[0].empty() && toks[0].front() == '"') {
        std::vector<std::string> out;
        for (auto& t : toks) out.push_back(std::get<std::string>(parse_scalar(t).v));
        return {out};
    }
    std::vector<double> out;
    for (auto& t : toks) out.push_back(std::get<double>(parse_scalar(t).v));
    return {out};
}

}  // namespace

std::map<std::string, ConfigTable> parse_config_text(const std::string& text) {
    std::map<std::string, ConfigTable> tables;
    std::string section;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": bad table header");
            section = trim(line.substr(1, line.size() - 2));
            tables[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        tables[section][trim(line.substr(0, eq))] = parse_value(line.substr(eq + 1));
    }
    return tables;
}

const std::vector<std::string>& known_pipelines() {
    static const std::vector<std::string> k = {
        "volume-growth", "heat-bounds", "cz",        "covering", "hardy",
        "riesz",         "reverse-riesz", "weak-type", "assembly"};
    return k;
}

ExperimentConfig config_from_text(const std::string& text) {
    const auto tables = parse_config_text(text);
    ExperimentConfig cfg;
    auto get = [&](const std::string& table, const std::string& key) -> const ConfigValue* {
        auto t = tables.find(table);
        if (t == tables.end()) return nullptr;
        auto k = t->second.find(key);
        return k == t->second.end() ? nullptr : &k->second;
    };
    if (auto* v = get("model", "builder")) cfg.model.builder = v->as_string();
    if (auto* v = get("model", "n")) cfg.model.n = static_cast<int>(v->as_number());
    if (auto* v = get("model", "spacing")) cfg.model.spacing = v->as_number();
    if (auto* v = get("model", "neck")) cfg.model.neck = static_cast<int>(v->as_number());
    if (auto* v = get("model", "cross_scale")) cfg.model.cross_scale = v->as_number();
    if (auto* v = get("model", "levels")) {
        cfg.model.levels.clear();
        for (double d : v->as_numbers()) cfg.model.levels.push_back(static_cast<int>(d));
    }
    if (auto* v = get("run", "pipelines")) cfg.pipelines = v->as_strings();
    if (auto* v = get("run", "p")) cfg.p = v->as_number();
    if (auto* v = get("run", "p_values")) cfg.p_values = v->as_numbers();
    if (auto* v = get("run", "q")) cfg.q = v->as_number();
    if (auto* v = get("run", "r0")) cfg.r0 = v->as_number();
    if (auto* v = get("run", "seed")) cfg.seed = static_cast<std::uint64_t>(v->as_number());
    if (auto* v = get("run", "out")) cfg.out_dir = v->as_string();
    if (auto* v = get("run", "parallel")) cfg.parallel_levels = v->as_bool();
    if (auto* v = get("quadrature", "eps")) cfg.quad_eps = v->as_number();
    if (auto* v = get("quadrature", "R")) cfg.quad_R = v->as_number();
    if (auto* v = get("quadrature", "nodes")) cfg.quad_nodes = static_cast<int>(v->as_number());
    if (auto* v = get("dictionary", "bumps")) cfg.dict_bumps = static_cast<int>(v->as_number());
    if (auto* v = get("dictionary", "noise")) cfg.dict_noise = static_cast<int>(v->as_number());
    if (auto* v = get("dictionary", "tents")) cfg.dict_tents = static_cast<int>(v->as_number());
    if (auto* v = get("dictionary", "powers"))
        cfg.dict_powers = static_cast<int>(v->as_number());
    if (auto* v = get("dictionary", "potentials"))
        cfg.dict_potentials = static_cast<int>(v->as_number());
    if (auto* v = get("dictionary", "ascent_iterations"))
        cfg.ascent_iterations = static_cast<int>(v->as_number());
    if (auto* v = get("spectral", "dense_cap"))
        cfg.dense_cap = static_cast<int>(v->as_number());
    return cfg;
}

std::vector<Diagnostic> validate(const ExperimentConfig& cfg) {
    std::vector<Diagnostic> out;
    auto error = [&](const std::string& m) { out.push_back({Diagnostic::Level::Error, m}); };
    auto warn = [&](const std::string& m) { out.push_back({Diagnostic::Level::Warning, m}); };

    if (cfg.model.builder != "lattice" && cfg.model.builder != "connected_sum" &&
        cfg.model.builder != "conic")
        error("unknown builder '" + cfg.model.builder + "'");
    if (cfg.model.n < 1) error("model.n must be >= 1");
    if (!(cfg.model.spacing > 0.0)) error("model.spacing must be > 0");
    if (cfg.model.levels.empty()) error("model.levels must list at least one level");
    for (int s : cfg.model.levels)
        if (s < 2) error("refinement level " + std::to_string(s) + " below 2");
    if (cfg.model.builder == "connected_sum" && cfg.model.neck < 1)
        error("connected_sum needs neck >= 1");

    for (const auto& p : cfg.pipelines)
        if (std::find(known_pipelines().begin(), known_pipelines().end(), p) ==
            known_pipelines().end())
            error("unknown pipeline '" + p + "'");

    if (cfg.q < 1.0 || cfg.q > 2.0) error("q must lie in [1,2]");
    if (cfg.p < 1.0) error("p must be >= 1");
    const bool assembly =
        std::find(cfg.pipelines.begin(), cfg.pipelines.end(), "assembly") != cfg.pipelines.end();
    if (assembly && !(cfg.p >= cfg.q && cfg.p <= 2.0))
        error("assembly pipeline requires p in [q,2] (reverse-Riesz range p in [q,2))");
    const bool riesz =
        std::find(cfg.pipelines.begin(), cfg.pipelines.end(), "riesz") != cfg.pipelines.end();
    if (riesz && cfg.p <= 1.0) error("riesz pipeline requires p > 1");

    if (cfg.quad_nodes < 2) error("quadrature.nodes must be >= 2");
    if (cfg.quad_eps < 0.0 || cfg.quad_R < 0.0) error("quadrature cutoffs must be >= 0");
    if (cfg.quad_eps > 0.0 && cfg.quad_R > 0.0 && cfg.quad_eps >= cfg.quad_R)
        error("quadrature needs eps < R");
    if (cfg.ascent_iterations < 0) error("dictionary.ascent_iterations must be >= 0");

    // memory estimate: dense spectral work is the dominant footprint
    long worst = 0;
    for (int s : cfg.model.levels) {
        long count = 1;
        for (int d = 0; d < cfg.model.n; ++d) count *= s;
        if (cfg.model.builder == "connected_sum") count = 2 * count + cfg.model.neck - 1;
        worst = std::max(worst, count);
    }
    if (worst <= cfg.dense_cap) {
        const double gib = double(worst) * worst * 8.0 / (1 << 30);
        if (gib > 8.0)
            warn("dense eigendecomposition at " + std::to_string(worst) +
                 " vertices needs ~" + std::to_string(gib) + " GiB");
    }
    return out;
}

}  // namespace rlab
