// Batch driver for the graph laboratory: builds models from config files,
// runs covering / CZ / inequality pipelines and persists reports.
//
//   riesz-lab build    --config cfg.toml --out out/
//   riesz-lab validate --config cfg.toml
//   riesz-lab run      --config cfg.toml --out out/ [--seed N] [--parallel]
//   riesz-lab report   --out out/
//
// Exit codes: 0 success, 2 validation failure, 3 pipeline error.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "rlab/runner.hpp"

using namespace rlab;

namespace {

ExperimentConfig load_config(const std::string& path, std::uint64_t seed_override,
                             bool parallel) {
    ExperimentConfig cfg = config_from_text(read_text_file(path));
    if (seed_override != 0) cfg.seed = seed_override;
    if (parallel) cfg.parallel_levels = true;
    return cfg;
}

int print_diagnostics(const std::vector<Diagnostic>& diags) {
    bool errors = false;
    for (const auto& d : diags) {
        const bool err = d.level == Diagnostic::Level::Error;
        errors |= err;
        std::cerr << (err ? "error: " : "warning: ") << d.message << "\n";
    }
    return errors ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph laboratory for Riesz/Hardy inequality experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::uint64_t seed = 0;
    bool parallel = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", config_path, "config file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_flag("--parallel", parallel, "run refinement levels in parallel");
    };

    auto* build = app.add_subcommand("build", "build the model graphs and write JSON");
    add_common(build, true);
    auto* validate_cmd = app.add_subcommand("validate", "check a config and exit");
    add_common(validate_cmd, true);
    auto* run = app.add_subcommand("run", "run the configured pipelines");
    add_common(run, true);
    auto* report = app.add_subcommand("report", "summarize an existing report.json");
    report->add_option("--out", out_dir, "output directory holding report.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            auto cfg = load_config(config_path, seed, parallel);
            if (int rc = print_diagnostics(validate(cfg))) return rc;
            std::filesystem::create_directories(out_dir);
            for (int level : cfg.model.levels) {
                WeightedGraph g = build_model(cfg.model, level, cfg.r0);
                const std::string path =
                    out_dir + "/graph_level_" + std::to_string(level) + ".json";
                write_text_file(path, graph_to_json(g));
                std::cout << path << ": " << g.size() << " vertices, "
                          << g.edges().size() << " edges\n";
            }
            return 0;
        }
        if (validate_cmd->parsed()) {
            auto cfg = load_config(config_path, seed, parallel);
            const int rc = print_diagnostics(validate(cfg));
            if (rc == 0) std::cout << "config ok\n";
            return rc;
        }
        if (run->parsed()) {
            auto cfg = load_config(config_path, seed, parallel);
            if (int rc = print_diagnostics(validate(cfg))) return rc;
            RunReport rep = run_experiment(cfg, out_dir);
            std::cout << "rows: " << rep.rows.size() << ", failures: "
                      << rep.failures.size() << ", hash: " << rep.run_hash << ", "
                      << rep.wall_seconds << "s\n";
            if (!rep.failures.empty()) {
                for (const auto& f : rep.failures)
                    std::cerr << "pipeline " << f["pipeline"] << " level " << f["level"]
                              << ": " << f["error"] << "\n";
                return 3;
            }
            return 0;
        }
        if (report->parsed()) {
            const json full = json::parse(read_text_file(out_dir + "/report.json"));
            std::cout << "run hash " << full["run_hash"] << ", "
                      << full["rows"].size() << " rows, " << full["failures"].size()
                      << " failures, " << full["wall_seconds"] << "s\n";
            for (const auto& r : full["rows"]) {
                std::cout << "  " << r.value("pipeline", "?") << " level "
                          << r.value("level", 0);
                if (r.contains("constant")) std::cout << ": " << r["constant"].get<double>();
                std::cout << "\n";
            }
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    }
    return 0;
}
