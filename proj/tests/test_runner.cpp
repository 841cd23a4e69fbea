#include <doctest.h>

#include <filesystem>

#include "rlab/runner.hpp"

using namespace rlab;
namespace fs = std::filesystem;

namespace {

const char* kSampleConfig = R"(
# refinement study over two box sizes
[model]
builder = "connected_sum"
n = 2
spacing = 1.0
neck = 1
levels = [5, 7]

[run]
pipelines = ["hardy"]
p = 2.0
q = 1.5
seed = 42

[dictionary]
bumps = 2
noise = 1
tents = 1
powers = 2
potentials = 1
ascent_iterations = 10
)";

}  // namespace

TEST_CASE("config parsing: tables, arrays, defaults, malformed input") {
    const auto cfg = config_from_text(kSampleConfig);
    CHECK(cfg.model.builder == "connected_sum");
    CHECK(cfg.model.n == 2);
    CHECK(cfg.model.levels == std::vector<int>{5, 7});
    CHECK(cfg.pipelines == std::vector<std::string>{"hardy"});
    CHECK(cfg.p == 2.0);
    CHECK(cfg.seed == 42);
    CHECK(cfg.quad_nodes == 200);  // default

    CHECK_THROWS_AS(parse_config_text("key value-without-equals"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[unclosed\na = 1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("a = [1, 2"), std::invalid_argument);
}

TEST_CASE("validate: exponent windows and pipeline names") {
    ExperimentConfig cfg = config_from_text(kSampleConfig);
    CHECK(validate(cfg).empty());

    ExperimentConfig bad = cfg;
    bad.p = 3.0;
    bad.pipelines = {"assembly"};
    auto diags = validate(bad);
    REQUIRE_FALSE(diags.empty());
    bool mentions_range = false;
    for (const auto& d : diags)
        if (d.message.find("[q,2") != std::string::npos) mentions_range = true;
    CHECK(mentions_range);

    bad = cfg;
    bad.q = 0.5;
    CHECK_FALSE(validate(bad).empty());

    bad = cfg;
    bad.pipelines = {"frobnicate"};
    CHECK_FALSE(validate(bad).empty());

    bad = cfg;
    bad.model.levels = {1};
    CHECK_FALSE(validate(bad).empty());
}

TEST_CASE("build_model dispatches on the builder name") {
    ModelSpec spec;
    spec.builder = "lattice";
    spec.n = 2;
    CHECK(build_model(spec, 4).size() == 16);
    spec.builder = "connected_sum";
    CHECK(build_model(spec, 3).size() == 18);
    spec.builder = "conic";
    CHECK(build_model(spec, 3).size() > 3);
    spec.builder = "nope";
    CHECK_THROWS_AS(build_model(spec, 3), std::invalid_argument);

    spec.builder = "lattice";
    CHECK(build_model(spec, 4, 9.0).r0() == 9.0);
}

TEST_CASE("run: empty pipeline list yields a config echo only") {
    ExperimentConfig cfg = config_from_text(kSampleConfig);
    cfg.pipelines.clear();
    cfg.model.levels = {4};
    const auto rep = run_experiment(cfg, "");
    CHECK(rep.rows.empty());
    CHECK(rep.failures.empty());
    CHECK(rep.config_echo.contains("model"));
}

TEST_CASE("run: one hardy row per refinement level, deterministic hash") {
    ExperimentConfig cfg = config_from_text(kSampleConfig);
    const auto rep1 = run_experiment(cfg, "");
    REQUIRE(rep1.rows.size() == 2);
    CHECK(rep1.rows[0]["pipeline"] == "hardy");
    CHECK(rep1.rows[0]["level"] == 5);
    CHECK(rep1.rows[1]["level"] == 7);
    CHECK(rep1.failures.empty());

    const auto rep2 = run_experiment(cfg, "");
    CHECK(rep1.run_hash == rep2.run_hash);
}

TEST_CASE("run: a failing pipeline is recorded and the rest continue") {
    ExperimentConfig cfg = config_from_text(kSampleConfig);
    cfg.model.levels = {5};
    cfg.pipelines = {"riesz", "hardy"};  // riesz requires p > 1
    cfg.p = 1.0;
    const auto rep = run_experiment(cfg, "");
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0]["pipeline"] == "riesz");
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0]["pipeline"] == "hardy");
}

TEST_CASE("run: output files are written") {
    const std::string dir = (fs::temp_directory_path() / "rlab_run_test").string();
    fs::remove_all(dir);
    ExperimentConfig cfg = config_from_text(kSampleConfig);
    cfg.model.levels = {5};
    run_experiment(cfg, dir);
    CHECK(fs::exists(dir + "/report.json"));
    CHECK(fs::exists(dir + "/tables/estimates.csv"));
    CHECK(fs::exists(dir + "/plots/hardy_constant_vs_level.csv"));
    const auto text = read_text_file(dir + "/plots/hardy_constant_vs_level.csv");
    CHECK(text.rfind("level,constant", 0) == 0);
    fs::remove_all(dir);
}
