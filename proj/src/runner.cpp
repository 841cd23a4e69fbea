#include "rlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "rlab/covering.hpp"
#include "rlab/inequalities.hpp"
#include "rlab/maximal_cz.hpp"
#include "rlab/spectral.hpp"

namespace rlab {

namespace fs = std::filesystem;

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

WeightedGraph build_model(const ModelSpec& spec, int level, double r0_override) {
    WeightedGraph g = [&] {
        if (spec.builder == "lattice") return build_lattice_box(spec.n, level, spec.spacing);
        if (spec.builder == "connected_sum") {
            LatticeSpec end{spec.n, level, spec.spacing};
            return build_connected_sum(end, end, spec.neck);
        }
        if (spec.builder == "conic") return build_conic_end(spec.n, level, spec.cross_scale);
        throw std::invalid_argument("unknown builder '" + spec.builder + "'");
    }();
    if (r0_override > 0.0) g.set_r0(r0_override);
    return g;
}

namespace {

TestDictionary dictionary_from(const ExperimentConfig& cfg) {
    TestDictionary d;
    d.seed = cfg.seed;
    d.bumps = cfg.dict_bumps;
    d.noise = cfg.dict_noise;
    d.tents = cfg.dict_tents;
    d.powers = cfg.dict_powers;
    d.potentials = cfg.dict_potentials;
    d.ascent_iterations = cfg.ascent_iterations;
    return d;
}

// a remote ball around a deterministic far-but-not-frontier vertex
Ball pick_remote_ball(const WeightedGraph& g) {
    vid best = g.basepoint();
    const double target = 0.7 * g.max_radial();
    double gap = std::numeric_limits<double>::infinity();
    for (vid x = 0; x < g.size(); ++x) {
        const double d = std::abs(g.radial(x) - target);
        if (d < gap) {
            gap = d;
            best = x;
        }
    }
    return ball(g, best, std::max(g.radial(best) / 2.0, 1.5 * g.min_edge_len()));
}

ScalarField bump_on(const WeightedGraph& g, const Ball& b) {
    ScalarField f = ScalarField::zero(g);
    for (size_t k = 0; k < b.members.size(); ++k) {
        const double t = b.member_dist[k] / b.radius;
        f[b.members[k]] = std::exp(-4.0 * t * t) * (1.0 - t);
    }
    return f;
}

std::vector<double> lambda_percentiles(const WeightedGraph& g, const ScalarField& M,
                                       double q, double threshold,
                                       const std::vector<double>& percentiles) {
    std::vector<double> positive;
    for (vid x = 0; x < g.size(); ++x)
        if (M[x] > 0.0) positive.push_back(std::pow(M[x], 1.0 / q));
    std::sort(positive.begin(), positive.end());
    std::vector<double> out;
    for (double pct : percentiles) {
        const size_t idx = std::min(positive.size() - 1,
                                    static_cast<size_t>(pct / 100.0 * positive.size()));
        out.push_back(std::max(positive[idx], threshold * 1.0001));
    }
    return out;
}

struct PipelineOutput {
    json rows = json::array();
    json failures = json::array();
};

void run_pipeline(const ExperimentConfig& cfg, const std::string& name, int level,
                  const WeightedGraph& g, PipelineOutput& out) {
    const TestDictionary dict = dictionary_from(cfg);
    auto row = [&](json j) {
        j["pipeline"] = name;
        j["level"] = level;
        out.rows.push_back(std::move(j));
    };
    std::vector<double> p_list = cfg.p_values.empty() ? std::vector<double>{cfg.p}
                                                      : cfg.p_values;

    if (name == "volume-growth") {
        std::vector<VolumeSample> sample;
        const double h = g.min_edge_len();
        vid far = 0;
        for (vid x = 0; x < g.size(); ++x)
            if (g.radial(x) > g.radial(far)) far = x;
        for (vid c : {g.basepoint(), far}) {
            sample.push_back({c, 2.0 * h, 4.0 * h});
            sample.push_back({c, 2.0 * h, std::max(6.0 * h, g.max_radial() / 2.0)});
        }
        row(to_json(estimate_volume_growth(g, sample)));
    } else if (name == "heat-bounds") {
        std::vector<HeatGridSample> grid;
        vid far = 0;
        for (vid x = 0; x < g.size(); ++x)
            if (g.radial(x) > g.radial(far)) far = x;
        const double h = g.min_edge_len();
        const double D = std::max(g.max_radial(), 2.0 * h);
        for (vid x : {g.basepoint(), far})
            for (vid y : {g.basepoint(), far})
                for (double t : {h * h, D * h, D * D / 4.0}) grid.push_back({x, y, t});
        row(to_json(check_gaussian_bounds(g, grid)));
    } else if (name == "covering") {
        const auto cov = admissible_cover(g, g.r0());
        row(to_json(verify_covering(cov)));
    } else if (name == "cz") {
        const Ball B = pick_remote_ball(g);
        const ScalarField u = bump_on(g, B);
        const double q = cfg.q;
        const ScalarField M = maximal_function(g, grad_density_q(g, u, q));
        const double threshold =
            std::pow(std::pow(grad_norm_p(g, u, q), q) / volume(g, B), 1.0 / q);
        for (double lambda : lambda_percentiles(g, M, q, threshold, {60, 70, 80, 90})) {
            auto dec = cz_decompose(g, u, B, q, lambda);
            json j = to_json(verify_cz(dec));
            j["lambda"] = lambda;
            j["q"] = q;
            j["whitney_balls"] = dec.balls.size();
            row(std::move(j));
        }
    } else if (name == "hardy") {
        for (double p : p_list) row(to_json(hardy_constant(g, p, dict)));
    } else if (name == "riesz") {
        for (double p : p_list) row(to_json(riesz_constant(g, p, dict)));
    } else if (name == "reverse-riesz") {
        for (double p : p_list) row(to_json(reverse_riesz_constant(g, p, dict)));
    } else if (name == "weak-type") {
        const Ball B = pick_remote_ball(g);
        const ScalarField phi = bump_on(g, B);
        WeakTypeDetail detail;
        json j = to_json(measure_weak_type(g, phi, B, cfg.q, {}, &detail));
        j["argmax"] = detail.argmax;
        j["grid_points"] = detail.grid.size();
        j["attained_interior_or_threshold"] = detail.attained_interior_or_threshold;
        row(std::move(j));
    } else if (name == "assembly") {
        const auto cov = admissible_cover(g, g.r0());
        TestDictionary d1 = dict;
        d1.bumps = 1;
        d1.noise = 1;
        d1.tents = d1.powers = d1.potentials = 0;
        const auto fields = d1.generate(g, false);
        const ScalarField& f = fields.back();  // heat-smoothed noise
        AssemblyDetail detail;
        json j = to_json(hardy_sum_bound(g, cov, f, cfg.p, &detail));
        j["detail"] = to_json(detail);
        row(std::move(j));
        row(to_json(measure_diagonal(g, cov, f, cfg.p)));
    } else {
        throw std::invalid_argument("unknown pipeline '" + name + "'");
    }
}

void write_outputs(const RunReport& rep, const ExperimentConfig& cfg,
                   const std::string& out_dir) {
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/tables");
    fs::create_directories(out_dir + "/plots");

    json full;
    full["config"] = rep.config_echo;
    full["rows"] = rep.rows;
    full["failures"] = rep.failures;
    full["wall_seconds"] = rep.wall_seconds;
    full["versions"] = rep.versions;
    full["run_hash"] = rep.run_hash;
    write_text_file(out_dir + "/report.json", full.dump(2));

    std::ostringstream csv;
    csv << "pipeline,level,tag,p,q,constant,method\n";
    for (const auto& r : rep.rows) {
        if (!r.contains("constant")) continue;
        csv << r.value("pipeline", "") << "," << r.value("level", 0) << ","
            << r.value("tag", "") << "," << r.value("p", 0.0) << "," << r.value("q", 0.0)
            << "," << r["constant"].get<double>() << "," << r.value("method", "") << "\n";
    }
    write_text_file(out_dir + "/tables/estimates.csv", csv.str());

    for (const std::string& name : cfg.pipelines) {
        std::ostringstream plot;
        plot << "level,constant\n";
        bool any = false;
        for (const auto& r : rep.rows)
            if (r.value("pipeline", "") == name && r.contains("constant")) {
                plot << r.value("level", 0) << "," << r["constant"].get<double>() << "\n";
                any = true;
            }
        if (any)
            write_text_file(out_dir + "/plots/" + name + "_constant_vs_level.csv", plot.str());
        std::ostringstream pplot;
        pplot << "p,constant\n";
        any = false;
        for (const auto& r : rep.rows)
            if (r.value("pipeline", "") == name && r.contains("constant") &&
                r.value("level", 0) == cfg.model.levels.back()) {
                pplot << r.value("p", 0.0) << "," << r["constant"].get<double>() << "\n";
                any = true;
            }
        if (any && cfg.p_values.size() > 1)
            write_text_file(out_dir + "/plots/" + name + "_constant_vs_p.csv", pplot.str());
    }
}

json echo_config(const ExperimentConfig& cfg) {
    json j;
    j["model"] = {{"builder", cfg.model.builder}, {"n", cfg.model.n},
                  {"spacing", cfg.model.spacing}, {"neck", cfg.model.neck},
                  {"cross_scale", cfg.model.cross_scale}, {"levels", cfg.model.levels}};
    j["run"] = {{"pipelines", cfg.pipelines}, {"p", cfg.p}, {"p_values", cfg.p_values},
                {"q", cfg.q}, {"r0", cfg.r0}, {"seed", cfg.seed},
                {"parallel", cfg.parallel_levels}};
    j["quadrature"] = {{"eps", cfg.quad_eps}, {"R", cfg.quad_R}, {"nodes", cfg.quad_nodes}};
    j["dictionary"] = {{"bumps", cfg.dict_bumps}, {"noise", cfg.dict_noise},
                       {"tents", cfg.dict_tents}, {"powers", cfg.dict_powers},
                       {"potentials", cfg.dict_potentials},
                       {"ascent_iterations", cfg.ascent_iterations}};
    j["spectral"] = {{"dense_cap", cfg.dense_cap}};
    return j;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    Spectral::set_dense_cap(cfg.dense_cap);

    RunReport rep;
    rep.config_echo = echo_config(cfg);
    {
        std::ostringstream v;
        v << "eigen " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
          << EIGEN_MINOR_VERSION << "; omp threads " << omp_get_max_threads();
        rep.versions = v.str();
    }

    const int nlevels = static_cast<int>(cfg.model.levels.size());
    std::vector<PipelineOutput> per_level(nlevels);

    auto run_level = [&](int li) {
        const int level = cfg.model.levels[li];
        WeightedGraph g = build_model(cfg.model, level, cfg.r0);
        for (const std::string& name : cfg.pipelines) {
            try {
                run_pipeline(cfg, name, level, g, per_level[li]);
            } catch (const std::exception& ex) {
                per_level[li].failures.push_back(
                    {{"pipeline", name}, {"level", level}, {"error", ex.what()}});
            }
        }
    };

    if (cfg.parallel_levels) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int li = 0; li < nlevels; ++li) run_level(li);
    } else {
        for (int li = 0; li < nlevels; ++li) run_level(li);
    }
    for (const auto& bucket : per_level) {
        for (const auto& r : bucket.rows) rep.rows.push_back(r);
        for (const auto& f : bucket.failures) rep.failures.push_back(f);
    }

    rep.run_hash = fnv1a(rep.rows.dump());
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out_dir.empty()) write_outputs(rep, cfg, out_dir);
    return rep;
}

}  // namespace rlab
