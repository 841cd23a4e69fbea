// Acceptance suite: nine criteria, one test case and one PASS/FAIL line each.
// Tolerances are pinned in code next to each assertion.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "rlab/covering.hpp"
#include "rlab/inequalities.hpp"
#include "rlab/maximal_cz.hpp"
#include "rlab/runner.hpp"
#include "rlab/spectral.hpp"

using namespace rlab;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string detail_sci(const char* label, double value) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%s%.2e", label, value);
    return buf;
}

void report(int criterion, const char* name, bool pass, const std::string& detail,
            double secs) {
    std::printf("ACCEPTANCE %d (%s): %s  [%s]  (%.1fs)\n", criterion, name,
                pass ? "PASS" : "FAIL", detail.c_str(), secs);
    std::fflush(stdout);
}

ScalarField random_field(const WeightedGraph& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    Eigen::VectorXd v(g.size());
    for (vid x = 0; x < g.size(); ++x) v[x] = N(rng);
    return ScalarField(g, std::move(v));
}

// every criterion shares this setting; side-13 models stay on the dense path
void setup_spectral() { Spectral::set_dense_cap(4500); }

const WeightedGraph& connected_sum_side(int side, int neck = 1) {
    static std::map<int, std::unique_ptr<WeightedGraph>> cache;
    auto& slot = cache[side * 100 + neck];
    if (!slot) {
        LatticeSpec end{3, side, 1.0};
        slot = std::make_unique<WeightedGraph>(build_connected_sum(end, end, neck));
    }
    return *slot;
}

Ball seeded_remote_ball(const WeightedGraph& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const vid x = static_cast<vid>(rng() % g.size());
        if (g.radial(x) < 0.45 * g.max_radial()) continue;
        Ball b = ball(g, x, g.radial(x) / 2.0);
        if (b.members.size() >= 6) return b;
    }
    throw std::runtime_error("no usable remote ball found");
}

ScalarField random_bump(const WeightedGraph& g, const Ball& b, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    ScalarField f = ScalarField::zero(g);
    for (size_t k = 0; k < b.members.size(); ++k) {
        const double tent = 1.0 - b.member_dist[k] / b.radius;
        f[b.members[k]] = tent * (1.0 + 0.3 * N(rng));
    }
    return f;
}

TestDictionary acceptance_dict(std::uint64_t seed) {
    TestDictionary d;
    d.seed = seed;
    d.bumps = 3;
    d.noise = 2;
    d.tents = 2;
    d.powers = 3;
    d.potentials = 2;
    d.ascent_iterations = 40;
    return d;
}

}  // namespace

TEST_CASE("criterion 1: L2 identity of gradient and square root") {
    Timer timer;
    setup_spectral();
    std::vector<const WeightedGraph*> graphs;
    static const auto p3 = build_lattice_box(1, 3, 1.0);
    static const auto l1 = build_lattice_box(1, 9, 1.0);
    static const auto l2 = build_lattice_box(2, 9, 1.0);
    static const auto l3 = build_lattice_box(3, 9, 1.0);
    graphs = {&p3, &l1, &l2, &l3, &connected_sum_side(9)};

    double worst = 0.0;
    for (const auto* g : graphs) {
        REQUIRE(g->size() <= 3000);
        for (int i = 0; i < 100; ++i) {
            const auto u = random_field(*g, 1000 + i);
            const double sq = lp_norm(*g, sqrt_apply_spectral(*g, u), 2.0);
            const double gr = grad_norm_p(*g, u, 2.0);
            worst = std::max(worst, std::abs(sq - gr) / gr);
        }
    }
    const bool pass = worst <= 1e-10;
    report(1, "L2 identity", pass, detail_sci("max rel deviation ", worst), timer.seconds());
    CHECK(worst <= 1e-10);
}

TEST_CASE("criterion 2: quadrature representation matches the spectral oracle") {
    Timer timer;
    setup_spectral();
    std::vector<const WeightedGraph*> graphs;
    static const auto path = build_lattice_box(1, 9, 1.0);
    static const auto l2 = build_lattice_box(2, 9, 1.0);
    static const auto l3 = build_lattice_box(3, 9, 1.0);
    graphs = {&path, &l2, &l3, &connected_sum_side(9)};

    double worst = 0.0;
    for (const auto* g : graphs) {
        for (int i = 0; i < 5; ++i) {
            const auto u = random_field(*g, 2000 + i);
            const auto quad = sqrt_apply_quadrature(*g, u);  // default settings
            const auto oracle = sqrt_apply_spectral(*g, project_off_constants(*g, u));
            worst = std::max(worst, (quad.values - oracle.values).norm() /
                                        oracle.values.norm());
        }
    }
    const bool pass = worst <= 1e-6;
    report(2, "quadrature oracle agreement", pass, detail_sci("max rel error ", worst),
           timer.seconds());
    CHECK(worst <= 1e-6);
}

TEST_CASE("criterion 3: sharp Euclidean Hardy constant on growing boxes") {
    Timer timer;
    setup_spectral();
    TestDictionary minimal;
    minimal.seed = 3;
    minimal.bumps = 1;
    minimal.noise = 0;
    minimal.tents = 0;
    minimal.powers = 1;
    minimal.potentials = 0;
    minimal.ascent_iterations = 0;

    std::vector<double> constants;
    for (int side : {17, 33, 65}) {
        const auto g = build_lattice_box(3, side, 1.0);
        const auto est = hardy_constant(g, 2.0, minimal);
        REQUIRE(est.method == EstimationMethod::SpectralExact);
        constants.push_back(est.constant);
    }
    const bool monotone = constants[0] < constants[1] && constants[1] < constants[2];
    const bool bracket = constants[2] >= 2.8 && constants[2] <= 4.0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "C_17=%.4f C_33=%.4f C_65=%.4f; hard monotone %s, soft bracket [2.8,4.0] %s",
                  constants[0], constants[1], constants[2], monotone ? "ok" : "VIOLATED",
                  bracket ? "ok" : "VIOLATED");
    report(3, "Euclidean Hardy constant", monotone && bracket, buf, timer.seconds());
    CHECK(monotone);  // hard requirement
    // soft requirement: desk-scale boxes cannot close the logarithmic gap to
    // the continuum value 4; kept as stated and expected to stay red until
    // side counts grow by orders of magnitude
    CHECK(constants[2] >= 2.8);
    CHECK(constants[2] <= 4.0);
}

TEST_CASE("criterion 4: Calderon-Zygmund property suite") {
    Timer timer;
    setup_spectral();
    const auto& g = connected_sum_side(9);
    bool all_pass = true;
    double id_worst = 0.0, edge_worst = 0.0;
    int ran = 0;

    const double qs[] = {1.2, 1.5, 1.8};
    for (int inst = 0; inst < 20; ++inst) {
        const Ball B = seeded_remote_ball(g, 4000 + inst);
        const ScalarField u = random_bump(g, B, 4100 + inst);
        const double q = qs[inst % 3];
        const double threshold =
            std::pow(std::pow(grad_norm_p(g, u, q), q) / volume(g, B), 1.0 / q);
        const auto M = maximal_function(g, grad_density_q(g, u, q));
        std::vector<double> vals;
        for (vid x = 0; x < g.size(); ++x)
            if (M[x] > 0.0) vals.push_back(std::pow(M[x], 1.0 / q));
        std::sort(vals.begin(), vals.end());
        const double pct = 60.0 + 10.0 * (inst % 4);
        const double lambda = std::max(vals[size_t(pct / 100.0 * vals.size())],
                                       threshold * 1.0001);
        if (lambda >= vals.back()) continue;  // degenerate draw: empty level set
        const auto dec = cz_decompose(g, u, B, q, lambda);
        const auto rep = verify_cz(dec);
        all_pass = all_pass && rep.all_pass;
        id_worst = std::max(id_worst, rep.p1_residual);
        edge_worst = std::max(edge_worst, rep.edge_identity_residual);
        ++ran;
    }

    // c2 stability across a 4-point lambda grid on one fixed instance
    const Ball B = seeded_remote_ball(g, 4999);
    const ScalarField u = random_bump(g, B, 4999);
    const double q = 1.5;
    const double threshold =
        std::pow(std::pow(grad_norm_p(g, u, q), q) / volume(g, B), 1.0 / q);
    const auto M = maximal_function(g, grad_density_q(g, u, q));
    std::vector<double> vals;
    for (vid x = 0; x < g.size(); ++x)
        if (M[x] > 0.0) vals.push_back(std::pow(M[x], 1.0 / q));
    std::sort(vals.begin(), vals.end());
    double c2_min = 1e300, c2_max = 0.0;
    for (double pct : {60.0, 70.0, 80.0, 90.0}) {
        const double lambda = std::max(vals[size_t(pct / 100.0 * vals.size())],
                                       threshold * 1.0001);
        const auto rep = verify_cz(cz_decompose(g, u, B, q, lambda));
        if (rep.c2 > 0.0) {
            c2_min = std::min(c2_min, rep.c2);
            c2_max = std::max(c2_max, rep.c2);
        }
    }
    const bool c2_stable = c2_max / c2_min < 4.0;

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%d instances, sum residual %.2e (tol 1e-10), edge identity %.2e "
                  "(tol 1e-9), c2 range [%.3f, %.3f] ratio %.2f (tol 4)",
                  ran, id_worst, edge_worst, c2_min, c2_max, c2_max / c2_min);
    report(4, "CZ decomposition properties", all_pass && c2_stable && ran >= 15, buf,
           timer.seconds());
    CHECK(ran >= 15);
    CHECK(all_pass);
    CHECK(id_worst <= 1e-10);
    CHECK(edge_worst <= 1e-9);
    CHECK(c2_stable);
}

TEST_CASE("criterion 5: admissible covering suite across one refinement") {
    Timer timer;
    setup_spectral();
    double grad_bound[2];
    int overlap[2];
    bool all_ok = true;
    int idx = 0;
    for (int side : {9, 17}) {
        const auto& g = connected_sum_side(side);
        const auto cov = admissible_cover(g, g.r0());
        const auto rep = verify_covering(cov);
        all_ok = all_ok && rep.all_admissible && rep.covers && rep.radius_band &&
                 rep.fourteen_B_remote && rep.partition_residual <= 1e-12;
        grad_bound[idx] = rep.grad_chi_bound;
        overlap[idx] = rep.overlap_N;
        ++idx;
    }
    const double ratio = std::max(grad_bound[0], grad_bound[1]) /
                         std::min(grad_bound[0], grad_bound[1]);
    const bool stable = ratio <= 2.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "grad-chi bounds %.4f -> %.4f (ratio %.2f, tol 2), overlap N %d -> %d",
                  grad_bound[0], grad_bound[1], ratio, overlap[0], overlap[1]);
    report(5, "covering properties", all_ok && stable, buf, timer.seconds());
    CHECK(all_ok);
    CHECK(stable);
    CHECK(std::abs(overlap[0] - overlap[1]) <= 1);
}

TEST_CASE("criterion 6: T/U operator-split bounds, stable under refinement") {
    Timer timer;
    setup_spectral();
    const double ss[] = {1.5, 2.0, 3.0};
    double u_max[2][3] = {}, t_max[2][3] = {};
    int li = 0;
    for (int side : {9, 13}) {
        const auto& g = connected_sum_side(side);
        for (int i = 0; i < 10; ++i) {
            const Ball B = seeded_remote_ball(g, 6000 + i);
            const ScalarField f = random_bump(g, B, 6100 + i);
            auto [T, U] = split_TU(g, f, B.radius);
            std::vector<vid> outside;
            {
                const Ball fourB = ball(g, B.center, 4.0 * B.radius);
                std::vector<char> in(g.size(), 0);
                for (vid x : fourB.members) in[x] = 1;
                for (vid x = 0; x < g.size(); ++x)
                    if (!in[x]) outside.push_back(x);
            }
            for (int si = 0; si < 3; ++si) {
                const double fn = lp_norm(g, f, ss[si]);
                u_max[li][si] =
                    std::max(u_max[li][si], B.radius * lp_norm(g, U, ss[si]) / fn);
                t_max[li][si] = std::max(
                    t_max[li][si], B.radius * lp_norm(g, T, ss[si], &outside) / fn);
            }
        }
        ++li;
    }
    bool finite = true, stable = true;
    double worst_ratio = 1.0;
    for (int si = 0; si < 3; ++si) {
        for (int l = 0; l < 2; ++l)
            finite = finite && std::isfinite(u_max[l][si]) && std::isfinite(t_max[l][si]);
        const double ur = std::max(u_max[0][si], u_max[1][si]) /
                          std::min(u_max[0][si], u_max[1][si]);
        const double tr = std::max(t_max[0][si], t_max[1][si]) /
                          std::min(t_max[0][si], t_max[1][si]);
        worst_ratio = std::max({worst_ratio, ur, tr});
        stable = stable && ur <= 2.0 && tr <= 2.0;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "s={1.5,2,3}: U bounds %.3f/%.3f/%.3f, T-outside bounds %.3f/%.3f/%.3f, "
                  "worst refinement ratio %.2f (tol 2)",
                  u_max[1][0], u_max[1][1], u_max[1][2], t_max[1][0], t_max[1][1],
                  t_max[1][2], worst_ratio);
    report(6, "operator split bounds", finite && stable, buf, timer.seconds());
    CHECK(finite);
    CHECK(stable);
}

TEST_CASE("criterion 7: reverse Riesz lower bounds stable under refinement") {
    Timer timer;
    setup_spectral();
    bool stable = true;
    std::string detail;
    for (double p : {1.2, 1.5}) {
        double c[2];
        int li = 0;
        for (int side : {9, 13})
            c[li++] = reverse_riesz_constant(connected_sum_side(side), p,
                                             acceptance_dict(7000 + int(p * 10)))
                          .constant;
        const double ratio = std::max(c[0], c[1]) / std::min(c[0], c[1]);
        stable = stable && ratio < 2.0;
        char buf[100];
        std::snprintf(buf, sizeof buf, "p=%.1f: %.4f -> %.4f (ratio %.2f); ", p, c[0], c[1],
                      ratio);
        detail += buf;
    }
    report(7, "reverse Riesz stability", stable, detail + "tol 2", timer.seconds());
    CHECK(stable);
}

TEST_CASE("criterion 8: Riesz failure direction at p = 4 on connected sums") {
    Timer timer;
    setup_spectral();
    std::vector<double> c4, c2;
    for (int side : {7, 9, 13}) {
        const auto& g = connected_sum_side(side);
        c4.push_back(riesz_constant(g, 4.0, acceptance_dict(8000 + side)).constant);
        c2.push_back(riesz_constant(g, 2.0, acceptance_dict(8100 + side)).constant);
    }
    const bool increasing = c4[0] < c4[1] && c4[1] < c4[2];
    bool p2_exact = true;
    for (double c : c2) p2_exact = p2_exact && std::abs(c - 1.0) <= 1e-9;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "p=4: %.4f < %.4f < %.4f (%s); p=2: |c-1| max %.2e (tol 1e-9)", c4[0],
                  c4[1], c4[2], increasing ? "strictly increasing" : "NOT increasing",
                  std::max({std::abs(c2[0] - 1), std::abs(c2[1] - 1), std::abs(c2[2] - 1)}));
    report(8, "Riesz failure direction", increasing && p2_exact, buf, timer.seconds());
    CHECK(increasing);
    CHECK(p2_exact);
}

TEST_CASE("criterion 9: weak-type constants finite, supremum away from the top edge") {
    Timer timer;
    setup_spectral();
    const auto& g = connected_sum_side(9);
    bool finite = true, attained = true;
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Ball B = seeded_remote_ball(g, 9000 + i);
        ScalarField phi = ScalarField::zero(g);
        for (size_t k = 0; k < B.members.size(); ++k) {
            const double t = B.member_dist[k] / B.radius;
            phi[B.members[k]] = std::exp(-3.0 * t * t);
        }
        WeakTypeDetail detail;
        const auto est = measure_weak_type(g, phi, B, 1.5, {}, &detail);
        finite = finite && std::isfinite(est.constant) && est.constant > 0.0;
        attained = attained && detail.attained_interior_or_threshold;
        worst = std::max(worst, est.constant);
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "10 instances, max constant %.4f, argmax interior: %s",
                  worst, attained ? "yes" : "NO");
    report(9, "weak-type measurement", finite && attained, buf, timer.seconds());
    CHECK(finite);
    CHECK(attained);
}
