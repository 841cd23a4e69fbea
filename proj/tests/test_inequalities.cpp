#include <doctest.h>

#include <cmath>
#include <random>

#include "rlab/eigensolve.hpp"
#include "rlab/inequalities.hpp"
#include "rlab/spectral.hpp"

using namespace rlab;

namespace {

TestDictionary small_dict(std::uint64_t seed = 1) {
    TestDictionary d;
    d.seed = seed;
    d.bumps = 3;
    d.noise = 2;
    d.tents = 2;
    d.powers = 3;
    d.potentials = 1;
    d.ascent_iterations = 40;
    return d;
}

double hardy_ratio(const WeightedGraph& g, const ScalarField& f, double p) {
    double num = 0.0;
    for (vid x = 0; x < g.size(); ++x)
        num += g.mu(x) * std::pow(std::abs(f[x]) / (1.0 + g.radial(x)), p);
    return num / std::pow(grad_norm_p(g, f, p), p);
}

}  // namespace

TEST_CASE("poincare p=2 matches the two-vertex hand oracle") {
    std::vector<double> mu{1.0, 1.0};
    std::vector<Edge> edges{{0, 1, 1.0, 1.0}};
    const WeightedGraph g(std::move(mu), std::move(edges), 0, {"pair", {}, {}, {}}, 2.0);
    const Ball b = ball(g, 0, 1.5);
    REQUIRE(b.members.size() == 2);
    const auto est = poincare_constant(g, b, 2.0, small_dict());
    // pencil L f = lambda M f on two vertices: lambda_2 = w (1/mu1 + 1/mu2) = 2
    CHECK(est.constant == doctest::Approx(1.0 / (1.5 * std::sqrt(2.0))).epsilon(1e-12));
    CHECK(est.method == EstimationMethod::SpectralExact);
}

TEST_CASE("poincare: dictionary lower bound below the exact p=2 value") {
    const auto g = build_lattice_box(2, 7, 1.0);
    const Ball b = ball(g, g.basepoint(), 2.5);
    const auto exact = poincare_constant(g, b, 2.0, small_dict());
    // evaluate the p=2 ratio of every p!=2-style witness by hand
    TestDictionary d = small_dict();
    d.ascent_iterations = 0;
    for (ScalarField& f : d.generate(g, false)) {
        for (vid x = 0; x < g.size(); ++x)
            if (!b.contains(x)) f[x] = 0.0;
        const double mean = mu_average(g, f, b.members);
        double num = 0.0;
        for (vid x : b.members) num += g.mu(x) * (f[x] - mean) * (f[x] - mean);
        const double den = grad_norm_p(g, f, 2.0, &b.members);
        if (den <= 0.0) continue;
        CHECK(std::sqrt(num) / (b.radius * den) <= exact.constant * (1.0 + 1e-9));
    }
}

TEST_CASE("poincare constants on remote balls stay bounded") {
    LatticeSpec end{3, 7, 1.0};
    const auto g = build_connected_sum(end, end, 1);
    int sampled = 0;
    for (vid x = 0; x < g.size() && sampled < 4; x += g.size() / 5) {
        if (g.radial(x) < 3.0) continue;
        const Ball b = ball(g, x, g.radial(x) / 2.0);
        if (b.members.size() < 4) continue;
        const auto est = poincare_constant(g, b, 1.5, small_dict());
        CHECK(std::isfinite(est.constant));
        CHECK(est.constant < 10.0);
        ++sampled;
    }
    CHECK(sampled > 0);
}

TEST_CASE("hardy: single-vertex witness matches the closed form") {
    const auto g = build_lattice_box(3, 5, 1.0);
    const vid x = g.basepoint() + 1;  // interior vertex
    ScalarField f = ScalarField::zero(g);
    f[x] = 1.0;
    double den = 0.0;
    for (const auto& inc : g.neighbors(x)) {
        const Edge& e = g.edges()[inc.e];
        den += e.w * e.len * e.len * std::pow(1.0 / e.len, 1.5);
    }
    const double expected = g.mu(x) * std::pow(1.0 + g.radial(x), -1.5) / den;
    CHECK(hardy_ratio(g, f, 1.5) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("hardy p=2: exact pencil value dominates and grows with the box") {
    TestDictionary d = small_dict();
    d.ascent_iterations = 20;
    const auto g9 = build_lattice_box(3, 9, 1.0);
    const auto e9 = hardy_constant(g9, 2.0, d);
    CHECK(e9.method == EstimationMethod::SpectralExact);
    CHECK(std::isfinite(e9.constant));

    const auto g13 = build_lattice_box(3, 13, 1.0);
    const auto e13 = hardy_constant(g13, 2.0, d);
    CHECK(e13.constant > e9.constant);  // nested Dirichlet spaces
    CHECK(e13.constant < 4.0);          // continuum ceiling
}

TEST_CASE("dense pencil and LOBPCG agree on the Dirichlet Hardy eigenvalue") {
    const auto g = build_lattice_box(3, 7, 1.0);
    std::vector<int> interior;
    {
        std::vector<char> is_b(g.size(), 0);
        for (vid x : g.metadata().boundary) is_b[x] = 1;
        for (vid x = 0; x < g.size(); ++x)
            if (!is_b[x]) interior.push_back(x);
    }
    const auto A = stiffness_matrix(g);
    const auto AI = principal_submatrix(A, interior);
    Eigen::VectorXd W(interior.size());
    for (size_t i = 0; i < interior.size(); ++i)
        W[i] = g.mu(interior[i]) / std::pow(1.0 + g.radial(interior[i]), 2.0);

    const auto dense_eigs = pencil_eigs_dense(Eigen::MatrixXd(AI), W);
    LobpcgOptions opt;
    opt.tol = 1e-10;
    const auto res = lobpcg_smallest(AI, W, opt);
    CHECK(res.converged);
    CHECK(res.eigenvalue == doctest::Approx(dense_eigs[0]).epsilon(1e-7));
}

TEST_CASE("riesz and reverse riesz are exactly 1 at p = 2") {
    TestDictionary d = small_dict();
    d.ascent_iterations = 10;
    for (const auto& g : {build_lattice_box(2, 6, 1.0),
                          build_connected_sum({2, 5, 1.0}, {2, 5, 1.0}, 2)}) {
        const auto rr = reverse_riesz_constant(g, 2.0, d);
        CHECK(std::abs(rr.constant - 1.0) < 1e-9);
        const auto r = riesz_constant(g, 2.0, d);
        CHECK(std::abs(r.constant - 1.0) < 1e-9);
    }
    CHECK_THROWS_AS(riesz_constant(build_lattice_box(1, 4, 1.0), 1.0, d),
                    std::invalid_argument);
}

TEST_CASE("ratios are scale invariant and witnesses reproduce their constants") {
    LatticeSpec end{2, 5, 1.0};
    const auto g = build_connected_sum(end, end, 1);
    TestDictionary d = small_dict();
    d.ascent_iterations = 15;

    const auto est = reverse_riesz_constant(g, 1.5, d);
    auto ratio = [&](const ScalarField& f) {
        const ScalarField v = project_off_constants(g, f);
        return lp_norm(g, sqrt_apply(g, v), 1.5) / grad_norm_p(g, v, 1.5);
    };
    CHECK(ratio(est.witness) == doctest::Approx(est.constant).epsilon(1e-8));
    const ScalarField doubled(g, 2.0 * est.witness.values);
    CHECK(ratio(doubled) == doctest::Approx(est.constant).epsilon(1e-12));

    const auto hest = hardy_constant(g, 1.5, d);
    CHECK(hardy_ratio(g, hest.witness, 1.5) == doctest::Approx(hest.constant).epsilon(1e-8));
}

TEST_CASE("dictionary lower bounds are monotone under enlargement") {
    LatticeSpec end{2, 5, 1.0};
    const auto g = build_connected_sum(end, end, 1);
    TestDictionary small;
    small.seed = 5;
    small.bumps = 2;
    small.noise = 1;
    small.tents = 1;
    small.powers = 1;
    small.potentials = 0;
    small.ascent_iterations = 0;
    TestDictionary big = small;
    big.bumps = 5;
    big.potentials = 2;

    for (double p : {1.3, 2.0}) {
        const double c_small = reverse_riesz_constant(g, p, small).constant;
        const double c_big = reverse_riesz_constant(g, p, big).constant;
        CHECK(c_big >= c_small - 1e-12);
    }
}

TEST_CASE("dictionary fields are nonconstant and finite") {
    const auto g = build_lattice_box(2, 6, 1.0);
    for (bool bz : {false, true})
        for (const auto& f : small_dict(9).generate(g, bz)) {
            CHECK(f.values.allFinite());
            CHECK(f.values.maxCoeff() - f.values.minCoeff() > 0.0);
            if (bz)
                for (vid x : g.metadata().boundary) CHECK(f[x] == 0.0);
        }
}

TEST_CASE("normalized Lp norms are ordered in p (Jensen, instance-wise)") {
    const auto g = build_lattice_box(2, 7, 1.0);
    const Ball b = ball(g, g.basepoint(), 2.5);
    const double V = volume(g, b);
    for (const auto& f : small_dict(3).generate(g, false)) {
        const double mean = mu_average(g, f, b.members);
        auto normalized = [&](double p) {
            double s = 0.0;
            for (vid x : b.members)
                s += g.mu(x) * std::pow(std::abs(f[x] - mean), p);
            return std::pow(s / V, 1.0 / p);
        };
        CHECK(normalized(1.5) <= normalized(2.0) + 1e-12);
        CHECK(normalized(2.0) <= normalized(3.0) + 1e-12);
    }
}

TEST_CASE("measured Poincare constants respect the Holder ordering window") {
    const auto g = build_lattice_box(2, 9, 1.0);
    const Ball b = ball(g, g.basepoint(), 3.0);
    std::vector<VolumeSample> sample{{g.basepoint(), 1.5, 3.0}, {0, 1.5, 3.0}};
    const double Cdb = estimate_volume_growth(g, sample).doubling_constant;
    const auto cp = poincare_constant(g, b, 1.5, small_dict());
    const auto cq = poincare_constant(g, b, 2.0, small_dict());
    CHECK(cq.constant <= Cdb * Cdb * cp.constant);
}

TEST_CASE("weak type measurement") {
    LatticeSpec end{3, 5, 1.0};
    const auto g = build_connected_sum(end, end, 1);
    vid far = 0;
    for (vid x = 0; x < g.size(); ++x)
        if (g.radial(x) > g.radial(far)) far = x;
    const Ball B = ball(g, far, g.radial(far) / 2.0);

    const auto zero = ScalarField::zero(g);
    CHECK(measure_weak_type(g, zero, B, 1.5).constant == 0.0);

    ScalarField phi = ScalarField::zero(g);
    for (size_t k = 0; k < B.members.size(); ++k)
        phi[B.members[k]] = std::exp(-3.0 * B.member_dist[k] / B.radius);
    WeakTypeDetail detail;
    const auto est = measure_weak_type(g, phi, B, 1.5, {}, &detail);
    CHECK(std::isfinite(est.constant));
    CHECK(est.constant > 0.0);
    CHECK(detail.attained_interior_or_threshold);

    // a grid entirely above max |Delta^{1/2} phi| sees empty level sets
    const auto sq = sqrt_apply(g, phi);
    const double top = sq.values.cwiseAbs().maxCoeff();
    CHECK(measure_weak_type(g, phi, B, 1.5, {2.0 * top}).constant == 0.0);

    CHECK_THROWS_AS(measure_weak_type(g, ScalarField(g, Eigen::VectorXd::Ones(g.size())),
                                      B, 1.5),
                    std::invalid_argument);
}

TEST_CASE("diagonal bound: single-ball covering reduces to the energy identity") {
    const auto g = build_lattice_box(2, 5, 1.0);
    const auto cov = admissible_cover(g, 100.0);  // everything in B0
    REQUIRE(cov.balls.size() == 1);
    std::mt19937_64 rng(2);
    Eigen::VectorXd v(g.size());
    for (vid x = 0; x < g.size(); ++x) v[x] = std::normal_distribution<double>()(rng);
    const ScalarField f(g, v);
    const auto est = measure_diagonal(g, cov, f, 2.0);
    CHECK(est.constant <= 1.0 + 1e-9);
    CHECK(est.constant > 0.0);
    CHECK_THROWS_AS(measure_diagonal(g, cov, f, 3.0), std::invalid_argument);
}

TEST_CASE("hardy-sum assembly report") {
    LatticeSpec end{2, 7, 1.0};
    const auto g = build_connected_sum(end, end, 1);
    const auto cov = admissible_cover(g, g.r0());

    // f inside the plateau of B0: the sum collapses to the anchored term
    ScalarField f = ScalarField::zero(g);
    for (auto& [x, dist] : g.bounded_ball(g.basepoint(), g.r0() / 2.0))
        f[x] = std::exp(-dist);
    AssemblyDetail detail;
    const auto est = hardy_sum_bound(g, cov, f, 1.5, &detail);
    ScalarField scaled(g, f.values / cov.balls[0].radius);
    CHECK(detail.hardy_sum == doctest::Approx(lp_norm(g, scaled, 1.5)).epsilon(1e-9));
    CHECK(std::isfinite(detail.pipeline_ratio));
    CHECK(std::isfinite(detail.direct_ratio));
    CHECK(detail.radius_pointwise_constant >= 1.0);
    CHECK(est.constant > 0.0);

    CHECK_THROWS_AS(hardy_sum_bound(g, cov, ScalarField::zero(g), 1.5, nullptr),
                    std::invalid_argument);
}
