#include "rlab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rlab/spectral.hpp"

namespace rlab {

namespace {
constexpr double kBandLow = 1.0 / 1024.0;  // 2^{-10}
constexpr double kBandHigh = 1.0 / 512.0;  // 2^{-9}

// chi_0 is a plateau profile: identically 1 on B(o, r0/2), sloping to 0 at
// the rim of B_0. The remote net then only has to cover {r(x) >= r0/2}, and
// chi_0's gradient stays ~ 1/r0 instead of jumping at the rim.
double plateau(double d, double r0) {
    return std::clamp(2.0 * (r0 - d) / r0, 0.0, 1.0);
}

AdmissibleCovering build_once(const WeightedGraph& g, double r0) {
    AdmissibleCovering cov;
    cov.graph = &g;
    cov.r0 = r0;
    cov.balls.push_back(ball(g, g.basepoint(), r0));

    const int n = g.size();
    std::vector<char> covered(n, 0);  // by the remote net
    std::vector<vid> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](vid a, vid b) {
        return g.radial(a) != g.radial(b) ? g.radial(a) > g.radial(b) : a < b;
    });
    for (vid x : order) {
        if (covered[x] || g.radial(x) < r0 / 2.0) continue;
        const double r = kBandLow * g.radial(x);
        Ball b = ball(g, x, r);
        for (vid y : b.members) covered[y] = 1;
        cov.balls.push_back(std::move(b));
    }

    // partition of unity: chi_0 = plateau, remainder split among the net
    Eigen::VectorXd phi0(n), psi = Eigen::VectorXd::Zero(n);
    for (vid x = 0; x < n; ++x) phi0[x] = plateau(g.radial(x), r0);
    std::vector<Eigen::VectorXd> tents;
    for (size_t a = 1; a < cov.balls.size(); ++a) {
        const Ball& b = cov.balls[a];
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
        for (size_t k = 0; k < b.members.size(); ++k)
            f[b.members[k]] = std::max(0.0, 1.0 - b.member_dist[k] / b.radius);
        psi += f;
        tents.push_back(std::move(f));
    }
    for (vid x = 0; x < n; ++x)
        if (phi0[x] < 1.0 && psi[x] <= 0.0)
            throw std::runtime_error("admissible_cover: vertex not covered");
    cov.chi.emplace_back(g, phi0);
    for (auto& f : tents) {
        for (vid x = 0; x < n; ++x)
            f[x] = psi[x] > 0.0 ? (1.0 - phi0[x]) * f[x] / psi[x] : 0.0;
        cov.chi.emplace_back(g, std::move(f));
    }

    // pairwise-intersection overlap bound (Prop. item 2)
    std::vector<std::vector<int>> at(n);
    for (size_t a = 0; a < cov.balls.size(); ++a)
        for (vid x : cov.balls[a].members) at[x].push_back(static_cast<int>(a));
    const int nballs = static_cast<int>(cov.balls.size());
    std::vector<std::vector<int>> meet_lists(nballs);
    for (vid x = 0; x < n; ++x)
        for (int a : at[x])
            for (int b : at[x]) meet_lists[a].push_back(b);
    for (auto& lst : meet_lists) {
        std::sort(lst.begin(), lst.end());
        lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
        cov.overlap_N = std::max(cov.overlap_N, static_cast<int>(lst.size()));
    }
    return cov;
}

}  // namespace

AdmissibleCovering admissible_cover(const WeightedGraph& g, double r0) {
    if (!(r0 > 0.0)) throw std::invalid_argument("admissible_cover: r0 > 0 required");
    // with band-edge radii 14B is remote automatically (14/1024 < 1/2); the
    // enlargement pass is kept for degenerate graphs
    double r = r0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        AdmissibleCovering cov = build_once(g, r);
        bool ok = true;
        for (size_t a = 1; a < cov.balls.size(); ++a) {
            const Ball& b = cov.balls[a];
            if (14.0 * b.radius > g.radial(b.center) / 2.0) {
                ok = false;
                break;
            }
        }
        if (ok) return cov;
        r = std::max(2.0 * r, 2.0 * g.max_radial() + g.min_edge_len());
    }
    AdmissibleCovering cov = build_once(g, r);
    for (size_t a = 1; a < cov.balls.size(); ++a)
        if (14.0 * cov.balls[a].radius > g.radial(cov.balls[a].center) / 2.0)
            throw std::runtime_error(
                "admissible_cover: 14B-remote unattainable even after enlarging r0");
    return cov;
}

CoveringReport verify_covering(const AdmissibleCovering& cov) {
    const WeightedGraph& g = *cov.graph;
    CoveringReport rep;
    rep.overlap_N = cov.overlap_N;

    rep.all_admissible = true;
    rep.radius_band = true;
    rep.fourteen_B_remote = true;
    for (size_t a = 0; a < cov.balls.size(); ++a) {
        const Ball& b = cov.balls[a];
        if (!b.admissible) rep.all_admissible = false;
        if (a == 0) continue;
        const double rx = g.radial(b.center);
        if (b.radius < kBandLow * rx - 1e-12 || b.radius > kBandHigh * rx + 1e-12)
            rep.radius_band = false;
        if (14.0 * b.radius > rx / 2.0) rep.fourteen_B_remote = false;
    }

    // coverage in the partition sense: some chi_alpha positive everywhere
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(g.size());
    for (const ScalarField& f : cov.chi) sum += f.values;
    rep.partition_residual = (sum.array() - 1.0).abs().maxCoeff();
    rep.partition_sums_to_one = rep.partition_residual <= 1e-12;

    std::vector<char> covered(g.size(), 0);
    for (const Ball& b : cov.balls)
        for (vid x : b.members) covered[x] = 1;
    rep.covers = std::all_of(covered.begin(), covered.end(), [](char c) { return c; });

    for (size_t a = 0; a < cov.balls.size(); ++a) {
        const double s = grad_sup(g, gradient(g, cov.chi[a]));
        rep.grad_chi_bound = std::max(rep.grad_chi_bound, s * cov.balls[a].radius);
    }

    rep.pass = rep.all_admissible && rep.covers && rep.partition_sums_to_one &&
               rep.radius_band && rep.fourteen_B_remote &&
               std::isfinite(rep.grad_chi_bound);
    rep.context = std::to_string(cov.balls.size()) + " balls, r0=" + std::to_string(cov.r0);
    return rep;
}

std::vector<ScalarField> localize(const AdmissibleCovering& cov, const ScalarField& f) {
    const WeightedGraph& g = *cov.graph;
    check_aligned(g, f);
    std::vector<ScalarField> out;
    out.reserve(cov.chi.size());
    for (const ScalarField& chi : cov.chi)
        out.emplace_back(g, chi.values.cwiseProduct(f.values));
    return out;
}

LeibnizReport gradient_leibniz_bound(const AdmissibleCovering& cov, const ScalarField& f,
                                     double p) {
    const WeightedGraph& g = *cov.graph;
    check_aligned(g, f);
    if (p < 1.0) throw std::invalid_argument("gradient_leibniz_bound: p >= 1 required");
    LeibnizReport rep;
    rep.overlap_bound = std::pow(double(cov.overlap_N), 1.0 / p);

    const double grad_f = grad_norm_p(g, f, p);
    const auto pieces = localize(cov, f);
    double aggregate_pow = 0.0;
    for (size_t a = 0; a < pieces.size(); ++a) {
        const double grad_fa = grad_norm_p(g, pieces[a], p);
        const double grad_f_Ba = grad_norm_p(g, f, p, &cov.balls[a].members);
        aggregate_pow += std::pow(grad_f_Ba, p);
        ScalarField scaled(g, pieces[a].values / cov.balls[a].radius);
        const double denom = lp_norm(g, scaled, p) + grad_f_Ba;
        if (denom > 0.0 && grad_fa > 0.0) {
            rep.max_per_ball_constant = std::max(rep.max_per_ball_constant, grad_fa / denom);
            ++rep.balls_used;
        }
    }
    rep.aggregate_constant =
        grad_f > 0.0 ? std::pow(aggregate_pow, 1.0 / p) / grad_f : 0.0;
    return rep;
}

}  // namespace rlab
