#include "rlab/maximal_cz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include <omp.h>

#include "rlab/spectral.hpp"

namespace rlab {

namespace {

// Best prefix average over balls centered at z that contain each vertex.
// dist = distances from z; updates best[] with elementwise max.
void sweep_center(const WeightedGraph& g, const Eigen::VectorXd& absv,
                  const std::vector<double>& dist, std::vector<int>& order,
                  std::vector<double>& best) {
    const int n = g.size();
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; });
    // prefix sums walked once; group boundaries where the distance changes
    double psum_mu = 0.0, psum_muv = 0.0;
    std::vector<double> group_avg;
    std::vector<int> group_of(n);
    int gidx = -1;
    for (int k = 0; k < n; ++k) {
        const int x = order[k];
        psum_mu += g.mu(x);
        psum_muv += g.mu(x) * absv[x];
        const bool group_end = (k + 1 == n) || dist[order[k + 1]] != dist[x];
        if (k == 0 || dist[order[k - 1]] != dist[x]) ++gidx;
        group_of[x] = gidx;
        if (group_end) {
            if (static_cast<int>(group_avg.size()) <= gidx) group_avg.resize(gidx + 1);
            group_avg[gidx] = psum_muv / psum_mu;
        }
    }
    // suffix max: the best closed prefix that still contains the group
    for (int gi = static_cast<int>(group_avg.size()) - 2; gi >= 0; --gi)
        group_avg[gi] = std::max(group_avg[gi], group_avg[gi + 1]);
    for (int x = 0; x < n; ++x) best[x] = std::max(best[x], group_avg[group_of[x]]);
}

}  // namespace

ScalarField maximal_function(const WeightedGraph& g, const ScalarField& v) {
    check_aligned(g, v);
    const int n = g.size();
    const Eigen::VectorXd absv = v.values.cwiseAbs();
    std::vector<double> best(n, 0.0);

#pragma omp parallel
    {
        std::vector<double> local_best(n, 0.0);
        std::vector<double> dist;
        std::vector<int> order(n);
#pragma omp for schedule(dynamic, 8)
        for (int z = 0; z < n; ++z) {
            g.distances_into(z, dist);
            sweep_center(g, absv, dist, order, local_best);
        }
#pragma omp critical
        for (int x = 0; x < n; ++x) best[x] = std::max(best[x], local_best[x]);
    }
    Eigen::VectorXd out(n);
    for (int x = 0; x < n; ++x) out[x] = best[x];
    return ScalarField(g, std::move(out));
}

ScalarField maximal_function_bruteforce(const WeightedGraph& g, const ScalarField& v) {
    check_aligned(g, v);
    const int n = g.size();
    const Eigen::VectorXd absv = v.values.cwiseAbs();
    Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
    std::vector<double> dist;
    for (int z = 0; z < n; ++z) {
        g.distances_into(z, dist);
        std::vector<double> radii(dist.begin(), dist.end());
        std::sort(radii.begin(), radii.end());
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
        for (double rad : radii) {
            // closed ball {d <= rad} = open ball of any radius in (rad, next)
            double num = 0.0, den = 0.0;
            for (int x = 0; x < n; ++x)
                if (dist[x] <= rad) {
                    num += g.mu(x) * absv[x];
                    den += g.mu(x);
                }
            const double avg = num / den;
            for (int x = 0; x < n; ++x)
                if (dist[x] <= rad) best[x] = std::max(best[x], avg);
        }
    }
    return ScalarField(g, std::move(best));
}

std::vector<Ball> whitney_cover(const WeightedGraph& g, const std::vector<vid>& omega) {
    const int n = g.size();
    if (omega.empty()) throw std::invalid_argument("whitney_cover: empty Omega");
    std::vector<char> in_omega(n, 0);
    for (vid x : omega) in_omega[x] = 1;
    std::vector<vid> F;
    for (vid x = 0; x < n; ++x)
        if (!in_omega[x]) F.push_back(x);
    if (F.empty())
        throw std::invalid_argument("whitney_cover: Omega covers the whole graph (F empty)");

    // multi-source distance to the complement
    std::vector<double> dF(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, vid>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (vid f : F) {
        dF[f] = 0.0;
        pq.push({0.0, f});
    }
    while (!pq.empty()) {
        auto [dx, x] = pq.top();
        pq.pop();
        if (dx > dF[x]) continue;
        for (const auto& inc : g.neighbors(x)) {
            const double nd = dx + g.edges()[inc.e].len;
            if (nd < dF[inc.y]) {
                dF[inc.y] = nd;
                pq.push({nd, inc.y});
            }
        }
    }

    std::vector<vid> cand(omega);
    std::sort(cand.begin(), cand.end(),
              [&](vid a, vid b) { return dF[a] != dF[b] ? dF[a] > dF[b] : a < b; });

    std::vector<char> occupied(n, 0);
    std::vector<Ball> balls;
    for (vid x : cand) {
        const double r = dF[x] / 2.0;
        auto quarter = g.bounded_ball(x, r / 4.0);
        if (quarter.empty()) quarter.push_back({x, 0.0});  // radius below resolution
        bool free_spot = true;
        for (auto& [y, d] : quarter)
            if (occupied[y]) {
                free_spot = false;
                break;
            }
        if (!free_spot) continue;
        for (auto& [y, d] : quarter) occupied[y] = 1;
        balls.push_back(ball(g, x, r));
    }
    // greedy maximality gives the covering; check it anyway
    std::vector<char> covered(n, 0);
    for (const Ball& b : balls)
        for (vid y : b.members) covered[y] = 1;
    for (vid x : omega)
        if (!covered[x]) throw std::runtime_error("whitney_cover: vertex left uncovered");
    return balls;
}

std::vector<ScalarField> cz_partition(const WeightedGraph& g, const std::vector<Ball>& balls,
                                      const std::vector<vid>& omega) {
    const int n = g.size();
    std::vector<char> in_omega(n, 0);
    for (vid x : omega) in_omega[x] = 1;
    Eigen::VectorXd phi_sum = Eigen::VectorXd::Zero(n);
    std::vector<ScalarField> chi;
    chi.reserve(balls.size());
    for (const Ball& b : balls) {
        ScalarField f = ScalarField::zero(g);
        for (size_t k = 0; k < b.members.size(); ++k) {
            const vid x = b.members[k];
            if (!in_omega[x]) continue;
            const double tent = std::max(0.0, 1.0 - b.member_dist[k] / b.radius);
            f[x] = tent;
            phi_sum[x] += tent;
        }
        chi.push_back(std::move(f));
    }
    for (vid x : omega)
        if (phi_sum[x] <= 0.0)
            throw std::invalid_argument("cz_partition: Omega vertex not covered by any ball");
    for (ScalarField& f : chi)
        for (vid x = 0; x < n; ++x)
            if (f[x] != 0.0) f[x] /= phi_sum[x];
    return chi;
}

CZDecomposition cz_decompose(const WeightedGraph& g, const ScalarField& u, const Ball& B,
                             double q, double lambda, double precondition_C) {
    check_aligned(g, u);
    if (q < 1.0) throw std::invalid_argument("cz_decompose: q >= 1 required");
    if (!(lambda > 0.0)) throw std::invalid_argument("cz_decompose: lambda > 0 required");
    for (vid x = 0; x < g.size(); ++x)
        if (u[x] != 0.0 && !B.contains(x))
            throw std::invalid_argument("cz_decompose: u not supported in B");

    const double grad_q = grad_norm_p(g, u, q);
    const double VB = volume(g, B);
    if (VB <= 0.0) throw std::invalid_argument("cz_decompose: empty ball");
    const double threshold = std::pow(precondition_C * std::pow(grad_q, q) / VB, 1.0 / q);
    if (!(lambda > threshold))
        throw std::invalid_argument("cz_decompose: lambda below the level-set threshold");

    CZDecomposition dec;
    dec.graph = &g;
    dec.u = u;
    dec.q = q;
    dec.lambda = lambda;
    dec.enclosing = B;

    const ScalarField density = grad_density_q(g, u, q);
    const ScalarField M = maximal_function(g, density);
    const double lq = std::pow(lambda, q);
    for (vid x = 0; x < g.size(); ++x)
        if (M[x] > lq) dec.omega.push_back(x);

    if (dec.omega.empty()) {
        dec.good_part = u;
        dec.H = EdgeField::zero(g);
        return dec;
    }
    if (static_cast<int>(dec.omega.size()) == g.size())
        throw std::invalid_argument("cz_decompose: level set covers the whole graph");

    dec.balls = whitney_cover(g, dec.omega);
    dec.chi = cz_partition(g, dec.balls, dec.omega);

    Eigen::VectorXd good = u.values;
    for (size_t i = 0; i < dec.balls.size(); ++i) {
        dec.ball_average.push_back(mu_average(g, u, dec.balls[i].members));
        ScalarField b = ScalarField::zero(g);
        for (vid x : dec.balls[i].members)
            if (dec.chi[i][x] != 0.0) b[x] = (u[x] - dec.ball_average[i]) * dec.chi[i][x];
        good -= b.values;
        dec.bad_parts.push_back(std::move(b));
    }
    dec.good_part = ScalarField(g, std::move(good));

    std::vector<int> multiplicity(g.size(), 0);
    for (const Ball& b : dec.balls)
        for (vid x : b.members) ++multiplicity[x];
    dec.overlap_N = *std::max_element(multiplicity.begin(), multiplicity.end());

    dec.H = assemble_H(dec);
    return dec;
}

EdgeField assemble_H(const CZDecomposition& dec) {
    const WeightedGraph& g = *dec.graph;
    EdgeField H = EdgeField::zero(g);
    if (dec.omega.empty()) return H;

    const int n = g.size();
    std::vector<char> in_omega(n, 0);
    for (vid x : dec.omega) in_omega[x] = 1;
    std::vector<std::vector<int>> balls_at(n);
    for (size_t i = 0; i < dec.balls.size(); ++i)
        for (vid x : dec.balls[i].members) balls_at[x].push_back(static_cast<int>(i));

    std::vector<int> active;
    for (size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& ed = g.edges()[e];
        const bool ax = in_omega[ed.a], ay = in_omega[ed.b];
        if (!ax && !ay) continue;  // F-F edge carries grad u alone

        active.clear();
        active.insert(active.end(), balls_at[ed.a].begin(), balls_at[ed.a].end());
        active.insert(active.end(), balls_at[ed.b].begin(), balls_at[ed.b].end());
        std::sort(active.begin(), active.end());
        active.erase(std::unique(active.begin(), active.end()), active.end());

        double value = 0.0;
        if (ax && ay) {
            // interior edge: Remark-4.1 pair sum, exact by sum chi = 1 here
            for (int m : active) {
                const double avg_chi_m = 0.5 * (dec.chi[m][ed.a] + dec.chi[m][ed.b]);
                if (avg_chi_m == 0.0) continue;
                for (int i : active) {
                    if (i == m) continue;
                    const double gchi_i = (dec.chi[i][ed.b] - dec.chi[i][ed.a]) / ed.len;
                    if (gchi_i == 0.0) continue;
                    value += avg_chi_m * (dec.ball_average[i] - dec.ball_average[m]) * gchi_i;
                }
            }
        } else {
            // boundary edge, assigned wholesale to the H side
            const double avg_u = 0.5 * (dec.u[ed.a] + dec.u[ed.b]);
            const double grad_u = (dec.u[ed.b] - dec.u[ed.a]) / ed.len;
            value = 0.5 * grad_u;
            for (int i : active) {
                const double gchi_i = (dec.chi[i][ed.b] - dec.chi[i][ed.a]) / ed.len;
                value -= (avg_u - dec.ball_average[i]) * gchi_i;
            }
        }
        H.values[e] = value;
    }
    return H;
}

CZPropertyReport verify_cz(const CZDecomposition& dec) {
    const WeightedGraph& g = *dec.graph;
    CZPropertyReport rep;
    rep.overlap_N = dec.overlap_N;
    const double lq = std::pow(dec.lambda, dec.q);

    // (1) u = g + sum b_i in L^1(mu)
    Eigen::VectorXd resid = dec.u.values - dec.good_part.values;
    for (const ScalarField& b : dec.bad_parts) resid -= b.values;
    double l1 = 0.0;
    for (vid x = 0; x < g.size(); ++x) l1 += g.mu(x) * std::abs(resid[x]);
    rep.p1_residual = l1;
    rep.p1_sum_identity = l1 <= 1e-10 * std::max(1.0, lp_norm(g, dec.u, 1.0));

    // supports / 2B
    const Ball twoB = ball(g, dec.enclosing.center, 2.0 * dec.enclosing.radius);
    rep.p2_support_in_2B = true;
    for (vid x = 0; x < g.size(); ++x)
        if (dec.good_part[x] != 0.0 && !twoB.contains(x)) rep.p2_support_in_2B = false;
    rep.omega_in_2B = true;
    for (vid x : dec.omega)
        if (!twoB.contains(x)) rep.omega_in_2B = false;

    rep.p3_support = true;
    for (size_t i = 0; i < dec.bad_parts.size(); ++i)
        for (vid x = 0; x < g.size(); ++x)
            if (dec.bad_parts[i][x] != 0.0 && !dec.balls[i].contains(x)) rep.p3_support = false;

    // (2) gradient bounds
    const EdgeField grad_g = gradient(g, dec.good_part);
    rep.p2_grad_g_over_lambda = grad_sup(g, grad_g) / dec.lambda;
    rep.c2 = grad_sup(g, dec.H) / dec.lambda;
    rep.p2_pass = rep.p2_support_in_2B && std::isfinite(rep.p2_grad_g_over_lambda) &&
                  std::isfinite(rep.c2);

    // edge identity grad g = grad u . 1_F + H
    {
        std::vector<char> in_omega(g.size(), 0);
        for (vid x : dec.omega) in_omega[x] = 1;
        const EdgeField grad_u = gradient(g, dec.u);
        double worst = 0.0;
        for (size_t e = 0; e < g.edges().size(); ++e) {
            const Edge& ed = g.edges()[e];
            const double indicator = (!in_omega[ed.a] && !in_omega[ed.b]) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(grad_g.values[e] -
                                             grad_u.values[e] * indicator - dec.H.values[e]));
        }
        rep.edge_identity_residual = worst;
    }

    // (3) per-ball bounds
    const double grad_uq = grad_norm_p(g, dec.u, dec.q);
    for (size_t i = 0; i < dec.bad_parts.size(); ++i) {
        const double bi_q = lp_norm(g, dec.bad_parts[i], dec.q, &dec.balls[i].members);
        const double gu_Bi = grad_norm_p(g, dec.u, dec.q, &dec.balls[i].members);
        if (gu_Bi > 0.0)
            rep.c3a = std::max(rep.c3a, bi_q / (dec.balls[i].radius * gu_Bi));
        const double gb = std::pow(grad_norm_p(g, dec.bad_parts[i], dec.q), dec.q);
        rep.c3b = std::max(rep.c3b, gb / (lq * volume(g, dec.balls[i])));
    }

    // (4) total Whitney volume
    double vol_sum = 0.0;
    for (const Ball& b : dec.balls) vol_sum += volume(g, b);
    rep.c4 = grad_uq > 0.0 ? vol_sum * lq / std::pow(grad_uq, dec.q) : 0.0;

    // (6) radii of intersecting balls within factor 3
    rep.p6_radius_ratio = true;
    for (size_t i = 0; i < dec.balls.size(); ++i) {
        std::vector<char> in_i(g.size(), 0);
        for (vid x : dec.balls[i].members) in_i[x] = 1;
        for (size_t j = i + 1; j < dec.balls.size(); ++j) {
            bool meet = false;
            for (vid x : dec.balls[j].members)
                if (in_i[x]) {
                    meet = true;
                    break;
                }
            if (!meet) continue;
            const double ratio = dec.balls[i].radius / dec.balls[j].radius;
            rep.radius_ratio_min = std::min(rep.radius_ratio_min, ratio);
            rep.radius_ratio_max = std::max(rep.radius_ratio_max, ratio);
            if (ratio < 1.0 / 3.0 - 1e-12 || ratio > 3.0 + 1e-12) rep.p6_radius_ratio = false;
        }
    }

    // (7) 3B_i meets F
    rep.p7_3B_meets_F = true;
    {
        std::vector<char> in_omega(g.size(), 0);
        for (vid x : dec.omega) in_omega[x] = 1;
        for (const Ball& b : dec.balls) {
            bool meets = false;
            for (auto& [y, d] : g.bounded_ball(b.center, 3.0 * b.radius))
                if (!in_omega[y]) {
                    meets = true;
                    break;
                }
            if (!meets) rep.p7_3B_meets_F = false;
        }
    }

    const bool constants_finite = dec.omega.empty() ||
        (std::isfinite(rep.c2) && std::isfinite(rep.c3a) && std::isfinite(rep.c3b) &&
         std::isfinite(rep.c4));
    rep.all_pass = rep.p1_sum_identity && rep.p2_pass && rep.p3_support &&
                   rep.p6_radius_ratio && rep.p7_3B_meets_F && constants_finite &&
                   rep.edge_identity_residual <= 1e-9;
    return rep;
}

}  // namespace rlab
