#include "rlab/inequalities.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rlab/eigensolve.hpp"
#include "rlab/spectral.hpp"

namespace rlab {

const char* to_string(InequalityTag t) {
    switch (t) {
        case InequalityTag::RRp: return "reverse-riesz";
        case InequalityTag::Rp: return "riesz";
        case InequalityTag::Hardy: return "hardy";
        case InequalityTag::PoincareBall: return "poincare-ball";
        case InequalityTag::WeakType: return "weak-type";
        case InequalityTag::HardySum: return "hardy-sum";
        case InequalityTag::Diagonal: return "diagonal";
    }
    return "?";
}

const char* to_string(EstimationMethod m) {
    switch (m) {
        case EstimationMethod::SpectralExact: return "spectral-exact";
        case EstimationMethod::Dictionary: return "dictionary";
        case EstimationMethod::Ascent: return "ascent";
    }
    return "?";
}

namespace {

constexpr double kDegenerate = 1e-12;

void zero_on(ScalarField& f, const std::vector<vid>& verts) {
    for (vid x : verts) f[x] = 0.0;
}

bool nonconstant(const ScalarField& f) {
    return f.values.maxCoeff() - f.values.minCoeff() > 0.0 && f.values.allFinite();
}

// keeps generated witnesses nonconstant even after boundary clamping
void ensure_usable(const WeightedGraph& g, ScalarField& f, bool boundary_zero) {
    if (!f.values.allFinite()) f.values.setZero();
    if (nonconstant(f)) return;
    std::vector<char> frozen(g.size(), 0);
    if (boundary_zero)
        for (vid x : g.metadata().boundary) frozen[x] = 1;
    for (vid x = 0; x < g.size(); ++x)
        if (!frozen[x]) {
            f[x] += 1.0;
            break;
        }
}

}  // namespace

std::vector<ScalarField> TestDictionary::generate(const WeightedGraph& g,
                                                  bool boundary_zero) const {
    std::vector<ScalarField> out;
    const double h = g.min_edge_len();
    const double scale = std::max(g.max_radial(), 4.0 * h);

    auto finalize = [&](ScalarField f) {
        if (boundary_zero) zero_on(f, g.metadata().boundary);
        ensure_usable(g, f, boundary_zero);
        out.push_back(std::move(f));
    };

    {  // gaussian bumps on balls
        std::mt19937_64 rng(seed * 6364136223846793005ULL + 1);
        std::uniform_int_distribution<vid> pick(0, g.size() - 1);
        std::uniform_real_distribution<double> logrho(std::log(2.0 * h),
                                                      std::log(std::max(scale / 3.0, 3.0 * h)));
        for (int i = 0; i < bumps; ++i) {
            const vid z = pick(rng);
            const double rho = std::exp(logrho(rng));
            ScalarField f = ScalarField::zero(g);
            for (auto& [y, d] : g.bounded_ball(z, 3.0 * rho))
                f[y] = std::exp(-(d / rho) * (d / rho));
            finalize(std::move(f));
        }
    }
    {  // heat-smoothed noise
        std::mt19937_64 rng(seed * 6364136223846793005ULL + 2);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> logt(std::log(h * h),
                                                    std::log(std::max(scale * scale / 16.0,
                                                                      4.0 * h * h)));
        for (int i = 0; i < noise; ++i) {
            Eigen::VectorXd xi(g.size());
            for (vid x = 0; x < g.size(); ++x) xi[x] = normal(rng);
            const double t = std::exp(logt(rng));
            finalize(heat_apply(g, ScalarField(g, std::move(xi)), t));
        }
    }
    {  // linear tents
        std::mt19937_64 rng(seed * 6364136223846793005ULL + 3);
        std::uniform_int_distribution<vid> pick(0, g.size() - 1);
        std::uniform_real_distribution<double> logrho(std::log(2.0 * h),
                                                      std::log(std::max(scale / 2.0, 3.0 * h)));
        for (int i = 0; i < tents; ++i) {
            const vid z = pick(rng);
            const double rho = std::exp(logrho(rng));
            ScalarField f = ScalarField::zero(g);
            for (auto& [y, d] : g.bounded_ball(z, rho)) f[y] = 1.0 - d / rho;
            finalize(std::move(f));
        }
    }
    {  // distance-power profiles r^a with an outer cutoff
        std::mt19937_64 rng(seed * 6364136223846793005ULL + 4);
        std::uniform_real_distribution<double> draw(-1.5, 1.5);
        for (int i = 0; i < powers; ++i) {
            double a = draw(rng);
            if (std::abs(a) < 0.2) a = a < 0 ? -0.5 : 0.5;
            ScalarField f = ScalarField::zero(g);
            for (vid x = 0; x < g.size(); ++x) {
                const double cutoff = std::max(0.0, 1.0 - g.radial(x) / (0.95 * scale));
                f[x] = std::pow(g.radial(x) + h, a) * cutoff;
            }
            finalize(std::move(f));
        }
    }
    if (!g.metadata().end_tag.empty() && Spectral::dense_available(g)) {
        // inverse-sqrt potentials of end-weighted sources; these carry the
        // neck flux that drives the p > n Riesz growth on connected sums
        std::mt19937_64 rng(seed * 6364136223846793005ULL + 5);
        std::uniform_real_distribution<double> frac(0.0, 0.6);
        for (int i = 0; i < potentials; ++i) {
            const double cut = frac(rng) * g.max_radial();
            ScalarField src = ScalarField::zero(g);
            for (vid x = 0; x < g.size(); ++x)
                if (g.radial(x) >= cut) src[x] = double(g.metadata().end_tag[x]);
            src = project_off_constants(g, src);
            ScalarField f = Spectral::apply_filter(g, src, [](double l) {
                return l > 1e-12 ? 1.0 / std::sqrt(l) : 0.0;
            });
            finalize(std::move(f));
        }
    }
    return out;
}

ScalarField ascend_ratio(const WeightedGraph& g, const ScalarField& start,
                         const std::function<double(const ScalarField&)>& ratio,
                         int iterations, std::uint64_t seed,
                         const std::vector<vid>* frozen) {
    ScalarField best = start;
    double best_ratio = ratio(best);
    if (!(best_ratio > 0.0) || iterations <= 0) return best;

    std::vector<char> is_frozen(g.size(), 0);
    if (frozen)
        for (vid x : *frozen) is_frozen[x] = 1;

    std::vector<vid> order(g.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const double fscale = std::max(best.values.cwiseAbs().maxCoeff(), 1e-6);
    double step = 0.5 * fscale;
    int stale = 0;
    ScalarField trial = best;
    for (int it = 0; it < iterations; ++it) {
        const vid x = order[it % order.size()];
        if (is_frozen[x]) continue;
        bool improved = false;
        for (double delta : {step, -step}) {
            trial.values = best.values;
            trial[x] += delta;
            const double r = ratio(trial);
            if (r > best_ratio * (1.0 + 1e-12)) {
                best.values = trial.values;
                best_ratio = r;
                improved = true;
                break;
            }
        }
        if (!improved && ++stale >= static_cast<int>(order.size())) {
            step *= 0.5;
            stale = 0;
            if (step < 1e-9 * fscale) break;
        }
    }
    return best;
}

// ---- estimators ----

InequalityEstimate poincare_constant(const WeightedGraph& g, const Ball& b, double p,
                                     const TestDictionary& dict) {
    if (b.members.size() < 2)
        throw std::invalid_argument("poincare_constant: ball needs >= 2 vertices");
    InequalityEstimate est;
    est.tag = InequalityTag::PoincareBall;
    est.p = p;
    std::ostringstream ctx;
    ctx << "ball(center=" << b.center << ", radius=" << b.radius << ") on "
        << g.metadata().builder;
    est.context = ctx.str();

    if (p == 2.0) {
        // Neumann pencil on the ball subgraph
        const int m = static_cast<int>(b.members.size());
        std::vector<int> pos(g.size(), -1);
        for (int i = 0; i < m; ++i) pos[b.members[i]] = i;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
        for (const Edge& e : g.edges()) {
            if (pos[e.a] < 0 || pos[e.b] < 0) continue;
            A(pos[e.a], pos[e.a]) += e.w;
            A(pos[e.b], pos[e.b]) += e.w;
            A(pos[e.a], pos[e.b]) -= e.w;
            A(pos[e.b], pos[e.a]) -= e.w;
        }
        Eigen::VectorXd M(m);
        for (int i = 0; i < m; ++i) M[i] = g.mu(b.members[i]);
        Eigen::MatrixXd Mm = M.asDiagonal();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Mm);
        const double l2 = es.eigenvalues()[1];
        est.method = EstimationMethod::SpectralExact;
        if (l2 <= 1e-12 * std::max(1.0, es.eigenvalues()[m - 1])) {
            est.constant = std::numeric_limits<double>::infinity();
            est.context += "; disconnected ball subgraph";
            est.witness = ScalarField::zero(g);
            return est;
        }
        est.constant = 1.0 / (b.radius * std::sqrt(l2));
        ScalarField w = ScalarField::zero(g);
        for (int i = 0; i < m; ++i) w[b.members[i]] = es.eigenvectors()(i, 1);
        est.witness = std::move(w);
        return est;
    }

    std::vector<vid> outside;
    {
        std::vector<char> inside(g.size(), 0);
        for (vid x : b.members) inside[x] = 1;
        for (vid x = 0; x < g.size(); ++x)
            if (!inside[x]) outside.push_back(x);
    }
    auto ratio = [&](const ScalarField& f) {
        const double mean = mu_average(g, f, b.members);
        double num = 0.0;
        for (vid x : b.members)
            num += g.mu(x) * std::pow(std::abs(f[x] - mean), p);
        num = std::pow(num, 1.0 / p);
        const double den = grad_norm_p(g, f, p, &b.members);
        if (den <= kDegenerate * std::max(1.0, num)) return 0.0;
        return num / (b.radius * den);
    };
    est.method = EstimationMethod::Ascent;
    double best = 0.0;
    ScalarField best_f = ScalarField::zero(g);
    for (ScalarField& f : dict.generate(g, false)) {
        zero_on(f, outside);
        const double r = ratio(f);
        if (r > best) {
            best = r;
            best_f = f;
        }
    }
    if (best > 0.0)
        best_f = ascend_ratio(g, best_f, ratio, dict.ascent_iterations, dict.seed, &outside);
    est.constant = ratio(best_f);
    est.witness = std::move(best_f);
    return est;
}

InequalityEstimate hardy_constant(const WeightedGraph& g, double p,
                                  const TestDictionary& dict) {
    if (p < 1.0) throw std::invalid_argument("hardy_constant: p >= 1 required");
    InequalityEstimate est;
    est.tag = InequalityTag::Hardy;
    est.p = p;
    est.context = "hardy on " + g.metadata().builder +
                  " (witnesses vanish on the truncation frontier)";

    const auto& boundary = g.metadata().boundary;
    auto ratio = [&](const ScalarField& f) {
        double num = 0.0;
        for (vid x = 0; x < g.size(); ++x)
            num += g.mu(x) * std::pow(std::abs(f[x]) / (1.0 + g.radial(x)), p);
        const double den = std::pow(grad_norm_p(g, f, p), p);
        if (den <= kDegenerate * std::max(1.0, num)) return 0.0;
        return num / den;  // constant in integral form
    };

    double best = 0.0;
    ScalarField best_f = ScalarField::zero(g);
    for (ScalarField& f : dict.generate(g, true)) {
        const double r = ratio(f);
        if (r > best) {
            best = r;
            best_f = f;
        }
    }
    est.method = EstimationMethod::Ascent;
    if (best > 0.0)
        best_f = ascend_ratio(g, best_f, ratio, dict.ascent_iterations, dict.seed, &boundary);
    best = ratio(best_f);

    if (p == 2.0 && !boundary.empty()) {
        // exact: smallest eigenvalue of the Dirichlet pencil with weight (1+r)^{-2}
        std::vector<char> is_boundary(g.size(), 0);
        for (vid x : boundary) is_boundary[x] = 1;
        std::vector<int> interior;
        for (vid x = 0; x < g.size(); ++x)
            if (!is_boundary[x]) interior.push_back(x);
        if (!interior.empty()) {
            const auto A = stiffness_matrix(g);
            const auto AI = principal_submatrix(A, interior);
            Eigen::VectorXd W(interior.size());
            for (size_t i = 0; i < interior.size(); ++i) {
                const vid x = interior[i];
                W[i] = g.mu(x) / std::pow(1.0 + g.radial(x), 2.0);
            }
            double lmin;
            Eigen::VectorXd vec;
            if (static_cast<int>(interior.size()) <= Spectral::dense_cap() / 2) {
                Eigen::MatrixXd Ad(AI);
                Eigen::MatrixXd Wd = Eigen::MatrixXd(W.asDiagonal());
                Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Wd);
                lmin = es.eigenvalues()[0];
                vec = es.eigenvectors().col(0);
            } else {
                LobpcgOptions opt;
                opt.tol = 1e-9;
                auto res = lobpcg_smallest(AI, W, opt);
                lmin = res.eigenvalue;
                vec = res.eigenvector;
                if (!res.converged)
                    est.context += "; lobpcg residual " + std::to_string(res.residual);
            }
            ScalarField w = ScalarField::zero(g);
            for (size_t i = 0; i < interior.size(); ++i) w[interior[i]] = vec[i];
            const double exact = 1.0 / lmin;
            if (exact >= best) {
                best = exact;
                best_f = std::move(w);
                est.method = EstimationMethod::SpectralExact;
                // report the witness's own ratio so re-evaluation reproduces it
                best = ratio(best_f);
            }
        }
    }
    est.constant = best;
    est.witness = std::move(best_f);
    return est;
}

namespace {

InequalityEstimate riesz_like(const WeightedGraph& g, double p, const TestDictionary& dict,
                              bool reverse) {
    InequalityEstimate est;
    est.tag = reverse ? InequalityTag::RRp : InequalityTag::Rp;
    est.p = p;
    est.context = std::string(reverse ? "reverse riesz" : "riesz") + " on " +
                  g.metadata().builder;

    auto ratio = [&](const ScalarField& f) {
        ScalarField v = project_off_constants(g, f);
        const double fn = lp_norm(g, v, p);
        const double gn = grad_norm_p(g, v, p);
        if (gn <= kDegenerate * std::max(1.0, fn)) return 0.0;
        const double sn = lp_norm(g, sqrt_apply(g, v), p);
        if (reverse) return sn / gn;
        if (sn <= kDegenerate * std::max(1.0, fn)) return 0.0;
        return gn / sn;
    };

    double best = 0.0;
    ScalarField best_f = ScalarField::zero(g);
    for (ScalarField& f : dict.generate(g, false)) {
        const double r = ratio(f);
        if (r > best) {
            best = r;
            best_f = f;
        }
    }
    est.method = EstimationMethod::Ascent;
    if (best > 0.0)
        best_f = ascend_ratio(g, best_f, ratio, dict.ascent_iterations, dict.seed, nullptr);
    est.constant = ratio(best_f);
    est.witness = std::move(best_f);
    return est;
}

}  // namespace

InequalityEstimate reverse_riesz_constant(const WeightedGraph& g, double p,
                                          const TestDictionary& dict) {
    if (p < 1.0) throw std::invalid_argument("reverse_riesz_constant: p >= 1 required");
    return riesz_like(g, p, dict, true);
}

InequalityEstimate riesz_constant(const WeightedGraph& g, double p,
                                  const TestDictionary& dict) {
    if (p <= 1.0) throw std::invalid_argument("riesz_constant: p > 1 required");
    return riesz_like(g, p, dict, false);
}

InequalityEstimate measure_weak_type(const WeightedGraph& g, const ScalarField& phi,
                                     const Ball& B, double q,
                                     std::vector<double> lambda_grid,
                                     WeakTypeDetail* detail) {
    check_aligned(g, phi);
    for (vid x = 0; x < g.size(); ++x)
        if (phi[x] != 0.0 && !B.contains(x))
            throw std::invalid_argument("measure_weak_type: phi not supported in B");

    InequalityEstimate est;
    est.tag = InequalityTag::WeakType;
    est.p = q;
    est.q = q;
    est.witness = phi;

    const double grad_q = grad_norm_p(g, phi, q, &B.members);
    const double denom = std::pow(grad_q, q);
    const ScalarField sq = sqrt_apply(g, phi);
    const Ball fourB = ball(g, B.center, 4.0 * B.radius);

    if (lambda_grid.empty()) {
        const double threshold = std::pow(denom / std::max(volume(g, B), 1e-300), 1.0 / q);
        double top = 0.0;
        for (vid x = 0; x < g.size(); ++x) top = std::max(top, std::abs(sq[x]));
        if (top > threshold) {
            const int npts = 32;
            for (int i = 0; i < npts; ++i)
                lambda_grid.push_back(threshold *
                                      std::pow(top / threshold, double(i) / (npts - 1)));
        } else {
            lambda_grid.push_back(threshold);
        }
    }
    if (lambda_grid.empty()) throw std::invalid_argument("measure_weak_type: empty grid");

    double best = 0.0;
    int argmax = 0;
    std::vector<double> values;
    for (size_t i = 0; i < lambda_grid.size(); ++i) {
        const double l = lambda_grid[i];
        double measure = 0.0;
        for (vid x : fourB.members)
            if (std::abs(sq[x]) > l) measure += g.mu(x);
        const double v = denom > 0.0 ? std::pow(l, q) * measure / denom : 0.0;
        values.push_back(v);
        if (v > best) {
            best = v;
            argmax = static_cast<int>(i);
        }
    }
    est.constant = best;
    std::ostringstream ctx;
    ctx << "q=" << q << ", grid=" << lambda_grid.size() << " pts, argmax=" << argmax;
    est.context = ctx.str();
    if (detail) {
        detail->grid = std::move(lambda_grid);
        detail->values = std::move(values);
        detail->argmax = argmax;
        detail->attained_interior_or_threshold =
            argmax + 1 < static_cast<int>(detail->grid.size());
    }
    return est;
}

InequalityEstimate measure_diagonal(const WeightedGraph& g, const AdmissibleCovering& cov,
                                    const ScalarField& f, double p) {
    if (!(p > 1.0 && p <= 2.0))
        throw std::invalid_argument("measure_diagonal: p in (1,2] required");
    check_aligned(g, f);
    InequalityEstimate est;
    est.tag = InequalityTag::Diagonal;
    est.p = p;
    est.witness = f;

    const auto pieces = localize(cov, f);
    double best = 0.0;
    int arg = -1;
    for (size_t a = 0; a < pieces.size(); ++a) {
        const double den = std::pow(grad_norm_p(g, pieces[a], p, &cov.balls[a].members), p);
        if (den <= 0.0) continue;
        const Ball fourB = ball(g, cov.balls[a].center, 4.0 * cov.balls[a].radius);
        const double num = std::pow(lp_norm(g, sqrt_apply(g, pieces[a]), p, &fourB.members), p);
        if (num / den > best) {
            best = num / den;
            arg = static_cast<int>(a);
        }
    }
    est.constant = best;
    est.context = "max over " + std::to_string(pieces.size()) +
                  " balls, attained at alpha=" + std::to_string(arg);
    return est;
}

InequalityEstimate hardy_sum_bound(const WeightedGraph& g, const AdmissibleCovering& cov,
                                   const ScalarField& f, double p,
                                   AssemblyDetail* detail) {
    check_aligned(g, f);
    if (p < 1.0) throw std::invalid_argument("hardy_sum_bound: p >= 1 required");
    const double grad_f = grad_norm_p(g, f, p);
    if (grad_f <= 0.0) throw std::invalid_argument("hardy_sum_bound: grad f = 0");

    AssemblyDetail d;
    d.grad_norm = grad_f;
    const auto pieces = localize(cov, f);
    for (size_t a = 0; a < pieces.size(); ++a) {
        const Ball& B = cov.balls[a];
        bool zero = true;
        for (vid x : B.members)
            if (pieces[a][x] != 0.0) {
                zero = false;
                break;
            }
        for (vid x : B.members)
            d.radius_pointwise_constant =
                std::max(d.radius_pointwise_constant, (g.radial(x) + 1.0) / B.radius);
        if (zero) continue;
        ScalarField scaled(g, pieces[a].values / B.radius);
        d.hardy_sum += lp_norm(g, scaled, p);

        const Ball fourB = ball(g, B.center, 4.0 * B.radius);
        d.diag_sum += lp_norm(g, sqrt_apply(g, pieces[a]), p, &fourB.members);

        std::vector<vid> complement;
        {
            std::vector<char> inside(g.size(), 0);
            for (vid x : fourB.members) inside[x] = 1;
            for (vid x = 0; x < g.size(); ++x)
                if (!inside[x]) complement.push_back(x);
        }
        if (!complement.empty()) {
            // sub-resolution balls need the lower cutoff pulled under r^2
            QuadratureSettings qs;
            const auto [l2, lmax] = Spectral::extreme_eigenvalues(g);
            qs.eps = std::min(1e-3 / lmax, B.radius * B.radius / 4.0);
            auto [T, U] = split_TU(g, pieces[a], B.radius, qs);
            d.offdiag_T_sum += lp_norm(g, T, p, &complement);
            d.offdiag_U_sum += lp_norm(g, U, p, &complement);
        }
    }
    d.lhs = lp_norm(g, sqrt_apply(g, project_off_constants(g, f)), p);
    d.direct_ratio = d.lhs / grad_f;
    d.pipeline_ratio = (d.diag_sum + d.offdiag_T_sum + d.offdiag_U_sum) / grad_f;

    InequalityEstimate est;
    est.tag = InequalityTag::HardySum;
    est.p = p;
    est.constant = d.hardy_sum / grad_f;
    est.method = EstimationMethod::Dictionary;
    est.witness = f;
    std::ostringstream ctx;
    ctx << "pipeline=" << d.pipeline_ratio << ", direct=" << d.direct_ratio
        << ", balls=" << pieces.size();
    est.context = ctx.str();
    if (detail) *detail = std::move(d);
    return est;
}

}  // namespace rlab
