#include "rlab/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "rlab/kernels.hpp"

namespace rlab {

ScalarField laplacian_apply(const WeightedGraph& g, const ScalarField& u) {
    check_aligned(g, u);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
    for (const Edge& e : g.edges()) {
        const double d = u[e.a] - u[e.b];
        out[e.a] += e.w * d;
        out[e.b] -= e.w * d;
    }
    for (vid x = 0; x < g.size(); ++x) out[x] /= g.mu(x);
    return ScalarField(g, std::move(out));
}

EdgeField gradient(const WeightedGraph& g, const ScalarField& u) {
    check_aligned(g, u);
    Eigen::VectorXd out(g.edges().size());
    for (size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& ed = g.edges()[e];
        out[e] = (u[ed.b] - u[ed.a]) / ed.len;
    }
    return EdgeField(g, std::move(out));
}

namespace {
bool edge_in_set(const Edge& e, const std::vector<vid>& sorted_set) {
    return std::binary_search(sorted_set.begin(), sorted_set.end(), e.a) &&
           std::binary_search(sorted_set.begin(), sorted_set.end(), e.b);
}
}  // namespace

double grad_norm_p(const WeightedGraph& g, const EdgeField& du, double p,
                   const std::vector<vid>* restriction) {
    check_aligned(g, du);
    if (p < 1.0) throw std::invalid_argument("grad_norm_p: p >= 1 required");
    double s = 0.0;
    for (size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& ed = g.edges()[e];
        if (restriction && !edge_in_set(ed, *restriction)) continue;
        const double m_e = ed.w * ed.len * ed.len;
        s += m_e * std::pow(std::abs(du.values[e]), p);
    }
    return std::pow(s, 1.0 / p);
}

double grad_norm_p(const WeightedGraph& g, const ScalarField& u, double p,
                   const std::vector<vid>* restriction) {
    return grad_norm_p(g, gradient(g, u), p, restriction);
}

double grad_sup(const WeightedGraph& g, const EdgeField& du,
                const std::vector<vid>* restriction) {
    check_aligned(g, du);
    double s = 0.0;
    for (size_t e = 0; e < g.edges().size(); ++e) {
        if (restriction && !edge_in_set(g.edges()[e], *restriction)) continue;
        s = std::max(s, std::abs(du.values[e]));
    }
    return s;
}

ScalarField grad_density_q(const WeightedGraph& g, const ScalarField& u, double q) {
    check_aligned(g, u);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
    for (const Edge& e : g.edges()) {
        const double m_e = e.w * e.len * e.len;
        const double half = 0.5 * m_e * std::pow(std::abs((u[e.b] - u[e.a]) / e.len), q);
        out[e.a] += half;
        out[e.b] += half;
    }
    for (vid x = 0; x < g.size(); ++x) out[x] /= g.mu(x);
    return ScalarField(g, std::move(out));
}

ScalarField project_off_constants(const WeightedGraph& g, const ScalarField& u) {
    check_aligned(g, u);
    double num = 0.0;
    for (vid x = 0; x < g.size(); ++x) num += g.mu(x) * u[x];
    const double mean = num / g.total_measure();
    return ScalarField(g, u.values.array() - mean);
}

// ---- spectral core ----

namespace {

struct GraphSpectralState {
    std::once_flag dense_once;
    std::shared_ptr<const DenseEig> dense;
    std::once_flag extremes_once;
    std::pair<double, double> extremes{0.0, 0.0};
    Eigen::SparseMatrix<double> sym;  // M^{-1/2} A M^{-1/2}
    std::once_flag sym_once;
};

std::mutex g_registry_mutex;
std::map<std::uint64_t, std::shared_ptr<GraphSpectralState>> g_registry;
int g_dense_cap = 3000;

std::shared_ptr<GraphSpectralState> state_for(const WeightedGraph& g) {
    std::lock_guard<std::mutex> lk(g_registry_mutex);
    auto& slot = g_registry[g.uid()];
    if (!slot) slot = std::make_shared<GraphSpectralState>();
    return slot;
}

const Eigen::SparseMatrix<double>& symmetrized(const WeightedGraph& g,
                                               GraphSpectralState& st) {
    std::call_once(st.sym_once, [&] {
        const int n = g.size();
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(g.edges().size() * 4 + n);
        std::vector<double> diag(n, 0.0);
        for (const Edge& e : g.edges()) {
            const double s = e.w / std::sqrt(g.mu(e.a) * g.mu(e.b));
            trips.emplace_back(e.a, e.b, -s);
            trips.emplace_back(e.b, e.a, -s);
            diag[e.a] += e.w / g.mu(e.a);
            diag[e.b] += e.w / g.mu(e.b);
        }
        for (int i = 0; i < n; ++i) trips.emplace_back(i, i, diag[i]);
        Eigen::SparseMatrix<double> S(n, n);
        S.setFromTriplets(trips.begin(), trips.end());
        S.makeCompressed();
        st.sym = std::move(S);
    });
    return st.sym;
}

// Lanczos with full reorthogonalization; returns the filtered vector
// f(S) v. Convergence is checked every `check_every` steps against the
// previous checkpoint. Throws on non-convergence with the achieved residual.
Eigen::VectorXd lanczos_filter(const Eigen::SparseMatrix<double>& S, const Eigen::VectorXd& v,
                               const std::function<double(double)>& f, double tol,
                               int max_iter, const char* what) {
    const int n = static_cast<int>(S.rows());
    const double vnorm = v.norm();
    if (vnorm == 0.0) return Eigen::VectorXd::Zero(n);
    max_iter = std::min(max_iter, n);

    Eigen::MatrixXd V(n, std::min(max_iter + 1, n));
    std::vector<double> alpha, beta;
    V.col(0) = v / vnorm;

    const int check_every = 20;
    Eigen::VectorXd prev_result;
    double achieved = std::numeric_limits<double>::infinity();

    auto ritz_combine = [&](int m) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        Eigen::VectorXd fe(m);
        for (int i = 0; i < m; ++i) fe[i] = f(std::max(0.0, es.eigenvalues()[i]));
        const Eigen::VectorXd e1_proj = es.eigenvectors().row(0).transpose();
        const Eigen::VectorXd y = es.eigenvectors() * fe.cwiseProduct(e1_proj);
        return Eigen::VectorXd(V.leftCols(m) * (vnorm * y));
    };

    int m = 0;
    for (int j = 0; j < max_iter; ++j) {
        Eigen::VectorXd w = spmv_parallel(S, V.col(j));
        const double a = w.dot(V.col(j));
        alpha.push_back(a);
        w -= a * V.col(j);
        if (j > 0) w -= beta[j - 1] * V.col(j - 1);
        // full reorthogonalization, two passes
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd coeff = V.leftCols(j + 1).transpose() * w;
            w.noalias() -= V.leftCols(j + 1) * coeff;
        }
        const double b = w.norm();
        m = j + 1;
        if (b < 1e-14 * vnorm) break;  // invariant subspace found: exact
        beta.push_back(b);
        if (j + 1 < V.cols()) V.col(j + 1) = w / b;

        if (m % check_every == 0 || j + 1 == max_iter) {
            Eigen::VectorXd result = ritz_combine(m);
            if (prev_result.size() > 0) {
                achieved = (result - prev_result).norm() / std::max(result.norm(), 1e-300);
                if (achieved < tol) return result;
            }
            prev_result = std::move(result);
        }
    }
    Eigen::VectorXd result = ritz_combine(m);
    if (prev_result.size() > 0) {
        achieved = (result - prev_result).norm() / std::max(result.norm(), 1e-300);
        if (achieved < tol || m == n) return result;
    } else if (m == n) {
        return result;
    }
    std::ostringstream os;
    os << what << ": Lanczos did not converge in " << m
       << " iterations; achieved residual " << achieved << " (target " << tol << ")";
    throw std::runtime_error(os.str());
}

constexpr double kLanczosTol = 1e-10;
constexpr int kLanczosMaxIter = 4000;

}  // namespace

int Spectral::dense_cap() { return g_dense_cap; }
void Spectral::set_dense_cap(int cap) { g_dense_cap = cap; }

bool Spectral::dense_available(const WeightedGraph& g) { return g.size() <= g_dense_cap; }

std::shared_ptr<const DenseEig> Spectral::dense(const WeightedGraph& g) {
    if (!dense_available(g))
        throw std::runtime_error("dense eigendecomposition cap exceeded (" +
                                 std::to_string(g.size()) + " > " +
                                 std::to_string(g_dense_cap) + " vertices)");
    auto st = state_for(g);
    std::call_once(st->dense_once, [&] {
        const int n = g.size();
        auto eig = std::make_shared<DenseEig>();
        eig->msqrt.resize(n);
        eig->minv_sqrt.resize(n);
        for (vid x = 0; x < n; ++x) {
            eig->msqrt[x] = std::sqrt(g.mu(x));
            eig->minv_sqrt[x] = 1.0 / eig->msqrt[x];
        }
        Eigen::MatrixXd S(symmetrized(g, *st));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("dense eigendecomposition failed");
        eig->evals = es.eigenvalues().cwiseMax(0.0);
        // the constant kernel comes out as a ~1e-15 eigenvalue; pin it to zero
        // so filters like sqrt annihilate it exactly
        const double lmax = eig->evals[n - 1];
        for (int k = 0; k < n; ++k)
            if (eig->evals[k] < 1e-13 * lmax) eig->evals[k] = 0.0;
        eig->vecs = es.eigenvectors();
        st->dense = std::move(eig);
    });
    return st->dense;
}

ScalarField Spectral::apply_filter(const WeightedGraph& g, const ScalarField& u,
                                   const std::function<double(double)>& f) {
    check_aligned(g, u);
    if (dense_available(g)) {
        auto eig = dense(g);
        Eigen::VectorXd y = eig->vecs.transpose() * (eig->msqrt.cwiseProduct(u.values));
        for (Eigen::Index k = 0; k < y.size(); ++k) y[k] *= f(eig->evals[k]);
        return ScalarField(g, eig->minv_sqrt.cwiseProduct(eig->vecs * y));
    }
    auto st = state_for(g);
    const auto& S = symmetrized(g, *st);
    Eigen::VectorXd v(g.size());
    for (vid x = 0; x < g.size(); ++x) v[x] = std::sqrt(g.mu(x)) * u.values[x];
    Eigen::VectorXd w = lanczos_filter(S, v, f, kLanczosTol, kLanczosMaxIter, "apply_filter");
    for (vid x = 0; x < g.size(); ++x) w[x] /= std::sqrt(g.mu(x));
    return ScalarField(g, std::move(w));
}

std::pair<double, double> Spectral::extreme_eigenvalues(const WeightedGraph& g) {
    auto st = state_for(g);
    std::call_once(st->extremes_once, [&] {
        if (dense_available(g)) {
            auto eig = dense(g);
            double l2 = 0.0;
            for (Eigen::Index k = 0; k < eig->evals.size(); ++k)
                if (eig->evals[k] > 1e-12 * eig->evals[eig->evals.size() - 1]) {
                    l2 = eig->evals[k];
                    break;
                }
            st->extremes = {l2, eig->evals[eig->evals.size() - 1]};
            return;
        }
        const auto& S = symmetrized(g, *st);
        const int n = g.size();
        // power iteration for lambda_max
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = std::sin(i + 1.0);
        v.normalize();
        double lmax = 0.0;
        for (int it = 0; it < 120; ++it) {
            Eigen::VectorXd w = spmv_parallel(S, v);
            const double l = v.dot(w);
            w.normalize();
            if (std::abs(l - lmax) < 1e-9 * std::max(1.0, l) && it > 10) {
                lmax = l;
                break;
            }
            lmax = l;
            v = w;
        }
        // smallest nonzero Ritz value from a short projected Lanczos run
        Eigen::VectorXd kernel(n);
        for (vid x = 0; x < n; ++x) kernel[x] = std::sqrt(g.mu(x));
        kernel.normalize();
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = std::cos(0.7 * i + 0.3);
        r -= kernel.dot(r) * kernel;
        const int m = std::min(n, 300);
        std::vector<double> alpha, beta;
        Eigen::MatrixXd V(n, m);
        V.col(0) = r.normalized();
        int used = 0;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd w = spmv_parallel(S, V.col(j));
            const double a = w.dot(V.col(j));
            alpha.push_back(a);
            w -= a * V.col(j);
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            w -= kernel.dot(w) * kernel;
            Eigen::VectorXd coeff = V.leftCols(j + 1).transpose() * w;
            w.noalias() -= V.leftCols(j + 1) * coeff;
            used = j + 1;
            const double b = w.norm();
            if (b < 1e-13) break;
            beta.push_back(b);
            if (j + 1 < m) V.col(j + 1) = w / b;
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
        for (int i = 0; i < used; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < used) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        double l2 = std::max(1e-300, es.eigenvalues()[0]);
        // Ritz values approach lambda_2 from above; pad for safety
        st->extremes = {l2 / 4.0, lmax * 1.1};
    });
    return st->extremes;
}

void Spectral::clear_cache() {
    std::lock_guard<std::mutex> lk(g_registry_mutex);
    g_registry.clear();
}

// ---- heat semigroup ----

ScalarField heat_apply(const WeightedGraph& g, const ScalarField& u, double t) {
    check_aligned(g, u);
    if (t < 0.0) throw std::invalid_argument("heat_apply: t >= 0 required");
    if (t == 0.0) return u;
    return Spectral::apply_filter(g, u, [t](double l) { return std::exp(-t * l); });
}

ScalarField heat_kernel_column(const WeightedGraph& g, vid y, double t) {
    ScalarField delta = ScalarField::zero(g);
    delta[y] = 1.0 / g.mu(y);
    return heat_apply(g, delta, t);
}

double heat_kernel(const WeightedGraph& g, vid x, vid y, double t) {
    if (t <= 0.0) throw std::invalid_argument("heat_kernel: t > 0 required");
    return heat_kernel_column(g, y, t)[x];
}

HeatBoundReport check_gaussian_bounds(const WeightedGraph& g,
                                      const std::vector<HeatGridSample>& grid,
                                      double gaussian_c) {
    HeatBoundReport rep;
    rep.gaussian_c = gaussian_c;
    rep.samples = static_cast<int>(grid.size());

    // group by (y,t) so one kernel column serves the whole group
    std::map<std::pair<vid, double>, std::vector<vid>> groups;
    for (const auto& s : grid) {
        if (!(s.t > 0.0)) throw std::invalid_argument("check_gaussian_bounds: t > 0 required");
        groups[{s.y, s.t}].push_back(s.x);
    }
    auto vol_sqrt_t = [&](vid x, double t) {
        double v = 0.0;
        for (auto& [vtx, d] : g.bounded_ball(x, std::sqrt(t))) v += g.mu(vtx);
        return v > 0.0 ? v : g.mu(x);
    };
    double logC = -std::numeric_limits<double>::infinity();
    double logCd = -std::numeric_limits<double>::infinity();
    double logCd2 = -std::numeric_limits<double>::infinity();
    for (auto& [yt, xs] : groups) {
        const auto [y, t] = yt;
        ScalarField col = heat_kernel_column(g, y, t);
        ScalarField dcol = Spectral::apply_filter(
            g, [&] {
                ScalarField delta = ScalarField::zero(g);
                delta[y] = 1.0 / g.mu(y);
                return delta;
            }(),
            [t](double l) { return -l * std::exp(-t * l); });
        const auto dist = g.distances_from(y);
        const double vy = vol_sqrt_t(y, t);
        for (vid x : xs) {
            const double d2ct = dist[x] * dist[x] / (gaussian_c * t);
            const double vx = vol_sqrt_t(x, t);
            if (col[x] > 0.0)
                logC = std::max(logC, std::log(col[x] * vx) + d2ct);
            const double dp = std::abs(dcol[x]);
            if (dp > 0.0) {
                logCd = std::max(logCd, std::log(dp * t * vx) + d2ct);
                logCd2 = std::max(logCd2, std::log(dp * t * vy) + d2ct);
            }
        }
    }
    rep.constant = std::isfinite(logC) ? std::exp(logC) : 0.0;
    rep.derivative_constant = std::isfinite(logCd) ? std::exp(logCd) : 0.0;
    rep.derivative_constant_v2 = std::isfinite(logCd2) ? std::exp(logCd2) : 0.0;
    rep.grid_description = std::to_string(grid.size()) + " samples, c=" +
                           std::to_string(gaussian_c);
    return rep;
}

// ---- square root ----

ScalarField sqrt_apply_spectral(const WeightedGraph& g, const ScalarField& u) {
    check_aligned(g, u);
    auto eig = Spectral::dense(g);  // throws above the cap
    Eigen::VectorXd y = eig->vecs.transpose() * (eig->msqrt.cwiseProduct(u.values));
    for (Eigen::Index k = 0; k < y.size(); ++k) y[k] *= std::sqrt(eig->evals[k]);
    return ScalarField(g, eig->minv_sqrt.cwiseProduct(eig->vecs * y));
}

ScalarField sqrt_apply(const WeightedGraph& g, const ScalarField& u) {
    if (Spectral::dense_available(g)) return sqrt_apply_spectral(g, u);
    ScalarField v = project_off_constants(g, u);
    return Spectral::apply_filter(g, v, [](double l) { return std::sqrt(std::max(0.0, l)); });
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

struct QuadNodes {
    std::vector<double> t;       // quadrature abscissae in time
    std::vector<double> coeff;   // weight * e^{s/2} factors (log-t substitution)
    double eps, R;
};

QuadNodes make_nodes(double eps, double R, int nodes) {
    QuadNodes q;
    q.eps = eps;
    q.R = R;
    std::vector<double> x, w;
    gauss_legendre(nodes, x, w);
    const double a = std::log(eps), b = std::log(R);
    q.t.resize(nodes);
    q.coeff.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double s = 0.5 * (b - a) * x[i] + 0.5 * (a + b);
        q.t[i] = std::exp(s);
        q.coeff[i] = 0.5 * (b - a) * w[i] * std::exp(0.5 * s);
    }
    return q;
}

constexpr int kTaylorTerms = 8;

// int_0^eps lam e^{-t lam} t^{-1/2} dt as a truncated Taylor series in lam*eps.
double small_t_series(double lam, double eps) {
    double sum = 0.0, fact = 1.0;
    for (int k = 0; k <= kTaylorTerms; ++k) {
        if (k > 0) fact *= k;
        sum += ((k % 2 == 0) ? 1.0 : -1.0) * std::pow(lam, k + 1) *
               std::pow(eps, k + 0.5) / (fact * (k + 0.5));
    }
    return sum;
}

constexpr double kInvSqrtPi = 0.5641895835477563;

double resolve_eps(const WeightedGraph& g, const QuadratureSettings& s, double lmax) {
    return s.eps > 0.0 ? s.eps : 1e-3 / lmax;
}
double resolve_R(const WeightedGraph& g, const QuadratureSettings& s, double l2) {
    return s.R > 0.0 ? s.R : 1e3 / std::max(l2, 1e-300);
}

double truncation_bound(double eps, double R, double l2, double lmax) {
    // dropped upper tail plus the Taylor remainder below eps, relative to
    // the smallest output scale sqrt(l2)
    const double tail = std::exp(-R * l2) / std::sqrt(R);
    double fact = 1.0;
    for (int k = 1; k <= kTaylorTerms + 1; ++k) fact *= k;
    const double taylor = std::pow(lmax, kTaylorTerms + 2) *
                          std::pow(eps, kTaylorTerms + 1.5) / (fact * (kTaylorTerms + 1.5));
    return kInvSqrtPi * (tail + taylor) / std::sqrt(std::max(l2, 1e-300));
}

}  // namespace

ScalarField sqrt_apply_quadrature(const WeightedGraph& g, const ScalarField& u,
                                  QuadratureSettings settings, QuadratureReport* report) {
    check_aligned(g, u);
    if (settings.nodes < 2) throw std::invalid_argument("sqrt_apply_quadrature: nodes >= 2");
    const auto [l2, lmax] = Spectral::extreme_eigenvalues(g);
    const double eps = resolve_eps(g, settings, lmax);
    const double R = resolve_R(g, settings, l2);
    if (!(eps > 0.0) || eps >= R)
        throw std::invalid_argument("sqrt_apply_quadrature: need 0 < eps < R");

    const QuadNodes q = make_nodes(eps, R, settings.nodes);
    if (report) {
        report->eps = eps;
        report->R = R;
        report->nodes = settings.nodes;
        report->truncation_bound = truncation_bound(eps, R, l2, lmax);
        report->warned = report->truncation_bound > settings.warn_tolerance;
    }
    ScalarField v = project_off_constants(g, u);
    return Spectral::apply_filter(g, v, [&q, eps](double lam) {
        double acc = small_t_series(lam, eps);
        for (size_t i = 0; i < q.t.size(); ++i)
            acc += q.coeff[i] * lam * std::exp(-lam * q.t[i]);
        return kInvSqrtPi * acc;
    });
}

std::pair<ScalarField, ScalarField> split_TU(const WeightedGraph& g, const ScalarField& u,
                                             double r_alpha, QuadratureSettings settings) {
    check_aligned(g, u);
    if (!(r_alpha > 0.0)) throw std::invalid_argument("split_TU: r_alpha > 0 required");
    if (settings.nodes < 2) throw std::invalid_argument("split_TU: nodes >= 2");
    const auto [l2, lmax] = Spectral::extreme_eigenvalues(g);
    const double eps = resolve_eps(g, settings, lmax);
    const double R = resolve_R(g, settings, l2);
    const double split = r_alpha * r_alpha;
    if (split <= eps || split >= R)
        throw std::invalid_argument("split_TU: r_alpha^2 outside (eps, R)");

    const QuadNodes q = make_nodes(eps, R, settings.nodes);
    ScalarField v = project_off_constants(g, u);
    // shared nodes partitioned at r_alpha^2; the small-t series belongs to T
    auto piece = [&](bool short_time) {
        return Spectral::apply_filter(g, v, [&, short_time](double lam) {
            double acc = short_time ? small_t_series(lam, eps) : 0.0;
            for (size_t i = 0; i < q.t.size(); ++i) {
                if ((q.t[i] < split) != short_time) continue;
                acc += q.coeff[i] * lam * std::exp(-lam * q.t[i]);
            }
            return kInvSqrtPi * acc;
        });
    };
    return {piece(true), piece(false)};
}

}  // namespace rlab
