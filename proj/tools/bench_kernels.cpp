// Times the OpenMP kernels against their serial reference implementations:
// sparse matvec, multi-source shortest paths, the uncentered maximal
// function, and a batched heat-quadrature sweep.

#include <chrono>
#include <cstdio>
#include <random>

#include <omp.h>

#include "rlab/eigensolve.hpp"
#include "rlab/kernels.hpp"
#include "rlab/maximal_cz.hpp"
#include "rlab/spectral.hpp"

using namespace rlab;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = clk::now();
        f();
        best = std::min(best, seconds(t0, clk::now()));
    }
    return best;
}

}  // namespace

int main() {
    std::printf("threads: %d\n\n", omp_get_max_threads());

    {
        const auto g = build_lattice_box(3, 41);  // 68921 vertices
        const auto A = stiffness_matrix(g);
        Eigen::VectorXd x(g.size());
        std::mt19937_64 rng(7);
        std::normal_distribution<double> N;
        for (int i = 0; i < g.size(); ++i) x[i] = N(rng);
        Eigen::VectorXd ys, yp;
        const double ts = time_best_of(5, [&] { ys = spmv_serial(A, x); });
        const double tp = time_best_of(5, [&] { yp = spmv_parallel(A, x); });
        std::printf("spmv %dx%d (nnz %ld): serial %.4fs  parallel %.4fs  speedup %.2fx  "
                    "max|diff| %.2e\n",
                    g.size(), g.size(), static_cast<long>(A.nonZeros()), ts, tp, ts / tp,
                    (ys - yp).cwiseAbs().maxCoeff());
    }
    {
        const auto g = build_lattice_box(2, 101);  // 10201 vertices
        std::vector<vid> sources;
        for (int i = 0; i < 64; ++i) sources.push_back((i * 997) % g.size());
        std::vector<std::vector<double>> rs, rp;
        const double ts =
            time_best_of(3, [&] { rs = multi_source_distances_serial(g, sources); });
        const double tp = time_best_of(3, [&] { rp = multi_source_distances(g, sources); });
        double diff = 0.0;
        for (size_t i = 0; i < rs.size(); ++i)
            for (size_t j = 0; j < rs[i].size(); ++j)
                diff = std::max(diff, std::abs(rs[i][j] - rp[i][j]));
        std::printf("dijkstra 64 sources on %d vertices: serial %.4fs  parallel %.4fs  "
                    "speedup %.2fx  max|diff| %.2e\n",
                    g.size(), ts, tp, ts / tp, diff);
    }
    {
        const auto g = build_lattice_box(2, 24);  // 576 vertices: brute force is O(n^3)
        Eigen::VectorXd v(g.size());
        std::mt19937_64 rng(11);
        std::normal_distribution<double> N;
        for (int i = 0; i < g.size(); ++i) v[i] = N(rng);
        const ScalarField f(g, v);
        ScalarField ms, mp;
        const double ts = time_best_of(2, [&] { ms = maximal_function_bruteforce(g, f); });
        const double tp = time_best_of(2, [&] { mp = maximal_function(g, f); });
        std::printf("maximal function on %d vertices: brute force %.4fs  sweep %.4fs  "
                    "speedup %.1fx  max|diff| %.2e\n",
                    g.size(), ts, tp, ts / tp,
                    (ms.values - mp.values).cwiseAbs().maxCoeff());
    }
    {
        const auto g = build_lattice_box(3, 9);
        Eigen::VectorXd v(g.size());
        std::mt19937_64 rng(13);
        std::normal_distribution<double> N;
        for (int i = 0; i < g.size(); ++i) v[i] = N(rng);
        const ScalarField f(g, v);
        Spectral::dense(g);  // warm the eigendecomposition cache
        // reference: one heat apply per quadrature node, summed in node order
        QuadratureSettings qs;
        qs.nodes = 200;
        ScalarField fused = ScalarField::zero(g), looped = ScalarField::zero(g);
        const double tf = time_best_of(3, [&] { fused = sqrt_apply_quadrature(g, f, qs); });
        const auto [l2, lmax] = Spectral::extreme_eigenvalues(g);
        const double tl = time_best_of(1, [&] {
            ScalarField acc = ScalarField::zero(g);
            ScalarField proj = project_off_constants(g, f);
            // per-node semigroup applications, no filter fusion
            const double a = std::log(1e-3 / lmax), b = std::log(1e3 / l2);
            for (int i = 0; i < qs.nodes; ++i) {
                const double s = a + (b - a) * (i + 0.5) / qs.nodes;
                const double t = std::exp(s);
                const ScalarField ht = heat_apply(g, proj, t);
                acc.values += ((b - a) / qs.nodes) * std::exp(0.5 * s) *
                              laplacian_apply(g, ht).values;
            }
            looped = std::move(acc);
        });
        std::printf("sqrt quadrature on %d vertices, %d nodes: per-node loop %.4fs  "
                    "fused filter %.4fs  speedup %.1fx\n",
                    g.size(), qs.nodes, tl, tf, tl / tf);
    }
    return 0;
}
