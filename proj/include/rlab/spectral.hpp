#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "rlab/fields.hpp"
#include "rlab/graph.hpp"

namespace rlab {

/// Graph Laplacian (Delta u)(x) = mu(x)^{-1} sum_{y~x} w_xy (u(x) - u(y)).
/// Self-adjoint in L^2(mu), positive semi-definite, kernel = constants.
ScalarField laplacian_apply(const WeightedGraph& g, const ScalarField& u);

/// Edge gradient (u(b) - u(a)) / len on each stored edge.
EdgeField gradient(const WeightedGraph& g, const ScalarField& u);

/// ( sum_e m_e |grad u(e)|^p )^{1/p} with edge measure m_e = w_e len_e^2.
/// When restricted, sums over edges with both endpoints in the sorted set.
double grad_norm_p(const WeightedGraph& g, const ScalarField& u, double p,
                   const std::vector<vid>* restriction = nullptr);
double grad_norm_p(const WeightedGraph& g, const EdgeField& du, double p,
                   const std::vector<vid>* restriction = nullptr);

/// Max |grad u| over edges (both endpoints in the set when restricted).
double grad_sup(const WeightedGraph& g, const EdgeField& du,
                const std::vector<vid>* restriction = nullptr);

// ---- spectral machinery ----

/// Dense mu-symmetrized eigendecomposition, cached per graph. Only available
/// up to the vertex cap; larger graphs go through Lanczos.
struct DenseEig {
    Eigen::VectorXd evals;          // ascending
    Eigen::MatrixXd vecs;           // columns: orthonormal for the symmetrized op
    Eigen::VectorXd msqrt, minv_sqrt;  // diag(mu)^{1/2}, diag(mu)^{-1/2}
};

class Spectral {
public:
    static int dense_cap();
    static void set_dense_cap(int cap);

    /// Cached dense eigendecomposition; throws when the graph exceeds the cap.
    static std::shared_ptr<const DenseEig> dense(const WeightedGraph& g);
    static bool dense_available(const WeightedGraph& g);

    /// y = f(Delta) u via the dense eigenbasis or Lanczos above the cap.
    static ScalarField apply_filter(const WeightedGraph& g, const ScalarField& u,
                                    const std::function<double(double)>& f);

    /// (lambda_2 estimate, lambda_max estimate) of the nonzero spectrum.
    static std::pair<double, double> extreme_eigenvalues(const WeightedGraph& g);

    /// Drops per-graph cached state (tests use this to bound memory).
    static void clear_cache();
};

/// e^{-t Delta} u. Dense path under the cap, Lanczos above with relative
/// accuracy 1e-8; throws with the achieved residual on non-convergence.
ScalarField heat_apply(const WeightedGraph& g, const ScalarField& u, double t);

/// Heat kernel p_t(x,y): e^{-tDelta}u(x) = sum_y mu(y) p_t(x,y) u(y).
double heat_kernel(const WeightedGraph& g, vid x, vid y, double t);

/// One kernel column {p_t(x,y)}_x for fixed y.
ScalarField heat_kernel_column(const WeightedGraph& g, vid y, double t);

struct HeatGridSample {
    vid x;
    vid y;
    double t;
};

struct HeatBoundReport {
    double constant = 0.0;              // smallest C in (UE) over the grid
    double gaussian_c = 5.0;            // exponential rate used
    double derivative_constant = 0.0;   // (dUE), n = 1, V(x, sqrt t)
    double derivative_constant_v2 = 0.0;  // (dUE2) variant with V(y, sqrt t)
    int samples = 0;
    std::string grid_description;
};

/// Measures the best constants in the Gaussian upper bounds over the grid.
HeatBoundReport check_gaussian_bounds(const WeightedGraph& g,
                                      const std::vector<HeatGridSample>& grid,
                                      double gaussian_c = 5.0);

/// Delta^{1/2} u through the dense eigenbasis; the oracle path.
/// Throws when the graph exceeds the dense cap.
ScalarField sqrt_apply_spectral(const WeightedGraph& g, const ScalarField& u);

/// Delta^{1/2} u for graphs of any size (dense under the cap, Lanczos above).
ScalarField sqrt_apply(const WeightedGraph& g, const ScalarField& u);

struct QuadratureSettings {
    double eps = 0.0;   // lower cutoff; 0 = auto (1e-3 / lambda_max)
    double R = 0.0;     // upper cutoff; 0 = auto (1e3 / lambda_2)
    int nodes = 200;
    double warn_tolerance = 1e-8;
};

struct QuadratureReport {
    double eps = 0.0, R = 0.0;
    int nodes = 0;
    double truncation_bound = 0.0;  // bound on the dropped-tail operator error
    bool warned = false;
};

/// Delta^{1/2} u by Gauss-Legendre in log t of (1/sqrt(pi)) int Delta e^{-tDelta} u dt/sqrt(t)
/// over [eps, R], completed below eps by the small-t Taylor series of the heat
/// semigroup. The input is first projected off the constant kernel in L^2(mu).
ScalarField sqrt_apply_quadrature(const WeightedGraph& g, const ScalarField& u,
                                  QuadratureSettings settings = {},
                                  QuadratureReport* report = nullptr);

/// Splits the quadrature at t = r_alpha^2 into the short-time part T and the
/// long-time part U on shared nodes, so T + U equals sqrt_apply_quadrature.
std::pair<ScalarField, ScalarField> split_TU(const WeightedGraph& g, const ScalarField& u,
                                             double r_alpha, QuadratureSettings settings = {});

/// Vertex field representing |grad u|^q as a density: each edge contributes
/// half of m_e |grad u(e)|^q to each endpoint, divided by mu. Integrates to
/// ||grad u||_q^q against mu.
ScalarField grad_density_q(const WeightedGraph& g, const ScalarField& u, double q);

/// Projection off the constant kernel in L^2(mu).
ScalarField project_off_constants(const WeightedGraph& g, const ScalarField& u);

}  // namespace rlab
