#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rlab/fields.hpp"
#include "rlab/graph.hpp"

namespace rlab {

/// Uncentered maximal function M v(x) = sup over balls containing x of the
/// mu-average of |v|. Exact on finite graphs (the ball family is finite);
/// the sweep over centers runs in parallel.
ScalarField maximal_function(const WeightedGraph& g, const ScalarField& v);

/// Serial brute-force enumeration of every (center, radius) ball average.
/// Reference implementation kept for tests and the kernel benchmark.
ScalarField maximal_function_bruteforce(const WeightedGraph& g, const ScalarField& v);

/// Whitney-type cover of Omega: greedy centers by decreasing d(x, F) with
/// radii r_i = d(x_i, F)/2 and pairwise disjoint quarter-balls. The returned
/// balls cover Omega, stay inside Omega, and 3B_i meets F.
std::vector<Ball> whitney_cover(const WeightedGraph& g, const std::vector<vid>& omega);

/// Tent partition of unity subordinate to the balls: chi_i = phi_i / sum phi
/// on Omega and zero outside, phi_i(x) = max(0, 1 - d(x, x_i)/r_i).
std::vector<ScalarField> cz_partition(const WeightedGraph& g, const std::vector<Ball>& balls,
                                      const std::vector<vid>& omega);

struct CZDecomposition {
    const WeightedGraph* graph = nullptr;
    ScalarField u;
    double q = 1.0;
    double lambda = 0.0;
    Ball enclosing;                   // the ball B with supp(u) in B
    std::vector<vid> omega;           // sorted level set
    std::vector<Ball> balls;          // Whitney balls B_i
    std::vector<ScalarField> chi;     // partition of unity on Omega
    std::vector<double> ball_average; // u_{B_i}
    std::vector<ScalarField> bad_parts;
    ScalarField good_part;
    EdgeField H;
    int overlap_N = 0;
};

struct CZPropertyReport {
    bool p1_sum_identity = false;     // u = g + sum b_i
    double p1_residual = 0.0;
    bool p2_support_in_2B = false;
    double p2_grad_g_over_lambda = 0.0;   // max |grad g| / lambda
    double c2 = 0.0;                      // ||H||_inf / lambda
    bool p2_pass = false;
    double c3a = 0.0;  // max ||b_i||_q / (r_i ||grad u||_{L^q(B_i)})
    double c3b = 0.0;  // max ||grad b_i||_q^q / (lambda^q V(B_i))
    bool p3_support = false;
    double c4 = 0.0;   // sum V(B_i) lambda^q / ||grad u||_q^q
    int overlap_N = 0;
    bool p6_radius_ratio = false;
    double radius_ratio_min = 1.0, radius_ratio_max = 1.0;
    bool p7_3B_meets_F = false;
    bool omega_in_2B = false;
    double edge_identity_residual = 0.0;  // max |grad g - grad u 1_F - H|
    bool all_pass = false;
    std::string context;
};

/// Full Calderon-Zygmund decomposition of u at level lambda of M(|grad u|^q).
/// Requires supp(u) in B and lambda above the (C ||grad u||_q^q / V(B))^{1/q}
/// threshold; precondition_C is the exposed constant (default 1).
CZDecomposition cz_decompose(const WeightedGraph& g, const ScalarField& u, const Ball& B,
                             double q, double lambda, double precondition_C = 1.0);

/// Correction field H with grad g = grad u . 1_F + H exactly edge-wise:
/// pair double-sum over intersecting balls on edges interior to Omega,
/// boundary edges carried wholesale on the H side.
EdgeField assemble_H(const CZDecomposition& dec);

/// Evaluates all seven decomposition properties plus the edge identity.
CZPropertyReport verify_cz(const CZDecomposition& dec);

}  // namespace rlab
