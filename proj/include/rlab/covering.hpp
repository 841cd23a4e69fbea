#pragma once

#include <string>
#include <vector>

#include "rlab/fields.hpp"
#include "rlab/graph.hpp"

namespace rlab {

/// Covering of the graph by admissible balls: the anchored ball B_0 = B(o, r0)
/// first, then remote balls with radii pinned to the 2^{-10} r(x) band, plus
/// the subordinate tent partition of unity.
struct AdmissibleCovering {
    const WeightedGraph* graph = nullptr;
    std::vector<Ball> balls;        // balls[0] anchored
    std::vector<ScalarField> chi;   // partition of unity, aligned with balls
    double r0 = 0.0;
    int overlap_N = 0;              // max number of pairwise-meeting balls
};

struct CoveringReport {
    bool all_admissible = false;
    bool covers = false;
    bool partition_sums_to_one = false;
    double partition_residual = 0.0;
    int overlap_N = 0;
    double grad_chi_bound = 0.0;    // max over alpha of ||grad chi_a||_inf * r_a
    bool radius_band = false;       // eq. 2^{-10} r(x) <= r <= 2^{-9} r(x)
    bool fourteen_B_remote = false;
    bool pass = false;
    std::string context;
};

/// Builds the covering: greedy net over vertices outside B_0 in decreasing
/// r(x) order, radii at the lower band edge so that 14 B stays remote.
AdmissibleCovering admissible_cover(const WeightedGraph& g, double r0);

/// Checks the five covering properties plus the 14B-remote relabeling.
CoveringReport verify_covering(const AdmissibleCovering& cov);

/// f_alpha = chi_alpha * f; sums back to f exactly.
std::vector<ScalarField> localize(const AdmissibleCovering& cov, const ScalarField& f);

struct LeibnizReport {
    double max_per_ball_constant = 0.0;   // ||grad f_a||_p vs ||f_a/r_a||_p + ||grad f||_{L^p(B_a)}
    double aggregate_constant = 0.0;      // (sum_a ||grad f||^p_{L^p(B_a)})^{1/p} / ||grad f||_p
    double overlap_bound = 0.0;           // N^{1/p}
    int balls_used = 0;
};

/// Measures the discrete product-rule constants of the localization.
LeibnizReport gradient_leibniz_bound(const AdmissibleCovering& cov, const ScalarField& f,
                                     double p);

}  // namespace rlab
