#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rlab/covering.hpp"
#include "rlab/fields.hpp"
#include "rlab/graph.hpp"

namespace rlab {

enum class InequalityTag { RRp, Rp, Hardy, PoincareBall, WeakType, HardySum, Diagonal };
enum class EstimationMethod { SpectralExact, Dictionary, Ascent };

const char* to_string(InequalityTag t);
const char* to_string(EstimationMethod m);

/// Best-constant estimate. All dictionary/ascent constants are lower bounds
/// for the true supremum; the witness reproduces the constant on re-evaluation.
struct InequalityEstimate {
    InequalityTag tag = InequalityTag::Hardy;
    double p = 2.0;
    double q = 0.0;
    double constant = 0.0;
    EstimationMethod method = EstimationMethod::Dictionary;
    ScalarField witness;
    std::string context;
};

/// Deterministic witness families. Each family draws from its own seeded
/// stream, so enlarging one family never perturbs another (dictionary lower
/// bounds are monotone under enlargement).
struct TestDictionary {
    std::uint64_t seed = 1;
    int bumps = 4;        // gaussian bumps on random balls
    int noise = 3;        // heat-smoothed seeded noise e^{-tDelta} xi
    int tents = 3;        // linear tents
    int powers = 4;       // distance-power profiles r(x)^a with cutoff
    int potentials = 2;   // inverse-sqrt potentials of end-indicator sources
    int ascent_iterations = 200;

    /// Generated fields are nonconstant and finite; with boundary_zero they
    /// vanish on the graph's recorded truncation frontier.
    std::vector<ScalarField> generate(const WeightedGraph& g, bool boundary_zero) const;
};

/// Coordinate ascent on a ratio functional: finite-difference steps with
/// halving, deterministic order, capped iterations. Frozen coordinates
/// (e.g. the truncation frontier) are never moved.
ScalarField ascend_ratio(const WeightedGraph& g, const ScalarField& start,
                         const std::function<double(const ScalarField&)>& ratio,
                         int iterations, std::uint64_t seed,
                         const std::vector<vid>* frozen = nullptr);

/// (P^E_p) on a ball: ||f - f_B||_{L^p(B)} <= C r ||grad f||_{L^p(B)}.
/// p = 2 solves the Neumann pencil on the ball subgraph exactly; other p use
/// dictionary + ascent. Disconnected ball subgraphs report C = infinity.
InequalityEstimate poincare_constant(const WeightedGraph& g, const Ball& b, double p,
                                     const TestDictionary& dict);

/// (H): int (|f|/(1+r))^p <= C int |grad f|^p over fields vanishing on the
/// truncation frontier. p = 2 additionally solves the Dirichlet pencil with
/// weight (1+r)^{-2} exactly (dense under the cap, LOBPCG above).
InequalityEstimate hardy_constant(const WeightedGraph& g, double p,
                                  const TestDictionary& dict);

/// (RR_p): sup ||Delta^{1/2} f||_p / ||grad f||_p.
InequalityEstimate reverse_riesz_constant(const WeightedGraph& g, double p,
                                          const TestDictionary& dict);

/// (R_p): sup ||grad f||_p / ||Delta^{1/2} f||_p, p > 1.
InequalityEstimate riesz_constant(const WeightedGraph& g, double p,
                                  const TestDictionary& dict);

struct WeakTypeDetail {
    std::vector<double> grid;
    std::vector<double> values;  // lambda^q mu{|sqrt phi| > lambda} / ||grad phi||_q^q
    int argmax = 0;
    bool attained_interior_or_threshold = false;
};

/// Lemma-3.3 measurement on supp(phi) in B. An empty grid uses 32 log-spaced
/// points between the level-set threshold and max |Delta^{1/2} phi|.
InequalityEstimate measure_weak_type(const WeightedGraph& g, const ScalarField& phi,
                                     const Ball& B, double q,
                                     std::vector<double> lambda_grid = {},
                                     WeakTypeDetail* detail = nullptr);

/// Diagonal bound: max over alpha of
/// ||Delta^{1/2} f_a||^p_{L^p(4B_a)} / ||grad f_a||^p_{L^p(B_a)}, p in (1,2].
InequalityEstimate measure_diagonal(const WeightedGraph& g, const AdmissibleCovering& cov,
                                    const ScalarField& f, double p);

struct AssemblyDetail {
    double hardy_sum = 0.0;       // sum_a ||f_a / r_a||_p
    double grad_norm = 0.0;       // ||grad f||_p
    double diag_sum = 0.0;        // sum_a ||Delta^{1/2} f_a||_{L^p(4B_a)}
    double offdiag_T_sum = 0.0;   // sum_a ||T_a f_a||_{L^p(M \ 4B_a)}
    double offdiag_U_sum = 0.0;   // sum_a ||U_a f_a||_{L^p(M \ 4B_a)}
    double lhs = 0.0;             // ||Delta^{1/2} f||_p
    double pipeline_ratio = 0.0;  // (diag+T+U pieces assembled) / ||grad f||_p
    double direct_ratio = 0.0;    // ||Delta^{1/2} f||_p / ||grad f||_p
    double radius_pointwise_constant = 0.0;  // max (r(x)+1)/r_a over x in B_a
};

/// Lemma-3.7 sum bound and the end-to-end assembly, each term reported.
InequalityEstimate hardy_sum_bound(const WeightedGraph& g, const AdmissibleCovering& cov,
                                   const ScalarField& f, double p,
                                   AssemblyDetail* detail = nullptr);

}  // namespace rlab
