#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rlab/graph.hpp"

namespace rlab {

/// Real function on vertices, aligned to a specific graph.
struct ScalarField {
    Eigen::VectorXd values;
    std::uint64_t graph_uid = 0;

    ScalarField() = default;
    ScalarField(const WeightedGraph& g, Eigen::VectorXd v)
        : values(std::move(v)), graph_uid(g.uid()) {
        if (values.size() != g.size())
            throw std::invalid_argument("ScalarField: size mismatch");
    }
    static ScalarField zero(const WeightedGraph& g) {
        return ScalarField(g, Eigen::VectorXd::Zero(g.size()));
    }
    double operator[](vid x) const { return values[x]; }
    double& operator[](vid x) { return values[x]; }
};

/// Real function on oriented edges, stored against the graph's edge list
/// with orientation a -> b; value(y,x) = -value(x,y).
struct EdgeField {
    Eigen::VectorXd values;
    std::uint64_t graph_uid = 0;

    EdgeField() = default;
    EdgeField(const WeightedGraph& g, Eigen::VectorXd v)
        : values(std::move(v)), graph_uid(g.uid()) {
        if (values.size() != static_cast<Eigen::Index>(g.edges().size()))
            throw std::invalid_argument("EdgeField: size mismatch");
    }
    static EdgeField zero(const WeightedGraph& g) {
        return EdgeField(g, Eigen::VectorXd::Zero(g.edges().size()));
    }
};

inline void check_aligned(const WeightedGraph& g, const ScalarField& u) {
    if (u.graph_uid != g.uid() || u.values.size() != g.size())
        throw std::invalid_argument("field not aligned to graph");
}

inline void check_aligned(const WeightedGraph& g, const EdgeField& h) {
    if (h.graph_uid != g.uid() ||
        h.values.size() != static_cast<Eigen::Index>(g.edges().size()))
        throw std::invalid_argument("edge field not aligned to graph");
}

/// mu-weighted inner product on vertices.
inline double mu_dot(const WeightedGraph& g, const ScalarField& u, const ScalarField& v) {
    double s = 0.0;
    for (vid x = 0; x < g.size(); ++x) s += g.mu(x) * u[x] * v[x];
    return s;
}

/// L^p(mu) norm over vertices, optionally restricted to a sorted vertex set.
double lp_norm(const WeightedGraph& g, const ScalarField& u, double p,
               const std::vector<vid>* restriction = nullptr);

/// mu-weighted average over a sorted vertex set.
double mu_average(const WeightedGraph& g, const ScalarField& u, const std::vector<vid>& set);

}  // namespace rlab
