#include "rlab/fields.hpp"

#include <algorithm>
#include <cmath>

namespace rlab {

double lp_norm(const WeightedGraph& g, const ScalarField& u, double p,
               const std::vector<vid>* restriction) {
    check_aligned(g, u);
    double s = 0.0;
    if (restriction) {
        for (vid x : *restriction) s += g.mu(x) * std::pow(std::abs(u[x]), p);
    } else {
        for (vid x = 0; x < g.size(); ++x) s += g.mu(x) * std::pow(std::abs(u[x]), p);
    }
    return std::pow(s, 1.0 / p);
}

double mu_average(const WeightedGraph& g, const ScalarField& u, const std::vector<vid>& set) {
    double num = 0.0, den = 0.0;
    for (vid x : set) {
        num += g.mu(x) * u[x];
        den += g.mu(x);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace rlab
