#include "rlab/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rlab {

json field_to_json(const ScalarField& f) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < f.values.size(); ++i) arr.push_back(f.values[i]);
    return arr;
}

ScalarField field_from_json(const WeightedGraph& g, const json& j) {
    if (!j.is_array() || static_cast<int>(j.size()) != g.size())
        throw std::invalid_argument("field_from_json: size mismatch");
    Eigen::VectorXd v(g.size());
    for (vid x = 0; x < g.size(); ++x) v[x] = j[x].get<double>();
    return ScalarField(g, std::move(v));
}

json to_json(const VolumeGrowthReport& r) {
    return {{"doubling_constant", r.doubling_constant},
            {"doubling_exponent", r.doubling_exponent},
            {"reverse_exponent", r.reverse_exponent},
            {"fit_exponent", r.fit_exponent},
            {"samples_used", r.samples_used},
            {"sample", r.sample_description}};
}

json to_json(const HeatBoundReport& r) {
    return {{"constant", r.constant},
            {"gaussian_c", r.gaussian_c},
            {"derivative_constant", r.derivative_constant},
            {"derivative_constant_v2", r.derivative_constant_v2},
            {"samples", r.samples},
            {"grid", r.grid_description}};
}

json to_json(const CZPropertyReport& r) {
    return {{"p1_sum_identity", r.p1_sum_identity},
            {"p1_residual", r.p1_residual},
            {"p2_support_in_2B", r.p2_support_in_2B},
            {"p2_grad_g_over_lambda", r.p2_grad_g_over_lambda},
            {"c2", r.c2},
            {"p2_pass", r.p2_pass},
            {"c3a", r.c3a},
            {"c3b", r.c3b},
            {"p3_support", r.p3_support},
            {"c4", r.c4},
            {"overlap_N", r.overlap_N},
            {"p6_radius_ratio", r.p6_radius_ratio},
            {"radius_ratio_min", r.radius_ratio_min},
            {"radius_ratio_max", r.radius_ratio_max},
            {"p7_3B_meets_F", r.p7_3B_meets_F},
            {"omega_in_2B", r.omega_in_2B},
            {"edge_identity_residual", r.edge_identity_residual},
            {"all_pass", r.all_pass},
            {"context", r.context}};
}

json to_json(const CoveringReport& r) {
    return {{"all_admissible", r.all_admissible},
            {"covers", r.covers},
            {"partition_sums_to_one", r.partition_sums_to_one},
            {"partition_residual", r.partition_residual},
            {"overlap_N", r.overlap_N},
            {"grad_chi_bound", r.grad_chi_bound},
            {"radius_band", r.radius_band},
            {"fourteen_B_remote", r.fourteen_B_remote},
            {"pass", r.pass},
            {"context", r.context}};
}

json to_json(const LeibnizReport& r) {
    return {{"max_per_ball_constant", r.max_per_ball_constant},
            {"aggregate_constant", r.aggregate_constant},
            {"overlap_bound", r.overlap_bound},
            {"balls_used", r.balls_used}};
}

json to_json(const AssemblyDetail& d) {
    return {{"hardy_sum", d.hardy_sum},
            {"grad_norm", d.grad_norm},
            {"diag_sum", d.diag_sum},
            {"offdiag_T_sum", d.offdiag_T_sum},
            {"offdiag_U_sum", d.offdiag_U_sum},
            {"lhs", d.lhs},
            {"pipeline_ratio", d.pipeline_ratio},
            {"direct_ratio", d.direct_ratio},
            {"radius_pointwise_constant", d.radius_pointwise_constant}};
}

json to_json(const QuadratureReport& r) {
    return {{"eps", r.eps},
            {"R", r.R},
            {"nodes", r.nodes},
            {"truncation_bound", r.truncation_bound},
            {"warned", r.warned}};
}

json to_json(const InequalityEstimate& e, const std::string& witness_file) {
    return {{"tag", to_string(e.tag)},
            {"p", e.p},
            {"q", e.q},
            {"constant", e.constant},
            {"method", to_string(e.method)},
            {"witness_file", witness_file},
            {"context", e.context}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace rlab
