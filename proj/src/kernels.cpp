#include "rlab/kernels.hpp"

namespace rlab {

Eigen::VectorXd spmv_parallel(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x) {
    const int n = static_cast<int>(A.rows());
    Eigen::VectorXd y(n);
    const int* outer = A.outerIndexPtr();
    const int* inner = A.innerIndexPtr();
    const double* vals = A.valuePtr();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = outer[i]; k < outer[i + 1]; ++k) acc += vals[k] * x[inner[k]];
        y[i] = acc;
    }
    return y;
}

Eigen::VectorXd spmv_serial(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x) {
    const int n = static_cast<int>(A.rows());
    Eigen::VectorXd y(n);
    const int* outer = A.outerIndexPtr();
    const int* inner = A.innerIndexPtr();
    const double* vals = A.valuePtr();
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = outer[i]; k < outer[i + 1]; ++k) acc += vals[k] * x[inner[k]];
        y[i] = acc;
    }
    return y;
}

std::vector<std::vector<double>> multi_source_distances(const WeightedGraph& g,
                                                        const std::vector<vid>& sources) {
    std::vector<std::vector<double>> rows(sources.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(sources.size()); ++i)
        g.distances_into(sources[i], rows[i]);
    return rows;
}

std::vector<std::vector<double>> multi_source_distances_serial(const WeightedGraph& g,
                                                               const std::vector<vid>& sources) {
    std::vector<std::vector<double>> rows(sources.size());
    for (size_t i = 0; i < sources.size(); ++i) g.distances_into(sources[i], rows[i]);
    return rows;
}

}  // namespace rlab
