#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

#include "rlab/graph.hpp"

namespace rlab {

// OpenMP kernels for the hot loops, each with a serial reference kept for
// testing; tools/bench_kernels compares the two. Parallel variants produce
// bitwise-identical results to the serial ones (per-row/per-source work is
// independent and merged in a fixed order).

Eigen::VectorXd spmv_parallel(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x);
Eigen::VectorXd spmv_serial(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x);

/// Shortest-path rows from several sources.
std::vector<std::vector<double>> multi_source_distances(const WeightedGraph& g,
                                                        const std::vector<vid>& sources);
std::vector<std::vector<double>> multi_source_distances_serial(const WeightedGraph& g,
                                                               const std::vector<vid>& sources);

}  // namespace rlab
