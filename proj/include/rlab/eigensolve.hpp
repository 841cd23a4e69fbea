#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <vector>

#include "rlab/graph.hpp"

namespace rlab {

/// Conductance (stiffness) Laplacian A with quadratic form
/// f^T A f = sum_e w_e (f(a) - f(b))^2 = ||grad f||_2^2.
Eigen::SparseMatrix<double> stiffness_matrix(const WeightedGraph& g);

/// Principal submatrix on the sorted index set (Dirichlet restriction).
Eigen::SparseMatrix<double> principal_submatrix(const Eigen::SparseMatrix<double>& A,
                                                const std::vector<int>& keep);

/// All eigenvalues (ascending) of the pencil A f = lambda diag(w) f; dense
/// reference path for small problems.
Eigen::VectorXd pencil_eigs_dense(const Eigen::MatrixXd& A, const Eigen::VectorXd& wdiag);

struct LobpcgOptions {
    int block = 4;
    double tol = 1e-8;       // relative residual on the smallest pair
    int max_iter = 3000;
    const std::vector<Eigen::VectorXd>* constraints = nullptr;  // W-orthogonality
};

struct LobpcgResult {
    double eigenvalue = 0.0;
    Eigen::VectorXd eigenvector;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Smallest eigenvalue of the pencil A f = lambda diag(w) f by LOBPCG with
/// Jacobi preconditioning. A symmetric positive semi-definite, w > 0.
/// Deterministic (fixed starting block, fixed reduction order).
LobpcgResult lobpcg_smallest(const Eigen::SparseMatrix<double>& A,
                             const Eigen::VectorXd& wdiag, const LobpcgOptions& opt = {});

}  // namespace rlab
