#include "rlab/eigensolve.hpp"

#include "rlab/kernels.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlab {

Eigen::SparseMatrix<double> stiffness_matrix(const WeightedGraph& g) {
    const int n = g.size();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(g.edges().size() * 4 + n);
    std::vector<double> diag(n, 0.0);
    for (const Edge& e : g.edges()) {
        trips.emplace_back(e.a, e.b, -e.w);
        trips.emplace_back(e.b, e.a, -e.w);
        diag[e.a] += e.w;
        diag[e.b] += e.w;
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, diag[i]);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return A;
}

Eigen::SparseMatrix<double> principal_submatrix(const Eigen::SparseMatrix<double>& A,
                                                const std::vector<int>& keep) {
    const int n = static_cast<int>(A.rows());
    std::vector<int> pos(n, -1);
    for (int i = 0; i < static_cast<int>(keep.size()); ++i) pos[keep[i]] = i;
    std::vector<Eigen::Triplet<double>> trips;
    for (int col = 0; col < n; ++col) {
        if (pos[col] < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
            if (pos[it.row()] < 0) continue;
            trips.emplace_back(pos[it.row()], pos[col], it.value());
        }
    }
    Eigen::SparseMatrix<double> S(keep.size(), keep.size());
    S.setFromTriplets(trips.begin(), trips.end());
    S.makeCompressed();
    return S;
}

Eigen::VectorXd pencil_eigs_dense(const Eigen::MatrixXd& A, const Eigen::VectorXd& wdiag) {
    // symmetrize with W^{-1/2}: same spectrum, plain symmetric problem
    Eigen::VectorXd wi = wdiag.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd S = wi.asDiagonal() * A * wi.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("pencil_eigs_dense failed");
    return es.eigenvalues();
}

namespace {

// W-orthonormalize the columns of B, dropping near-dependent directions.
// Columns are normalized first so the drop threshold measures angles, not
// scale mismatch between blocks; two SVQB passes keep the roundoff floor low.
Eigen::MatrixXd w_orthonormalize(const Eigen::MatrixXd& B, const Eigen::VectorXd& w) {
    Eigen::MatrixXd M = B;
    for (int c = 0; c < M.cols(); ++c) {
        const double n = std::sqrt(M.col(c).dot(w.cwiseProduct(M.col(c))));
        if (n > 0.0) M.col(c) /= n;
    }
    for (int pass = 0; pass < 2 && M.cols() > 0; ++pass) {
        Eigen::MatrixXd WM = w.asDiagonal() * M;
        Eigen::MatrixXd G = M.transpose() * WM;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
        const double dmax = es.eigenvalues().maxCoeff();
        std::vector<int> keep;
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()[i] > 1e-12 * dmax) keep.push_back(i);
        Eigen::MatrixXd U(G.rows(), keep.size());
        for (size_t i = 0; i < keep.size(); ++i)
            U.col(i) = es.eigenvectors().col(keep[i]) / std::sqrt(es.eigenvalues()[keep[i]]);
        M = M * U;
    }
    return M;
}

}  // namespace

LobpcgResult lobpcg_smallest(const Eigen::SparseMatrix<double>& A,
                             const Eigen::VectorXd& wdiag, const LobpcgOptions& opt) {
    const int n = static_cast<int>(A.rows());
    const int k = std::min(opt.block, n);
    LobpcgResult res;

    Eigen::VectorXd jacobi = A.diagonal().cwiseMax(1e-300).cwiseInverse();
    auto project_constraints = [&](Eigen::MatrixXd& M) {
        if (!opt.constraints) return;
        for (const auto& y : *opt.constraints) {
            const Eigen::VectorXd wy = wdiag.cwiseProduct(y);
            const double yy = y.dot(wy);
            if (yy <= 0.0) continue;
            for (int c = 0; c < M.cols(); ++c) M.col(c) -= (wy.dot(M.col(c)) / yy) * y;
        }
    };

    // deterministic start block
    Eigen::MatrixXd X(n, k);
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < n; ++i) X(i, c) = std::sin(0.37 * (c + 1) * (i + 1) + 0.11 * c);
    project_constraints(X);
    X = w_orthonormalize(X, wdiag);

    Eigen::MatrixXd P(n, 0);
    const double anorm = A.diagonal().maxCoeff();

    for (int it = 0; it < opt.max_iter; ++it) {
        Eigen::MatrixXd AX(n, X.cols());
        for (int c = 0; c < X.cols(); ++c) AX.col(c) = spmv_parallel(A, X.col(c));
        Eigen::MatrixXd WX = wdiag.asDiagonal() * X;

        Eigen::VectorXd theta(X.cols());
        for (int c = 0; c < X.cols(); ++c) theta[c] = X.col(c).dot(AX.col(c));

        // residuals for convergence on the smallest pair (column 0 after Ritz)
        Eigen::MatrixXd Rm = AX - WX * theta.asDiagonal();
        const double scale = (anorm + std::abs(theta[0]) * wdiag.maxCoeff());
        const double rnorm = Rm.col(0).norm() / std::max(scale, 1e-300);
        res.residual = rnorm;
        res.iterations = it;
        if (rnorm < opt.tol && it > 0) {
            res.converged = true;
            res.eigenvalue = theta[0];
            res.eigenvector = X.col(0);
            return res;
        }

        Eigen::MatrixXd Z = jacobi.asDiagonal() * Rm;
        project_constraints(Z);

        Eigen::MatrixXd B(n, X.cols() + Z.cols() + P.cols());
        B << X, Z, P;
        B = w_orthonormalize(B, wdiag);

        Eigen::MatrixXd AB(n, B.cols());
        for (int c = 0; c < B.cols(); ++c) AB.col(c) = spmv_parallel(A, B.col(c));
        Eigen::MatrixXd H = B.transpose() * AB;
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const int kk = std::min<int>(k, es.eigenvalues().size());
        Eigen::MatrixXd Y = es.eigenvectors().leftCols(kk);
        Eigen::MatrixXd Xnew = B * Y;

        // implicit P: the part of the new block outside the previous X
        Eigen::MatrixXd Ytail = Y;
        Ytail.topRows(X.cols()).setZero();
        P = B * Ytail;
        // keep P modest and independent
        if (P.cols() > 0) P = w_orthonormalize(P, wdiag);

        X = std::move(Xnew);
        project_constraints(X);
    }
    // not converged: return the best pair found
    Eigen::VectorXd ax = spmv_parallel(A, X.col(0));
    res.eigenvalue = X.col(0).dot(ax) / X.col(0).dot(wdiag.cwiseProduct(X.col(0)));
    res.eigenvector = X.col(0);
    return res;
}

}  // namespace rlab
