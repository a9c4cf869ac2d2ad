#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace ratesvol::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column j pairs with values(j)
  int sweeps = 0;
};

/// Cyclic Jacobi rotations for a symmetric matrix. Stops once the off-diagonal
/// Frobenius norm falls below rel_tol * |trace| (or rel_tol * Frobenius norm for a
/// traceless input).
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& symmetric, double rel_tol = 1e-12, int max_sweeps = 100);

/// Householder reduction to upper Hessenberg form (orthogonally similar to the input).
Eigen::MatrixXd hessenberg(const Eigen::MatrixXd& a);

/// All eigenvalues of a general real square matrix via Hessenberg reduction and
/// Francis double-shift QR. Throws NoConvergence after 100*n^2 QR sweeps.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a);

/// Lower-triangular L with L*L^T = a for a symmetric positive semidefinite a.
/// Zero pivots (degenerate directions) yield zero columns.
Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& a, double rel_tol = 1e-12);

/// Largest singular value, i.e. sqrt(max eig(A^T A)).
double spectral_norm(const Eigen::MatrixXd& a);
double frobenius_norm(const Eigen::MatrixXd& a);

/// Solves B S + S B^T = D for S (continuous Lyapunov equation).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& b, const Eigen::MatrixXd& d);

}  // namespace ratesvol::linalg
