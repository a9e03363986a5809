#pragma once

#include <Eigen/Dense>

namespace riemann_accel {

/// Symmetric part (M + M^T) / 2.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m);

/// Applies a scalar function to the spectrum of a symmetric matrix. The
/// result is re-symmetrized.
template <typename F>
Eigen::MatrixXd apply_spectral(const Eigen::MatrixXd& sym, F&& fn) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(sym));
  Eigen::VectorXd mapped = eig.eigenvalues().unaryExpr(fn);
  Eigen::MatrixXd out =
      eig.eigenvectors() * mapped.asDiagonal() * eig.eigenvectors().transpose();
  return symmetrize(out);
}

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& sym);
/// Requires a positive definite argument.
Eigen::MatrixXd sym_log(const Eigen::MatrixXd& spd);
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& spd);
Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& spd);

/// Square root and inverse square root from one eigendecomposition.
struct SqrtPair {
  Eigen::MatrixXd sqrt;
  Eigen::MatrixXd inv_sqrt;
};
SqrtPair sym_sqrt_pair(const Eigen::MatrixXd& spd);

}  // namespace riemann_accel
