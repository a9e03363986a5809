#include "riemann_accel/matrix_functions.hpp"

#include <cmath>

namespace riemann_accel {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& sym) {
  return apply_spectral(sym, [](double l) { return std::exp(l); });
}

Eigen::MatrixXd sym_log(const Eigen::MatrixXd& spd) {
  return apply_spectral(spd, [](double l) { return std::log(l); });
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& spd) {
  return apply_spectral(spd, [](double l) { return std::sqrt(l); });
}

Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& spd) {
  return apply_spectral(spd, [](double l) { return 1.0 / std::sqrt(l); });
}

SqrtPair sym_sqrt_pair(const Eigen::MatrixXd& spd) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(spd));
  const Eigen::MatrixXd& q = eig.eigenvectors();
  Eigen::VectorXd root = eig.eigenvalues().cwiseSqrt();
  SqrtPair out;
  out.sqrt = symmetrize(q * root.asDiagonal() * q.transpose());
  out.inv_sqrt = symmetrize(q * root.cwiseInverse().asDiagonal() * q.transpose());
  return out;
}

}  // namespace riemann_accel
