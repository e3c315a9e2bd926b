#include "chpctl/dispatch.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace chpctl {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& A, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cutoff = rel_tol * sv(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::VectorXd solve_E1(const DhsMatrices& dm, const Eigen::VectorXd& hbar_p,
                         const Eigen::VectorXd& h_load, double* lambda_out) {
  const int n_G = static_cast<int>(dm.f_src.size());
  // Balance feasibility: total source heat must cover load minus HP heat.
  const double net = h_load.sum() - hbar_p.sum();
  if (n_G == 0) {
    if (std::abs(net) > 1e-12)
      throw std::runtime_error("dispatch infeasible: no sources but net load " + std::to_string(net));
    return Eigen::VectorXd::Zero(0);
  }
  // Equal marginal cost f_i h_i = lambda, sum h_i = net.
  double inv_sum = dm.f_src.cwiseInverse().sum();
  double lambda = net / inv_sum;
  if (lambda_out) *lambda_out = lambda;
  return lambda * dm.f_src.cwiseInverse();
}

void solve_E2(const DhsMatrices& dm, const Eigen::VectorXd& h_g,
              const Eigen::VectorXd& hbar_p, const Eigen::VectorXd& h_load,
              Eigen::VectorXd& T, double& alpha) {
  Eigen::VectorXd b = dm.B1 * h_g + dm.B2 * hbar_p + dm.load_map * h_load;
  Eigen::MatrixXd a_pinv = pseudo_inverse(dm.A);
  Eigen::VectorXd t0 = a_pinv * b;
  const Eigen::VectorXd& fd = dm.FD;
  alpha = -(fd.dot(t0)) / fd.sum();
  T = t0.array() + alpha;
}

DispatchSolution solve_dispatch(const DhsMatrices& dm, const Eigen::VectorXd& hbar_p,
                                const Eigen::VectorXd& h_load) {
  DispatchSolution sol;
  sol.h_g = solve_E1(dm, hbar_p, h_load, &sol.lambda);
  solve_E2(dm, sol.h_g, hbar_p, h_load, sol.T, sol.alpha);
  return sol;
}

OptimalityReport check_optimality(const DhsMatrices& dm, const Eigen::VectorXd& T,
                                  const Eigen::VectorXd& h_g, double tol) {
  OptimalityReport rep;
  if (dm.FM.rows() > 0) rep.marginal_residual = (dm.FM * h_g).cwiseAbs().maxCoeff();
  rep.penalty_residual = std::abs(dm.FD.dot(T));
  rep.pass = rep.marginal_residual <= tol && rep.penalty_residual <= tol;
  return rep;
}

}  // namespace chpctl
