#pragma once

#include <Eigen/Dense>

#include "chpctl/matrices.hpp"

namespace chpctl {

/// Steady-state economic dispatch solution: equal-marginal-cost heat split
/// and the zero-mean-penalty temperature profile.
struct DispatchSolution {
  Eigen::VectorXd h_g;  // h^G*, MW per source
  Eigen::VectorXd T;    // T*, K deviations
  double alpha = 0.0;   // uniform temperature shift of E2
  double lambda = 0.0;  // marginal cost f_i h_i at the optimum
};

struct OptimalityReport {
  double marginal_residual = 0.0;  // ||F^M h^G||_inf
  double penalty_residual = 0.0;   // |1' F^D T|
  bool pass = false;
};

/// E1: min 1/2 h' F^G h subject to total heat balance. Closed-form KKT
/// solution h_i = lambda / f_i. Throws std::runtime_error when no source can
/// absorb a nonzero net load.
Eigen::VectorXd solve_E1(const DhsMatrices& dm, const Eigen::VectorXd& hbar_p,
                         const Eigen::VectorXd& h_load, double* lambda_out = nullptr);

/// E2: T = A^+ b + alpha 1 with alpha minimizing the F^D-weighted norm.
void solve_E2(const DhsMatrices& dm, const Eigen::VectorXd& h_g,
              const Eigen::VectorXd& hbar_p, const Eigen::VectorXd& h_load,
              Eigen::VectorXd& T, double& alpha);

DispatchSolution solve_dispatch(const DhsMatrices& dm, const Eigen::VectorXd& hbar_p,
                                const Eigen::VectorXd& h_load);

OptimalityReport check_optimality(const DhsMatrices& dm, const Eigen::VectorXd& T,
                                  const Eigen::VectorXd& h_g, double tol);

/// Moore-Penrose pseudoinverse with singular values below
/// 1e-10 * sigma_max treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& A, double rel_tol = 1e-10);

}  // namespace chpctl
