#pragma once

#include <Eigen/Dense>

#include "chpctl/matrices.hpp"

namespace chpctl {

/// Augmented DHS state x = [T; xi].
struct DhsState {
  Eigen::VectorXd T;   // temperature deviations, n_x
  Eigen::VectorXd xi;  // error integrators, n_G

  Eigen::VectorXd pack() const;
  static DhsState unpack(const Eigen::VectorXd& v, int n_x);
  static DhsState zero(int n_x, int n_G);
};

/// Temperature regulator h^G = -K x, partitioned K = [K_T, K_I].
struct RegulatorGain {
  Eigen::MatrixXd K;  // n_G x (n_x + n_G)

  Eigen::MatrixXd K_T(int n_x) const { return K.leftCols(n_x); }
  Eigen::MatrixXd K_I(int n_x) const { return K.rightCols(K.cols() - n_x); }
};

struct ClosedLoopDhs {
  Eigen::MatrixXd A_cl;
  Eigen::MatrixXd C_y;         // S_C - S_D K
  Eigen::MatrixXd B_cl_omega;
  Eigen::MatrixXd B_cl_h;
  Eigen::VectorXd gamma_e;
  double spectral_abscissa = 0.0;
  bool hurwitz = false;
};

class DhsModel {
 public:
  explicit DhsModel(const CoupledMatrices& cm) : cm_(cm) {}

  /// Augmented open-loop vector field x_dot = A_aug x + B_aug h^G
  ///                                        + B_cl^(w) w^HP + B_cl^(h) w^h.
  Eigen::VectorXd derivative(const DhsState& x, const Eigen::VectorXd& h_g,
                             const Eigen::VectorXd& omega_hp,
                             const Eigen::VectorXd& w_h) const;

  /// HP power draw p^H = gamma^E w^HP + (S_C - S_D K) x.
  Eigen::VectorXd output_pH(const DhsState& x, const Eigen::VectorXd& omega_hp,
                            const RegulatorGain& k) const;

  /// Tracking error e = [F^M h^G; 1' F^D T] and its Sig^H component.
  void error_signal(const Eigen::VectorXd& T, const Eigen::VectorXd& h_g,
                    Eigen::VectorXd& e, double& sig_h) const;

  ClosedLoopDhs closed_loop(const RegulatorGain& k) const;

  const CoupledMatrices& coupled() const { return cm_; }

 private:
  CoupledMatrices cm_;
};

/// Spectral abscissa max Re lambda(A).
double spectral_abscissa(const Eigen::MatrixXd& A);

}  // namespace chpctl
