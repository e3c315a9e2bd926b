#include "chpctl/dhs.hpp"

#include <Eigen/Eigenvalues>

namespace chpctl {

Eigen::VectorXd DhsState::pack() const {
  Eigen::VectorXd v(T.size() + xi.size());
  v << T, xi;
  return v;
}

DhsState DhsState::unpack(const Eigen::VectorXd& v, int n_x) {
  DhsState s;
  s.T = v.head(n_x);
  s.xi = v.tail(v.size() - n_x);
  return s;
}

DhsState DhsState::zero(int n_x, int n_G) {
  DhsState s;
  s.T = Eigen::VectorXd::Zero(n_x);
  s.xi = Eigen::VectorXd::Zero(n_G);
  return s;
}

Eigen::VectorXd DhsModel::derivative(const DhsState& x, const Eigen::VectorXd& h_g,
                                     const Eigen::VectorXd& omega_hp,
                                     const Eigen::VectorXd& w_h) const {
  return cm_.A_aug * x.pack() + cm_.B_aug * h_g + cm_.B_cl_omega * omega_hp + cm_.B_cl_h * w_h;
}

Eigen::VectorXd DhsModel::output_pH(const DhsState& x, const Eigen::VectorXd& omega_hp,
                                    const RegulatorGain& k) const {
  Eigen::VectorXd xv = x.pack();
  return cm_.gamma_e.cwiseProduct(omega_hp) + cm_.S_C * xv - cm_.S_D * (k.K * xv);
}

void DhsModel::error_signal(const Eigen::VectorXd& T, const Eigen::VectorXd& h_g,
                            Eigen::VectorXd& e, double& sig_h) const {
  e = cm_.dhs.C * T + cm_.dhs.D * h_g;
  sig_h = (cm_.dhs.s_T * e)(0);
}

ClosedLoopDhs DhsModel::closed_loop(const RegulatorGain& k) const {
  ClosedLoopDhs cl;
  cl.A_cl = cm_.A_aug - cm_.B_aug * k.K;
  cl.C_y = cm_.S_C - cm_.S_D * k.K;
  cl.B_cl_omega = cm_.B_cl_omega;
  cl.B_cl_h = cm_.B_cl_h;
  cl.gamma_e = cm_.gamma_e;
  cl.spectral_abscissa = spectral_abscissa(cl.A_cl);
  cl.hurwitz = cl.spectral_abscissa < 0.0;
  return cl;
}

double spectral_abscissa(const Eigen::MatrixXd& A) {
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return es.eigenvalues().real().maxCoeff();
}

}  // namespace chpctl
