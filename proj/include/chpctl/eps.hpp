#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "chpctl/config.hpp"

namespace chpctl {

/// Deviation-model state of the electric power system. Angles are relative
/// to the reference bus, which is ordered last.
struct EpsState {
  Eigen::VectorXd x_theta;  // n_bus - 1
  Eigen::VectorXd omega;    // n_bus
  Eigen::VectorXd pg;       // n_bus
  double g = 0.0;           // AGC integrator

  static EpsState zero(int n_bus);
};

struct SprBusReport {
  int bus_id = 0;
  double margin = 0.0;       // min over grid and endpoints of Re G_i(jw)
  double minimizer = 0.0;    // rad/s where the grid minimum was attained
  bool analytic_used = false;
};

struct SprReport {
  std::vector<SprBusReport> buses;
  double grid_min = 0.0;  // min_i margin
  bool pass = false;
};

/// Swing + governor + AGC dynamics with the nonlinear sine power flow.
class EpsModel {
 public:
  EpsModel(const SystemConfig& cfg, const SystemIndex& idx);

  int n_bus() const { return n_; }
  int n_hp() const { return static_cast<int>(hp_bus_.size()); }
  int state_dim() const { return (n_ - 1) + 2 * n_ + 1; }

  /// p_h: HP power draw per coupling (MW, pu base); p_l: per-bus load deviation.
  EpsState derivative(const EpsState& s, const Eigen::VectorXd& p_h,
                      const Eigen::VectorXd& p_l) const;

  /// Net electric power P_i flowing out of every bus (sine flow minus load).
  Eigen::VectorXd power_flow(const EpsState& s, const Eigen::VectorXd& p_l) const;

  /// G_i(s) = D_i + K^P_i/(T_g s + 1) [+ K^I/(s(T_g s + 1)) at the reference].
  /// Throws std::domain_error when s hits a pole.
  std::complex<double> transfer_Gi(int bus_pos, std::complex<double> s) const;

  /// Assumption-2 admissibility: strict positive realness of each G_i over a
  /// log grid plus the analytic w->0 / w->inf limits.
  SprReport spr_check(double w_min = 1e-4, double w_max = 1e4,
                      int points_per_decade = 50) const;

  /// Linearization at the origin of the deviation model; input u1 = -p^H on
  /// HP buses, output y1 = omega^HP.
  void linearize(Eigen::MatrixXd& A, Eigen::MatrixXd& B, Eigen::MatrixXd& C) const;

  Eigen::VectorXd pack(const EpsState& s) const;
  EpsState unpack(const Eigen::VectorXd& v) const;

  /// Scatters per-HP power draws onto full bus vectors.
  Eigen::VectorXd scatter_hp(const Eigen::VectorXd& p_h) const;
  Eigen::VectorXd omega_hp(const EpsState& s) const;

  const std::vector<int>& hp_bus_positions() const { return hp_bus_; }
  const std::vector<int>& bus_ids() const { return bus_ids_; }
  double agc_gain() const { return k_i_; }

  Eigen::VectorXd inertia() const { return m_; }
  Eigen::VectorXd damping() const { return d_; }
  Eigen::VectorXd gov_time() const { return tg_; }
  Eigen::VectorXd droop() const { return kp_; }

 private:
  int n_ = 0;
  Eigen::VectorXd m_, d_, tg_, kp_;
  double k_i_ = 0.0;
  std::vector<int> bus_ids_;
  std::vector<int> hp_bus_;
  struct Line {
    int a, b;
    double w;  // |B_ab| V_a V_b
  };
  std::vector<Line> lines_;
};

}  // namespace chpctl
