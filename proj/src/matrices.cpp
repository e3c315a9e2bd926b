#include "chpctl/matrices.hpp"

#include <cmath>
#include <map>

namespace chpctl {

void build_kirchhoff(const SystemConfig& cfg, const SystemIndex& idx,
                     Eigen::MatrixXd& A_h, Eigen::VectorXd& volumes) {
  const int n_x = idx.n_x();
  A_h = Eigen::MatrixXd::Zero(n_x, n_x);
  volumes = Eigen::VectorXd::Zero(n_x);

  for (const auto& e : cfg.edges) {
    int j = idx.edge_state.at(e.id);
    int k = idx.node_state.at(e.upstream_node);
    A_h(j, j) += e.flow;
    A_h(j, k) -= e.flow;
    volumes(j) = e.volume;
    // The edge discharges into its downstream node.
    int m = idx.node_state.at(e.into_node);
    A_h(m, m) += e.flow;
    A_h(m, j) -= e.flow;
  }
  for (const auto& n : cfg.nodes) volumes(idx.node_state.at(n.id)) = n.volume;

  // Column sums vanish iff every node is hydraulically balanced.
  double scale = A_h.cwiseAbs().maxCoeff();
  Eigen::RowVectorXd colsum = Eigen::RowVectorXd::Ones(n_x) * A_h;
  for (const auto& n : cfg.nodes) {
    int k = idx.node_state.at(n.id);
    if (std::abs(colsum(k)) > 1e-9 * std::max(scale, 1e-300))
      throw ConfigError("node " + std::to_string(n.id) +
                        " hydraulic imbalance: Kirchhoff column sum " + std::to_string(colsum(k)));
  }
}

void build_error_maps(const Eigen::VectorXd& f_src, const Eigen::VectorXd& FD,
                      Eigen::MatrixXd& C, Eigen::MatrixXd& D, Eigen::MatrixXd& FM,
                      Eigen::RowVectorXd& s_T) {
  const int n_G = static_cast<int>(f_src.size());
  const int n_x = static_cast<int>(FD.size());
  if (n_G < 1) throw ConfigError("error maps need at least one source");

  FM = Eigen::MatrixXd::Zero(n_G - 1, n_G);
  for (int i = 0; i + 1 < n_G; ++i) {
    FM(i, i) = f_src(i);
    FM(i, i + 1) = -f_src(i + 1);
  }
  C = Eigen::MatrixXd::Zero(n_G, n_x);
  C.row(n_G - 1) = FD.transpose();
  D = Eigen::MatrixXd::Zero(n_G, n_G);
  D.topRows(n_G - 1) = FM;
  s_T = Eigen::RowVectorXd::Zero(n_G);
  s_T(n_G - 1) = 1.0;
}

DhsMatrices build_dhs_matrices(const SystemConfig& cfg, const SystemIndex& idx) {
  DhsMatrices dm;
  build_kirchhoff(cfg, idx, dm.A_h, dm.volumes);

  const int n_x = idx.n_x();
  const int n_G = idx.n_src;
  const int n_HP = idx.n_hp;
  const int n_L = idx.n_load;

  Eigen::VectorXd vinv = dm.volumes.cwiseInverse();
  dm.A = vinv.asDiagonal() * dm.A_h;

  // Heat enters in MW; rho*cp converts to K/s: [MW] * 1e6 / (rho cp V).
  const double heat_scale = 1e6 / (cfg.constants.rho * cfg.constants.cp);
  dm.B1 = Eigen::MatrixXd::Zero(n_x, n_G);
  for (int g = 0; g < n_G; ++g) {
    int j = idx.edge_state.at(idx.source_edges[g]);
    dm.B1(j, g) = heat_scale / dm.volumes(j);
  }
  dm.B2 = Eigen::MatrixXd::Zero(n_x, n_HP);
  for (int k = 0; k < n_HP; ++k) {
    int j = idx.edge_state.at(idx.hp_edges[k]);
    dm.B2(j, k) = heat_scale / dm.volumes(j);
  }
  dm.load_map = Eigen::MatrixXd::Zero(n_x, n_L);
  for (int l = 0; l < n_L; ++l) {
    int j = idx.edge_state.at(idx.load_edges[l]);
    dm.load_map(j, l) = -heat_scale / dm.volumes(j);
  }

  dm.FD = Eigen::VectorXd::Constant(n_x, cfg.costs.temp_penalty_default);
  for (const auto& [id, v] : cfg.costs.edge_penalty) dm.FD(idx.edge_state.at(id)) = v;
  for (const auto& [id, v] : cfg.costs.node_penalty) dm.FD(idx.node_state.at(id)) = v;

  dm.f_src = Eigen::VectorXd::Zero(n_G);
  for (int g = 0; g < n_G; ++g) dm.f_src(g) = cfg.costs.source_cost.at(idx.source_edges[g]);

  build_error_maps(dm.f_src, dm.FD, dm.C, dm.D, dm.FM, dm.s_T);
  return dm;
}

CoupledMatrices build_coupled_matrices(const SystemConfig& cfg) {
  CoupledMatrices cm;
  cm.idx = build_index(cfg);
  cm.dhs = build_dhs_matrices(cfg, cm.idx);

  const int n_x = cm.idx.n_x();
  const int n_G = cm.idx.n_src;
  const int n_HP = cm.idx.n_hp;

  cm.cop = Eigen::VectorXd::Zero(n_HP);
  cm.gamma_e = Eigen::VectorXd::Zero(n_HP);
  cm.gamma_h = Eigen::VectorXd::Zero(n_HP);
  {
    auto hps = cfg.hps;
    std::sort(hps.begin(), hps.end(), [](auto& a, auto& b) { return a.id < b.id; });
    for (int k = 0; k < n_HP; ++k) {
      cm.cop(k) = hps[k].cop;
      cm.gamma_e(k) = hps[k].gain_e;
      cm.gamma_h(k) = hps[k].gain_h;
    }
  }

  const auto& dm = cm.dhs;
  // B_s routes the broadcast Sig^H component of e back into the HP edges.
  Eigen::VectorXd b2_coph = dm.B2 * (cm.cop.cwiseProduct(cm.gamma_h));
  cm.B_s = b2_coph * dm.s_T;                                   // n_x x n_G
  cm.B_omega = dm.B2 * (cm.cop.cwiseProduct(cm.gamma_e)).asDiagonal();
  cm.A_e = -dm.A + cm.B_s * dm.C;
  cm.B_e = dm.B1 + cm.B_s * dm.D;

  cm.S_C = Eigen::MatrixXd::Zero(n_HP, n_x + n_G);
  cm.S_C.leftCols(n_x) = cm.gamma_h * (dm.s_T * dm.C);
  cm.S_D = cm.gamma_h * (dm.s_T * dm.D);

  cm.A_aug = Eigen::MatrixXd::Zero(n_x + n_G, n_x + n_G);
  cm.A_aug.topLeftCorner(n_x, n_x) = cm.A_e;
  cm.A_aug.bottomLeftCorner(n_G, n_x) = dm.C;
  cm.B_aug = Eigen::MatrixXd::Zero(n_x + n_G, n_G);
  cm.B_aug.topRows(n_x) = cm.B_e;
  cm.B_aug.bottomRows(n_G) = dm.D;
  cm.B_cl_omega = Eigen::MatrixXd::Zero(n_x + n_G, n_HP);
  cm.B_cl_omega.topRows(n_x) = cm.B_omega;
  cm.B_cl_h = Eigen::MatrixXd::Zero(n_x + n_G, n_x);
  cm.B_cl_h.topRows(n_x) = Eigen::MatrixXd::Identity(n_x, n_x);
  return cm;
}

}  // namespace chpctl
