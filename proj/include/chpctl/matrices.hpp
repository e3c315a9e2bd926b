#pragma once

#include <Eigen/Dense>

#include "chpctl/config.hpp"

namespace chpctl {

/// Open-loop DHS operators in the canonical state order
/// [T^G, T^HP, T^L, T^N]. Heat flows are carried in MW; the 1/(rho*cp)
/// conversion is folded into B1, B2 and the load map, so A_h carries only
/// the mass flows q.
struct DhsMatrices {
  Eigen::MatrixXd A_h;       // (n_x x n_x) Kirchhoff matrix, zero row/col sums
  Eigen::VectorXd volumes;   // element volumes, m^3
  Eigen::MatrixXd A;         // V^-1 A_h
  Eigen::MatrixXd B1;        // source injection, n_x x n_G
  Eigen::MatrixXd B2;        // heat pump injection, n_x x n_HP
  Eigen::MatrixXd load_map;  // w^h = load_map * h^L, n_x x n_L
  Eigen::MatrixXd C;         // error map, n_G x n_x
  Eigen::MatrixXd D;         // error map, n_G x n_G
  Eigen::MatrixXd FM;        // bidiagonal marginal-cost matrix, (n_G-1) x n_G
  Eigen::RowVectorXd s_T;    // selects the Sig^H component of e, 1 x n_G
  Eigen::VectorXd FD;        // temperature penalty diagonal, n_x
  Eigen::VectorXd f_src;     // source cost coefficients, n_G
};

/// Coupled operators of the augmented DHS with the heat pump feedback
/// substituted in, plus the HP output map.
struct CoupledMatrices {
  SystemIndex idx;
  DhsMatrices dhs;
  Eigen::VectorXd cop;      // n_HP
  Eigen::VectorXd gamma_e;  // n_HP
  Eigen::VectorXd gamma_h;  // n_HP
  Eigen::MatrixXd A_e;      // -A + B_s C
  Eigen::MatrixXd B_e;      // B1 + B_s D
  Eigen::MatrixXd B_omega;  // B2 CoP gamma_e
  Eigen::MatrixXd B_s;      // B2 CoP gamma_h 1 s_T
  Eigen::MatrixXd S_C;      // n_HP x (n_x + n_G)
  Eigen::MatrixXd S_D;      // n_HP x n_G
  Eigen::MatrixXd A_aug;    // (n_x+n_G)^2
  Eigen::MatrixXd B_aug;    // (n_x+n_G) x n_G
  Eigen::MatrixXd B_cl_omega;  // (n_x+n_G) x n_HP
  Eigen::MatrixXd B_cl_h;      // (n_x+n_G) x n_x

  int n_x() const { return static_cast<int>(A_e.rows()); }
  int n_G() const { return static_cast<int>(B_e.cols()); }
  int n_HP() const { return static_cast<int>(B_omega.cols()); }
  int n_aug() const { return n_x() + n_G(); }
};

/// Assembles the Kirchhoff matrix and the volume diagonal. Throws
/// ConfigError on hydraulic imbalance, naming the offending node.
void build_kirchhoff(const SystemConfig& cfg, const SystemIndex& idx,
                     Eigen::MatrixXd& A_h, Eigen::VectorXd& volumes);

/// Error maps of the dispatch-tracking signal e = C T + D h^G:
/// n_G - 1 marginal-cost rows followed by the temperature-penalty row.
void build_error_maps(const Eigen::VectorXd& f_src, const Eigen::VectorXd& FD,
                      Eigen::MatrixXd& C, Eigen::MatrixXd& D, Eigen::MatrixXd& FM,
                      Eigen::RowVectorXd& s_T);

DhsMatrices build_dhs_matrices(const SystemConfig& cfg, const SystemIndex& idx);

CoupledMatrices build_coupled_matrices(const SystemConfig& cfg);

}  // namespace chpctl
